//! k-arcs of P²(GF(q)) by lexicographic backtracking over bitsets.

use crate::plane::{Plane, ProjPoint};

/// Arc counts by size: `counts[k]` is the number of k-arcs, k ≤ 7.
pub type ArcSizeCounts = [u64; 8];

/// Rational points and, for every pair, the bitset of points on their join.
pub struct RationalArcs {
    points: Vec<ProjPoint>,
    words: usize,
    line_masks: Vec<u64>,
}

impl RationalArcs {
    pub fn new(plane: &Plane) -> Self {
        let points = plane.rational_points();
        let n = points.len();
        let words = n.div_ceil(64);
        let mut line_masks = vec![0u64; n * n * words];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let l = plane.cross(&points[i].0, &points[j].0);
                let base = (i * n + j) * words;
                for (k, p) in points.iter().enumerate() {
                    if plane.dot(&l, &p.0) == 0 {
                        line_masks[base + k / 64] |= 1 << (k % 64);
                    }
                }
            }
        }
        RationalArcs { points, words, line_masks }
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Counts arcs up to size 7 whose least point has index `first`.
    pub fn count_from(&self, first: usize) -> ArcSizeCounts {
        match self.words {
            1 => self.run::<1>(first),
            2 => self.run::<2>(first),
            3..=5 => self.run::<5>(first),
            w => panic!("plane with {w} bitset words is out of range"),
        }
    }

    pub fn count_all(&self) -> ArcSizeCounts {
        let mut out = [0u64; 8];
        for i in 0..self.len() {
            let c = self.count_from(i);
            for k in 0..8 {
                out[k] += c[k];
            }
        }
        out
    }

    fn run<const W: usize>(&self, first: usize) -> ArcSizeCounts {
        let mut counts = [0u64; 8];
        let mut chosen = [0usize; 7];
        chosen[0] = first;
        counts[1] = 1;
        let mut forbidden = [0u64; W];
        forbidden[first / 64] |= 1 << (first % 64);
        self.extend::<W>(1, &mut chosen, &forbidden, &mut counts);
        counts
    }

    fn extend<const W: usize>(
        &self,
        k: usize,
        chosen: &mut [usize; 7],
        forbidden: &[u64; W],
        counts: &mut ArcSizeCounts,
    ) {
        let n = self.len();
        let last = chosen[k - 1];
        for c in last + 1..n {
            if forbidden[c / 64] >> (c % 64) & 1 == 1 {
                continue;
            }
            counts[k + 1] += 1;
            if k + 1 == 7 {
                continue;
            }
            let mut next = *forbidden;
            for &x in &chosen[..k] {
                let base = (x * n + c) * self.words;
                for w in 0..W.min(self.words) {
                    next[w] |= self.line_masks[base + w];
                }
            }
            chosen[k] = c;
            self.extend::<W>(k + 1, chosen, &next, counts);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    #[test]
    fn small_planes() {
        let p2 = Plane::new(make_field(2, 1, 1).unwrap());
        let c = RationalArcs::new(&p2).count_all();
        // 7 points, 21 pairs, 28 triangles, 7 quadrangles, nothing larger
        assert_eq!(c, [0, 7, 21, 28, 7, 0, 0, 0]);
        let p4 = Plane::new(make_field(2, 2, 1).unwrap());
        let c = RationalArcs::new(&p4).count_all();
        assert_eq!(&c[1..5], &[21, 210, 21 * 20 * 16 / 6, 60480 / 24]);
        assert_eq!(c[7], 0);
    }
}
