//! U/Δ censuses for the types admitting Fano planes. Every member of U gets
//! its Δ flags and an independent arc test, so the decomposition lemma is
//! checked pointwise: a member of U fails the arc test iff some flag is set.

use super::space::CandidateSpace;
use super::ArcError;
use crate::fano::{Degree7Scan, Degree7Tally};
use crate::formulas::{lookup, registry_lambda};
use crate::jobs::{run_to_end, ShardedJob};
use crate::orbits::CycleType;
use crate::plane::{Plane, ProjPoint};
use crate::report::CountReport;

/// Incrementally built point set that knows whether it is still an arc.
struct ArcBuilder<'a> {
    plane: &'a Plane,
    points: Vec<[u32; 3]>,
    lines: Vec<[u32; 3]>,
    ok: bool,
}

impl<'a> ArcBuilder<'a> {
    fn new(plane: &'a Plane) -> Self {
        ArcBuilder { plane, points: Vec::with_capacity(7), lines: Vec::with_capacity(21), ok: true }
    }

    fn add(&mut self, p: &ProjPoint) {
        if self.lines.iter().any(|l| self.plane.dot(l, &p.0) == 0) {
            self.ok = false;
        }
        for x in &self.points {
            self.lines.push(self.plane.cross(x, &p.0));
        }
        self.points.push(p.0);
    }

    /// Whether adding `p` would keep the set an arc, without adding it.
    fn accepts(&self, p: &ProjPoint) -> bool {
        self.ok && !self.lines.iter().any(|l| self.plane.dot(l, &p.0) == 0)
    }

    fn snapshot(&self) -> (usize, usize, bool) {
        (self.points.len(), self.lines.len(), self.ok)
    }

    fn restore(&mut self, s: (usize, usize, bool)) {
        self.points.truncate(s.0);
        self.lines.truncate(s.1);
        self.ok = s.2;
    }
}

#[inline]
fn on(plane: &Plane, p: &ProjPoint, l: &[u32; 3]) -> bool {
    plane.dot(l, &p.0) == 0
}

/// Names of the flag intersections reported for each type.
fn flag_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("D{i}")).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Type421,
    Type331,
    Type22111,
    Type7,
}

/// Tally layout: [u, non_arc, violations, extra..., bins(2^flags)].
pub struct DeltaJob {
    q: u64,
    lambda: CycleType,
    kind: Kind,
    space: Option<CandidateSpace>,
    scan: Option<Degree7Scan>,
}

const HEAD: usize = 3;
/// 3+3+1 also keeps unordered totals: [u_any, non_arc_any].
const EXTRA_331: usize = 2;

impl DeltaJob {
    pub fn new(q: u64, lambda: CycleType) -> Result<Self, ArcError> {
        let kind = match lambda.to_string().as_str() {
            "4+2+1" => Kind::Type421,
            "3+3+1" => Kind::Type331,
            "2+2+1+1+1" => Kind::Type22111,
            "7" => Kind::Type7,
            _ => return Err(ArcError::Unsupported(lambda.to_string())),
        };
        let plane = super::plane_for(q, &lambda)?;
        let (space, scan) = if kind == Kind::Type7 {
            (None, Some(Degree7Scan::new(plane)?))
        } else {
            (Some(CandidateSpace::new(plane, lambda.clone())?), None)
        };
        Ok(DeltaJob { q, lambda, kind, space, scan })
    }

    fn flags(&self) -> usize {
        match self.kind {
            Kind::Type421 | Kind::Type331 => 4,
            Kind::Type22111 => 5,
            Kind::Type7 => 2,
        }
    }

    fn extra(&self) -> usize {
        if self.kind == Kind::Type331 {
            EXTRA_331
        } else {
            0
        }
    }

    fn bins_at(&self) -> usize {
        HEAD + self.extra()
    }

    fn census_421(&self, sp: &CandidateSpace, shard: usize, t: &mut [u64]) {
        let plane = sp.plane();
        let g = sp.groups();
        let (g4, g2, g1) = (&g[0], &g[1], &g[2]);
        let bins = self.bins_at();
        for ai in sp.shard_range(shard) {
            let a = g4.members(ai);
            let mut ab = ArcBuilder::new(plane);
            for p in a {
                ab.add(p);
            }
            if !ab.ok {
                continue;
            }
            let l01 = plane.cross(&a[0].0, &a[1].0);
            let l02 = plane.cross(&a[0].0, &a[2].0);
            let base = ab.snapshot();
            for bi in 0..g2.len() {
                let b = g2.members(bi);
                let d1 = on(plane, &b[0], &l01) || on(plane, &b[1], &l01);
                let d2 = on(plane, &b[0], &l02) || on(plane, &b[1], &l02);
                let lbb = plane.cross(&b[0].0, &b[1].0);
                ab.restore(base);
                ab.add(&b[0]);
                ab.add(&b[1]);
                for ci in 0..g1.len() {
                    let c = &g1.members(ci)[0];
                    let d3 = on(plane, c, &l02);
                    let d4 = on(plane, c, &lbb);
                    let mask = d1 as usize | (d2 as usize) << 1 | (d3 as usize) << 2 | (d4 as usize) << 3;
                    let arc = ab.accepts(c);
                    t[0] += 1;
                    t[1] += !arc as u64;
                    t[2] += ((mask == 0) != arc) as u64;
                    t[bins + mask] += 1;
                }
            }
        }
    }

    fn census_331(&self, sp: &CandidateSpace, shard: usize, t: &mut [u64]) {
        let plane = sp.plane();
        let g = sp.groups();
        let (g3, g1) = (&g[0], &g[1]);
        let bins = self.bins_at();
        let collinear3 = |o: &[ProjPoint]| plane.collinear(&o[0], &o[1], &o[2]);
        for ai in sp.shard_range(shard) {
            let a = g3.members(ai);
            let a_line = collinear3(a);
            for bi in ai + 1..g3.len() {
                let b = g3.members(bi);
                let b_line = collinear3(b);
                let mut six = ArcBuilder::new(plane);
                for p in a.iter().chain(b) {
                    six.add(p);
                }
                for ci in 0..g1.len() {
                    let c = &g1.members(ci)[0];
                    let off = |o: &[ProjPoint]| {
                        !plane.collinear(&o[0], &o[1], c)
                            && !plane.collinear(&o[0], &o[2], c)
                            && !plane.collinear(&o[1], &o[2], c)
                    };
                    let ua = !a_line && off(a);
                    let ub = !b_line && off(b);
                    if !(ua || ub) {
                        continue;
                    }
                    let arc = six.accepts(c);
                    t[HEAD] += 1;
                    t[HEAD + 1] += !arc as u64;
                    for (ok, x, y) in [(ua, a, b), (ub, b, a)] {
                        if !ok {
                            continue;
                        }
                        let lx = plane.cross(&x[0].0, &x[1].0);
                        let lxc = plane.cross(&x[0].0, &c.0);
                        let ly = plane.cross(&y[0].0, &y[1].0);
                        let d1 = y.iter().any(|p| on(plane, p, &lx));
                        let d2 = y.iter().any(|p| on(plane, p, &lxc));
                        let d3 = collinear3(y);
                        let d4 = x.iter().any(|p| on(plane, p, &ly));
                        let mask = d1 as usize | (d2 as usize) << 1 | (d3 as usize) << 2 | (d4 as usize) << 3;
                        t[0] += 1;
                        t[1] += !arc as u64;
                        t[2] += ((mask == 0) != arc) as u64;
                        t[bins + mask] += 1;
                    }
                }
            }
        }
    }

    fn census_22111(&self, sp: &CandidateSpace, shard: usize, t: &mut [u64]) {
        let plane = sp.plane();
        let g = sp.groups();
        let (g2, g1) = (&g[0], &g[1]);
        let bins = self.bins_at();
        let pts: Vec<ProjPoint> = (0..g1.len()).map(|i| g1.members(i)[0]).collect();
        let n = pts.len();
        for ai in sp.shard_range(shard) {
            let a = g2.members(ai);
            for bi in ai + 1..g2.len() {
                let b = g2.members(bi);
                let mut ab = ArcBuilder::new(plane);
                for p in a.iter().chain(b) {
                    ab.add(p);
                }
                if !ab.ok {
                    continue;
                }
                let p1 = plane.point(plane.cross(&plane.cross(&a[0].0, &b[0].0), &plane.cross(&a[1].0, &b[1].0)));
                let p2 = plane.point(plane.cross(&plane.cross(&a[0].0, &b[1].0), &plane.cross(&a[1].0, &b[0].0)));
                let (p1, p2) = (p1.expect("distinct lines"), p2.expect("distinct lines"));
                let laa = plane.cross(&a[0].0, &a[1].0);
                let lbb = plane.cross(&b[0].0, &b[1].0);
                let single: Vec<usize> = pts
                    .iter()
                    .map(|c| {
                        (*c == p1) as usize
                            | ((*c == p2) as usize) << 1
                            | (on(plane, c, &laa) as usize) << 2
                            | (on(plane, c, &lbb) as usize) << 3
                    })
                    .collect();
                let base = ab.snapshot();
                for i in 0..n {
                    ab.restore(base);
                    ab.add(&pts[i]);
                    let s1 = ab.snapshot();
                    for j in i + 1..n {
                        ab.restore(s1);
                        ab.add(&pts[j]);
                        let lij = plane.cross(&pts[i].0, &pts[j].0);
                        for k in j + 1..n {
                            let d5 = on(plane, &pts[k], &lij);
                            let mask = single[i] | single[j] | single[k] | (d5 as usize) << 4;
                            let arc = ab.accepts(&pts[k]);
                            t[0] += 1;
                            t[1] += !arc as u64;
                            t[2] += ((mask == 0) != arc) as u64;
                            t[bins + mask] += 1;
                        }
                    }
                }
            }
        }
    }

    fn tally_from_scan(&self, s: &Degree7Tally, t: &mut [u64]) {
        let bins = self.bins_at();
        t[0] += s.orbits;
        t[1] += s.on_line + s.fano;
        t[2] += s.conflicts;
        t[bins] += s.arc;
        t[bins + 1] += s.on_line;
        t[bins + 2] += s.fano;
    }

    /// Builds the per-subset reports from a finished tally.
    pub fn finish(&self, tally: &[u64]) -> DeltaCensus {
        let nf = self.flags();
        let bins = tally[self.bins_at()..].to_vec();
        DeltaCensus {
            q: self.q,
            lambda: self.lambda.clone(),
            flags: flag_names(nf),
            u: tally[0],
            non_arcs: tally[1],
            violations: tally[2],
            bins,
            unordered: (self.kind == Kind::Type331).then(|| (tally[HEAD], tally[HEAD + 1])),
            shard_count: self.shard_count(),
        }
    }
}

impl ShardedJob for DeltaJob {
    fn shard_count(&self) -> usize {
        match (&self.space, &self.scan) {
            (Some(s), _) => s.shard_count(),
            (_, Some(d)) => d.shard_count(),
            _ => unreachable!(),
        }
    }

    fn shard_cost(&self, shard: usize) -> u64 {
        match (&self.space, &self.scan) {
            (Some(s), _) => s.shard_cost(shard).saturating_mul(if self.kind == Kind::Type331 { 2 } else { 1 }),
            (_, Some(d)) => d.shard_cost(shard),
            _ => unreachable!(),
        }
    }

    fn tally_width(&self) -> usize {
        self.bins_at() + (1 << self.flags())
    }

    fn run_shard(&self, shard: usize) -> Vec<u64> {
        let mut t = vec![0u64; self.tally_width()];
        match self.kind {
            Kind::Type421 => self.census_421(self.space.as_ref().unwrap(), shard, &mut t),
            Kind::Type331 => self.census_331(self.space.as_ref().unwrap(), shard, &mut t),
            Kind::Type22111 => self.census_22111(self.space.as_ref().unwrap(), shard, &mut t),
            Kind::Type7 => {
                let s = self.scan.as_ref().unwrap().scan(shard);
                self.tally_from_scan(&s, &mut t);
            }
        }
        t
    }
}

/// Result of a Δ-census: members of U binned by their set of flags.
#[derive(Clone, Debug)]
pub struct DeltaCensus {
    pub q: u64,
    pub lambda: CycleType,
    pub flags: Vec<String>,
    pub u: u64,
    pub non_arcs: u64,
    /// Members of U where "fails the arc test" and "some flag set" disagree.
    pub violations: u64,
    pub bins: Vec<u64>,
    /// 3+3+1 only: (unordered U, unordered non-arcs) where U needs either
    /// degree-3 orbit to form a 4-arc with the rational point.
    pub unordered: Option<(u64, u64)>,
    pub shard_count: usize,
}

impl DeltaCensus {
    /// Members carrying every flag in `mask`.
    pub fn intersection(&self, mask: usize) -> u64 {
        self.bins.iter().enumerate().filter(|(m, _)| m & mask == mask).map(|(_, c)| c).sum()
    }

    /// Members with at least one flag.
    pub fn union(&self) -> u64 {
        self.u - self.bins[0]
    }

    pub fn lemma_holds(&self) -> bool {
        self.violations == 0 && self.union() == self.non_arcs
    }

    fn mask_name(&self, mask: usize) -> String {
        (0..self.flags.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| self.flags[i].clone())
            .collect::<Vec<_>>()
            .join("&")
    }

    /// One report per flag subset, plus U, Delta and U minus Delta.
    pub fn reports(&self) -> Vec<CountReport> {
        let lam = registry_lambda(&self.lambda);
        let labeled = self.unordered.is_some();
        let mk = |name: &str, raw: u64| {
            let mut r = CountReport::new(self.q, &self.lambda, &format!("delta/{name}"), raw);
            r.shard_count = self.shard_count;
            if labeled {
                r = r.detail("labeling", "one designated degree-3 orbit per count");
            }
            r
        };
        let mut out = Vec::new();
        let u_raw = self.unordered.map(|u| u.0).unwrap_or(self.u);
        let d_raw = self.unordered.map(|u| u.1).unwrap_or(self.union());
        let mut u = mk("U", u_raw);
        let mut d = mk("Delta", d_raw);
        if labeled {
            u = u.detail("labeling", "unordered").detail("labeled_count", self.u);
            d = d.detail("labeling", "unordered").detail("labeled_count", self.union());
        }
        for (rep, key) in [(u, "U"), (d, "Delta")] {
            out.push(match lookup(&format!("delta/{lam}/{key}")) {
                Some(e) => rep.compare(e),
                None => rep,
            });
        }
        let b = mk("B", u_raw - d_raw).detail("lemma_violations", self.violations);
        out.push(match lookup(&format!("arcs/{lam}")) {
            Some(e) => b.compare(e),
            None => b,
        });
        for mask in 1..(1usize << self.flags.len()) {
            let name = self.mask_name(mask);
            let r = mk(&name, self.intersection(mask));
            out.push(match lookup(&format!("delta/{lam}/{name}")) {
                Some(e) => r.compare(e),
                None => r,
            });
        }
        out
    }
}

pub fn delta_census(q: u64, lambda: &CycleType) -> Result<DeltaCensus, ArcError> {
    let job = DeltaJob::new(q, lambda.clone())?;
    let tally = run_to_end(&job, super::default_jobs());
    Ok(job.finish(&tally))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ct(s: &str) -> CycleType {
        s.parse().unwrap()
    }

    #[test]
    fn type_421_at_q2() {
        let d = delta_census(2, &ct("4+2+1")).unwrap();
        assert_eq!(d.u, 2058);
        assert!(d.lemma_holds());
        assert_eq!(d.u - d.union(), 336);
        // 8|D1|/|PGL| = 14
        assert_eq!(d.intersection(0b0001) * 8, 14 * 168);
        assert_eq!(d.intersection(0b0011), 0);
        assert_eq!(d.intersection(0b1101) * 8, 2 * 168);
        assert_eq!(d.intersection(0b1110), 0);
    }

    #[test]
    fn type_7_at_q2() {
        let d = delta_census(2, &ct("7")).unwrap();
        assert_eq!(d.u, 2358);
        assert_eq!(d.intersection(0b01), 126);
        assert_eq!(d.intersection(0b10), 48);
        assert_eq!(d.intersection(0b11), 0);
        assert!(d.lemma_holds());
    }

    #[test]
    fn other_types_match_arc_counts() {
        for (s, b) in [("3+3+1", 112), ("2+2+1+1+1", 0)] {
            let d = delta_census(2, &ct(s)).unwrap();
            assert!(d.lemma_holds(), "{s}");
            let (u, n) = d.unordered.unwrap_or((d.u, d.union()));
            assert_eq!(u - n, b, "{s}");
        }
        assert!(delta_census(2, &ct("6+1")).is_err());
    }
}
