//! F-invariant 7-sets of a fixed cycle type, as unordered choices of orbit
//! classes: m_i distinct classes of degree s_i for each part.

use std::ops::Range;

use num_bigint::BigUint;
use num_traits::One;

use super::{ArcCandidate, ArcError};
use crate::orbits::{orbit_classes, orbit_from_rep, CycleType, OrbitClassIndex};
use crate::plane::{Plane, ProjPoint};

/// The orbit classes feeding one part size of the cycle type.
#[derive(Clone, Debug)]
pub struct OrbitGroup {
    pub multiplicity: u32,
    pub degree: u32,
    pub classes: OrbitClassIndex,
    members: Vec<ProjPoint>,
}

impl OrbitGroup {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    #[inline]
    pub fn members(&self, i: usize) -> &[ProjPoint] {
        let d = self.degree as usize;
        &self.members[i * d..(i + 1) * d]
    }
}

/// Callbacks for a depth-first walk over candidates. Every `push` is matched
/// by a `pop`; returning false from `push` prunes the subtree.
pub trait Visitor {
    fn push(&mut self, orbit: &[ProjPoint]) -> bool;
    fn pop(&mut self);
    fn leaf(&mut self);
}

#[derive(Clone, Debug)]
pub struct CandidateSpace {
    plane: Plane,
    cycle_type: CycleType,
    groups: Vec<OrbitGroup>,
    slots: Vec<usize>,
}

const MAX_SHARDS: usize = 256;

impl CandidateSpace {
    pub fn new(plane: Plane, cycle_type: CycleType) -> Result<Self, ArcError> {
        let l = plane.ctx().extension_degree();
        if l % cycle_type.lcm() != 0 {
            return Err(ArcError::FieldTooSmall { lambda: cycle_type.to_string(), degree: l });
        }
        let mut groups = Vec::new();
        let mut slots = Vec::new();
        for (gi, (m, s)) in cycle_type.groups().into_iter().enumerate() {
            let classes = orbit_classes(&plane, s)?;
            let members = classes
                .classes
                .iter()
                .flat_map(|r| orbit_from_rep(&plane, r, s).members)
                .collect();
            groups.push(OrbitGroup { multiplicity: m, degree: s, classes, members });
            slots.extend(std::iter::repeat(gi).take(m as usize));
        }
        Ok(CandidateSpace { plane, cycle_type, groups, slots })
    }

    pub fn for_q(q: u64, cycle_type: CycleType) -> Result<Self, ArcError> {
        let plane = super::plane_for(q, &cycle_type)?;
        Self::new(plane, cycle_type)
    }

    pub fn plane(&self) -> &Plane {
        &self.plane
    }

    pub fn cycle_type(&self) -> &CycleType {
        &self.cycle_type
    }

    pub fn groups(&self) -> &[OrbitGroup] {
        &self.groups
    }

    /// |C_7^λ|: the product of binomials C(#classes, m).
    pub fn candidate_count(&self) -> BigUint {
        self.groups.iter().map(|g| binomial(g.len() as u64, g.multiplicity as u64)).product()
    }

    /// Number of candidates whose first slot uses class `first`.
    fn leaves_under_first(&self, first: usize) -> u128 {
        let g0 = &self.groups[0];
        let mut n = binomial_u128((g0.len() - first - 1) as u128, (g0.multiplicity - 1) as u128);
        for g in &self.groups[1..] {
            n = n.saturating_mul(binomial_u128(g.len() as u128, g.multiplicity as u128));
        }
        n
    }

    fn first_slot_limit(&self) -> usize {
        let g0 = &self.groups[0];
        (g0.len() + 1).saturating_sub(g0.multiplicity as usize)
    }

    pub fn shard_count(&self) -> usize {
        self.first_slot_limit().clamp(1, MAX_SHARDS)
    }

    /// Shards are contiguous ranges of the first slot's class index.
    pub fn shard_range(&self, shard: usize) -> Range<usize> {
        let n = self.first_slot_limit();
        let k = self.shard_count();
        (shard * n / k)..((shard + 1) * n / k)
    }

    /// Unpruned leaf count of a shard, used as its work estimate.
    pub fn shard_cost(&self, shard: usize) -> u64 {
        let total: u128 = self.shard_range(shard).map(|i| self.leaves_under_first(i)).sum();
        total.min(u64::MAX as u128) as u64
    }

    pub fn walk<V: Visitor>(&self, first: Range<usize>, v: &mut V) {
        let mut chosen = Vec::with_capacity(self.slots.len());
        self.rec(0, &first, &mut chosen, v);
    }

    pub fn walk_all<V: Visitor>(&self, v: &mut V) {
        self.walk(0..self.first_slot_limit(), v)
    }

    fn rec<V: Visitor>(&self, slot: usize, first: &Range<usize>, chosen: &mut Vec<usize>, v: &mut V) {
        if slot == self.slots.len() {
            v.leaf();
            return;
        }
        let gi = self.slots[slot];
        let g = &self.groups[gi];
        let start = if slot > 0 && self.slots[slot - 1] == gi { chosen[slot - 1] + 1 } else { 0 };
        let later_same = self.slots[slot + 1..].iter().take_while(|&&x| x == gi).count();
        let end = (g.len() + 1).saturating_sub(later_same + 1);
        let range = if slot == 0 { first.start.max(start)..first.end.min(end) } else { start..end };
        for idx in range {
            if v.push(g.members(idx)) {
                chosen.push(idx);
                self.rec(slot + 1, first, chosen, v);
                chosen.pop();
            }
            v.pop();
        }
    }

    /// Builds the candidate for per-slot class indices.
    pub fn candidate(&self, choice: &[usize]) -> ArcCandidate {
        let orbits: Vec<_> = choice
            .iter()
            .zip(&self.slots)
            .map(|(&i, &gi)| self.groups[gi].classes.orbit(&self.plane, i))
            .collect();
        let points = orbits.iter().flat_map(|o| o.members.iter().copied()).collect();
        ArcCandidate { orbits, cycle_type: self.cycle_type.clone(), points }
    }

    /// Lazy stream of every candidate, each exactly once.
    pub fn iter(&self) -> CandidateIter<'_> {
        self.iter_shard(0..self.first_slot_limit())
    }

    pub fn iter_shard(&self, first: Range<usize>) -> CandidateIter<'_> {
        CandidateIter { space: self, first, state: None, done: false }
    }
}

/// Odometer over per-group combinations; the first slot is restricted to a range.
pub struct CandidateIter<'a> {
    space: &'a CandidateSpace,
    first: Range<usize>,
    state: Option<Vec<usize>>,
    done: bool,
}

impl<'a> CandidateIter<'a> {
    fn initial(&self) -> Option<Vec<usize>> {
        let sp = self.space;
        let mut st = Vec::with_capacity(sp.slots.len());
        for (slot, &gi) in sp.slots.iter().enumerate() {
            let v = if slot == 0 {
                self.first.start
            } else if sp.slots[slot - 1] == gi {
                st[slot - 1] + 1
            } else {
                0
            };
            st.push(v);
        }
        self.valid(&st).then_some(st)
    }

    fn valid(&self, st: &[usize]) -> bool {
        let sp = self.space;
        if st[0] >= self.first.end {
            return false;
        }
        st.iter().zip(&sp.slots).enumerate().all(|(slot, (&v, &gi))| {
            let later = sp.slots[slot + 1..].iter().take_while(|&&x| x == gi).count();
            v + later < sp.groups[gi].len()
        })
    }

    fn advance(&self, st: &mut Vec<usize>) -> bool {
        let sp = self.space;
        let k = st.len();
        for slot in (0..k).rev() {
            st[slot] += 1;
            // reset everything to the right to its least value
            for j in slot + 1..k {
                st[j] = if sp.slots[j - 1] == sp.slots[j] { st[j - 1] + 1 } else { 0 };
            }
            if self.valid(st) {
                return true;
            }
            if slot == 0 {
                return false;
            }
        }
        false
    }
}

impl Iterator for CandidateIter<'_> {
    type Item = ArcCandidate;

    fn next(&mut self) -> Option<ArcCandidate> {
        if self.done {
            return None;
        }
        let next = match self.state.take() {
            None => self.initial(),
            Some(mut st) => self.advance(&mut st).then_some(st),
        };
        match next {
            Some(st) => {
                let c = self.space.candidate(&st);
                self.state = Some(st);
                Some(c)
            }
            None => {
                self.done = true;
                None
            }
        }
    }
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn binomial_u128(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}
