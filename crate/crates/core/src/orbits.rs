//! Frobenius orbits, the strata of points by degree, and cycle types.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::divisors;
use crate::plane::{Plane, PlaneError, ProjPoint, Subplane};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrbitError {
    #[error("point set is not closed under Frobenius")]
    NotInvariant,
    #[error("point set contains repeated points")]
    Repeated,
    #[error("bad partition string {0:?}")]
    BadPartition(String),
    #[error(transparent)]
    Plane(#[from] PlaneError),
}

/// A Frobenius orbit, listed from its least member.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Orbit {
    pub rep: ProjPoint,
    pub degree: u32,
    pub members: Vec<ProjPoint>,
}

impl Orbit {
    pub fn contains(&self, p: &ProjPoint) -> bool {
        self.members.contains(p)
    }
}

pub fn orbit_of(plane: &Plane, a: &ProjPoint) -> Orbit {
    let mut members = vec![*a];
    let mut cur = plane.frobenius_point(a, 1);
    while cur != *a {
        members.push(cur);
        cur = plane.frobenius_point(&cur, 1);
    }
    let start = (0..members.len()).min_by_key(|&i| members[i]).unwrap();
    members.rotate_left(start);
    Orbit { rep: members[0], degree: members.len() as u32, members }
}

/// Orbit of a point already known to be its orbit's representative.
pub fn orbit_from_rep(plane: &Plane, rep: &ProjPoint, degree: u32) -> Orbit {
    let members = (0..degree).map(|i| plane.frobenius_point(rep, i)).collect();
    Orbit { rep: *rep, degree, members }
}

/// Whether `p`, of degree `n`, is the least point of its orbit.
#[inline]
pub fn is_orbit_rep(plane: &Plane, p: &ProjPoint, n: u32) -> bool {
    let mut cur = *p;
    for _ in 1..n {
        cur = plane.frobenius_point(&cur, 1);
        if cur < *p {
            return false;
        }
    }
    true
}

/// Degree test for a point of P²(GF(q^n)): not fixed by F^(n/r) for any prime r | n.
#[inline]
pub fn has_degree(plane: &Plane, p: &ProjPoint, n: u32) -> bool {
    maximal_divisors(n).all(|d| plane.frobenius_point(p, d) != *p)
}

fn maximal_divisors(n: u32) -> impl Iterator<Item = u32> {
    (2..=n).filter(move |&r| n % r == 0 && (2..r).all(|k| r % k != 0)).map(move |r| n / r)
}

/// The points of exact degree `n`, streamed from the subplane P²(GF(q^n)).
#[derive(Clone, Debug)]
pub struct Stratum {
    plane: Plane,
    sub: Subplane,
    n: u32,
}

impl Stratum {
    pub fn degree(&self) -> u32 {
        self.n
    }

    /// Size of the index space that `range` partitions.
    pub fn ambient_len(&self) -> u64 {
        self.sub.len()
    }

    pub fn range(&self, lo: u64, hi: u64) -> impl Iterator<Item = ProjPoint> + '_ {
        self.sub.range(lo, hi).filter(move |p| has_degree(&self.plane, p, self.n))
    }

    pub fn iter(&self) -> impl Iterator<Item = ProjPoint> + '_ {
        self.range(0, self.ambient_len())
    }
}

pub fn stratum(plane: &Plane, n: u32) -> Result<Stratum, OrbitError> {
    let sub = plane.subplane(n)?;
    Ok(Stratum { plane: plane.clone(), sub, n })
}

/// |D_q^n| from |P²(GF(q^n))| minus the lower strata.
pub fn stratum_size_formula(q: u64, n: u32) -> BigUint {
    assert!(n >= 1);
    let qn = BigUint::from(q).pow(n);
    let mut total = &qn * &qn + &qn + BigUint::one();
    for d in divisors(n).filter(|&d| d < n) {
        total -= stratum_size_formula(q, d);
    }
    total
}

/// One representative per orbit of the degree-`n` stratum, in increasing order.
#[derive(Clone, Debug)]
pub struct OrbitClassIndex {
    pub degree: u32,
    pub classes: Vec<ProjPoint>,
}

impl OrbitClassIndex {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn orbit(&self, plane: &Plane, i: usize) -> Orbit {
        orbit_from_rep(plane, &self.classes[i], self.degree)
    }
}

pub fn orbit_classes(plane: &Plane, n: u32) -> Result<OrbitClassIndex, OrbitError> {
    let st = stratum(plane, n)?;
    let classes = st.iter().filter(|p| is_orbit_rep(plane, p, n)).collect();
    Ok(OrbitClassIndex { degree: n, classes })
}

/// A partition, parts kept in decreasing order. The derived order puts the
/// identity type first and the single cycle last.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CycleType {
    parts: Vec<u32>,
}

impl CycleType {
    pub fn from_parts(mut parts: Vec<u32>) -> Result<Self, OrbitError> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(OrbitError::BadPartition(format!("{parts:?}")));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(CycleType { parts })
    }

    pub fn identity(n: u32) -> Self {
        CycleType { parts: vec![1; n as usize] }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn n(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn is_identity(&self) -> bool {
        self.parts.iter().all(|&s| s == 1)
    }

    /// (multiplicity, part size) pairs, part sizes decreasing.
    pub fn groups(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = Vec::new();
        for &s in &self.parts {
            match out.last_mut() {
                Some((m, t)) if *t == s => *m += 1,
                _ => out.push((1, s)),
            }
        }
        out
    }

    /// Least common multiple of the parts: the degree of the top field.
    pub fn lcm(&self) -> u32 {
        self.parts.iter().fold(1, |acc, &s| num_integer::lcm(acc, s))
    }

    /// Π m! · s^m, the number of labelings under which Frobenius acts as a
    /// fixed permutation of this type.
    pub fn centralizer_order(&self) -> u64 {
        self.groups().iter().map(|&(m, s)| factorial(m) * (s as u64).pow(m)).product()
    }

    /// Π m!, the ordered-versus-unordered factor for choices of orbit classes.
    pub fn multiplicity_factorial(&self) -> u64 {
        self.groups().iter().map(|&(m, _)| factorial(m)).product()
    }

    /// Cycle notation of a representative permutation, e.g. (1234)(56).
    pub fn cycle_notation(&self) -> String {
        if self.is_identity() {
            return "e".to_string();
        }
        let mut out = String::new();
        let mut next = 1;
        for &s in &self.parts {
            if s > 1 {
                out.push('(');
                for k in next..next + s {
                    out.push_str(&k.to_string());
                }
                out.push(')');
            }
            next += s;
        }
        out
    }

    /// All partitions of n in increasing order.
    pub fn all(n: u32) -> Vec<CycleType> {
        let mut out = Vec::new();
        fn rec(left: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<CycleType>) {
            if left == 0 {
                out.push(CycleType { parts: cur.clone() });
                return;
            }
            for s in (1..=left.min(max)).rev() {
                cur.push(s);
                rec(left - s, s, cur, out);
                cur.pop();
            }
        }
        rec(n, n, &mut Vec::new(), &mut out);
        out.sort();
        out
    }
}

fn factorial(m: u32) -> u64 {
    (1..=m as u64).product()
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        f.write_str(&s.join("+"))
    }
}

impl fmt::Debug for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycleType({self})")
    }
}

impl FromStr for CycleType {
    type Err = OrbitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "e" {
            return Ok(CycleType::identity(7));
        }
        let parts: Result<Vec<u32>, _> = t.split('+').map(|x| x.trim().parse::<u32>()).collect();
        match parts {
            Ok(p) => CycleType::from_parts(p).map_err(|_| OrbitError::BadPartition(s.to_string())),
            Err(_) => Err(OrbitError::BadPartition(s.to_string())),
        }
    }
}

impl Serialize for CycleType {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CycleType {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Orbit decomposition of an F-invariant point set.
pub fn orbit_decomposition(plane: &Plane, points: &[ProjPoint]) -> Result<Vec<Orbit>, OrbitError> {
    let set: BTreeSet<ProjPoint> = points.iter().copied().collect();
    if set.len() != points.len() {
        return Err(OrbitError::Repeated);
    }
    let mut seen = BTreeSet::new();
    let mut orbits = Vec::new();
    for p in &set {
        if seen.contains(p) {
            continue;
        }
        let o = orbit_of(plane, p);
        for m in &o.members {
            if !set.contains(m) {
                return Err(OrbitError::NotInvariant);
            }
            seen.insert(*m);
        }
        orbits.push(o);
    }
    Ok(orbits)
}

pub fn cycle_type_of(plane: &Plane, points: &[ProjPoint]) -> Result<CycleType, OrbitError> {
    let orbits = orbit_decomposition(plane, points)?;
    if orbits.is_empty() {
        return Err(OrbitError::BadPartition(String::new()));
    }
    CycleType::from_parts(orbits.iter().map(|o| o.degree).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use num_traits::ToPrimitive;

    fn plane(s: u32, l: u32) -> Plane {
        Plane::new(make_field(2, s, l).unwrap())
    }

    #[test]
    fn parse_and_display() {
        let t: CycleType = "4+2+1".parse().unwrap();
        assert_eq!(t.groups(), vec![(1, 4), (1, 2), (1, 1)]);
        assert_eq!(t.to_string(), "4+2+1");
        assert_eq!(t.cycle_notation(), "(1234)(56)");
        assert_eq!("1+2+4".parse::<CycleType>().unwrap(), t);
        let e: CycleType = "e".parse().unwrap();
        assert_eq!(e.to_string(), "1+1+1+1+1+1+1");
        assert_eq!(e.cycle_notation(), "e");
        assert!("4+0+3".parse::<CycleType>().is_err());
        assert!("x".parse::<CycleType>().is_err());
        assert!("".parse::<CycleType>().is_err());
    }

    #[test]
    fn centralizer_orders() {
        let z = |s: &str| s.parse::<CycleType>().unwrap().centralizer_order();
        assert_eq!(z("e"), 5040);
        assert_eq!(z("2+2+1+1+1"), 48);
        assert_eq!(z("3+3+1"), 18);
        assert_eq!(z("4+2+1"), 8);
        assert_eq!(z("7"), 7);
        // class sizes of S7 sum to 7!
        let total: u64 = CycleType::all(7).iter().map(|t| 5040 / t.centralizer_order()).sum();
        assert_eq!(total, 5040);
    }

    #[test]
    fn partitions_of_seven() {
        let all = CycleType::all(7);
        assert_eq!(all.len(), 15);
        assert!(all[0].is_identity());
        assert_eq!(all[14].to_string(), "7");
        assert_eq!(all.iter().map(|t| t.lcm()).max(), Some(12));
    }

    #[test]
    fn strata_sizes_q2() {
        let p = plane(1, 7);
        assert_eq!(stratum(&p, 1).unwrap().iter().count(), 7);
        assert_eq!(stratum(&p, 7).unwrap().iter().count(), 16506);
        let p6 = plane(1, 6);
        for n in [1, 2, 3, 6] {
            let direct = stratum(&p6, n).unwrap().iter().count() as u64;
            assert_eq!(direct, stratum_size_formula(2, n).to_u64().unwrap());
        }
        assert!(stratum(&p6, 4).is_err());
    }

    #[test]
    fn class_counts_q2() {
        let p = plane(1, 6);
        assert_eq!(orbit_classes(&p, 2).unwrap().len(), 7);
        assert_eq!(orbit_classes(&p, 3).unwrap().len(), 22);
        assert_eq!(orbit_classes(&plane(1, 7), 7).unwrap().len(), 2358);
    }

    #[test]
    fn orbit_basics() {
        let p = plane(1, 2);
        let o = orbit_of(&p, &ProjPoint([1, 1, 0]));
        assert_eq!(o.degree, 1);
        let o = orbit_of(&p, &ProjPoint([0, 1, 3]));
        assert_eq!(o.members, vec![ProjPoint([0, 1, 2]), ProjPoint([0, 1, 3])]);
        assert!(is_orbit_rep(&p, &ProjPoint([0, 1, 2]), 2));
        assert!(!is_orbit_rep(&p, &ProjPoint([0, 1, 3]), 2));
    }

    #[test]
    fn cycle_type_of_union() {
        let p = plane(1, 4);
        let a = stratum(&p, 4).unwrap().iter().next().unwrap();
        let b = stratum(&p, 2).unwrap().iter().next().unwrap();
        let mut pts = orbit_of(&p, &a).members;
        pts.extend(orbit_of(&p, &b).members);
        pts.push(ProjPoint([0, 0, 1]));
        assert_eq!(cycle_type_of(&p, &pts).unwrap().to_string(), "4+2+1");
        pts.pop();
        pts.pop();
        assert_eq!(cycle_type_of(&p, &pts), Err(OrbitError::NotInvariant));
    }
}
