//! The projective plane P²(GF(q^L)) and its dual.
//!
//! Points and lines are stored as canonical homogeneous triples whose leftmost
//! nonzero coordinate is 1, so projective equality is plain array equality and
//! the derived `Ord` is the lexicographic order of the enumeration.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::field::{divisors, FieldCtx, FieldError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlaneError {
    #[error("the zero triple is not a projective point or line")]
    ZeroTriple,
    #[error("join of a point with itself is undefined")]
    SamePoints,
    #[error("meet of a line with itself is undefined")]
    SameLines,
    #[error("coordinate {0} is outside the field")]
    BadCoordinate(u32),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjPoint(pub [u32; 3]);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjLine(pub [u32; 3]);

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.0;
        write!(f, "({a}:{b}:{c})")
    }
}

impl fmt::Debug for ProjLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.0;
        write!(f, "[{a}:{b}:{c}]")
    }
}

impl ProjPoint {
    pub fn coords(&self) -> [u32; 3] {
        self.0
    }
}

impl ProjLine {
    pub fn coeffs(&self) -> [u32; 3] {
        self.0
    }
}

/// P² over a field context. Cheap to clone.
#[derive(Clone, Debug)]
pub struct Plane {
    ctx: Arc<FieldCtx>,
}

impl Plane {
    pub fn new(ctx: Arc<FieldCtx>) -> Self {
        Plane { ctx }
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    /// Scales a nonzero triple so its leftmost nonzero entry is 1.
    pub fn normalize(&self, raw: [u32; 3]) -> Result<[u32; 3], PlaneError> {
        for &c in &raw {
            if c >= self.ctx.size() {
                return Err(PlaneError::BadCoordinate(c));
            }
        }
        let lead = raw.iter().copied().find(|&c| c != 0).ok_or(PlaneError::ZeroTriple)?;
        if lead == 1 {
            return Ok(raw);
        }
        let s = self.ctx.inv(lead).expect("nonzero");
        Ok(raw.map(|c| self.ctx.mul(c, s)))
    }

    pub fn point(&self, raw: [u32; 3]) -> Result<ProjPoint, PlaneError> {
        self.normalize(raw).map(ProjPoint)
    }

    pub fn line(&self, raw: [u32; 3]) -> Result<ProjLine, PlaneError> {
        self.normalize(raw).map(ProjLine)
    }

    #[inline]
    pub fn cross(&self, u: &[u32; 3], v: &[u32; 3]) -> [u32; 3] {
        let f = &*self.ctx;
        [
            f.sub(f.mul(u[1], v[2]), f.mul(u[2], v[1])),
            f.sub(f.mul(u[2], v[0]), f.mul(u[0], v[2])),
            f.sub(f.mul(u[0], v[1]), f.mul(u[1], v[0])),
        ]
    }

    #[inline]
    pub fn dot(&self, u: &[u32; 3], v: &[u32; 3]) -> u32 {
        let f = &*self.ctx;
        f.add(f.add(f.mul(u[0], v[0]), f.mul(u[1], v[1])), f.mul(u[2], v[2]))
    }

    /// Determinant of the matrix with rows u, v, w.
    #[inline]
    pub fn det(&self, u: &[u32; 3], v: &[u32; 3], w: &[u32; 3]) -> u32 {
        self.dot(u, &self.cross(v, w))
    }

    pub fn join(&self, p: &ProjPoint, p2: &ProjPoint) -> Result<ProjLine, PlaneError> {
        if p == p2 {
            return Err(PlaneError::SamePoints);
        }
        self.line(self.cross(&p.0, &p2.0))
    }

    pub fn meet(&self, l: &ProjLine, l2: &ProjLine) -> Result<ProjPoint, PlaneError> {
        if l == l2 {
            return Err(PlaneError::SameLines);
        }
        self.point(self.cross(&l.0, &l2.0))
    }

    #[inline]
    pub fn incident(&self, p: &ProjPoint, l: &ProjLine) -> bool {
        self.dot(&p.0, &l.0) == 0
    }

    /// Determinant test; coincident points count as collinear.
    #[inline]
    pub fn collinear(&self, a: &ProjPoint, b: &ProjPoint, c: &ProjPoint) -> bool {
        self.det(&a.0, &b.0, &c.0) == 0
    }

    #[inline]
    fn frobenius_triple(&self, t: [u32; 3], i: u32) -> [u32; 3] {
        // 0 and 1 are fixed, so canonical triples stay canonical
        t.map(|c| self.ctx.frobenius(c, i))
    }

    #[inline]
    pub fn frobenius_point(&self, p: &ProjPoint, i: u32) -> ProjPoint {
        ProjPoint(self.frobenius_triple(p.0, i))
    }

    #[inline]
    pub fn frobenius_line(&self, l: &ProjLine, i: u32) -> ProjLine {
        ProjLine(self.frobenius_triple(l.0, i))
    }

    /// Least d with F^d(p) = p, i.e. the degree of the minimal field of definition.
    pub fn point_degree(&self, p: &ProjPoint) -> u32 {
        self.triple_degree(&p.0)
    }

    pub fn line_degree(&self, l: &ProjLine) -> u32 {
        self.triple_degree(&l.0)
    }

    fn triple_degree(&self, t: &[u32; 3]) -> u32 {
        for d in divisors(self.ctx.extension_degree()) {
            if t.iter().all(|&c| self.ctx.frobenius(c, d) == c) {
                return d;
            }
        }
        unreachable!("F^L fixes every point")
    }

    /// P²(GF(q^d)) inside this plane, in enumeration order.
    pub fn subplane(&self, d: u32) -> Result<Subplane, PlaneError> {
        Ok(Subplane { elems: self.ctx.subfield_elements(d)? })
    }

    /// All points of the plane: (0,0,1), then (0,1,a), then (1,a,b).
    pub fn enumerate_plane(&self) -> impl Iterator<Item = ProjPoint> {
        let sub = self.subplane(self.ctx.extension_degree()).expect("L divides L");
        let n = sub.len();
        (0..n).map(move |i| sub.point(i))
    }

    /// Points of the base plane P²(GF(q)).
    pub fn rational_points(&self) -> Vec<ProjPoint> {
        self.subplane(1).expect("1 divides L").iter().collect()
    }
}

/// The points of P²(K) for an intermediate field K, addressable by index in the
/// canonical enumeration order.
#[derive(Clone, Debug)]
pub struct Subplane {
    elems: Vec<u32>,
}

impl Subplane {
    pub fn field_size(&self) -> u64 {
        self.elems.len() as u64
    }

    pub fn elements(&self) -> &[u32] {
        &self.elems
    }

    pub fn len(&self) -> u64 {
        let q = self.field_size();
        q * q + q + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, idx: u64) -> ProjPoint {
        let q = self.field_size();
        if idx == 0 {
            ProjPoint([0, 0, 1])
        } else if idx <= q {
            ProjPoint([0, 1, self.elems[(idx - 1) as usize]])
        } else {
            let j = idx - 1 - q;
            ProjPoint([1, self.elems[(j / q) as usize], self.elems[(j % q) as usize]])
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = ProjPoint> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    pub fn range(&self, lo: u64, hi: u64) -> impl Iterator<Item = ProjPoint> + '_ {
        (lo..hi.min(self.len())).map(move |i| self.point(i))
    }
}
