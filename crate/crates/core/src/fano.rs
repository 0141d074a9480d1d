//! Fano subplanes: generation from 4-arcs by diagonal points, the Fano
//! predicate, censuses by cycle type, and the single-orbit classification.

use std::collections::HashMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::arcs::space::{CandidateSpace, Visitor};
use crate::arcs::{is_arc, is_n_arc, plane_for, ArcError};
use crate::formulas::{lookup, registry_lambda};
use crate::jobs::{run_to_end, ShardedJob};
use crate::orbits::{cycle_type_of, orbit_from_rep, CycleType, OrbitError};
use crate::plane::{Plane, PlaneError, ProjLine, ProjPoint, Subplane};
use crate::report::CountReport;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FanoError {
    #[error("the four points are not a 4-arc")]
    NotFourArc,
    #[error("Fano planes from diagonal points need characteristic 2, got {0}")]
    NotCharTwo(u32),
    #[error("point set is not a Fano plane")]
    NotFano,
    #[error("expected a point of degree 7, got degree {0}")]
    WrongDegree(u32),
    #[error("inconsistent collinearity pattern on a degree-7 orbit")]
    Inconsistent,
    #[error(transparent)]
    Plane(#[from] PlaneError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Arc(#[from] ArcError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FourArc {
    pub points: [ProjPoint; 4],
}

impl FourArc {
    pub fn new(plane: &Plane, points: [ProjPoint; 4]) -> Result<Self, FanoError> {
        match is_n_arc(plane, &points) {
            Ok(true) => Ok(FourArc { points }),
            _ => Err(FanoError::NotFourArc),
        }
    }

    pub fn cycle_type(&self, plane: &Plane) -> Result<CycleType, FanoError> {
        Ok(cycle_type_of(plane, &self.points)?)
    }
}

/// Seven points and their seven lines, both sorted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FanoPlane {
    pub points: [ProjPoint; 7],
    pub lines: [ProjLine; 7],
}

/// Meets of opposite sides of the complete quadrangle, for the labeling given.
pub fn diagonal_points(plane: &Plane, a: &FourArc) -> Result<[ProjPoint; 3], FanoError> {
    let [p1, p2, p3, p4] = a.points;
    let d = |x: &ProjPoint, y: &ProjPoint, z: &ProjPoint, w: &ProjPoint| -> Result<ProjPoint, FanoError> {
        Ok(plane.meet(&plane.join(x, y)?, &plane.join(z, w)?)?)
    };
    Ok([d(&p1, &p2, &p3, &p4)?, d(&p1, &p3, &p2, &p4)?, d(&p1, &p4, &p2, &p3)?])
}

/// The distinct joins of seven points when they form a Fano plane.
pub fn fano_lines(plane: &Plane, points: &[ProjPoint]) -> Option<[ProjLine; 7]> {
    if points.len() != 7 {
        return None;
    }
    let mut sorted = points.to_vec();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != 7 {
        return None;
    }
    let mut lines = Vec::with_capacity(21);
    for i in 0..7 {
        for j in i + 1..7 {
            lines.push(plane.join(&sorted[i], &sorted[j]).ok()?);
        }
    }
    lines.sort();
    lines.dedup();
    if lines.len() != 7 {
        return None;
    }
    for l in &lines {
        if sorted.iter().filter(|p| plane.incident(p, l)).count() != 3 {
            return None;
        }
    }
    Some(lines.try_into().expect("seven lines"))
}

pub fn is_fano(plane: &Plane, points: &[ProjPoint]) -> bool {
    fano_lines(plane, points).is_some()
}

/// P_A = A together with its diagonal points.
pub fn generate_fano(plane: &Plane, a: &FourArc) -> Result<FanoPlane, FanoError> {
    let p = plane.ctx().characteristic();
    if p != 2 {
        return Err(FanoError::NotCharTwo(p));
    }
    let diag = diagonal_points(plane, a)?;
    let mut points: Vec<ProjPoint> = a.points.iter().chain(&diag).copied().collect();
    points.sort();
    let lines = fano_lines(plane, &points).ok_or(FanoError::NotFano)?;
    Ok(FanoPlane { points: points.try_into().expect("seven points"), lines })
}

pub fn fano_cycle_type(plane: &Plane, f: &FanoPlane) -> Result<CycleType, FanoError> {
    Ok(cycle_type_of(plane, &f.points)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orbit7Class {
    Arc,
    Fano,
    OnLine,
}

/// Collinearity of the five orbit representatives of triples in a 7-cycle:
/// {0,1,2}, {0,1,4}, {0,2,4}, {0,1,3}, {0,1,5}.
#[inline]
fn heptad_pattern(plane: &Plane, o: &[[u32; 3]; 7]) -> [bool; 5] {
    let c = |i: usize, j: usize, k: usize| plane.det(&o[i], &o[j], &o[k]) == 0;
    [c(0, 1, 2), c(0, 1, 4), c(0, 2, 4), c(0, 1, 3), c(0, 1, 5)]
}

fn classify(pat: [bool; 5]) -> Option<Orbit7Class> {
    let [c1, c2, c3, c4, c5] = pat;
    if c1 {
        // a rational line carries the whole orbit
        return pat.iter().all(|&b| b).then_some(Orbit7Class::OnLine);
    }
    if c2 || c3 {
        return None;
    }
    match (c4, c5) {
        (false, false) => Some(Orbit7Class::Arc),
        (true, true) => None,
        _ => Some(Orbit7Class::Fano),
    }
}

fn heptad(plane: &Plane, a: &ProjPoint) -> [[u32; 3]; 7] {
    let mut o = [a.0; 7];
    for i in 1..7 {
        o[i] = plane.frobenius_point(&ProjPoint(o[i - 1]), 1).0;
    }
    o
}

/// Classifies O(a) by the two triples {a,Fa,F^3a} and {a,Fa,F^5a}.
pub fn orbit_fano_test_7(plane: &Plane, a: &ProjPoint) -> Result<Orbit7Class, FanoError> {
    let d = plane.point_degree(a);
    if d != 7 {
        return Err(FanoError::WrongDegree(d));
    }
    classify(heptad_pattern(plane, &heptad(plane, a))).ok_or(FanoError::Inconsistent)
}

/// Per-shard totals of the degree-7 scan.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Degree7Tally {
    pub orbits: u64,
    pub arc: u64,
    pub fano: u64,
    pub on_line: u64,
    pub conflicts: u64,
    pub spot_checks: u64,
    pub spot_failures: u64,
    /// Fano orbits with {a,Fa,F^3a} collinear.
    pub form3: u64,
    /// Fano orbits with {a,Fa,F^5a} collinear.
    pub form5: u64,
}

impl Degree7Tally {
    pub const WIDTH: usize = 9;

    pub fn to_vec(&self) -> Vec<u64> {
        vec![
            self.orbits,
            self.arc,
            self.fano,
            self.on_line,
            self.conflicts,
            self.spot_checks,
            self.spot_failures,
            self.form3,
            self.form5,
        ]
    }

    pub fn from_slice(t: &[u64]) -> Self {
        Degree7Tally {
            orbits: t[0],
            arc: t[1],
            fano: t[2],
            on_line: t[3],
            conflicts: t[4],
            spot_checks: t[5],
            spot_failures: t[6],
            form3: t[7],
            form5: t[8],
        }
    }
}

const SPOT_EVERY: u64 = 100;
const SCAN_SHARDS: usize = 64;

/// Streams the orbit representatives of degree-7 points without building the
/// class list: row (1,a,·) is skipped in O(1) unless a is rational or the
/// least of its conjugates.
pub struct Degree7Scan {
    plane: Plane,
    sub: Subplane,
    least: Vec<bool>,
    rational: Vec<bool>,
}

impl Degree7Scan {
    pub fn new(plane: Plane) -> Result<Self, ArcError> {
        let l = plane.ctx().extension_degree();
        if l != 7 {
            return Err(ArcError::FieldTooSmall { lambda: "7".into(), degree: l });
        }
        let ctx = plane.ctx().clone();
        let size = ctx.size();
        let rational: Vec<bool> = (0..size).map(|x| ctx.frobenius(x, 1) == x).collect();
        let least = (0..size)
            .map(|x| {
                !rational[x as usize] && {
                    let mut y = x;
                    (1..7).all(|_| {
                        y = ctx.frobenius(y, 1);
                        y > x
                    })
                }
            })
            .collect();
        let sub = plane.subplane(7)?;
        Ok(Degree7Scan { plane, sub, least, rational })
    }

    pub fn plane(&self) -> &Plane {
        &self.plane
    }

    fn rows(&self) -> usize {
        self.sub.field_size() as usize + 1
    }

    pub fn shard_count(&self) -> usize {
        SCAN_SHARDS.min(self.rows())
    }

    fn shard_rows(&self, shard: usize) -> std::ops::Range<usize> {
        let (n, k) = (self.rows(), self.shard_count());
        (shard * n / k)..((shard + 1) * n / k)
    }

    pub fn shard_cost(&self, shard: usize) -> u64 {
        self.shard_rows(shard).len() as u64 * self.sub.field_size()
    }

    /// Row 0 holds (0,1,b); row r ≥ 1 holds (1,a,b) with a the (r-1)-th element.
    fn for_each_rep(&self, rows: std::ops::Range<usize>, mut f: impl FnMut(ProjPoint)) {
        let elems = self.sub.elements();
        for r in rows {
            if r == 0 {
                for &b in elems {
                    if self.least[b as usize] {
                        f(ProjPoint([0, 1, b]));
                    }
                }
                continue;
            }
            let a = elems[r - 1];
            if self.least[a as usize] {
                for &b in elems {
                    f(ProjPoint([1, a, b]));
                }
            } else if self.rational[a as usize] {
                for &b in elems {
                    if self.least[b as usize] {
                        f(ProjPoint([1, a, b]));
                    }
                }
            }
        }
    }

    /// Visits every orbit representative in the shard.
    pub fn reps(&self, shard: usize) -> Vec<ProjPoint> {
        let mut out = Vec::new();
        self.for_each_rep(self.shard_rows(shard), |p| out.push(p));
        out
    }

    pub fn scan(&self, shard: usize) -> Degree7Tally {
        let plane = &self.plane;
        let mut t = Degree7Tally::default();
        self.for_each_rep(self.shard_rows(shard), |p| {
            t.orbits += 1;
            let o = heptad(plane, &p);
            let pat = heptad_pattern(plane, &o);
            match classify(pat) {
                Some(Orbit7Class::Arc) => {
                    t.arc += 1;
                    if t.arc % SPOT_EVERY == 1 {
                        t.spot_checks += 1;
                        let pts = o.map(ProjPoint);
                        if !is_arc(plane, &pts).unwrap_or(false) {
                            t.spot_failures += 1;
                        }
                    }
                }
                Some(Orbit7Class::Fano) => {
                    t.fano += 1;
                    if pat[3] {
                        t.form3 += 1;
                    } else {
                        t.form5 += 1;
                    }
                    if t.fano % SPOT_EVERY == 1 {
                        t.spot_checks += 1;
                        if !is_fano(plane, &o.map(ProjPoint)) {
                            t.spot_failures += 1;
                        }
                    }
                }
                Some(Orbit7Class::OnLine) => t.on_line += 1,
                None => t.conflicts += 1,
            }
        });
        t
    }
}

/// Prunes once the join of the first two points holds two further points,
/// and tests the full predicate at the leaves.
struct FanoVisitor<'a> {
    plane: &'a Plane,
    points: Vec<ProjPoint>,
    marks: Vec<usize>,
    first_line: Option<[u32; 3]>,
    on_first: Vec<u32>,
    count: u64,
    found: Option<Vec<[ProjPoint; 7]>>,
}

impl<'a> FanoVisitor<'a> {
    fn new(plane: &'a Plane, collect: bool) -> Self {
        FanoVisitor {
            plane,
            points: Vec::with_capacity(7),
            marks: Vec::new(),
            first_line: None,
            on_first: vec![0],
            count: 0,
            found: collect.then(Vec::new),
        }
    }
}

impl Visitor for FanoVisitor<'_> {
    fn push(&mut self, orbit: &[ProjPoint]) -> bool {
        self.marks.push(self.points.len());
        let mut on = *self.on_first.last().unwrap();
        for p in orbit {
            self.points.push(*p);
            match self.first_line {
                None if self.points.len() == 2 => {
                    self.first_line = Some(self.plane.cross(&self.points[0].0, &p.0));
                }
                Some(l) if self.plane.dot(&l, &p.0) == 0 => on += 1,
                _ => {}
            }
        }
        self.on_first.push(on);
        on <= 1
    }

    fn pop(&mut self) {
        let m = self.marks.pop().expect("balanced push/pop");
        self.points.truncate(m);
        self.on_first.pop();
        if m < 2 {
            self.first_line = None;
        }
    }

    fn leaf(&mut self) {
        if *self.on_first.last().unwrap() != 1 || !is_fano(self.plane, &self.points) {
            return;
        }
        self.count += 1;
        if let Some(f) = &mut self.found {
            let mut pts = self.points.clone();
            pts.sort();
            f.push(pts.try_into().expect("seven points"));
        }
    }
}

enum FanoEngine {
    Walker(CandidateSpace),
    Scan(Degree7Scan),
}

pub struct FanoCensusJob {
    q: u64,
    lambda: CycleType,
    engine: FanoEngine,
}

impl FanoCensusJob {
    pub fn new(q: u64, lambda: CycleType) -> Result<Self, FanoError> {
        if lambda.n() != 7 {
            return Err(ArcError::Unsupported(lambda.to_string()).into());
        }
        let plane = plane_for(q, &lambda)?;
        let engine = if lambda.parts() == [7] {
            FanoEngine::Scan(Degree7Scan::new(plane)?)
        } else {
            FanoEngine::Walker(CandidateSpace::new(plane, lambda.clone())?)
        };
        Ok(FanoCensusJob { q, lambda, engine })
    }

    /// Every Fano plane of this type in one shard, sorted pointwise.
    pub fn collect_shard(&self, shard: usize) -> Vec<[ProjPoint; 7]> {
        match &self.engine {
            FanoEngine::Walker(s) => {
                let mut v = FanoVisitor::new(s.plane(), true);
                s.walk(s.shard_range(shard), &mut v);
                v.found.unwrap()
            }
            FanoEngine::Scan(d) => d
                .reps(shard)
                .into_iter()
                .filter(|p| orbit_fano_test_7(d.plane(), p) == Ok(Orbit7Class::Fano))
                .map(|p| {
                    let mut m = orbit_from_rep(d.plane(), &p, 7).members;
                    m.sort();
                    m.try_into().expect("seven points")
                })
                .collect(),
        }
    }

    pub fn finish(&self, tally: &[u64]) -> CountReport {
        let (count, mut rep) = match &self.engine {
            FanoEngine::Walker(_) => (tally[0], CountReport::new(self.q, &self.lambda, "fano_census", tally[0])),
            FanoEngine::Scan(_) => {
                let t = Degree7Tally::from_slice(tally);
                let r = CountReport::new(self.q, &self.lambda, "fano_census", t.fano)
                    .detail("fano_points", 7 * t.fano)
                    .detail("form3_orbits", t.form3)
                    .detail("form5_orbits", t.form5)
                    .detail("classification_conflicts", t.conflicts)
                    .detail("spot_checks", t.spot_checks)
                    .detail("spot_check_failures", t.spot_failures);
                (t.fano, r)
            }
        };
        let z = self.lambda.centralizer_order();
        rep.ordered_count = Some(count * z);
        rep = rep.detail("ordered_per_pgl", crate::report::Rational::new(count * z, crate::formulas::pgl3_order(self.q)));
        rep.shard_count = self.shard_count();
        if let Some(e) = lookup(&format!("fano/{}", registry_lambda(&self.lambda))) {
            rep = rep.compare(e);
        }
        rep
    }
}

impl ShardedJob for FanoCensusJob {
    fn shard_count(&self) -> usize {
        match &self.engine {
            FanoEngine::Walker(s) => s.shard_count(),
            FanoEngine::Scan(d) => d.shard_count(),
        }
    }

    fn shard_cost(&self, shard: usize) -> u64 {
        match &self.engine {
            FanoEngine::Walker(s) => s.shard_cost(shard),
            FanoEngine::Scan(d) => d.shard_cost(shard),
        }
    }

    fn tally_width(&self) -> usize {
        match &self.engine {
            FanoEngine::Walker(_) => 1,
            FanoEngine::Scan(_) => Degree7Tally::WIDTH,
        }
    }

    fn run_shard(&self, shard: usize) -> Vec<u64> {
        match &self.engine {
            FanoEngine::Walker(s) => {
                let mut v = FanoVisitor::new(s.plane(), false);
                s.walk(s.shard_range(shard), &mut v);
                vec![v.count]
            }
            FanoEngine::Scan(d) => d.scan(shard).to_vec(),
        }
    }
}

pub fn fano_census(q: u64, lambda: &CycleType) -> Result<CountReport, FanoError> {
    let job = FanoCensusJob::new(q, lambda.clone())?;
    let tally = run_to_end(&job, crate::arcs::default_jobs());
    Ok(job.finish(&tally))
}

/// Outcome of matching generating 4-arcs against the Fano census.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bijection {
    pub four_arcs: u64,
    pub distinct_images: u64,
    pub census: u64,
    /// Images whose cycle type differs from λ.
    pub wrong_type: u64,
    /// No two 4-arcs generate the same plane.
    pub injective: bool,
    /// The images are exactly the planes found by the census.
    pub surjective: bool,
}

impl Bijection {
    pub fn holds(&self) -> bool {
        self.injective && self.surjective && self.wrong_type == 0
    }
}

/// The generating 4-arcs of a Fano-admitting type: one degree-4 orbit for
/// 4+2+1, two degree-2 orbits for 2+2+1+1+1, a degree-3 orbit and a rational
/// point for 3+3+1.
pub fn generating_four_arcs(plane: &Plane, lambda: &CycleType) -> Result<Vec<FourArc>, FanoError> {
    let shape: CycleType = match lambda.to_string().as_str() {
        "4+2+1" => "4".parse()?,
        "2+2+1+1+1" => "2+2".parse()?,
        "3+3+1" => "3+1".parse()?,
        other => return Err(ArcError::Unsupported(other.to_string()).into()),
    };
    let space = CandidateSpace::new(plane.clone(), shape).map_err(FanoError::Arc)?;
    Ok(space
        .iter()
        .filter_map(|c| FourArc::new(plane, c.points.try_into().expect("four points")).ok())
        .collect())
}

pub fn fano_bijection_check(q: u64, lambda: &CycleType) -> Result<Bijection, FanoError> {
    let job = FanoCensusJob::new(q, lambda.clone())?;
    let plane = plane_for(q, lambda)?;
    let arcs = generating_four_arcs(&plane, lambda)?;
    let mut images: HashMap<[ProjPoint; 7], u64> = HashMap::new();
    let mut wrong_type = 0;
    for a in &arcs {
        let f = generate_fano(&plane, a)?;
        if fano_cycle_type(&plane, &f)? != *lambda {
            wrong_type += 1;
        }
        *images.entry(f.points).or_default() += 1;
    }
    let mut census: Vec<[ProjPoint; 7]> =
        (0..job.shard_count()).into_par_iter().flat_map_iter(|s| job.collect_shard(s)).collect();
    census.sort();
    let mut image_list: Vec<_> = images.keys().copied().collect();
    image_list.sort();
    Ok(Bijection {
        four_arcs: arcs.len() as u64,
        distinct_images: images.len() as u64,
        census: census.len() as u64,
        wrong_type,
        injective: images.values().all(|&c| c == 1),
        surjective: census == image_list,
    })
}

/// Fano orbits split by which of the two named triples is collinear.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Duality {
    pub form3: u64,
    pub form5: u64,
}

impl Duality {
    pub fn balanced(&self) -> bool {
        self.form3 == self.form5
    }
}

pub fn fano_form_duality_check(q: u64) -> Result<Duality, FanoError> {
    let lambda: CycleType = "7".parse()?;
    let job = FanoCensusJob::new(q, lambda)?;
    let t = Degree7Tally::from_slice(&run_to_end(&job, crate::arcs::default_jobs()));
    Ok(Duality { form3: t.form3, form5: t.form5 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    fn f2() -> Plane {
        Plane::new(make_field(2, 1, 1).unwrap())
    }

    fn frame() -> [ProjPoint; 4] {
        [ProjPoint([1, 0, 0]), ProjPoint([0, 1, 0]), ProjPoint([0, 0, 1]), ProjPoint([1, 1, 1])]
    }

    #[test]
    fn frame_diagonals() {
        let p = f2();
        let a = FourArc::new(&p, frame()).unwrap();
        let mut d = diagonal_points(&p, &a).unwrap().to_vec();
        d.sort();
        assert_eq!(d, vec![ProjPoint([0, 1, 1]), ProjPoint([1, 0, 1]), ProjPoint([1, 1, 0])]);
        assert!(p.collinear(&d[0], &d[1], &d[2]));
        let f = generate_fano(&p, &a).unwrap();
        assert_eq!(f.points.to_vec(), p.rational_points().into_iter().collect::<std::collections::BTreeSet<_>>().into_iter().collect::<Vec<_>>());
        assert!(fano_cycle_type(&p, &f).unwrap().is_identity());
    }

    #[test]
    fn seven_four_arcs_in_the_plane_of_order_two() {
        let p = f2();
        let pts = p.rational_points();
        let whole = generate_fano(&p, &FourArc::new(&p, frame()).unwrap()).unwrap().points;
        let (mut subsets, mut arcs) = (0, 0);
        for a in 0..7 {
            for b in a + 1..7 {
                for c in b + 1..7 {
                    for d in c + 1..7 {
                        subsets += 1;
                        if let Ok(arc) = FourArc::new(&p, [pts[a], pts[b], pts[c], pts[d]]) {
                            arcs += 1;
                            assert_eq!(generate_fano(&p, &arc).unwrap().points, whole);
                        }
                    }
                }
            }
        }
        assert_eq!((subsets, arcs), (35, 7));
    }

    #[test]
    fn rejects_degenerate_input() {
        let p = f2();
        let bad = [ProjPoint([1, 0, 0]), ProjPoint([0, 1, 0]), ProjPoint([1, 1, 0]), ProjPoint([0, 0, 1])];
        assert_eq!(FourArc::new(&p, bad), Err(FanoError::NotFourArc));
        let p3 = Plane::new(make_field(3, 1, 1).unwrap());
        let a = FourArc::new(&p3, frame()).unwrap();
        assert_eq!(generate_fano(&p3, &a), Err(FanoError::NotCharTwo(3)));
        assert!(!is_fano(&p, &frame()));
    }

    #[test]
    fn degree7_census_q2() {
        let t = fano_census(2, &"7".parse().unwrap()).unwrap();
        assert_eq!(t.raw_count, 48);
        assert_eq!(t.matches, Some(true));
        assert_eq!(t.details["fano_points"], "336");
        let d = fano_form_duality_check(2).unwrap();
        assert_eq!((d.form3, d.form5), (24, 24));
    }

    #[test]
    fn wrong_degree_is_rejected() {
        let p = Plane::new(make_field(2, 1, 7).unwrap());
        assert_eq!(orbit_fano_test_7(&p, &ProjPoint([1, 0, 0])), Err(FanoError::WrongDegree(1)));
    }
}
