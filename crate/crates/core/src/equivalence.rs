//! Deciding whether a subset induces the same classification as the whole
//! instance, everywhere.
//!
//! In the plane both classifications are constant on every vertex, open
//! edge and open face of the overlay of the two Voronoi diagrams. The
//! oracle splits every wall of either diagram at its crossings with the
//! other diagram and evaluates both classifications at
//!
//! * every vertex and crossing,
//! * a point inside every resulting edge fragment,
//! * that same point pushed infinitesimally to either side of the fragment.
//!
//! The side evaluation is symbolic (see [`Classifier::classify_perturbed`]),
//! so no step size ever has to be guessed. Every face of the overlay borders
//! some fragment, which makes the witness set complete.

use serde::Serialize;

use crate::error::Result;
use crate::geometry::{Line, Point, Point2, Vec2};
use crate::model::{Classifier, LabelSet, LabelledPointSet};
use crate::rational::Rational;
use crate::solver_1d::decompose_subset;
use crate::voronoi::{planar_walls, BoundingSquare, WallGeometry, WallPiece};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub point: Point,
    /// Classification by the full instance.
    pub full: LabelSet,
    /// Classification by the subset.
    pub subset: LabelSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceVerdict {
    pub equivalent: bool,
    pub counterexample: Option<Counterexample>,
}

impl EquivalenceVerdict {
    fn yes() -> Self {
        EquivalenceVerdict {
            equivalent: true,
            counterexample: None,
        }
    }

    fn no(c: Counterexample) -> Self {
        EquivalenceVerdict {
            equivalent: false,
            counterexample: Some(c),
        }
    }
}

/// Exact check that `subset` is a reduced training set of `set`.
pub fn is_reduced_training_set(set: &LabelledPointSet, subset: &[usize]) -> Result<EquivalenceVerdict> {
    let subset = set.check_subset(subset)?;
    if subset.len() == set.len() {
        return Ok(EquivalenceVerdict::yes());
    }
    Oracle::new(set).check(&subset)
}

/// One-dimensional check by comparing region decompositions.
pub fn is_equivalent_1d(set: &LabelledPointSet, subset: &[usize]) -> Result<EquivalenceVerdict> {
    let subset = set.check_subset(subset)?;
    if set.dim() != 1 {
        return Err(crate::error::GeometryError::DimensionMismatch(set.dim(), 1).into());
    }
    let all: Vec<usize> = (0..set.len()).collect();
    let full = decompose_subset(set, &all);
    let sub = decompose_subset(set, &subset);
    if full.boundaries == sub.boundaries && full.region_labels == sub.region_labels {
        return Ok(EquivalenceVerdict::yes());
    }
    // Locate a concrete disagreement among the candidate points.
    let mut cand: Vec<Rational> = full
        .boundaries
        .iter()
        .chain(&sub.boundaries)
        .cloned()
        .collect();
    cand.sort();
    cand.dedup();
    let mut probes = cand.clone();
    for w in cand.windows(2) {
        probes.push(Rational::midpoint(&w[0], &w[1]));
    }
    if let (Some(first), Some(last)) = (cand.first(), cand.last()) {
        probes.push(first - &Rational::one());
        probes.push(last + &Rational::one());
    } else {
        probes.push(Rational::zero());
    }
    let cp = Classifier::full(set);
    let cq = Classifier::new(set, &subset);
    for x in probes {
        let p = Point2::new(x.clone(), Rational::zero());
        let (a, b) = (cp.classify(&p), cq.classify(&p));
        if a != b {
            return Ok(EquivalenceVerdict::no(Counterexample {
                point: Point::d1(x),
                full: a,
                subset: b,
            }));
        }
    }
    unreachable!("region decompositions differ but no probe disagrees")
}

/// A wall as a parameter interval on `base + t * dir`.
struct Piece {
    base: Point2,
    dir: Vec2,
    line: Line,
    lo: Option<Rational>,
    hi: Option<Rational>,
    /// Split parameters, including endpoints.
    cuts: Vec<Rational>,
    /// Conservative floating-point box `[xmin, xmax, ymin, ymax]`.
    bbox: [f64; 4],
}

impl Piece {
    fn from_wall(w: &WallPiece) -> Self {
        let (base, dir, lo, hi) = match &w.geometry {
            WallGeometry::Segment(a, b) => (
                a.clone(),
                b.sub(a),
                Some(Rational::zero()),
                Some(Rational::one()),
            ),
            WallGeometry::Ray { anchor, dir } => {
                (anchor.clone(), dir.clone(), Some(Rational::zero()), None)
            }
            WallGeometry::Line { anchor, dir } => (anchor.clone(), dir.clone(), None, None),
            WallGeometry::Point(_) => unreachable!("planar walls only"),
        };
        let line = Line::through(&base, &dir).expect("wall has a direction");
        let cuts = lo.iter().chain(hi.iter()).cloned().collect();
        let bbox = piece_box(&base, &dir, lo.is_some(), hi.is_some());
        Piece {
            base,
            dir,
            line,
            lo,
            hi,
            cuts,
            bbox,
        }
    }

    fn may_meet(&self, other: &Piece) -> bool {
        let (a, b) = (&self.bbox, &other.bbox);
        a[0] <= b[1] && b[0] <= a[1] && a[2] <= b[3] && b[2] <= a[3]
    }

    fn param(&self, p: &Point2) -> Rational {
        let d = p.sub(&self.base);
        d.dot(&self.dir) / self.dir.dot(&self.dir)
    }

    fn in_closure(&self, t: &Rational) -> bool {
        self.lo.as_ref().is_none_or(|lo| t >= lo) && self.hi.as_ref().is_none_or(|hi| t <= hi)
    }

    fn at(&self, t: &Rational) -> Point2 {
        self.base.along(&self.dir, t)
    }
}

fn widen(v: f64) -> (f64, f64) {
    let eps = 1e-9 * (1.0 + v.abs());
    (v - eps, v + eps)
}

/// Box of `base + t * dir` for `t` in `[0, 1]`, `[0, inf)` or all reals.
fn piece_box(base: &Point2, dir: &Vec2, bounded_lo: bool, bounded_hi: bool) -> [f64; 4] {
    let axis = |b: &Rational, d: &Rational| -> (f64, f64) {
        let (b0, b1) = widen(b.to_f64());
        let s = d.signum();
        if s == 0 {
            return (b0, b1);
        }
        if bounded_hi {
            let (e0, e1) = widen((b + d).to_f64());
            return (b0.min(e0), b1.max(e1));
        }
        match (bounded_lo, s > 0) {
            (true, true) => (b0, f64::INFINITY),
            (true, false) => (f64::NEG_INFINITY, b1),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    };
    let (x0, x1) = axis(&base.x, &dir.x);
    let (y0, y1) = axis(&base.y, &dir.y);
    [x0, x1, y0, y1]
}

fn add_crossings(a: &mut Piece, b: &mut Piece) {
    if !a.may_meet(b) {
        return;
    }
    if a.line.is_parallel(&b.line) {
        if a.line != b.line {
            return;
        }
        // Collinear: each piece's endpoints cut the other.
        let a_ends: Vec<Point2> = [&a.lo, &a.hi]
            .into_iter()
            .flatten()
            .map(|t| a.at(t))
            .collect();
        let b_ends: Vec<Point2> = [&b.lo, &b.hi]
            .into_iter()
            .flatten()
            .map(|t| b.at(t))
            .collect();
        for p in b_ends {
            let t = a.param(&p);
            if a.in_closure(&t) {
                a.cuts.push(t);
            }
        }
        for p in a_ends {
            let t = b.param(&p);
            if b.in_closure(&t) {
                b.cuts.push(t);
            }
        }
        return;
    }
    let x = a.line.intersection(&b.line).expect("not parallel");
    let ta = a.param(&x);
    if !a.in_closure(&ta) {
        return;
    }
    let tb = b.param(&x);
    if !b.in_closure(&tb) {
        return;
    }
    a.cuts.push(ta);
    b.cuts.push(tb);
}

enum Witness {
    At(Point2),
    Side(Point2, Vec2),
}

fn piece_witnesses(piece: &mut Piece, out: &mut Vec<Witness>) {
    piece.cuts.sort();
    piece.cuts.dedup();
    let one = Rational::one();
    let mut params: Vec<Rational> = Vec::new();
    match (piece.lo.is_some(), piece.cuts.first()) {
        (false, Some(first)) => params.push(first - &one),
        (false, None) => params.push(Rational::zero()),
        _ => {}
    }
    for w in piece.cuts.windows(2) {
        params.push(Rational::midpoint(&w[0], &w[1]));
    }
    if piece.hi.is_none() {
        if let Some(last) = piece.cuts.last() {
            params.push(last + &one);
        }
    }
    for t in &piece.cuts {
        out.push(Witness::At(piece.at(t)));
    }
    let normal = piece.dir.perp();
    for t in params {
        let m = piece.at(&t);
        out.push(Witness::Side(m.clone(), normal.clone()));
        out.push(Witness::Side(m.clone(), normal.neg()));
        out.push(Witness::At(m));
    }
}

/// Concrete point realizing a symbolic side-witness: halve the step until
/// both classifications match their infinitesimal values.
fn realize(
    cp: &Classifier,
    cq: &Classifier,
    m: &Point2,
    dir: &Vec2,
    want_p: &LabelSet,
    want_q: &LabelSet,
) -> Point2 {
    let mut step = Rational::one();
    let half = Rational::new(1, 2);
    loop {
        let x = m.along(dir, &step);
        if &cp.classify(&x) == want_p && &cq.classify(&x) == want_q {
            return x;
        }
        step = &step * &half;
    }
}

/// Precomputed state for checking many subsets of one instance.
pub struct Oracle<'a> {
    set: &'a LabelledPointSet,
    pts: Vec<Point2>,
    square: BoundingSquare,
    walls: Vec<WallPiece>,
    full: Classifier<'a>,
    /// Sorted indices the classification is taken from; `None` is the whole set.
    reference: Option<Vec<usize>>,
    /// Quick rejection probes: a point inside each wall of the full diagram,
    /// its two sides, and the full classification there.
    probes: Vec<(Point2, Option<Vec2>, LabelSet)>,
}

impl<'a> Oracle<'a> {
    pub fn new(set: &'a LabelledPointSet) -> Self {
        let all: Vec<usize> = (0..set.len()).collect();
        Self::build(set, &all, None)
    }

    /// An oracle comparing subsets against the classification induced by
    /// `reference` rather than by the whole set. Always uses the planar
    /// overlay, also for one-dimensional sets.
    pub fn with_reference(set: &'a LabelledPointSet, reference: &[usize]) -> Result<Self> {
        let mut r = set.check_subset(reference)?;
        r.sort_unstable();
        r.dedup();
        Ok(Self::build(set, &r.clone(), Some(r)))
    }

    fn build(set: &'a LabelledPointSet, base: &[usize], reference: Option<Vec<usize>>) -> Self {
        let pts = set.planar_points();
        let square = BoundingSquare::for_points(&pts);
        let walls = if set.dim() == 2 || reference.is_some() {
            planar_walls(set, &pts, base, &square)
        } else {
            Vec::new()
        };
        let full = Classifier::new(set, base);
        let mut probes = Vec::new();
        for w in &walls {
            let m = w.geometry.interior_point();
            let dir = w.geometry.direction().expect("planar wall").perp();
            for side in [Some(dir.clone()), Some(dir.neg()), None] {
                let f = match &side {
                    Some(d) => full.classify_perturbed(&m, d),
                    None => full.classify(&m),
                };
                probes.push((m.clone(), side, f));
            }
        }
        Oracle {
            set,
            pts,
            square,
            walls,
            full,
            reference,
            probes,
        }
    }

    pub fn set(&self) -> &LabelledPointSet {
        self.set
    }

    /// Walls of the full diagram.
    pub fn walls(&self) -> &[WallPiece] {
        &self.walls
    }

    pub fn check(&self, subset: &[usize]) -> Result<EquivalenceVerdict> {
        let subset = self.set.check_subset(subset)?;
        if let Some(r) = &self.reference {
            let mut s = subset.clone();
            s.sort_unstable();
            s.dedup();
            if &s == r {
                return Ok(EquivalenceVerdict::yes());
            }
            return Ok(self.planar(&subset));
        }
        if subset.len() == self.set.len() {
            return Ok(EquivalenceVerdict::yes());
        }
        if self.set.dim() == 1 {
            return is_equivalent_1d(self.set, &subset);
        }
        Ok(self.planar(&subset))
    }

    fn disagreement(
        &self,
        cq: &Classifier,
        m: &Point2,
        side: Option<&Vec2>,
        known: Option<&LabelSet>,
    ) -> Option<Counterexample> {
        let (a, b) = match side {
            Some(d) => (
                known.cloned().unwrap_or_else(|| self.full.classify_perturbed(m, d)),
                cq.classify_perturbed(m, d),
            ),
            None => (
                known.cloned().unwrap_or_else(|| self.full.classify(m)),
                cq.classify(m),
            ),
        };
        if a == b {
            return None;
        }
        let x = match side {
            Some(d) => realize(&self.full, cq, m, d, &a, &b),
            None => m.clone(),
        };
        Some(Counterexample {
            point: x.into(),
            full: a,
            subset: b,
        })
    }

    fn planar(&self, subset: &[usize]) -> EquivalenceVerdict {
        let cq = Classifier::new(self.set, subset);
        for (m, side, f) in &self.probes {
            if let Some(c) = self.disagreement(&cq, m, side.as_ref(), Some(f)) {
                return EquivalenceVerdict::no(c);
            }
        }
        let wq = planar_walls(self.set, &self.pts, subset, &self.square);
        let mut pp: Vec<Piece> = self.walls.iter().map(Piece::from_wall).collect();
        let mut pq: Vec<Piece> = wq.iter().map(Piece::from_wall).collect();
        for a in pp.iter_mut() {
            for b in pq.iter_mut() {
                add_crossings(a, b);
            }
        }
        let mut witnesses = Vec::new();
        for piece in pp.iter_mut().chain(pq.iter_mut()) {
            piece_witnesses(piece, &mut witnesses);
        }
        if witnesses.is_empty() {
            witnesses.push(Witness::At(self.pts[0].clone()));
        }
        for w in witnesses {
            let found = match &w {
                Witness::At(x) => self.disagreement(&cq, x, None, None),
                Witness::Side(m, d) => self.disagreement(&cq, m, Some(d), None),
            };
            if let Some(c) = found {
                return EquivalenceVerdict::no(c);
            }
        }
        EquivalenceVerdict::yes()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::classify;
    use crate::rational::q;

    fn inst(v: &[((i64, i64), u32)]) -> LabelledPointSet {
        LabelledPointSet::planar(
            2,
            v.iter().map(|&((x, y), l)| (Point2::ints(x, y), l)).collect(),
        )
        .unwrap()
    }

    fn line(v: &[(i64, u32)]) -> LabelledPointSet {
        LabelledPointSet::line(2, v.iter().map(|&(x, l)| (q(x, 1), l)).collect()).unwrap()
    }

    fn check_counterexample(set: &LabelledPointSet, subset: &[usize], v: &EquivalenceVerdict) {
        let c = v.counterexample.as_ref().expect("counterexample");
        let sub = set.restrict(subset).unwrap();
        assert_eq!(classify(&c.point, set), c.full);
        assert_eq!(classify(&c.point, &sub), c.subset);
        assert_ne!(c.full, c.subset);
    }

    #[test]
    fn identity_is_equivalent() {
        let s = inst(&[((0, 0), 1), ((2, 0), 2)]);
        assert!(is_reduced_training_set(&s, &[0, 1]).unwrap().equivalent);
    }

    #[test]
    fn dropping_a_label_is_detected() {
        let s = inst(&[((0, 0), 1), ((2, 0), 2)]);
        let v = is_reduced_training_set(&s, &[0]).unwrap();
        assert!(!v.equivalent);
        check_counterexample(&s, &[0], &v);
    }

    #[test]
    fn one_dimensional_examples() {
        let s = line(&[(0, 1), (2, 2), (4, 1)]);
        let v = is_reduced_training_set(&s, &[0, 2]).unwrap();
        assert!(!v.equivalent);
        check_counterexample(&s, &[0, 2], &v);
        assert!(is_equivalent_1d(&s, &[0, 1, 2]).unwrap().equivalent);

        let s = line(&[(0, 1), (2, 2), (3, 2), (4, 1)]);
        assert!(is_equivalent_1d(&s, &[0, 1, 2, 3]).unwrap().equivalent);
        let v = is_equivalent_1d(&s, &[0, 1, 3]).unwrap();
        assert!(!v.equivalent);
        check_counterexample(&s, &[0, 1, 3], &v);
    }

    #[test]
    fn removing_symmetric_partner_is_detected() {
        let s = inst(&[((0, 0), 1), ((2, 0), 1), ((1, 5), 2), ((1, -5), 2)]);
        for sub in [vec![0, 2, 3], vec![0, 1, 2]] {
            let v = is_reduced_training_set(&s, &sub).unwrap();
            assert!(!v.equivalent);
            check_counterexample(&s, &sub, &v);
        }
    }

    #[test]
    fn redundant_interior_point_is_removable() {
        // The center red point is surrounded by red; dropping it is lossless.
        let s = inst(&[
            ((0, 0), 1),
            ((1, 0), 1),
            ((-1, 0), 1),
            ((0, 1), 1),
            ((0, -1), 1),
            ((5, 0), 2),
        ]);
        assert!(is_reduced_training_set(&s, &[1, 2, 3, 4, 5]).unwrap().equivalent);
        let v = is_reduced_training_set(&s, &[0, 2, 3, 4, 5]).unwrap();
        assert!(!v.equivalent);
    }

    #[test]
    fn subset_errors() {
        let s = inst(&[((0, 0), 1), ((2, 0), 2)]);
        assert!(is_reduced_training_set(&s, &[]).is_err());
        assert!(is_reduced_training_set(&s, &[0, 5]).is_err());
        assert!(is_reduced_training_set(&s, &[0, 0]).is_err());
    }

    #[test]
    fn reference_subset_comparison() {
        // Two symmetric copies of a red/blue pair: either copy induces the
        // same classification as the other, but not the mixed pair.
        let s = inst(&[((0, 0), 1), ((2, 0), 2), ((0, 1), 1), ((2, 1), 2), ((0, 5), 1)]);
        let o = Oracle::with_reference(&s, &[0, 1]).unwrap();
        assert!(o.check(&[1, 0]).unwrap().equivalent);
        assert!(o.check(&[2, 3]).unwrap().equivalent);
        assert!(!o.check(&[0, 3]).unwrap().equivalent);
        assert!(!o.check(&[0, 1, 4]).unwrap().equivalent);
        assert!(Oracle::with_reference(&s, &[9]).is_err());
    }
}
