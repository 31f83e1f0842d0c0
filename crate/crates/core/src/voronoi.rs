//! Voronoi cells, walls and the decision boundary.
//!
//! Cells are built by clipping a bounding square with every bisector
//! half-plane. The square is chosen from an a-priori bound on the
//! intersection of any two bisectors of the instance, so every Voronoi vertex
//! of every subset lies strictly inside it. A cell vertex on the square's
//! border is therefore a point at infinity and the incident edge is a ray.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::geometry::{bisector, Line, Point2, Vec2};
use crate::model::{Label, LabelledPointSet};
use crate::rational::Rational;

/// Axis-aligned square `[-r, r]²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundingSquare {
    pub r: Rational,
}

impl BoundingSquare {
    /// Square containing every intersection point of two non-parallel
    /// bisectors of pairs drawn from `points`, with margin.
    ///
    /// With integer coordinates of magnitude at most `M`, a bisector has
    /// integer coefficients `|a|, |b| <= 4M`, `|c| <= 2M²`, and Cramer's rule
    /// with `|det| >= 1` bounds each coordinate of an intersection by `16M³`.
    pub fn for_points(points: &[Point2]) -> Self {
        let den = Rational::common_denominator(points.iter().flat_map(|p| [&p.x, &p.y]));
        let scale = Rational::from(den.clone());
        let mut m = BigInt::one();
        for p in points {
            for c in [&p.x, &p.y] {
                let v = (c * &scale).numer().abs();
                if v > m {
                    m = v;
                }
            }
        }
        let bound = BigInt::from(16) * &m * &m * &m;
        BoundingSquare {
            r: Rational::new(bound, den) + Rational::one(),
        }
    }

    pub fn on_border(&self, p: &Point2) -> bool {
        p.x.abs() == self.r || p.y.abs() == self.r
    }

    fn corners(&self) -> Vec<Point2> {
        let r = self.r.clone();
        let nr = -&self.r;
        vec![
            Point2::new(nr.clone(), nr.clone()),
            Point2::new(r.clone(), nr.clone()),
            Point2::new(r.clone(), r.clone()),
            Point2::new(nr, r),
        ]
    }
}

/// Relatively open geometry of a wall piece.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum WallGeometry {
    /// A boundary point on the line (dimension one).
    Point(Rational),
    /// Open segment, endpoints in lexicographic order.
    Segment(Point2, Point2),
    /// Open ray from `anchor` towards primitive direction `dir`.
    Ray { anchor: Point2, dir: Vec2 },
    /// Whole line through `anchor` (foot of the perpendicular from the origin).
    Line { anchor: Point2, dir: Vec2 },
}

impl fmt::Debug for WallGeometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WallGeometry::Point(x) => write!(f, "point {x}"),
            WallGeometry::Segment(a, b) => write!(f, "segment {a:?}-{b:?}"),
            WallGeometry::Ray { anchor, dir } => write!(f, "ray {anchor:?} {dir:?}"),
            WallGeometry::Line { anchor, dir } => write!(f, "line {anchor:?} {dir:?}"),
        }
    }
}

impl WallGeometry {
    /// A point in the relative interior.
    pub fn interior_point(&self) -> Point2 {
        match self {
            WallGeometry::Point(x) => Point2::new(x.clone(), Rational::zero()),
            WallGeometry::Segment(a, b) => a.midpoint(b),
            WallGeometry::Ray { anchor, dir } => anchor.add(dir),
            WallGeometry::Line { anchor, .. } => anchor.clone(),
        }
    }

    pub fn direction(&self) -> Option<Vec2> {
        match self {
            WallGeometry::Point(_) => None,
            WallGeometry::Segment(a, b) => Some(b.sub(a).primitive()),
            WallGeometry::Ray { dir, .. } | WallGeometry::Line { dir, .. } => Some(dir.clone()),
        }
    }

    /// Supporting line (planar pieces only).
    pub fn line(&self) -> Option<Line> {
        let dir = self.direction()?;
        Line::through(&self.interior_point(), &dir).ok()
    }
}

fn canonical_dir(v: &Vec2) -> Vec2 {
    let p = v.primitive();
    let flip = match p.x.signum() {
        0 => p.y.signum() < 0,
        s => s < 0,
    };
    if flip {
        p.neg()
    } else {
        p
    }
}

/// One maximal wall fragment between the cells of `pair.0` and `pair.1`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WallPiece {
    /// Generating pair, smaller index first.
    pub pair: (usize, usize),
    pub labels: (Label, Label),
    pub geometry: WallGeometry,
}

impl fmt::Debug for WallPiece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "wall {:?} labels {:?}: {:?}",
            self.pair, self.labels, self.geometry
        )
    }
}

impl WallPiece {
    pub fn is_decision(&self) -> bool {
        self.labels.0 != self.labels.1
    }
}

/// Edge of a clipped cell polygon, starting at `vertices[k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellEdge {
    pub from: Point2,
    pub to: Point2,
    /// Neighbor whose bisector carries this edge; `None` on the bounding square.
    pub neighbor: Option<usize>,
}

/// A Voronoi cell as the intersection of closed half-planes, represented by
/// its polygon clipped to a bounding square.
#[derive(Clone, Debug)]
pub struct ConvexCell {
    pub site: usize,
    /// Defining half-planes: bisector with the neighbor index, and the sign
    /// of `line.eval` on the cell side. Bisectors that cannot reach the cell
    /// are left out, so membership is exact inside the bounding square.
    pub halfplanes: Vec<(Line, usize, i32)>,
    /// Counter-clockwise polygon inside the bounding square.
    pub vertices: Vec<Point2>,
    /// `tags[k]` is the neighbor carrying the edge `vertices[k] -> vertices[k+1]`.
    pub tags: Vec<Option<usize>>,
    pub square: BoundingSquare,
}

impl ConvexCell {
    pub fn edges(&self) -> Vec<CellEdge> {
        let n = self.vertices.len();
        (0..n)
            .map(|k| CellEdge {
                from: self.vertices[k].clone(),
                to: self.vertices[(k + 1) % n].clone(),
                neighbor: self.tags[k],
            })
            .collect()
    }

    pub fn is_bounded(&self) -> bool {
        self.tags.iter().all(Option::is_some)
    }

    /// Vertices that are genuine (not on the bounding square).
    pub fn finite_vertices(&self) -> Vec<Point2> {
        self.vertices
            .iter()
            .filter(|v| !self.square.on_border(v))
            .cloned()
            .collect()
    }

    /// Closed-cell membership via the defining half-planes.
    pub fn contains(&self, p: &Point2) -> bool {
        self.halfplanes
            .iter()
            .all(|(l, _, s)| l.side(p) == 0 || l.side(p) == *s)
    }

    /// Unbounded-aware geometry of each bisector edge, with its neighbor.
    pub fn wall_edges(&self) -> Vec<(usize, WallGeometry)> {
        self.edges()
            .into_iter()
            .filter_map(|e| {
                let j = e.neighbor?;
                Some((j, edge_geometry(&self.square, &e.from, &e.to)))
            })
            .collect()
    }
}

fn edge_geometry(square: &BoundingSquare, u: &Point2, v: &Point2) -> WallGeometry {
    match (square.on_border(u), square.on_border(v)) {
        (false, false) => {
            let (a, b) = if u <= v { (u, v) } else { (v, u) };
            WallGeometry::Segment(a.clone(), b.clone())
        }
        (false, true) => WallGeometry::Ray {
            anchor: u.clone(),
            dir: v.sub(u).primitive(),
        },
        (true, false) => WallGeometry::Ray {
            anchor: v.clone(),
            dir: u.sub(v).primitive(),
        },
        (true, true) => {
            let dir = canonical_dir(&v.sub(u));
            let line = Line::through(u, &dir).expect("non-degenerate edge");
            WallGeometry::Line {
                anchor: line.anchor(),
                dir,
            }
        }
    }
}

/// Clip a counter-clockwise tagged polygon to `{x : sign(line(x)) ∈ {0, keep}}`.
fn clip(
    verts: &[Point2],
    tags: &[Option<usize>],
    line: &Line,
    keep: i32,
    tag: usize,
) -> Option<(Vec<Point2>, Vec<Option<usize>>)> {
    let n = verts.len();
    // Signed so that the kept side is <= 0.
    let vals: Vec<Rational> = verts
        .iter()
        .map(|v| {
            let e = line.eval(v);
            if keep > 0 {
                -e
            } else {
                e
            }
        })
        .collect();
    if vals.iter().all(|v| v.signum() <= 0) {
        return None;
    }
    let mut out_v = Vec::with_capacity(n + 1);
    let mut out_t = Vec::with_capacity(n + 1);
    for k in 0..n {
        let k1 = (k + 1) % n;
        let (sc, sn) = (vals[k].signum(), vals[k1].signum());
        let cross = |a: &Point2, b: &Point2, va: &Rational, vb: &Rational| {
            let t = va / &(va - vb);
            a.along(&b.sub(a), &t)
        };
        match sc.cmp(&0) {
            Ordering::Less => {
                out_v.push(verts[k].clone());
                out_t.push(tags[k]);
                if sn > 0 {
                    out_v.push(cross(&verts[k], &verts[k1], &vals[k], &vals[k1]));
                    out_t.push(Some(tag));
                }
            }
            Ordering::Equal => {
                out_v.push(verts[k].clone());
                out_t.push(if sn > 0 { Some(tag) } else { tags[k] });
            }
            Ordering::Greater => {
                if sn < 0 {
                    out_v.push(cross(&verts[k], &verts[k1], &vals[k], &vals[k1]));
                    out_t.push(tags[k]);
                }
            }
        }
    }
    Some((out_v, out_t))
}

fn to_f64(p: &Point2) -> (f64, f64) {
    (p.x.to_f64(), p.y.to_f64())
}

/// Whether `v` is closer to `p` than to `q` by a margin far above rounding
/// error, so the bisector of `p` and `q` cannot cut at `v`.
fn clearly_closer(v: &(f64, f64), p: (f64, f64), q: (f64, f64)) -> bool {
    let dp = (v.0 - p.0).powi(2) + (v.1 - p.1).powi(2);
    let dq = (v.0 - q.0).powi(2) + (v.1 - q.1).powi(2);
    dq - dp > 1e-9 * (dp + dq) && dq.is_finite()
}

/// Voronoi cell of `site` among `members` (indices into `pts`).
pub fn cell_among(
    pts: &[Point2],
    members: &[usize],
    site: usize,
    square: &BoundingSquare,
) -> ConvexCell {
    let p = &pts[site];
    let pf = to_f64(p);
    let fd = |q: (f64, f64)| (q.0 - pf.0).powi(2) + (q.1 - pf.1).powi(2);
    let mut others: Vec<(f64, usize)> = members
        .iter()
        .filter(|&&j| j != site)
        .map(|&j| (fd(to_f64(&pts[j])), j))
        .collect();
    others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut verts = square.corners();
    let mut tags: Vec<Option<usize>> = vec![None; 4];
    let mut halfplanes = Vec::with_capacity(others.len());
    let mut fvert: Vec<(f64, f64)> = verts.iter().map(to_f64).collect();
    for (d2, j) in others {
        // Once the bisector is beyond every vertex, so are all later ones
        // (sorted by distance): nothing more can cut, and the half-planes so
        // far already bound the cell. The margin covers rounding.
        let reach = fvert.iter().map(|&v| fd(v)).fold(0.0, f64::max);
        if d2 / 4.0 > reach * (1.0 + 1e-6) {
            break;
        }
        let qf = to_f64(&pts[j]);
        if fvert.iter().all(|v| clearly_closer(v, pf, qf)) {
            continue;
        }
        let line = bisector(p, &pts[j]).expect("distinct points");
        let keep = line.side(p);
        halfplanes.push((line.clone(), j, keep));
        if let Some((v, t)) = clip(&verts, &tags, &line, keep, j) {
            verts = v;
            tags = t;
            fvert = verts.iter().map(to_f64).collect();
        }
    }
    ConvexCell {
        site,
        halfplanes,
        vertices: verts,
        tags,
        square: square.clone(),
    }
}

/// `cell(p_i)` in the full instance.
pub fn voronoi_cell(i: usize, set: &LabelledPointSet) -> ConvexCell {
    let pts = set.planar_points();
    let members: Vec<usize> = (0..set.len()).collect();
    let square = BoundingSquare::for_points(&pts);
    cell_among(&pts, &members, i, &square)
}

/// All walls of the sub-diagram on `members` (planar).
pub fn planar_walls(
    set: &LabelledPointSet,
    pts: &[Point2],
    members: &[usize],
    square: &BoundingSquare,
) -> Vec<WallPiece> {
    let mut out = Vec::new();
    for &i in members {
        let cell = cell_among(pts, members, i, square);
        for (j, geometry) in cell.wall_edges() {
            if i < j {
                out.push(WallPiece {
                    pair: (i, j),
                    labels: (set.label(i), set.label(j)),
                    geometry,
                });
            }
        }
    }
    out.sort_by(|a, b| a.pair.cmp(&b.pair).then(a.geometry.cmp(&b.geometry)));
    out
}

/// Walls of the sub-diagram on `members` for a 1D instance: the midpoints of
/// consecutive members.
pub fn line_walls(set: &LabelledPointSet, members: &[usize]) -> Vec<WallPiece> {
    let mut sorted = members.to_vec();
    sorted.sort_by(|&a, &b| set.point(a).coords[0].cmp(&set.point(b).coords[0]));
    sorted
        .windows(2)
        .map(|w| {
            let (i, j) = (w[0].min(w[1]), w[0].max(w[1]));
            WallPiece {
                pair: (i, j),
                labels: (set.label(i), set.label(j)),
                geometry: WallGeometry::Point(Rational::midpoint(
                    &set.point(w[0]).coords[0],
                    &set.point(w[1]).coords[0],
                )),
            }
        })
        .collect()
}

/// Walls of the Voronoi diagram of a subset, dispatching on dimension.
pub fn walls_of_subset(set: &LabelledPointSet, members: &[usize]) -> Vec<WallPiece> {
    if set.dim() == 1 {
        return line_walls(set, members);
    }
    let pts = set.planar_points();
    let square = BoundingSquare::for_points(&pts);
    planar_walls(set, &pts, members, &square)
}

pub fn voronoi_walls(set: &LabelledPointSet) -> Vec<WallPiece> {
    let members: Vec<usize> = (0..set.len()).collect();
    walls_of_subset(set, &members)
}

/// Walls whose sides carry different labels, plus (in 1D) the sorted
/// boundary points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionBoundary {
    pub pieces: Vec<WallPiece>,
    pub points_1d: Vec<Rational>,
}

impl DecisionBoundary {
    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }
}

pub fn decision_boundary_of_subset(set: &LabelledPointSet, members: &[usize]) -> DecisionBoundary {
    let pieces: Vec<WallPiece> = walls_of_subset(set, members)
        .into_iter()
        .filter(WallPiece::is_decision)
        .collect();
    let mut points_1d: Vec<Rational> = pieces
        .iter()
        .filter_map(|w| match &w.geometry {
            WallGeometry::Point(x) => Some(x.clone()),
            _ => None,
        })
        .collect();
    points_1d.sort();
    DecisionBoundary { pieces, points_1d }
}

pub fn decision_boundary(set: &LabelledPointSet) -> DecisionBoundary {
    let members: Vec<usize> = (0..set.len()).collect();
    decision_boundary_of_subset(set, &members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Classifier, LabelSet};
    use crate::rational::q;

    fn inst(v: &[((i64, i64), Label)]) -> LabelledPointSet {
        LabelledPointSet::planar(
            3,
            v.iter().map(|&((x, y), l)| (Point2::ints(x, y), l)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn two_point_cell_is_half_plane() {
        let s = inst(&[((0, 0), 1), ((2, 0), 2)]);
        let cell = voronoi_cell(0, &s);
        assert!(!cell.is_bounded());
        assert!(cell.finite_vertices().is_empty());
        assert!(cell.contains(&Point2::ints(1, 100)));
        assert!(!cell.contains(&Point2::new(q(3, 2), q(0, 1))));
        let walls = voronoi_walls(&s);
        assert_eq!(walls.len(), 1);
        match &walls[0].geometry {
            WallGeometry::Line { anchor, dir } => {
                assert_eq!(anchor, &Point2::ints(1, 0));
                assert_eq!(dir, &Vec2::new(q(0, 1), q(1, 1)));
            }
            g => panic!("expected a line, got {g:?}"),
        }
    }

    #[test]
    fn circumcenter_vertex() {
        let s = inst(&[((0, 0), 1), ((2, 0), 1), ((1, 10), 2)]);
        let cell = voronoi_cell(0, &s);
        assert_eq!(cell.finite_vertices(), vec![Point2::new(q(1, 1), q(99, 20))]);
        for i in 0..3 {
            assert!(!voronoi_cell(i, &s).is_bounded());
        }
    }

    #[test]
    fn collinear_walls_skip_outer_pair() {
        let s = inst(&[((0, 0), 1), ((2, 0), 2), ((4, 0), 1)]);
        let walls = voronoi_walls(&s);
        let pairs: Vec<_> = walls.iter().map(|w| w.pair).collect();
        assert_eq!(pairs, vec![(0, 1), (1, 2)]);
        assert!(walls
            .iter()
            .all(|w| matches!(w.geometry, WallGeometry::Line { .. })));
    }

    #[test]
    fn single_point_has_no_walls() {
        let s = inst(&[((3, 3), 1)]);
        assert!(voronoi_walls(&s).is_empty());
    }

    #[test]
    fn decision_boundary_examples() {
        let s = inst(&[((0, 0), 1), ((2, 0), 2)]);
        let b = decision_boundary(&s);
        assert_eq!(b.pieces.len(), 1);
        assert_eq!(b.pieces[0].labels, (1, 2));
        let s = inst(&[((0, 0), 1), ((2, 0), 1), ((5, 7), 1)]);
        assert!(decision_boundary(&s).is_empty());
        let s = LabelledPointSet::line(
            2,
            vec![(q(0, 1), 1), (q(2, 1), 2), (q(3, 1), 2), (q(4, 1), 1)],
        )
        .unwrap();
        assert_eq!(decision_boundary(&s).points_1d, vec![q(1, 1), q(7, 2)]);
    }

    #[test]
    fn square_has_degree_four_vertex() {
        let s = inst(&[((0, 0), 1), ((2, 0), 2), ((2, 2), 1), ((0, 2), 2)]);
        let walls = voronoi_walls(&s);
        // Four rays from (1,1); diagonal pairs share only the vertex.
        assert_eq!(walls.len(), 4);
        for w in &walls {
            match &w.geometry {
                WallGeometry::Ray { anchor, .. } => assert_eq!(anchor, &Point2::ints(1, 1)),
                g => panic!("unexpected {g:?}"),
            }
        }
        let c = Classifier::full(&s);
        assert_eq!(c.classify(&Point2::ints(1, 1)), LabelSet::from_labels([1, 2]));
    }

    #[test]
    fn wall_interior_points_are_exact_ties() {
        let s = inst(&[
            ((0, 0), 1),
            ((4, 1), 2),
            ((1, 5), 1),
            ((-3, 2), 2),
            ((2, -4), 3),
            ((6, 6), 1),
        ]);
        let c = Classifier::full(&s);
        for w in voronoi_walls(&s) {
            let m = w.geometry.interior_point();
            assert_eq!(c.nn(&m), vec![w.pair.0, w.pair.1], "{w:?}");
        }
    }
}
