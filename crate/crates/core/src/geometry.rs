//! Exact predicates and constructions over rational points.
//!
//! Nothing in here touches floating point. Points live in dimension one or
//! two; the planar routines work on [`Point2`], and a one-dimensional point
//! embeds as `(x, 0)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::GeometryError;
use crate::rational::Rational;

/// A point in dimension 1 or 2.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    pub coords: Vec<Rational>,
}

impl Point {
    pub fn new(coords: Vec<Rational>) -> Self {
        Point { coords }
    }

    pub fn d1(x: Rational) -> Self {
        Point { coords: vec![x] }
    }

    pub fn d2(x: Rational, y: Rational) -> Self {
        Point { coords: vec![x, y] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Planar view; a 1D point sits on the x axis.
    pub fn to_planar(&self) -> Point2 {
        let x = self.coords.first().cloned().unwrap_or_default();
        let y = self.coords.get(1).cloned().unwrap_or_default();
        Point2 { x, y }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl From<Point2> for Point {
    fn from(p: Point2) -> Self {
        Point::d2(p.x, p.y)
    }
}

/// Exact squared Euclidean distance.
pub fn squared_distance(p: &Point, q: &Point) -> Result<Rational, GeometryError> {
    if p.dim() != q.dim() {
        return Err(GeometryError::DimensionMismatch(p.dim(), q.dim()));
    }
    Ok(p.coords
        .iter()
        .zip(&q.coords)
        .map(|(a, b)| (a - b).square())
        .sum())
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: Rational,
    pub y: Rational,
}

impl fmt::Debug for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Point2 {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point2 { x, y }
    }

    pub fn ints(x: i64, y: i64) -> Self {
        Point2::new(x.into(), y.into())
    }

    pub fn dist2(&self, other: &Point2) -> Rational {
        (&self.x - &other.x).square() + (&self.y - &other.y).square()
    }

    pub fn add(&self, v: &Vec2) -> Point2 {
        Point2::new(&self.x + &v.x, &self.y + &v.y)
    }

    pub fn sub(&self, other: &Point2) -> Vec2 {
        Vec2::new(&self.x - &other.x, &self.y - &other.y)
    }

    pub fn midpoint(&self, other: &Point2) -> Point2 {
        Point2::new(
            Rational::midpoint(&self.x, &other.x),
            Rational::midpoint(&self.y, &other.y),
        )
    }

    /// `self + t * v`
    pub fn along(&self, v: &Vec2, t: &Rational) -> Point2 {
        Point2::new(&self.x + &(&v.x * t), &self.y + &(&v.y * t))
    }
}

/// A direction or displacement in the plane.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: Rational,
    pub y: Rational,
}

impl fmt::Debug for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}>", self.x, self.y)
    }
}

impl Vec2 {
    pub fn new(x: Rational, y: Rational) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(&self, o: &Vec2) -> Rational {
        &self.x * &o.x + &self.y * &o.y
    }

    pub fn cross(&self, o: &Vec2) -> Rational {
        &self.x * &o.y - &self.y * &o.x
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn scale(&self, t: &Rational) -> Vec2 {
        Vec2::new(&self.x * t, &self.y * t)
    }

    pub fn neg(&self) -> Vec2 {
        Vec2::new(-&self.x, -&self.y)
    }

    /// Counter-clockwise normal.
    pub fn perp(&self) -> Vec2 {
        Vec2::new(-&self.y, self.x.clone())
    }

    /// Positive multiple with coprime integer components.
    pub fn primitive(&self) -> Vec2 {
        let den = Rational::common_denominator([&self.x, &self.y]);
        let xi = (&self.x * &Rational::from(den.clone())).numer().clone();
        let yi = (&self.y * &Rational::from(den)).numer().clone();
        let g = xi.gcd(&yi);
        if g.is_zero() {
            return self.clone();
        }
        Vec2::new(Rational::from(xi / &g), Rational::from(yi / &g))
    }
}

/// Sign of the determinant of `(q - p, r - p)`: +1 left turn, -1 right turn,
/// 0 collinear.
pub fn orient(p: &Point2, q: &Point2, r: &Point2) -> i32 {
    q.sub(p).cross(&r.sub(p)).signum()
}

/// Exact in-circle determinant of `d` against the circle through `a, b, c`,
/// positive when `d` is inside and `a, b, c` are counter-clockwise.
pub fn incircle(a: &Point2, b: &Point2, c: &Point2, d: &Point2) -> Rational {
    let ad = a.sub(d);
    let bd = b.sub(d);
    let cd = c.sub(d);
    let al = ad.dot(&ad);
    let bl = bd.dot(&bd);
    let cl = cd.dot(&cd);
    &al * &bd.cross(&cd) - &bl * &ad.cross(&cd) + &cl * &ad.cross(&bd)
}

/// Whether `d` lies exactly on the circle through `a, b, c`. A collinear
/// defining triple has no circle and yields `false`.
pub fn cocircular(a: &Point2, b: &Point2, c: &Point2, d: &Point2) -> bool {
    if orient(a, b, c) == 0 {
        return false;
    }
    incircle(a, b, c, d).is_zero()
}

/// Reason a point set fails general position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DegeneracyWitness {
    /// Two points share coordinates.
    Duplicate(usize, usize),
    /// 1D: two distinct pairs share a midpoint.
    SharedMidpoint([usize; 2], [usize; 2]),
    Collinear([usize; 3]),
    Cocircular([usize; 4]),
}

impl fmt::Display for DegeneracyWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegeneracyWitness::Duplicate(a, b) => write!(f, "duplicate points {a} and {b}"),
            DegeneracyWitness::SharedMidpoint(p, q) => {
                write!(f, "pairs {p:?} and {q:?} share a midpoint")
            }
            DegeneracyWitness::Collinear(t) => write!(f, "collinear triple {t:?}"),
            DegeneracyWitness::Cocircular(t) => write!(f, "cocircular quadruple {t:?}"),
        }
    }
}

/// General-position test.
///
/// In the plane: no three collinear and no four cocircular points. On the
/// line: all pairwise midpoints distinct. Returns the first violation found.
pub fn general_position(points: &[Point]) -> Result<(), DegeneracyWitness> {
    let dim = points.first().map(Point::dim).unwrap_or(2);
    if dim == 1 {
        return general_position_1d(points);
    }
    let pts: Vec<Point2> = points.iter().map(Point::to_planar).collect();
    let n = pts.len();
    for i in 0..n {
        for j in i + 1..n {
            if pts[i] == pts[j] {
                return Err(DegeneracyWitness::Duplicate(i, j));
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if orient(&pts[i], &pts[j], &pts[k]) == 0 {
                    return Err(DegeneracyWitness::Collinear([i, j, k]));
                }
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    if incircle(&pts[i], &pts[j], &pts[k], &pts[l]).is_zero() {
                        return Err(DegeneracyWitness::Cocircular([i, j, k, l]));
                    }
                }
            }
        }
    }
    Ok(())
}

fn general_position_1d(points: &[Point]) -> Result<(), DegeneracyWitness> {
    use std::collections::HashMap;
    let n = points.len();
    let mut seen: HashMap<Rational, [usize; 2]> = HashMap::new();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (&points[i].coords[0], &points[j].coords[0]);
            if a == b {
                return Err(DegeneracyWitness::Duplicate(i, j));
            }
            // Compare sums; halving is a bijection.
            let s = a + b;
            if let Some(prev) = seen.insert(s, [i, j]) {
                return Err(DegeneracyWitness::SharedMidpoint(prev, [i, j]));
            }
        }
    }
    Ok(())
}

/// A line `a*x + b*y = c` in canonical form: `a, b, c` coprime integers and
/// the first nonzero of `(a, b)` positive. Equal lines compare equal.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Line {
    a: Rational,
    b: Rational,
    c: Rational,
}

impl fmt::Debug for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x + {}y = {}", self.a, self.b, self.c)
    }
}

impl Line {
    pub fn new(a: Rational, b: Rational, c: Rational) -> Result<Self, GeometryError> {
        if a.is_zero() && b.is_zero() {
            return Err(GeometryError::DegenerateLine);
        }
        Ok(Line { a, b, c }.canonical())
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn c(&self) -> &Rational {
        &self.c
    }

    pub fn canonical(&self) -> Line {
        let den = Rational::common_denominator([&self.a, &self.b, &self.c]);
        let scale = Rational::from(den);
        let ints: Vec<BigInt> = [&self.a, &self.b, &self.c]
            .iter()
            .map(|v| (*v * &scale).numer().clone())
            .collect();
        let g = ints[0].gcd(&ints[1]).gcd(&ints[2]);
        let lead = if !ints[0].is_zero() { &ints[0] } else { &ints[1] };
        let g = if lead.is_negative() { -g } else { g };
        let mut it = ints.into_iter().map(|v| Rational::from(v / &g));
        Line {
            a: it.next().unwrap(),
            b: it.next().unwrap(),
            c: it.next().unwrap(),
        }
    }

    /// `a*x + b*y - c`; zero on the line.
    pub fn eval(&self, p: &Point2) -> Rational {
        &self.a * &p.x + &self.b * &p.y - &self.c
    }

    pub fn side(&self, p: &Point2) -> i32 {
        self.eval(p).signum()
    }

    pub fn contains(&self, p: &Point2) -> bool {
        self.eval(p).is_zero()
    }

    pub fn normal(&self) -> Vec2 {
        Vec2::new(self.a.clone(), self.b.clone())
    }

    /// Direction vector (normal rotated clockwise).
    pub fn direction(&self) -> Vec2 {
        Vec2::new(self.b.clone(), -&self.a)
    }

    /// Some point on the line.
    pub fn anchor(&self) -> Point2 {
        let n2 = self.normal().dot(&self.normal());
        let t = &self.c / &n2;
        Point2::new(&self.a * &t, &self.b * &t)
    }

    pub fn is_parallel(&self, other: &Line) -> bool {
        self.normal().cross(&other.normal()).is_zero()
    }

    pub fn intersection(&self, other: &Line) -> Option<Point2> {
        let det = &self.a * &other.b - &self.b * &other.a;
        if det.is_zero() {
            return None;
        }
        let x = (&self.c * &other.b - &self.b * &other.c) / &det;
        let y = (&self.a * &other.c - &self.c * &other.a) / &det;
        Some(Point2::new(x, y))
    }

    /// Line through `p` in direction `dir`.
    pub fn through(p: &Point2, dir: &Vec2) -> Result<Line, GeometryError> {
        let n = dir.perp();
        let c = n.x.clone() * &p.x + n.y.clone() * &p.y;
        Line::new(n.x, n.y, c)
    }
}

/// Perpendicular bisector of `p` and `q`: `2(q-p)·x = |q|² - |p|²`.
pub fn bisector(p: &Point2, q: &Point2) -> Result<Line, GeometryError> {
    if p == q {
        return Err(GeometryError::CoincidentPoints);
    }
    let two = Rational::from(2);
    let a = &two * &(&q.x - &p.x);
    let b = &two * &(&q.y - &p.y);
    let c = (q.x.square() + q.y.square()) - (p.x.square() + p.y.square());
    Line::new(a, b, c)
}

/// Whether two pairs have the same bisecting line.
pub fn same_bisector(
    pair1: (&Point2, &Point2),
    pair2: (&Point2, &Point2),
) -> Result<bool, GeometryError> {
    Ok(bisector(pair1.0, pair1.1)? == bisector(pair2.0, pair2.1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn p(x: i64, y: i64) -> Point2 {
        Point2::ints(x, y)
    }

    #[test]
    fn squared_distance_examples() {
        let d = |a: Vec<Rational>, b: Vec<Rational>| {
            squared_distance(&Point::new(a), &Point::new(b)).unwrap()
        };
        assert_eq!(d(vec![q(0, 1), q(0, 1)], vec![q(3, 1), q(4, 1)]), q(25, 1));
        assert_eq!(d(vec![q(1, 2)], vec![q(1, 2)]), q(0, 1));
        assert_eq!(d(vec![q(0, 1), q(0, 1)], vec![q(1, 3), q(0, 1)]), q(1, 9));
        assert!(squared_distance(&Point::d1(q(1, 1)), &Point::d2(q(1, 1), q(0, 1))).is_err());
    }

    #[test]
    fn orient_examples() {
        assert_eq!(orient(&p(0, 0), &p(1, 0), &p(0, 1)), 1);
        assert_eq!(orient(&p(0, 0), &p(1, 1), &p(2, 2)), 0);
        assert_eq!(orient(&p(0, 0), &p(0, 1), &p(1, 0)), -1);
    }

    #[test]
    fn cocircular_examples() {
        assert!(cocircular(&p(0, 0), &p(1, 0), &p(1, 1), &p(0, 1)));
        // det for (5,5) against circle x²+y²-x-y=0 is nonzero: 25+25-5-5 = 40.
        assert!(!cocircular(&p(0, 0), &p(1, 0), &p(0, 1), &p(5, 5)));
        assert!(cocircular(&p(0, 0), &p(2, 0), &p(0, 2), &p(2, 2)));
        assert!(!cocircular(&p(0, 0), &p(1, 1), &p(2, 2), &p(7, 1)));
    }

    #[test]
    fn general_position_examples() {
        let pts = |v: &[(i64, i64)]| -> Vec<Point> {
            v.iter().map(|&(x, y)| Point::from(p(x, y))).collect()
        };
        assert!(general_position(&pts(&[(0, 0), (1, 0), (0, 1)])).is_ok());
        assert!(matches!(
            general_position(&pts(&[(0, 0), (1, 1), (2, 2), (5, 0)])),
            Err(DegeneracyWitness::Collinear([0, 1, 2]))
        ));
        assert!(matches!(
            general_position(&pts(&[(0, 0), (1, 0), (1, 1), (0, 1)])),
            Err(DegeneracyWitness::Cocircular(_))
        ));
        let line = |v: &[i64]| -> Vec<Point> { v.iter().map(|&x| Point::d1(x.into())).collect() };
        assert!(general_position(&line(&[0, 1, 3])).is_ok());
        assert!(matches!(
            general_position(&line(&[0, 1, 2, 3])),
            Err(DegeneracyWitness::SharedMidpoint(_, _))
        ));
    }

    #[test]
    fn bisector_examples() {
        let l = bisector(&p(0, 0), &p(1, 0)).unwrap();
        assert_eq!(l, Line::new(q(1, 1), q(0, 1), q(1, 2)).unwrap());
        let l = bisector(&p(0, 0), &p(0, 2)).unwrap();
        assert_eq!(l, Line::new(q(0, 1), q(1, 1), q(1, 1)).unwrap());
        let l = bisector(&p(0, 0), &p(2, 2)).unwrap();
        assert_eq!(l, Line::new(q(1, 1), q(1, 1), q(2, 1)).unwrap());
        assert_eq!(bisector(&p(1, 1), &p(1, 1)), Err(GeometryError::CoincidentPoints));
    }

    #[test]
    fn canonical_form_is_integral_and_sign_fixed() {
        let l = Line::new(q(-2, 3), q(4, 3), q(-2, 1)).unwrap();
        assert_eq!((l.a(), l.b(), l.c()), (&q(1, 1), &q(-2, 1), &q(3, 1)));
        let l = Line::new(q(0, 1), q(-5, 1), q(10, 1)).unwrap();
        assert_eq!((l.a(), l.b(), l.c()), (&q(0, 1), &q(1, 1), &q(-2, 1)));
        assert!(Line::new(q(0, 1), q(0, 1), q(1, 1)).is_err());
    }

    #[test]
    fn same_bisector_examples() {
        assert!(same_bisector((&p(0, 0), &p(1, 0)), (&p(0, 1), &p(1, 1))).unwrap());
        assert!(!same_bisector((&p(0, 0), &p(1, 0)), (&p(0, 0), &p(0, 1))).unwrap());
        // x = 1 versus y = 0
        assert!(!same_bisector((&p(0, 0), &p(2, 0)), (&p(1, -5), &p(1, 5))).unwrap());
        assert!(same_bisector((&p(0, 0), &p(0, 0)), (&p(0, 1), &p(1, 1))).is_err());
    }

    #[test]
    fn line_intersection_and_anchor() {
        let a = Line::new(q(1, 1), q(0, 1), q(1, 1)).unwrap();
        let b = Line::new(q(1, 1), q(1, 1), q(3, 1)).unwrap();
        assert_eq!(a.intersection(&b), Some(Point2::ints(1, 2)));
        assert!(a.contains(&a.anchor()));
        assert!(b.contains(&b.anchor()));
        let par = Line::new(q(2, 1), q(0, 1), q(7, 1)).unwrap();
        assert!(a.intersection(&par).is_none());
    }
}
