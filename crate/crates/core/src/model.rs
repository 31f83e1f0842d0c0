//! Labelled point sets and the nearest-neighbor classification they induce.

use std::collections::HashSet;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};
use crate::geometry::{Point, Point2, Vec2};
use crate::rational::Rational;

pub type Label = u32;

/// Sorted, duplicate-free set of labels.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LabelSet(Vec<Label>);

impl LabelSet {
    pub fn from_labels(labels: impl IntoIterator<Item = Label>) -> Self {
        let mut v: Vec<Label> = labels.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        LabelSet(v)
    }

    pub fn single(l: Label) -> Self {
        LabelSet(vec![l])
    }

    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, l: Label) -> bool {
        self.0.binary_search(&l).is_ok()
    }
}

impl fmt::Debug for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

/// The instance `(m, P, c)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LabelledPointSet {
    dim: usize,
    m: Label,
    points: Vec<Point>,
    labels: Vec<Label>,
}

#[derive(Serialize, Deserialize)]
struct JsonEntry {
    coords: Vec<Rational>,
    label: Label,
}

#[derive(Serialize, Deserialize)]
struct JsonInstance {
    d: usize,
    m: Label,
    n: usize,
    points: Vec<JsonEntry>,
}

impl LabelledPointSet {
    /// Validates dimension, label range, non-emptiness and distinct coordinates.
    pub fn new(dim: usize, m: Label, points: Vec<Point>, labels: Vec<Label>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidInstance(msg));
        if dim != 1 && dim != 2 {
            return bad(format!("dimension must be 1 or 2, got {dim}"));
        }
        if m == 0 {
            return bad("label count must be positive".into());
        }
        if points.is_empty() {
            return bad("instance has no points".into());
        }
        if points.len() != labels.len() {
            return bad("points and labels differ in length".into());
        }
        let mut seen = HashSet::new();
        for (i, (p, &l)) in points.iter().zip(&labels).enumerate() {
            if p.dim() != dim {
                return bad(format!("point {i} has dimension {}", p.dim()));
            }
            if l == 0 || l > m {
                return bad(format!("point {i} has label {l} outside 1..={m}"));
            }
            if !seen.insert(p) {
                return bad(format!("point {i} duplicates earlier coordinates {p:?}"));
            }
        }
        Ok(LabelledPointSet {
            dim,
            m,
            points,
            labels,
        })
    }

    /// Planar instance from `Point2`s.
    pub fn planar(m: Label, entries: Vec<(Point2, Label)>) -> Result<Self> {
        let (pts, labels): (Vec<_>, Vec<_>) =
            entries.into_iter().map(|(p, l)| (Point::from(p), l)).unzip();
        Self::new(2, m, pts, labels)
    }

    /// 1D instance.
    pub fn line(m: Label, entries: Vec<(Rational, Label)>) -> Result<Self> {
        let (pts, labels): (Vec<_>, Vec<_>) =
            entries.into_iter().map(|(x, l)| (Point::d1(x), l)).unzip();
        Self::new(1, m, pts, labels)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn m(&self) -> Label {
        self.m
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn planar_points(&self) -> Vec<Point2> {
        self.points.iter().map(Point::to_planar).collect()
    }

    /// Distinct labels actually used.
    pub fn used_labels(&self) -> LabelSet {
        LabelSet::from_labels(self.labels.iter().copied())
    }

    /// Sub-instance on `indices` (kept in the given order).
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        let pts = indices.iter().map(|&i| self.points[i].clone()).collect();
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        Self::new(self.dim, self.m, pts, labels)
    }

    /// Checks that `subset` is a non-empty set of valid, distinct indices and
    /// returns it sorted.
    pub fn check_subset(&self, subset: &[usize]) -> Result<Vec<usize>> {
        if subset.is_empty() {
            return Err(Error::InvalidSubset("subset is empty".into()));
        }
        let mut s = subset.to_vec();
        s.sort_unstable();
        for w in s.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidSubset(format!("index {} repeated", w[0])));
            }
        }
        if let Some(&last) = s.last() {
            if last >= self.len() {
                return Err(Error::InvalidSubset(format!(
                    "index {last} out of range for {} points",
                    self.len()
                )));
            }
        }
        Ok(s)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.dim, self.m, self.len());
        for (p, l) in self.points.iter().zip(&self.labels) {
            let _ = writeln!(out, "{p} {l}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(ParseError::Line {
            line: 1,
            msg: "missing header".into(),
        })?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| ParseError::Line {
                line: hline,
                msg: format!("bad header `{header}`"),
            })?;
        let [dim, m, n] = nums[..] else {
            return Err(ParseError::Line {
                line: hline,
                msg: "header must be `d m n`".into(),
            }
            .into());
        };
        let mut points = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for (ln, line) in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != dim + 1 {
                return Err(ParseError::Line {
                    line: ln,
                    msg: format!("expected {} fields, got {}", dim + 1, toks.len()),
                }
                .into());
            }
            let coords = toks[..dim]
                .iter()
                .map(|t| t.parse::<Rational>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| ParseError::Line {
                    line: ln,
                    msg: e.to_string(),
                })?;
            let label: Label = toks[dim].parse().map_err(|_| ParseError::Line {
                line: ln,
                msg: format!("bad label `{}`", toks[dim]),
            })?;
            points.push(Point::new(coords));
            labels.push(label);
        }
        if points.len() != n {
            return Err(Error::InvalidInstance(format!(
                "header announces {n} points, found {}",
                points.len()
            )));
        }
        Self::new(dim, m as Label, points, labels)
    }

    /// Reads an instance in either the text or the JSON form.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::from_text(text)
        }
    }

    pub fn to_json(&self) -> String {
        let inst = JsonInstance {
            d: self.dim,
            m: self.m,
            n: self.len(),
            points: self
                .points
                .iter()
                .zip(&self.labels)
                .map(|(p, &label)| JsonEntry {
                    coords: p.coords.clone(),
                    label,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&inst).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let inst: JsonInstance =
            serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
        if inst.n != inst.points.len() {
            return Err(Error::InvalidInstance(format!(
                "n = {} but {} points listed",
                inst.n,
                inst.points.len()
            )));
        }
        let (points, labels) = inst
            .points
            .into_iter()
            .map(|e| (Point::new(e.coords), e.label))
            .unzip();
        Self::new(inst.d, inst.m, points, labels)
    }
}

/// Nearest-neighbor structure over a subset of an instance, answering exact
/// queries. Points are kept sorted by x so the exact fallback can stop
/// scanning once the horizontal gap alone exceeds the best distance found.
#[derive(Clone, Debug)]
pub struct Classifier<'a> {
    set: &'a LabelledPointSet,
    /// (x-sorted) original indices.
    order: Vec<usize>,
    pts: Vec<Point2>,
    fpts: Vec<(f64, f64)>,
    /// Largest coordinate magnitude, for the rounding margin.
    scale: f64,
}

impl<'a> Classifier<'a> {
    pub fn new(set: &'a LabelledPointSet, subset: &[usize]) -> Self {
        let all = set.planar_points();
        let mut order = subset.to_vec();
        order.sort_by(|&a, &b| all[a].x.cmp(&all[b].x).then(all[a].y.cmp(&all[b].y)));
        order.dedup();
        let pts: Vec<Point2> = order.iter().map(|&i| all[i].clone()).collect();
        let fpts: Vec<(f64, f64)> = pts.iter().map(|p| (p.x.to_f64(), p.y.to_f64())).collect();
        let scale = fpts.iter().map(|p| p.0.abs().max(p.1.abs())).fold(0.0, f64::max);
        Classifier {
            set,
            order,
            pts,
            fpts,
            scale,
        }
    }

    pub fn full(set: &'a LabelledPointSet) -> Self {
        let idx: Vec<usize> = (0..set.len()).collect();
        Self::new(set, &idx)
    }

    pub fn set(&self) -> &LabelledPointSet {
        self.set
    }

    pub fn members(&self) -> &[usize] {
        &self.order
    }

    /// All indices at minimal squared distance from `q`, ascending.
    ///
    /// A floating-point pass narrows the field to near-ties; those are then
    /// compared exactly.
    pub fn nn(&self, q: &Point2) -> Vec<usize> {
        let qf = (q.x.to_f64(), q.y.to_f64());
        if !(qf.0.is_finite() && qf.1.is_finite() && self.scale.is_finite()) {
            return self.nn_exact(q);
        }
        let fd: Vec<f64> = self
            .fpts
            .iter()
            .map(|p| (p.0 - qf.0).powi(2) + (p.1 - qf.1).powi(2))
            .collect();
        let Some(best) = fd.iter().copied().reduce(f64::min) else {
            return Vec::new();
        };
        let eps = 1e-10 * (1.0 + (self.scale + qf.0.abs().max(qf.1.abs())).powi(2));
        let mut exact: Option<Rational> = None;
        let mut hits = Vec::new();
        for (k, &d) in fd.iter().enumerate() {
            if d > best + eps {
                continue;
            }
            let e = self.pts[k].dist2(q);
            match &exact {
                Some(b) if e > *b => {}
                Some(b) if e == *b => hits.push(self.order[k]),
                _ => {
                    exact = Some(e);
                    hits.clear();
                    hits.push(self.order[k]);
                }
            }
        }
        hits.sort_unstable();
        hits
    }

    fn nn_exact(&self, q: &Point2) -> Vec<usize> {
        let n = self.pts.len();
        if n == 0 {
            return Vec::new();
        }
        let start = self.pts.partition_point(|p| p.x < q.x);
        let mut best: Option<Rational> = None;
        let mut hits: Vec<usize> = Vec::new();
        let consider = |k: usize, best: &mut Option<Rational>, hits: &mut Vec<usize>| {
            let d = self.pts[k].dist2(q);
            match best {
                Some(b) if d > *b => {}
                Some(b) if d == *b => hits.push(k),
                _ => {
                    *best = Some(d);
                    hits.clear();
                    hits.push(k);
                }
            }
        };
        let mut right = start;
        let mut left = start;
        let mut right_open = true;
        let mut left_open = true;
        while right_open || left_open {
            if right_open {
                if right >= n {
                    right_open = false;
                } else {
                    let dx = (&self.pts[right].x - &q.x).square();
                    if best.as_ref().is_some_and(|b| dx > *b) {
                        right_open = false;
                    } else {
                        consider(right, &mut best, &mut hits);
                        right += 1;
                    }
                }
            }
            if left_open {
                if left == 0 {
                    left_open = false;
                } else {
                    let dx = (&self.pts[left - 1].x - &q.x).square();
                    if best.as_ref().is_some_and(|b| dx > *b) {
                        left_open = false;
                    } else {
                        consider(left - 1, &mut best, &mut hits);
                        left -= 1;
                    }
                }
            }
        }
        let mut out: Vec<usize> = hits.into_iter().map(|k| self.order[k]).collect();
        out.sort_unstable();
        out
    }

    pub fn classify(&self, q: &Point2) -> LabelSet {
        LabelSet::from_labels(self.nn(q).into_iter().map(|i| self.set.label(i)))
    }

    /// Classification at `q + δ·dir` for all sufficiently small `δ > 0`.
    ///
    /// Expanding the squared distance, the winners are the nearest neighbors
    /// of `q` that maximize `dir · p`.
    pub fn classify_perturbed(&self, q: &Point2, dir: &Vec2) -> LabelSet {
        let all = self.nn(q);
        let pts = self.set.points();
        let score = |i: usize| {
            let p = pts[i].to_planar();
            &dir.x * &p.x + &dir.y * &p.y
        };
        let best = all.iter().map(|&i| score(i)).max().expect("non-empty");
        LabelSet::from_labels(
            all.into_iter()
                .filter(|&i| score(i) == best)
                .map(|i| self.set.label(i)),
        )
    }
}

/// Indices of all points at minimal distance from `q`.
pub fn nn_set(q: &Point, set: &LabelledPointSet) -> Vec<usize> {
    Classifier::full(set).nn(&q.to_planar())
}

/// `f(q)`: labels of the nearest neighbors of `q`.
pub fn classify(q: &Point, set: &LabelledPointSet) -> LabelSet {
    Classifier::full(set).classify(&q.to_planar())
}

/// Parses a subset file: 0-based indices, one per line; blank lines and
/// `#` comments are skipped.
pub fn parse_subset(text: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(line.parse().map_err(|_| ParseError::Line {
            line: i + 1,
            msg: format!("bad index `{line}`"),
        })?);
    }
    Ok(out)
}

pub fn format_subset(subset: &[usize]) -> String {
    subset.iter().map(|i| format!("{i}\n")).collect()
}
