//! Point networks made of convex red regions.
//!
//! Each region carries a few red candidate points; a candidate comes with its
//! mirror images across every edge of the region, all labelled blue. Picking
//! one candidate per region gives a subset whose red area is exactly the union
//! of the regions, provided every region vertex is at least as close to its
//! candidate as to every blue point that can appear alongside it. `certify`
//! checks that condition for all consistent choices at once.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Point2, Vec2};
use crate::model::{Label, LabelledPointSet};
use crate::rational::Rational;

pub const RED: Label = 1;
pub const BLUE: Label = 2;

/// Half-plane `{x : normal · x <= offset}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfPlane {
    pub normal: Vec2,
    pub offset: Rational,
}

impl HalfPlane {
    /// Half-plane whose boundary passes through `p`, keeping the side opposite
    /// to `normal`.
    pub fn through(p: &Point2, normal: Vec2) -> Self {
        let offset = normal.x.clone() * &p.x + normal.y.clone() * &p.y;
        HalfPlane { normal, offset }
    }

    pub fn eval(&self, p: &Point2) -> Rational {
        &self.normal.x * &p.x + &self.normal.y * &p.y - &self.offset
    }

    pub fn mirror(&self, p: &Point2) -> Point2 {
        let t = self.eval(p) / self.normal.dot(&self.normal);
        p.add(&self.normal.scale(&(t * Rational::from(-2))))
    }
}

/// Reflection of `p` across the boundary of `h`.
pub fn mirror(p: &Point2, h: &HalfPlane) -> Point2 {
    h.mirror(p)
}

/// Vertices of a bounded intersection of half-planes, counter-clockwise, each
/// with the index of the half-plane supporting the edge that starts there.
pub fn polygon(hps: &[HalfPlane]) -> Result<Vec<(Point2, usize)>> {
    let big = Rational::from(1i64 << 40);
    let nb = -&big;
    let mut poly: Vec<(Point2, Option<usize>)> = vec![
        (Point2::new(nb.clone(), nb.clone()), None),
        (Point2::new(big.clone(), nb.clone()), None),
        (Point2::new(big.clone(), big.clone()), None),
        (Point2::new(nb.clone(), big.clone()), None),
    ];
    for (k, h) in hps.iter().enumerate() {
        let n = poly.len();
        let vals: Vec<Rational> = poly.iter().map(|(p, _)| h.eval(p)).collect();
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let j = (i + 1) % n;
            let (vp, vq) = (&vals[i], &vals[j]);
            if vp.signum() <= 0 {
                out.push(poly[i].clone());
            }
            if vp.signum() * vq.signum() < 0 {
                let t = vp / &(vp - vq);
                let (p, q) = (&poly[i].0, &poly[j].0);
                let x = p.along(&q.sub(p), &t);
                out.push((x, if vp.signum() < 0 { Some(k) } else { poly[i].1 }));
            }
        }
        // Drop repeated vertices produced by boundaries through a vertex.
        out.dedup_by(|a, b| a.0 == b.0);
        while out.len() > 1 && out[0].0 == out[out.len() - 1].0 {
            out.pop();
        }
        poly = out;
        if poly.len() < 3 {
            return Err(Error::Verification("region is empty or degenerate".into()));
        }
    }
    poly.into_iter()
        .map(|(p, t)| match t {
            Some(t) if p.x.abs() < big && p.y.abs() < big => Ok((p, t)),
            _ => Err(Error::Verification("region is unbounded".into())),
        })
        .collect()
}

/// Conjunction of variable values under which a candidate is used.
pub type Guard = Vec<(usize, bool)>;

fn compatible(g: &Guard, h: &Guard) -> bool {
    g.iter()
        .all(|(v, b)| h.iter().all(|(w, c)| v != w || b == c))
}

fn holds(g: &Guard, assignment: &[bool]) -> bool {
    g.iter().all(|&(v, b)| assignment[v] == b)
}

#[derive(Clone, Debug, Serialize)]
pub struct Candidate {
    pub point: usize,
    pub mirrors: Vec<usize>,
    #[serde(skip)]
    pub guard: Guard,
}

#[derive(Clone, Debug, Serialize)]
pub struct Region {
    pub name: String,
    #[serde(skip)]
    pub halfplanes: Vec<HalfPlane>,
    pub vertices: Vec<Point2>,
    pub candidates: Vec<Candidate>,
}

#[derive(Clone, Debug, Default)]
pub struct Network {
    points: Vec<Point2>,
    labels: Vec<Label>,
    index: HashMap<Point2, usize>,
    regions: Vec<Region>,
}

impl Network {
    pub fn new() -> Self {
        Network::default()
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn region(&self, i: usize) -> &Region {
        &self.regions[i]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn find(&self, p: &Point2) -> Option<usize> {
        self.index.get(p).copied()
    }

    fn insert(&mut self, p: Point2, label: Label) -> Result<usize> {
        if let Some(&i) = self.index.get(&p) {
            if self.labels[i] != label {
                return Err(Error::Verification(format!(
                    "point {p:?} is needed both red and blue"
                )));
            }
            return Ok(i);
        }
        let i = self.points.len();
        self.index.insert(p.clone(), i);
        self.points.push(p);
        self.labels.push(label);
        Ok(i)
    }

    /// Adds a region with its candidates and their mirrors; returns its index.
    pub fn add_region(
        &mut self,
        name: impl Into<String>,
        halfplanes: Vec<HalfPlane>,
        candidates: Vec<(Point2, Guard)>,
    ) -> Result<usize> {
        let name = name.into();
        let poly = polygon(&halfplanes)?;
        let mut edges: Vec<usize> = poly.iter().map(|(_, t)| *t).collect();
        edges.sort_unstable();
        edges.dedup();
        let mut cands = Vec::with_capacity(candidates.len());
        for (c, guard) in candidates {
            if halfplanes.iter().any(|h| h.eval(&c).signum() >= 0) {
                return Err(Error::Verification(format!(
                    "{name}: candidate {c:?} is not inside its region"
                )));
            }
            let mirrors = edges.iter().map(|&e| halfplanes[e].mirror(&c)).collect::<Vec<_>>();
            let point = self.insert(c, RED)?;
            let mirrors = mirrors
                .into_iter()
                .map(|m| self.insert(m, BLUE))
                .collect::<Result<Vec<_>>>()?;
            cands.push(Candidate {
                point,
                mirrors,
                guard,
            });
        }
        self.regions.push(Region {
            name,
            halfplanes,
            vertices: poly.into_iter().map(|(p, _)| p).collect(),
            candidates: cands,
        });
        Ok(self.regions.len() - 1)
    }

    /// Candidate and mirrors of candidate `k` of region `r`.
    pub fn candidate_points(&self, r: usize, k: usize) -> Vec<usize> {
        let c = &self.regions[r].candidates[k];
        let mut v = vec![c.point];
        v.extend(&c.mirrors);
        v
    }

    /// Sorted subset used under `assignment`.
    pub fn version(&self, assignment: &[bool]) -> Vec<usize> {
        self.version_of(self.regions.iter().enumerate().map(|(i, _)| i), assignment)
    }

    /// Points used under `assignment` by the given regions only.
    pub fn version_of(
        &self,
        regions: impl IntoIterator<Item = usize>,
        assignment: &[bool],
    ) -> Vec<usize> {
        let mut out = Vec::new();
        for r in regions {
            for c in &self.regions[r].candidates {
                if holds(&c.guard, assignment) {
                    out.push(c.point);
                    out.extend(&c.mirrors);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Checks that every consistent choice of candidates colours exactly the
    /// union of the regions red. Also checks that each assignment selects
    /// exactly one candidate per region for every variable it mentions.
    pub fn certify(&self) -> Result<()> {
        // Guards under which each blue point is present.
        let mut owners: Vec<Vec<&Guard>> = vec![Vec::new(); self.points.len()];
        for reg in &self.regions {
            for c in &reg.candidates {
                for &m in &c.mirrors {
                    owners[m].push(&c.guard);
                }
            }
        }
        let blues: Vec<usize> = (0..self.points.len())
            .filter(|&i| self.labels[i] == BLUE)
            .collect();
        let fl: Vec<(f64, f64)> = self
            .points
            .iter()
            .map(|p| (p.x.to_f64(), p.y.to_f64()))
            .collect();
        for reg in &self.regions {
            // Squared radius of the region around each candidate, for a cheap
            // filter: a blue point farther than twice that from the candidate
            // cannot beat it at any vertex.
            for c in &reg.candidates {
                let r = &self.points[c.point];
                let (rx, ry) = fl[c.point];
                let reach = reg
                    .vertices
                    .iter()
                    .map(|v| {
                        let (dx, dy) = (v.x.to_f64() - rx, v.y.to_f64() - ry);
                        (dx * dx + dy * dy).sqrt()
                    })
                    .fold(0.0, f64::max);
                let limit = 2.0 * reach * 1.01 + 1e-6;
                let rd: Vec<Rational> = reg.vertices.iter().map(|v| v.dist2(r)).collect();
                for &z in &blues {
                    let (dx, dy) = (fl[z].0 - rx, fl[z].1 - ry);
                    if (dx * dx + dy * dy).sqrt() > limit {
                        continue;
                    }
                    if !owners[z].iter().any(|g| compatible(g, &c.guard)) {
                        continue;
                    }
                    let zp = &self.points[z];
                    for (v, d) in reg.vertices.iter().zip(&rd) {
                        if &v.dist2(zp) < d {
                            return Err(Error::Verification(format!(
                                "{}: blue point {zp:?} is closer than candidate {r:?} at vertex {v:?}",
                                reg.name
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_set(&self) -> Result<LabelledPointSet> {
        LabelledPointSet::planar(
            2,
            self.points
                .iter()
                .cloned()
                .zip(self.labels.iter().copied())
                .collect(),
        )
    }

    /// Axis-aligned bounding box of all points.
    pub fn bbox(&self) -> Option<(Point2, Point2)> {
        let mut it = self.points.iter();
        let first = it.next()?;
        let (mut lo, mut hi) = (first.clone(), first.clone());
        for p in it {
            if p.x < lo.x {
                lo.x = p.x.clone();
            }
            if p.y < lo.y {
                lo.y = p.y.clone();
            }
            if p.x > hi.x {
                hi.x = p.x.clone();
            }
            if p.y > hi.y {
                hi.y = p.y.clone();
            }
        }
        Some((lo, hi))
    }

    /// `count` rational points on the boundary of the bounding box grown by
    /// `margin`, walking the perimeter at equal spacing.
    pub fn exterior_ring(&self, count: usize, margin: &Rational) -> Vec<Point2> {
        let Some((lo, hi)) = self.bbox() else {
            return Vec::new();
        };
        let (x0, y0) = (&lo.x - margin, &lo.y - margin);
        let (x1, y1) = (&hi.x + margin, &hi.y + margin);
        let (w, h) = (&x1 - &x0, &y1 - &y0);
        let per = (&w + &h) * Rational::from(2);
        (0..count)
            .map(|i| {
                let mut t = &per * &Rational::new(i as i64, count as i64);
                if t < w {
                    return Point2::new(&x0 + &t, y0.clone());
                }
                t -= &w;
                if t < h {
                    return Point2::new(x1.clone(), &y0 + &t);
                }
                t -= &h;
                if t < w {
                    return Point2::new(&x1 - &t, y1.clone());
                }
                t -= &w;
                Point2::new(x0.clone(), &y1 - &t)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::Oracle;
    use crate::model::{Classifier, LabelSet};
    use crate::rational::q;

    fn square_region() -> Vec<HalfPlane> {
        let p = |x, y| Point2::new(q(x, 1), q(y, 1));
        let v = |x, y| Vec2::new(q(x, 1), q(y, 1));
        vec![
            HalfPlane::through(&p(1, 0), v(1, 0)),
            HalfPlane::through(&p(-1, 0), v(-1, 0)),
            HalfPlane::through(&p(0, 1), v(0, 1)),
            HalfPlane::through(&p(0, -1), v(0, -1)),
        ]
    }

    #[test]
    fn polygon_of_square() {
        let poly = polygon(&square_region()).unwrap();
        assert_eq!(poly.len(), 4);
        let mut h = square_region();
        h.pop();
        assert!(polygon(&h).is_err());
    }

    #[test]
    fn single_region_versions_are_equivalent() {
        let mut net = Network::new();
        let a = Point2::new(q(1, 5), q(1, 3));
        let b = Point2::new(q(-1, 4), q(-1, 7));
        net.add_region("sq", square_region(), vec![(a, vec![(0, true)]), (b, vec![(0, false)])])
            .unwrap();
        assert_eq!(net.len(), 10);
        net.certify().unwrap();
        let set = net.to_set().unwrap();
        let oracle = Oracle::new(&set);
        for t in [true, false] {
            let v = net.version(&[t]);
            assert_eq!(v.len(), 5);
            assert!(oracle.check(&v).unwrap().equivalent);
            let cls = Classifier::new(&set, &v);
            for p in net.exterior_ring(100, &q(1, 1)) {
                assert_eq!(cls.classify(&p), LabelSet::single(BLUE));
            }
        }
    }

    #[test]
    fn intruding_mirror_fails_certificate() {
        let mut net = Network::new();
        let centre = Point2::new(q(0, 1), q(0, 1));
        net.add_region("left", square_region(), vec![(centre, vec![])]).unwrap();
        let shifted: Vec<HalfPlane> = square_region()
            .into_iter()
            .map(|h| {
                let offset = &h.offset + &(&h.normal.x * &q(3, 1));
                HalfPlane { offset, ..h }
            })
            .collect();
        let near_edge = Point2::new(q(21, 10), q(0, 1));
        net.add_region("right", shifted, vec![(near_edge, vec![])]).unwrap();
        assert!(net.certify().is_err());
    }
}
