//! Exact minimum reduced training sets by pruned enumeration.
//!
//! Every decision wall of the full instance must reappear in the subset,
//! generated by a pair of subset points with the wall's two labels whose
//! bisector contains it. Fixing such a pair for a wall also forbids every
//! point strictly closer to the wall's witness point than the pair, since the
//! pair must be nearest there. The search enumerates consistent pair choices
//! (cores), then supersets of the cores in order of size.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::equivalence::Oracle;
use crate::error::{Error, Result};
use crate::geometry::{bisector, Point, Point2};
use crate::model::LabelledPointSet;
use crate::rational::Rational;
use crate::relevant::relevant_points_by_walls;
use crate::voronoi::{voronoi_walls, WallGeometry, WallPiece};

/// Largest instance the bitmask search accepts.
pub const MAX_POINTS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Largest subset size examined.
    pub max_size: usize,
    /// Search nodes: core states plus candidate subsets.
    pub node_limit: u64,
    pub time_limit: Duration,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_size: MAX_POINTS,
            node_limit: 10_000_000,
            time_limit: Duration::from_secs(600),
        }
    }
}

impl SearchBudget {
    fn validate(&self) -> Result<()> {
        if self.max_size == 0 || self.node_limit == 0 || self.time_limit.is_zero() {
            return Err(Error::Precondition("search budget must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactSolution {
    pub subset: Vec<usize>,
    /// False when the budget ran out before optimality was established.
    pub optimal: bool,
    pub nodes: u64,
    pub oracle_calls: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Decision {
    Yes(Vec<usize>),
    No,
    Unknown,
}

type Mask = u64;

fn bits(m: Mask) -> Vec<usize> {
    (0..MAX_POINTS).filter(|&i| m >> i & 1 == 1).collect()
}

/// A way to generate one wall: the pair plus the points it excludes.
#[derive(Clone, Debug)]
struct WallOption {
    pair: Mask,
    forbid: Mask,
}

fn wall_options(set: &LabelledPointSet, w: &WallPiece) -> Vec<WallOption> {
    let n = set.len();
    let want = {
        let (a, b) = w.labels;
        (a.min(b), a.max(b))
    };
    let (witness, on_wall): (Point, Box<dyn Fn(usize, usize) -> bool>) = match &w.geometry {
        WallGeometry::Point(x) => {
            let x = x.clone();
            let pts: Vec<Rational> = set.points().iter().map(|p| p.coords[0].clone()).collect();
            (
                Point::d1(x.clone()),
                Box::new(move |i, j| Rational::midpoint(&pts[i], &pts[j]) == x),
            )
        }
        g => {
            let line = g.line().expect("planar wall has a line");
            let pts: Vec<Point2> = set.planar_points();
            (
                Point::from(g.interior_point()),
                Box::new(move |i, j| bisector(&pts[i], &pts[j]).is_ok_and(|b| b == line)),
            )
        }
    };
    let d2: Vec<Rational> = set
        .points()
        .iter()
        .map(|p| crate::geometry::squared_distance(p, &witness).expect("same dimension"))
        .collect();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (li, lj) = (set.label(i), set.label(j));
            if (li.min(lj), li.max(lj)) != want || !on_wall(i, j) {
                continue;
            }
            let forbid = (0..n).filter(|&k| d2[k] < d2[i]).fold(0, |m, k| m | 1 << k);
            out.push(WallOption {
                pair: 1 << i | 1 << j,
                forbid,
            });
        }
    }
    out
}

struct Search<'a> {
    oracle: Oracle<'a>,
    budget: SearchBudget,
    start: Instant,
    nodes: u64,
    oracle_calls: u64,
}

enum Outcome {
    /// Every equivalent subset of the smallest size, or just the first one.
    Found(Vec<Vec<usize>>),
    Exhausted,
    OutOfBudget,
}

impl Search<'_> {
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        self.nodes <= self.budget.node_limit
            && (!self.nodes.is_multiple_of(256) || self.start.elapsed() <= self.budget.time_limit)
    }

    /// All consistent (core, forbidden) pairs, walls taken fewest options first.
    fn cores(&mut self, walls: &[Vec<WallOption>]) -> Option<Vec<(Mask, Mask)>> {
        let mut states: HashSet<(Mask, Mask)> = HashSet::from([(0, 0)]);
        for opts in walls {
            let mut next = HashSet::new();
            for &(core, forbid) in &states {
                for o in opts {
                    if !self.tick() {
                        return None;
                    }
                    let (c, f) = (core | o.pair, forbid | o.forbid);
                    if c & f == 0 {
                        next.insert((c, f));
                    }
                }
            }
            states = next;
        }
        let mut v: Vec<_> = states.into_iter().collect();
        v.sort_unstable_by_key(|&(c, f)| (c.count_ones(), c, f));
        Some(v)
    }

    fn run(&mut self, max_size: usize, all_minimum: bool) -> Outcome {
        let set = self.oracle.set();
        let n = set.len();
        if set.used_labels().len() == 1 {
            let k = if all_minimum { n } else { 1 };
            return Outcome::Found((0..k).map(|i| vec![i]).collect());
        }
        let mut walls: Vec<Vec<WallOption>> = voronoi_walls(set)
            .iter()
            .filter(|w| w.is_decision())
            .map(|w| wall_options(set, w))
            .collect();
        walls.sort_by_key(Vec::len);
        let Some(cores) = self.cores(&walls) else {
            return Outcome::OutOfBudget;
        };
        let all: Mask = if n == MAX_POINTS { !0 } else { (1 << n) - 1 };
        let Some(lo) = cores.first().map(|c| c.0.count_ones() as usize) else {
            return Outcome::Exhausted;
        };
        let mut seen: HashSet<Mask> = HashSet::new();
        let mut found = Vec::new();
        for k in lo.max(1)..=max_size.min(n) {
            for &(core, forbid) in &cores {
                if core.count_ones() as usize > k {
                    break;
                }
                let need = k - core.count_ones() as usize;
                let free = bits(all & !core & !forbid);
                if free.len() < need {
                    continue;
                }
                let mut idx: Vec<usize> = (0..need).collect();
                loop {
                    if !self.tick() {
                        return Outcome::OutOfBudget;
                    }
                    let cand = idx.iter().fold(core, |m, &t| m | 1 << free[t]);
                    if seen.insert(cand) {
                        self.oracle_calls += 1;
                        let v = self.oracle.check(&bits(cand)).expect("valid subset");
                        if v.equivalent {
                            found.push(bits(cand));
                            if !all_minimum {
                                return Outcome::Found(found);
                            }
                        }
                    }
                    if !next_combination(&mut idx, free.len()) {
                        break;
                    }
                }
            }
            if !found.is_empty() {
                found.sort();
                return Outcome::Found(found);
            }
        }
        Outcome::Exhausted
    }
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn search<'a>(set: &'a LabelledPointSet, budget: &SearchBudget) -> Result<Search<'a>> {
    budget.validate()?;
    if set.len() > MAX_POINTS {
        return Err(Error::Precondition(format!(
            "exact search supports at most {MAX_POINTS} points, got {}",
            set.len()
        )));
    }
    Ok(Search {
        oracle: Oracle::new(set),
        budget: budget.clone(),
        start: Instant::now(),
        nodes: 0,
        oracle_calls: 0,
    })
}

/// Smallest reduced training set, or the best one known when the budget
/// runs out.
pub fn min_reduced(set: &LabelledPointSet, budget: &SearchBudget) -> Result<ExactSolution> {
    let mut s = search(set, budget)?;
    let outcome = s.run(budget.max_size, false);
    let (subset, optimal) = match outcome {
        Outcome::Found(mut sub) => (sub.swap_remove(0), true),
        Outcome::Exhausted | Outcome::OutOfBudget => {
            let rel = relevant_points_by_walls(set).relevant();
            s.oracle_calls += 1;
            let rel_ok = !rel.is_empty() && s.oracle.check(&rel)?.equivalent;
            let sub = if rel_ok { rel } else { (0..set.len()).collect() };
            // Exhausted below max_size means nothing smaller than max_size + 1 works.
            let optimal = matches!(outcome, Outcome::Exhausted) && sub.len() == budget.max_size + 1;
            (sub, optimal)
        }
    };
    Ok(ExactSolution {
        subset,
        optimal,
        nodes: s.nodes,
        oracle_calls: s.oracle_calls,
    })
}

/// Is there a reduced training set with at most `k` points?
pub fn decide(set: &LabelledPointSet, k: usize, budget: &SearchBudget) -> Result<Decision> {
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    let mut s = search(set, budget)?;
    Ok(match s.run(k.min(budget.max_size), false) {
        Outcome::Found(mut sub) => Decision::Yes(sub.swap_remove(0)),
        Outcome::Exhausted if k <= budget.max_size => Decision::No,
        _ => Decision::Unknown,
    })
}

/// Every reduced training set of the smallest size. Fails when the budget
/// runs out before the smallest size is settled.
pub fn all_minimum(set: &LabelledPointSet, budget: &SearchBudget) -> Result<Vec<Vec<usize>>> {
    let mut s = search(set, budget)?;
    match s.run(budget.max_size, true) {
        Outcome::Found(subs) => Ok(subs),
        Outcome::Exhausted => {
            if budget.max_size >= set.len() {
                return Err(Error::Verification("no reduced training set found".into()));
            }
            Err(Error::BudgetExhausted(format!(
                "no reduced training set with at most {} points",
                budget.max_size
            )))
        }
        Outcome::OutOfBudget => Err(Error::BudgetExhausted("node or time limit reached".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::is_reduced_training_set;
    use crate::model::Label;
    use crate::rational::q;

    fn inst(v: &[((i64, i64), Label)]) -> LabelledPointSet {
        LabelledPointSet::planar(
            3,
            v.iter().map(|&((x, y), l)| (Point2::ints(x, y), l)).collect(),
        )
        .unwrap()
    }

    fn brute_min(set: &LabelledPointSet) -> usize {
        let n = set.len();
        (1u32..1 << n)
            .filter(|m| {
                let s: Vec<usize> = (0..n).filter(|i| m >> i & 1 == 1).collect();
                is_reduced_training_set(set, &s).unwrap().equivalent
            })
            .map(u32::count_ones)
            .min()
            .unwrap() as usize
    }

    #[test]
    fn two_points() {
        let set = inst(&[((0, 0), 1), ((2, 0), 2)]);
        let r = min_reduced(&set, &SearchBudget::default()).unwrap();
        assert_eq!(r.subset, vec![0, 1]);
        assert!(r.optimal);
        let b = SearchBudget::default();
        assert_eq!(decide(&set, 1, &b).unwrap(), Decision::No);
        assert_eq!(decide(&set, 2, &b).unwrap(), Decision::Yes(vec![0, 1]));
    }

    #[test]
    fn collinear_triple_needs_all() {
        let set = inst(&[((0, 0), 1), ((2, 0), 2), ((4, 0), 1)]);
        let b = SearchBudget::default();
        assert_eq!(min_reduced(&set, &b).unwrap().subset.len(), 3);
        assert_eq!(decide(&set, 2, &b).unwrap(), Decision::No);
    }

    #[test]
    fn degenerate_grid_matches_brute_force() {
        // A 3x3 grid with a checkerboard-ish labelling has many shared bisectors.
        let mut v = Vec::new();
        for x in 0..3 {
            for y in 0..3 {
                v.push(((x * 2, y * 2), if (x + 2 * y) % 3 == 0 { 1 } else { 2 }));
            }
        }
        let set = inst(&v);
        let r = min_reduced(&set, &SearchBudget::default()).unwrap();
        assert!(r.optimal);
        assert!(is_reduced_training_set(&set, &r.subset).unwrap().equivalent);
        assert_eq!(r.subset.len(), brute_min(&set));
    }

    #[test]
    fn line_instances_match_brute_force() {
        let set = LabelledPointSet::line(
            2,
            [(0, 1), (1, 1), (3, 2), (4, 2), (6, 1), (7, 2)]
                .iter()
                .map(|&(x, l)| (q(x, 1), l))
                .collect(),
        )
        .unwrap();
        let r = min_reduced(&set, &SearchBudget::default()).unwrap();
        assert_eq!(r.subset.len(), brute_min(&set));
    }

    #[test]
    fn budget_exhaustion_falls_back() {
        let set = inst(&[((0, 0), 1), ((2, 0), 2), ((4, 0), 1), ((1, 3), 2)]);
        let b = SearchBudget {
            node_limit: 1,
            ..SearchBudget::default()
        };
        let r = min_reduced(&set, &b).unwrap();
        assert!(!r.optimal);
        assert!(is_reduced_training_set(&set, &r.subset).unwrap().equivalent);
        assert_eq!(decide(&set, 2, &b).unwrap(), Decision::Unknown);
    }

    #[test]
    fn single_label() {
        let set = inst(&[((0, 0), 2), ((2, 0), 2)]);
        assert_eq!(min_reduced(&set, &SearchBudget::default()).unwrap().subset, vec![0]);
    }

    #[test]
    fn symmetric_pairs_have_several_minima() {
        // Red and blue columns at x = 0 and x = 2: any one row suffices,
        // and so does any red/blue pair placed symmetrically about x = 1.
        let s = inst(&[((0, 0), 1), ((2, 0), 2), ((0, 3), 1), ((2, 3), 2)]);
        let all = all_minimum(&s, &SearchBudget::default()).unwrap();
        assert_eq!(all, vec![vec![0, 1], vec![2, 3]]);
        for sub in &all {
            assert!(is_reduced_training_set(&s, sub).unwrap().equivalent);
        }
        let one = inst(&[((0, 0), 1), ((5, 5), 1)]);
        assert_eq!(all_minimum(&one, &SearchBudget::default()).unwrap().len(), 2);
    }
}
