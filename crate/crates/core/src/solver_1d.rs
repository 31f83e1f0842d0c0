//! Polynomial minimum reduction on the line.
//!
//! The classification splits the line into maximal open regions of constant
//! label separated by boundary points. A reduced set is a union of pairwise
//! compatible chains covering every boundary point; a `k`-chain spends one
//! point per region it touches and saves `k - 2` points against covering its
//! boundaries with separate pairs. The optimum is a maximum-weight
//! independent set in the interval graph of chains.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::model::{Label, LabelledPointSet};
use crate::rational::Rational;

/// Maximal constant-label regions `C_0..C_{t-1}` and boundary points
/// `b_0..b_{t-2}` (`b_i` between `C_i` and `C_{i+1}`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegionDecomposition {
    pub boundaries: Vec<Rational>,
    pub region_labels: Vec<Label>,
    /// Member indices in each region, ascending by coordinate.
    pub region_members: Vec<Vec<usize>>,
}

impl RegionDecomposition {
    pub fn t(&self) -> usize {
        self.region_labels.len()
    }

    /// Region containing coordinate `x` (not a boundary point).
    pub fn region_of(&self, x: &Rational) -> usize {
        self.boundaries.partition_point(|b| b < x)
    }
}

/// Region decomposition of the classification induced by `members`.
pub fn decompose_subset(set: &LabelledPointSet, members: &[usize]) -> RegionDecomposition {
    let x = |i: usize| &set.point(i).coords[0];
    let mut sorted = members.to_vec();
    sorted.sort_by(|&a, &b| x(a).cmp(x(b)));
    let mut boundaries = Vec::new();
    let mut region_labels = Vec::new();
    let mut region_members: Vec<Vec<usize>> = Vec::new();
    for (k, &i) in sorted.iter().enumerate() {
        let l = set.label(i);
        if region_labels.last() == Some(&l) {
            region_members.last_mut().expect("open region").push(i);
            continue;
        }
        if k > 0 {
            boundaries.push(Rational::midpoint(x(sorted[k - 1]), x(i)));
        }
        region_labels.push(l);
        region_members.push(vec![i]);
    }
    RegionDecomposition {
        boundaries,
        region_labels,
        region_members,
    }
}

pub fn decompose(set: &LabelledPointSet) -> RegionDecomposition {
    let all: Vec<usize> = (0..set.len()).collect();
    decompose_subset(set, &all)
}

/// Lexicographic weight: savings first, then number of chains.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ChainWeight {
    pub savings: i64,
    pub count: i64,
}

impl std::ops::Add for ChainWeight {
    type Output = ChainWeight;
    fn add(self, o: ChainWeight) -> ChainWeight {
        ChainWeight {
            savings: self.savings + o.savings,
            count: self.count + o.count,
        }
    }
}

/// Points `q_0 < ... < q_{k-1}` in consecutive regions starting at
/// `start_region`, with consecutive midpoints on the boundary points
/// `b_{start_region} .. b_{start_region + k - 2}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Chain {
    pub members: Vec<usize>,
    pub start_region: usize,
}

impl Chain {
    pub fn k(&self) -> usize {
        self.members.len()
    }

    pub fn weight(&self) -> ChainWeight {
        ChainWeight {
            savings: self.k() as i64 - 2,
            count: 1,
        }
    }

    /// Indices of the covered boundary points.
    pub fn covered(&self) -> std::ops::Range<usize> {
        self.start_region..self.start_region + self.k() - 1
    }

    pub fn first(&self) -> usize {
        self.members[0]
    }

    pub fn last(&self) -> usize {
        *self.members.last().expect("k >= 2")
    }
}

/// Every chain of length at least two.
///
/// Each chain is produced exactly once, from its first pair: the pair is
/// extended to the right as far as possible, since every next member is
/// forced (`q_{j+1} = 2 b - q_j`), and all prefixes are emitted.
pub fn enumerate_chains(decomp: &RegionDecomposition, set: &LabelledPointSet) -> Vec<Chain> {
    let mut by_coord: HashMap<&Rational, usize> = HashMap::new();
    for (i, p) in set.points().iter().enumerate() {
        by_coord.insert(&p.coords[0], i);
    }
    let two = Rational::from(2);
    let in_region = |i: usize, r: usize| {
        decomp
            .region_members
            .get(r)
            .is_some_and(|m| {
                let xi = &set.point(i).coords[0];
                m.binary_search_by(|&j| set.point(j).coords[0].cmp(xi)).is_ok()
            })
    };
    let mut out = Vec::new();
    for b in 0..decomp.boundaries.len() {
        for &x in &decomp.region_members[b] {
            let mut members = vec![x];
            let mut region = b;
            loop {
                let Some(bd) = decomp.boundaries.get(region) else {
                    break;
                };
                let last = &set.point(*members.last().expect("non-empty")).coords[0];
                let next = &(&two * bd) - last;
                match by_coord.get(&next) {
                    Some(&y) if in_region(y, region + 1) => {
                        members.push(y);
                        region += 1;
                        out.push(Chain {
                            members: members.clone(),
                            start_region: b,
                        });
                    }
                    _ => break,
                }
            }
        }
    }
    out
}

/// Maximum-weight set of pairwise compatible chains (closed coordinate
/// intervals disjoint), weights compared lexicographically.
///
/// Classic weighted interval scheduling: sort by right end, binary-search
/// the last chain ending strictly before each left end.
pub fn mwis_chains(chains: &[Chain], set: &LabelledPointSet) -> Vec<usize> {
    let x = |i: usize| &set.point(i).coords[0];
    let mut order: Vec<usize> = (0..chains.len()).collect();
    order.sort_by(|&a, &b| x(chains[a].last()).cmp(x(chains[b].last())));
    let rights: Vec<&Rational> = order.iter().map(|&c| x(chains[c].last())).collect();
    let n = order.len();
    // best[i]: optimum over the first i chains in order.
    let mut best = vec![ChainWeight::default(); n + 1];
    let mut take = vec![false; n + 1];
    let mut pred = vec![0usize; n + 1];
    for i in 1..=n {
        let c = &chains[order[i - 1]];
        let p = rights.partition_point(|r| *r < x(c.first()));
        let with = best[p] + c.weight();
        pred[i] = p;
        if with > best[i - 1] {
            best[i] = with;
            take[i] = true;
        } else {
            best[i] = best[i - 1];
        }
    }
    let mut picked = Vec::new();
    let mut i = n;
    while i > 0 {
        if take[i] {
            picked.push(order[i - 1]);
            i = pred[i];
        } else {
            i -= 1;
        }
    }
    picked.reverse();
    picked
}

/// Result of the line solver, with everything needed to explain it.
#[derive(Clone, Debug, Serialize)]
pub struct Solve1dReport {
    pub decomposition: RegionDecomposition,
    pub chains: Vec<Chain>,
    /// Chains making up the answer (after completion).
    pub selected: Vec<Chain>,
    /// Chains added by the completion sweep.
    pub completed: usize,
    pub subset: Vec<usize>,
}

impl Solve1dReport {
    /// `2(t-1) - Σ(k_i - 2)`, or 1 when there is a single region.
    pub fn formula_size(&self) -> usize {
        let t = self.decomposition.t();
        if t <= 1 {
            return 1;
        }
        let savings: usize = self.selected.iter().map(|c| c.k() - 2).sum();
        2 * (t - 1) - savings
    }

    pub fn explain(&self, set: &LabelledPointSet) -> String {
        let d = &self.decomposition;
        let x = |i: usize| set.point(i).coords[0].to_string();
        let mut s = String::new();
        let _ = writeln!(s, "regions (t = {}):", d.t());
        for (r, l) in d.region_labels.iter().enumerate() {
            let lo = if r == 0 { "-inf".to_string() } else { d.boundaries[r - 1].to_string() };
            let hi = d.boundaries.get(r).map_or("+inf".to_string(), |b| b.to_string());
            let pts: Vec<String> = d.region_members[r].iter().map(|&i| x(i)).collect();
            let _ = writeln!(s, "  C{r} = ({lo}, {hi}) label {l}: points [{}]", pts.join(", "));
        }
        let bs: Vec<String> = d.boundaries.iter().map(|b| b.to_string()).collect();
        let _ = writeln!(s, "boundary points: [{}]", bs.join(", "));
        let _ = writeln!(s, "chains ({}):", self.chains.len());
        for c in &self.chains {
            let pts: Vec<String> = c.members.iter().map(|&i| x(i)).collect();
            let _ = writeln!(s, "  {}-chain from C{}: [{}]", c.k(), c.start_region, pts.join(", "));
        }
        let _ = writeln!(s, "selected:");
        for c in &self.selected {
            let pts: Vec<String> = c.members.iter().map(|&i| x(i)).collect();
            let _ = writeln!(s, "  {}-chain [{}] covers b{:?}", c.k(), pts.join(", "), c.covered());
        }
        if d.t() > 1 {
            let terms: Vec<String> = self.selected.iter().map(|c| format!("{}", c.k() - 2)).collect();
            let _ = writeln!(
                s,
                "size = 2(t-1) - sum(k_i - 2) = 2*{} - ({}) = {}",
                d.t() - 1,
                if terms.is_empty() { "0".to_string() } else { terms.join(" + ") },
                self.formula_size()
            );
        }
        let _ = writeln!(s, "subset size {}", self.subset.len());
        s
    }
}

/// Cover every boundary point left uncovered by `selected`.
///
/// For an uncovered `b_j` the nearest points on either side form a chain.
/// If it touches a selected chain ending (or starting) at one of those
/// points, it is merged into it instead of added, so the point count never
/// grows beyond the separate-pair bound.
fn complete_cover(
    decomp: &RegionDecomposition,
    set: &LabelledPointSet,
    selected: &mut Vec<Chain>,
) -> usize {
    let mut added = 0;
    for j in 0..decomp.boundaries.len() {
        if selected.iter().any(|c| c.covered().contains(&j)) {
            continue;
        }
        let left = *decomp.region_members[j].last().expect("non-empty region");
        let right = decomp.region_members[j + 1][0];
        let li = selected.iter().position(|c| c.last() == left);
        let ri = selected.iter().position(|c| c.first() == right);
        match (li, ri) {
            (Some(a), Some(b)) => {
                let tail = selected[b].members.clone();
                selected[a].members.extend(tail);
                selected.remove(b);
            }
            (Some(a), None) => selected[a].members.push(right),
            (None, Some(b)) => {
                selected[b].members.insert(0, left);
                selected[b].start_region = j;
            }
            (None, None) => {
                selected.push(Chain {
                    members: vec![left, right],
                    start_region: j,
                });
                added += 1;
            }
        }
    }
    let x = |i: usize| &set.point(i).coords[0];
    selected.sort_by(|a, b| x(a.first()).cmp(x(b.first())));
    added
}

/// Minimum reduced training set of a 1D instance.
pub fn solve_1d(set: &LabelledPointSet) -> crate::Result<Solve1dReport> {
    if set.dim() != 1 {
        return Err(crate::error::GeometryError::DimensionMismatch(set.dim(), 1).into());
    }
    let decomposition = decompose(set);
    if decomposition.t() <= 1 {
        return Ok(Solve1dReport {
            decomposition,
            chains: Vec::new(),
            selected: Vec::new(),
            completed: 0,
            subset: vec![0],
        });
    }
    let chains = enumerate_chains(&decomposition, set);
    let picked = mwis_chains(&chains, set);
    let mut selected: Vec<Chain> = picked.iter().map(|&c| chains[c].clone()).collect();
    let completed = complete_cover(&decomposition, set, &mut selected);
    let mut subset: Vec<usize> = selected.iter().flat_map(|c| c.members.clone()).collect();
    subset.sort_unstable();
    subset.dedup();
    Ok(Solve1dReport {
        decomposition,
        chains,
        selected,
        completed,
        subset,
    })
}
