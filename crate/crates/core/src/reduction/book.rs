//! Two-page book embeddings with the spine fixed to `x_0, …, x_{a-1}`.
//!
//! Clause chords that interleave on the spine must go to different pages, so
//! a page assignment is a 2-colouring of the chord conflict graph. The cycle
//! edge `(x_{a-1}, x_0)` encloses every chord and never conflicts.

use std::collections::VecDeque;

use serde::Serialize;

use super::sat::Max2SatInstance;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Page {
    Top,
    Bottom,
}

impl Page {
    /// `+1` above the spine, `-1` below.
    pub fn sign(self) -> i64 {
        match self {
            Page::Top => 1,
            Page::Bottom => -1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BookEmbedding {
    /// Spine order of the variables.
    pub order: Vec<usize>,
    /// Page of each clause.
    pub pages: Vec<Page>,
}

fn interleave((a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
    (a < c && c < b && b < d) || (c < a && a < d && d < b)
}

/// Page assignment, or an odd cycle of pairwise-interleaving clauses.
pub fn two_page_assignment(inst: &Max2SatInstance) -> Result<BookEmbedding> {
    let b = inst.b();
    let spans: Vec<(usize, usize)> = inst.clauses.iter().map(|c| c.span()).collect();
    let adj: Vec<Vec<usize>> = (0..b)
        .map(|i| {
            (0..b)
                .filter(|&j| j != i && interleave(spans[i], spans[j]))
                .collect()
        })
        .collect();
    let mut colour: Vec<Option<u8>> = vec![None; b];
    let mut parent: Vec<usize> = (0..b).collect();
    let mut depth = vec![0usize; b];
    for root in 0..b {
        if colour[root].is_some() {
            continue;
        }
        colour[root] = Some(0);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                match colour[v] {
                    None => {
                        colour[v] = Some(1 - colour[u].unwrap());
                        parent[v] = u;
                        depth[v] = depth[u] + 1;
                        queue.push_back(v);
                    }
                    Some(c) if c == colour[u].unwrap() => {
                        return Err(Error::NotEmbeddable(odd_cycle(u, v, &parent, &depth)));
                    }
                    Some(_) => {}
                }
            }
        }
    }
    Ok(BookEmbedding {
        order: (0..inst.a).collect(),
        pages: colour
            .into_iter()
            .map(|c| if c == Some(0) { Page::Top } else { Page::Bottom })
            .collect(),
    })
}

/// Tree paths from `u` and `v` to their common ancestor, closed by edge `uv`.
fn odd_cycle(mut u: usize, mut v: usize, parent: &[usize], depth: &[usize]) -> Vec<usize> {
    let (mut left, mut right) = (vec![u], vec![v]);
    while depth[u] > depth[v] {
        u = parent[u];
        left.push(u);
    }
    while depth[v] > depth[u] {
        v = parent[v];
        right.push(v);
    }
    while u != v {
        u = parent[u];
        v = parent[v];
        left.push(u);
        right.push(v);
    }
    right.pop();
    left.extend(right.into_iter().rev());
    left
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::sat::{Clause, Literal};

    fn inst(a: usize, pairs: &[(usize, usize)]) -> Max2SatInstance {
        let clauses = pairs
            .iter()
            .map(|&(i, j)| Clause::new(vec![Literal::pos(i), Literal::pos(j)]).unwrap())
            .collect();
        Max2SatInstance::new(a, clauses, 1).unwrap()
    }

    #[test]
    fn crossing_chords_split() {
        let e = two_page_assignment(&inst(4, &[(0, 2), (1, 3)])).unwrap();
        assert_ne!(e.pages[0], e.pages[1]);
    }

    #[test]
    fn nested_chords_share() {
        let e = two_page_assignment(&inst(3, &[(0, 1), (1, 2)])).unwrap();
        assert_eq!(e.pages[0], e.pages[1]);
    }

    #[test]
    fn triangle_rejected() {
        // Four spine slots admit no three pairwise-interleaving chords; six do.
        let f = inst(6, &[(0, 3), (1, 4), (2, 5)]);
        let spans: Vec<_> = f.clauses.iter().map(|c| c.span()).collect();
        match two_page_assignment(&f) {
            Err(Error::NotEmbeddable(cycle)) => {
                assert_eq!(cycle.len() % 2, 1);
                for w in 0..cycle.len() {
                    let (x, y) = (cycle[w], cycle[(w + 1) % cycle.len()]);
                    assert!(interleave(spans[x], spans[y]));
                }
            }
            other => panic!("{other:?}"),
        }
    }
}
