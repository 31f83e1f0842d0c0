//! Relevant points, computed from the decision boundary and, independently,
//! straight from the definition.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::equivalence::{Counterexample, EquivalenceVerdict, Oracle};
use crate::error::{Error, Result};
use crate::geometry::general_position;
use crate::model::LabelledPointSet;
use crate::voronoi::{decision_boundary, WallPiece};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelevanceMethod {
    BoundaryWall,
    RemovalOracle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum RelevanceWitness {
    Wall(WallPiece),
    Counterexample(Counterexample),
}

#[derive(Clone, Debug, Serialize)]
pub struct RelevantReport {
    pub method: RelevanceMethod,
    /// Relevant indices with one witness each, ascending.
    pub witnesses: BTreeMap<usize, RelevanceWitness>,
}

impl RelevantReport {
    pub fn relevant(&self) -> Vec<usize> {
        self.witnesses.keys().copied().collect()
    }
}

/// `p` is relevant iff dropping it alone changes the classification.
pub fn relevant_points_by_definition(set: &LabelledPointSet) -> RelevantReport {
    let oracle = Oracle::new(set);
    let mut witnesses = BTreeMap::new();
    if set.len() > 1 {
        for p in 0..set.len() {
            let rest: Vec<usize> = (0..set.len()).filter(|&i| i != p).collect();
            let v = oracle.check(&rest).expect("valid subset");
            if let Some(c) = v.counterexample {
                witnesses.insert(p, RelevanceWitness::Counterexample(c));
            }
        }
    }
    RelevantReport {
        method: RelevanceMethod::RemovalOracle,
        witnesses,
    }
}

/// Endpoints of the pairs generating decision-boundary walls.
pub fn relevant_points_by_walls(set: &LabelledPointSet) -> RelevantReport {
    let mut witnesses = BTreeMap::new();
    for w in decision_boundary(set).pieces {
        for p in [w.pair.0, w.pair.1] {
            witnesses
                .entry(p)
                .or_insert_with(|| RelevanceWitness::Wall(w.clone()));
        }
    }
    RelevantReport {
        method: RelevanceMethod::BoundaryWall,
        witnesses,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct UniquenessCertificate {
    /// Oracle verdict for the returned subset.
    pub verdict: EquivalenceVerdict,
    /// Generating pair of every decision wall. In general position each wall
    /// has exactly one such pair, so both ends belong to every reduced set.
    pub wall_pairs: Vec<(usize, usize)>,
    /// Set when the instance has a single label and any one point suffices.
    pub single_label: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneralPositionReduction {
    pub subset: Vec<usize>,
    pub certificate: UniquenessCertificate,
}

/// The unique minimum reduced training set of an instance in general position.
pub fn reduce_general_position(set: &LabelledPointSet) -> Result<GeneralPositionReduction> {
    general_position(set.points()).map_err(Error::NotGeneralPosition)?;
    let report = relevant_points_by_walls(set);
    let mut wall_pairs: Vec<(usize, usize)> = report
        .witnesses
        .values()
        .filter_map(|w| match w {
            RelevanceWitness::Wall(p) => Some(p.pair),
            RelevanceWitness::Counterexample(_) => None,
        })
        .collect();
    wall_pairs.sort_unstable();
    wall_pairs.dedup();
    let mut subset = report.relevant();
    let single_label = subset.is_empty();
    if single_label {
        subset.push(0);
    }
    let verdict = Oracle::new(set).check(&subset)?;
    if !verdict.equivalent {
        return Err(Error::Verification(format!(
            "relevant set {subset:?} is not a reduced training set"
        )));
    }
    Ok(GeneralPositionReduction {
        subset,
        certificate: UniquenessCertificate {
            verdict,
            wall_pairs,
            single_label,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::is_reduced_training_set;
    use crate::geometry::Point2;
    use crate::model::{classify, Label};
    use crate::rational::q;

    fn inst(v: &[((i64, i64), Label)]) -> LabelledPointSet {
        LabelledPointSet::planar(
            2,
            v.iter().map(|&((x, y), l)| (Point2::ints(x, y), l)).collect(),
        )
        .unwrap()
    }

    fn both(set: &LabelledPointSet) -> Vec<usize> {
        let a = relevant_points_by_walls(set).relevant();
        let b = relevant_points_by_definition(set).relevant();
        assert_eq!(a, b);
        a
    }

    #[test]
    fn two_labels_both_relevant() {
        assert_eq!(both(&inst(&[((0, 0), 1), ((2, 0), 2)])), vec![0, 1]);
    }

    #[test]
    fn single_label_has_no_relevant_points() {
        assert!(both(&inst(&[((0, 0), 1), ((2, 0), 1), ((5, 7), 1)])).is_empty());
        assert!(both(&inst(&[((3, 3), 2)])).is_empty());
    }

    #[test]
    fn line_instance() {
        let set = LabelledPointSet::line(2, vec![(q(0, 1), 1), (q(1, 1), 1), (q(2, 1), 2)]).unwrap();
        assert_eq!(both(&set), vec![1, 2]);
    }

    #[test]
    fn collinear_planar_all_relevant() {
        assert_eq!(both(&inst(&[((0, 0), 1), ((2, 0), 2), ((4, 0), 1)])), vec![0, 1, 2]);
    }

    #[test]
    fn definition_witnesses_verify() {
        let set = inst(&[((0, 0), 1), ((2, 0), 2), ((1, 5), 2), ((9, 1), 1)]);
        for (p, w) in relevant_points_by_definition(&set).witnesses {
            let RelevanceWitness::Counterexample(c) = w else {
                panic!()
            };
            let rest = set
                .restrict(&(0..set.len()).filter(|&i| i != p).collect::<Vec<_>>())
                .unwrap();
            assert_eq!(classify(&c.point, &set), c.full);
            assert_eq!(classify(&c.point, &rest), c.subset);
            assert_ne!(c.full, c.subset);
        }
    }

    #[test]
    fn general_position_fast_path() {
        let set = inst(&[((0, 0), 1), ((2, 0), 2), ((1, 5), 2)]);
        let r = reduce_general_position(&set).unwrap();
        assert!(r.certificate.verdict.equivalent);
        assert!(!r.certificate.single_label);
        for k in 0..r.subset.len() {
            let mut s = r.subset.clone();
            s.remove(k);
            if !s.is_empty() {
                assert!(!is_reduced_training_set(&set, &s).unwrap().equivalent);
            }
        }
        // Brute force: no smaller subset works.
        for mask in 1u32..8 {
            let s: Vec<usize> = (0..3).filter(|i| mask >> i & 1 == 1).collect();
            if s.len() < r.subset.len() {
                assert!(!is_reduced_training_set(&set, &s).unwrap().equivalent);
            }
        }
    }

    #[test]
    fn single_label_fast_path_flags() {
        let set = inst(&[((0, 0), 1), ((2, 1), 1), ((1, 5), 1)]);
        let r = reduce_general_position(&set).unwrap();
        assert_eq!(r.subset, vec![0]);
        assert!(r.certificate.single_label);
    }

    #[test]
    fn square_corners_rejected() {
        let set = inst(&[((0, 0), 1), ((1, 0), 2), ((1, 1), 1), ((0, 1), 2)]);
        match reduce_general_position(&set) {
            Err(Error::NotGeneralPosition(w)) => {
                assert!(matches!(w, crate::geometry::DegeneracyWitness::Cocircular(_)))
            }
            other => panic!("{other:?}"),
        }
    }
}
