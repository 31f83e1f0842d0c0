//! Exact minimum-cardinality reduction of nearest-neighbor training sets in
//! one and two dimensions.

pub mod equivalence;
pub mod error;
pub mod generate;
pub mod geometry;
pub mod model;
pub mod rational;
pub mod reduction;
pub mod relevant;
pub mod solver_1d;
pub mod solver_exact;
pub mod svg;
pub mod voronoi;

pub use error::{Error, Result};
pub use geometry::{Line, Point, Point2, Vec2};
pub use model::{Classifier, Label, LabelSet, LabelledPointSet};
pub use rational::Rational;
