//! Layout constants and the rational bend rotation.

use serde::Serialize;

use crate::geometry::Vec2;
use crate::rational::{q, Rational};

/// Rotation by an angle with rational sine and cosine.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rotation {
    pub cos: Rational,
    pub sin: Rational,
}

impl Rotation {
    pub fn identity() -> Self {
        Rotation {
            cos: Rational::one(),
            sin: Rational::zero(),
        }
    }

    /// The 11-60-61 bend, about 10.39 degrees.
    pub fn bend() -> Self {
        Rotation {
            cos: q(60, 61),
            sin: q(11, 61),
        }
    }

    pub fn is_orthogonal(&self) -> bool {
        self.cos.square() + self.sin.square() == Rational::one()
    }

    pub fn inverse(&self) -> Self {
        Rotation {
            cos: self.cos.clone(),
            sin: -&self.sin,
        }
    }

    pub fn compose(&self, other: &Rotation) -> Rotation {
        Rotation {
            cos: &self.cos * &other.cos - &self.sin * &other.sin,
            sin: &self.sin * &other.cos + &self.cos * &other.sin,
        }
    }

    pub fn pow(&self, n: u32) -> Rotation {
        (0..n).fold(Rotation::identity(), |acc, _| acc.compose(self))
    }

    /// Counter-clockwise rotation of `v`.
    pub fn apply(&self, v: &Vec2) -> Vec2 {
        Vec2::new(
            &self.cos * &v.x - &self.sin * &v.y,
            &self.sin * &v.x + &self.cos * &v.y,
        )
    }

    /// Rows of the 2x2 matrix.
    pub fn matrix(&self) -> [[Rational; 2]; 2] {
        [
            [self.cos.clone(), -&self.sin],
            [self.sin.clone(), self.cos.clone()],
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LayoutConstants {
    /// Height of a variable row and length of a channel region.
    pub vertical_unit: Rational,
    /// Distance between neighbouring variable columns.
    pub horizontal_pitch: Rational,
    /// Offsets of `a2` from `a1`: this far back along the channel direction.
    pub clause_vertical_offset: Rational,
    /// ...and this far to the right.
    pub clause_horizontal_offset: Rational,
    pub bend: Rotation,
    /// Offset of the two candidate points from a region's centre.
    pub candidate_offset: (Rational, Rational),
    pub channel_half_width: Rational,
    /// Distance from the port to the first channel region.
    pub port_entry: Rational,
    /// Exit distance used on both sides of a bend.
    pub bend_exit: Rational,
    /// Distance from `a1` to the clause region.
    pub clause_depth: Rational,
    /// Depth of the clause's own candidate inside its region.
    pub clause_core_depth: Rational,
    /// Region height beyond `v`.
    pub clause_headroom: Rational,
    /// Margin left and right of `a1`, `a2`.
    pub clause_margin: Rational,
    /// Empty columns between consecutive variable gadgets.
    pub variable_gap_columns: usize,
    /// Clearance kept between a clause and channels passing over it.
    pub clearance: Rational,
    /// Horizontal distance that keeps foreign points away from the bottom
    /// corners of a clause region; those corners are about `clause_depth`
    /// from the clause candidates.
    pub clause_clearance: Rational,
}

impl Default for LayoutConstants {
    fn default() -> Self {
        LayoutConstants {
            vertical_unit: q(1, 1),
            horizontal_pitch: q(16, 5),
            clause_vertical_offset: q(1, 2),
            clause_horizontal_offset: q(5, 1),
            bend: Rotation::bend(),
            candidate_offset: (q(2, 5), q(2, 5)),
            channel_half_width: q(1, 2),
            port_entry: q(3, 2),
            bend_exit: q(3, 4),
            clause_depth: q(50, 1),
            clause_core_depth: q(45, 1),
            clause_headroom: q(2, 1),
            clause_margin: q(1, 2),
            variable_gap_columns: 3,
            clearance: q(4, 1),
            clause_clearance: q(56, 1),
        }
    }
}

impl LayoutConstants {
    /// Columns spanning at least `clause_clearance`.
    pub fn clearance_columns(&self) -> usize {
        let mut n = 0usize;
        while &self.horizontal_pitch * &Rational::from(n as i64) < self.clause_clearance {
            n += 1;
        }
        n
    }

    /// Exit distance of an ordinary channel region.
    pub fn step(&self) -> Rational {
        &self.vertical_unit / &Rational::from(2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bend_is_exact() {
        let r = Rotation::bend();
        assert!(r.is_orthogonal());
        let r36 = r.pow(36);
        assert!(r36.is_orthogonal());
        assert_eq!(r36.compose(&r.inverse().pow(36)), Rotation::identity());
        let v = r.apply(&Vec2::new(q(0, 1), q(1, 1)));
        assert_eq!(v, Vec2::new(q(-11, 61), q(60, 61)));
    }
}
