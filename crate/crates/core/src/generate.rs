//! Seeded instance generators.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{general_position, Point, Point2};
use crate::model::{Label, LabelledPointSet};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeneratorKind {
    /// Random integer points in general position.
    RandomGp,
    /// Integer grid; every unit square is cocircular.
    DegenerateGrid,
    /// Points on the diagonal line y = x.
    Collinear,
    /// Random points on the line.
    Random1d,
}

impl std::str::FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "random-gp" => GeneratorKind::RandomGp,
            "degenerate-grid" => GeneratorKind::DegenerateGrid,
            "collinear" => GeneratorKind::Collinear,
            "random-1d" => GeneratorKind::Random1d,
            _ => {
                return Err(Error::Precondition(format!(
                    "unknown generator `{s}` (random-gp, degenerate-grid, collinear, random-1d)"
                )))
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorParams {
    /// Number of points; for the grid, the number of columns.
    pub n: usize,
    /// Grid rows; ignored by the other kinds.
    pub rows: usize,
    pub m: Label,
    /// Coordinates are drawn from `0..spread`. Zero picks `10 * n * n`.
    pub spread: u64,
}

impl GeneratorParams {
    pub fn new(n: usize, m: Label) -> Self {
        GeneratorParams { n, rows: n, m, spread: 0 }
    }

    fn spread(&self) -> u64 {
        if self.spread == 0 {
            (10 * self.n * self.n).max(16) as u64
        } else {
            self.spread
        }
    }
}

fn labels(rng: &mut ChaCha8Rng, n: usize, m: Label) -> Vec<Label> {
    (0..n).map(|_| rng.gen_range(1..=m)).collect()
}

fn distinct(rng: &mut ChaCha8Rng, n: usize, spread: u64) -> Vec<i64> {
    let mut all: Vec<i64> = (0..spread as i64).collect();
    all.shuffle(rng);
    all.truncate(n);
    all
}

/// Generates an instance. The same seed and parameters give the same
/// instance on every platform.
pub fn generate(kind: GeneratorKind, params: &GeneratorParams, seed: u64) -> Result<LabelledPointSet> {
    if params.n == 0 || params.m == 0 || (kind == GeneratorKind::DegenerateGrid && params.rows == 0) {
        return Err(Error::Precondition("generator parameters must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spread = params.spread();
    let (n, m) = (params.n, params.m);
    match kind {
        GeneratorKind::RandomGp => {
            if spread * spread < n as u64 {
                return Err(Error::Precondition(format!("spread {spread} too small for {n} points")));
            }
            loop {
                let mut seen = HashSet::new();
                let mut pts = Vec::with_capacity(n);
                while pts.len() < n {
                    let p = (rng.gen_range(0..spread as i64), rng.gen_range(0..spread as i64));
                    if seen.insert(p) {
                        pts.push(Point::from(Point2::ints(p.0, p.1)));
                    }
                }
                if general_position(&pts).is_ok() {
                    let l = labels(&mut rng, n, m);
                    return LabelledPointSet::new(2, m, pts, l);
                }
            }
        }
        GeneratorKind::DegenerateGrid => {
            let cells = n * params.rows;
            let l = labels(&mut rng, cells, m);
            let entries = (0..params.rows)
                .flat_map(|r| (0..n).map(move |c| Point2::ints(c as i64, r as i64)))
                .zip(l)
                .collect();
            LabelledPointSet::planar(m, entries)
        }
        GeneratorKind::Collinear => {
            if spread < n as u64 {
                return Err(Error::Precondition(format!("spread {spread} too small for {n} points")));
            }
            let xs = distinct(&mut rng, n, spread);
            let l = labels(&mut rng, n, m);
            let entries = xs.into_iter().map(|x| Point2::ints(x, x)).zip(l).collect();
            LabelledPointSet::planar(m, entries)
        }
        GeneratorKind::Random1d => {
            if spread < n as u64 {
                return Err(Error::Precondition(format!("spread {spread} too small for {n} points")));
            }
            let xs = distinct(&mut rng, n, spread);
            let l = labels(&mut rng, n, m);
            let entries = xs.into_iter().map(Rational::from).zip(l).collect();
            LabelledPointSet::line(m, entries)
        }
    }
}
