//! V-cycle max2SAT formulas and their text format.
//!
//! ```text
//! c comment
//! p vcmax2sat <a> <b> <k>
//! 1 -2 0
//! -1 0
//! ```
//!
//! Literal `i` is `x_{i-1}`, `-i` its negation. The trailing `0` is optional.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, ParseError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Literal {
            var,
            positive: false,
        }
    }

    pub fn holds(&self, assignment: &[bool]) -> bool {
        assignment[self.var] == self.positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.var as i64 + 1;
        write!(f, "{}", if self.positive { v } else { -v })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Clause(Vec<Literal>);

impl Clause {
    pub fn new(lits: Vec<Literal>) -> Result<Self> {
        match lits.len() {
            1 => {}
            2 if lits[0].var != lits[1].var => {}
            2 => {
                return Err(Error::InvalidInstance(format!(
                    "clause repeats variable x{}",
                    lits[0].var
                )))
            }
            n => {
                return Err(Error::InvalidInstance(format!(
                    "clause has {n} literals, expected 1 or 2"
                )))
            }
        }
        Ok(Clause(lits))
    }

    pub fn literals(&self) -> &[Literal] {
        &self.0
    }

    pub fn holds(&self, assignment: &[bool]) -> bool {
        self.0.iter().any(|l| l.holds(assignment))
    }

    /// Spine interval `(min var, max var)` of the clause.
    pub fn span(&self) -> (usize, usize) {
        let vs = self.0.iter().map(|l| l.var);
        (vs.clone().min().unwrap(), vs.max().unwrap())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Max2SatInstance {
    pub a: usize,
    pub clauses: Vec<Clause>,
    pub k: usize,
}

impl Max2SatInstance {
    pub fn new(a: usize, clauses: Vec<Clause>, k: usize) -> Result<Self> {
        if clauses.is_empty() {
            return Err(Error::InvalidInstance("formula has no clauses".into()));
        }
        for (j, c) in clauses.iter().enumerate() {
            for l in c.literals() {
                if l.var >= a {
                    return Err(Error::InvalidInstance(format!(
                        "clause {j} uses x{} but a = {a}",
                        l.var
                    )));
                }
            }
        }
        Ok(Max2SatInstance { a, clauses, k })
    }

    pub fn b(&self) -> usize {
        self.clauses.len()
    }

    pub fn satisfied(&self, assignment: &[bool]) -> usize {
        self.clauses.iter().filter(|c| c.holds(assignment)).count()
    }

    /// Largest number of simultaneously satisfiable clauses (exhaustive).
    pub fn max_satisfied(&self) -> usize {
        assert!(self.a < 24, "exhaustive max2SAT limited to 23 variables");
        (0u32..1 << self.a)
            .map(|m| {
                let asg: Vec<bool> = (0..self.a).map(|i| m >> i & 1 == 1).collect();
                self.satisfied(&asg)
            })
            .max()
            .unwrap_or(0)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut clauses = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let bad = |msg: String| Error::from(ParseError::Line { line: ln, msg });
            if let Some(rest) = line.strip_prefix('p') {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if header.is_some() || toks.len() != 4 || toks[0] != "vcmax2sat" {
                    return Err(bad("header must be `p vcmax2sat a b k`".into()));
                }
                let nums: Vec<usize> = toks[1..]
                    .iter()
                    .map(|t| t.parse().map_err(|_| bad(format!("bad number `{t}`"))))
                    .collect::<Result<_>>()?;
                header = Some((nums[0], nums[1], nums[2]));
                continue;
            }
            let Some((a, _, _)) = header else {
                return Err(bad("clause before header".into()));
            };
            let mut lits = Vec::new();
            for t in line.split_whitespace() {
                let v: i64 = t.parse().map_err(|_| bad(format!("bad literal `{t}`")))?;
                if v == 0 {
                    break;
                }
                let var = (v.unsigned_abs() - 1) as usize;
                if var >= a {
                    return Err(bad(format!("literal {v} out of range for a = {a}")));
                }
                lits.push(Literal {
                    var,
                    positive: v > 0,
                });
            }
            clauses.push(Clause::new(lits).map_err(|e| bad(e.to_string()))?);
        }
        let (a, b, k) = header.ok_or(ParseError::Line {
            line: 1,
            msg: "missing `p vcmax2sat` header".into(),
        })?;
        if clauses.len() != b {
            return Err(ParseError::Line {
                line: text.lines().count(),
                msg: format!("header declares {b} clauses, found {}", clauses.len()),
            }
            .into());
        }
        Max2SatInstance::new(a, clauses, k)
    }
}

impl fmt::Display for Max2SatInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p vcmax2sat {} {} {}", self.a, self.b(), self.k)?;
        for c in &self.clauses {
            for l in c.literals() {
                write!(f, "{l} ")?;
            }
            writeln!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        let text = "c tiny\np vcmax2sat 3 2 1\n1 -3 0\n-2\n";
        let f = Max2SatInstance::parse(text).unwrap();
        assert_eq!(f.a, 3);
        assert_eq!(f.clauses[0].literals(), &[Literal::pos(0), Literal::neg(2)]);
        assert_eq!(f.clauses[1].literals(), &[Literal::neg(1)]);
        assert_eq!(Max2SatInstance::parse(&f.to_string()).unwrap(), f);
        assert_eq!(f.max_satisfied(), 2);
    }

    #[test]
    fn parse_errors() {
        assert!(Max2SatInstance::parse("1 2 0\n").is_err());
        assert!(Max2SatInstance::parse("p vcmax2sat 2 1 1\n1 3 0\n").is_err());
        assert!(Max2SatInstance::parse("p vcmax2sat 2 2 1\n1 2 0\n").is_err());
        assert!(Max2SatInstance::parse("p vcmax2sat 2 1 1\n1 -1 0\n").is_err());
        assert!(Max2SatInstance::parse("p vcmax2sat 3 1 1\n1 2 3 0\n").is_err());
    }
}
