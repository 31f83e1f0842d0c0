//! Assembly of a whole formula into one red/blue point set.
//!
//! Variables sit left to right on the spine `y = 0`. Every literal gets a
//! channel on its clause's page; two-literal clauses route both channels up
//! to a common height, bending toward each other once and back once. Nested
//! clauses are stacked by nesting level, so channels never cross.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::book::{two_page_assignment, BookEmbedding, Page};
use super::gadget::{
    build_channel, build_clause_gadget, build_variable_gadget, clause_guards, trace_channel,
    Attachment, Channel, ChannelStep, ClauseGadget, Port, VariableGadget,
};
use super::layout::LayoutConstants;
use super::network::{Network, BLUE, RED};
use super::sat::{Literal, Max2SatInstance};
use crate::error::{Error, Result};
use crate::geometry::{Point2, Vec2};
use crate::model::LabelledPointSet;
use crate::rational::Rational;

/// Coordinate size limit checked at build time.
const MAX_COORDINATE_BITS: u64 = 512;

#[derive(Clone, Debug, Serialize)]
pub struct ChannelRecord {
    pub clause: usize,
    pub literal: Literal,
    pub channel: Channel,
}

/// Points `start..end` were first added by this gadget.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GadgetRange {
    pub kind: String,
    pub name: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub a: usize,
    pub b: usize,
    pub k: usize,
    pub n1: usize,
    pub n2: usize,
    /// `n1 + n2 - k`.
    pub target_size: usize,
    pub points: usize,
    pub red: usize,
    pub blue: usize,
    pub max_coordinate_bits: u64,
    pub pages: Vec<Page>,
    pub levels: Vec<usize>,
    pub gadgets: Vec<GadgetRange>,
}

#[derive(Clone, Debug)]
pub struct CompiledInstance {
    pub instance: Max2SatInstance,
    pub embedding: BookEmbedding,
    pub constants: LayoutConstants,
    pub network: Network,
    pub variables: Vec<VariableGadget>,
    pub channels: Vec<ChannelRecord>,
    pub clauses: Vec<ClauseGadget>,
    pub levels: Vec<usize>,
    pub ranges: Vec<GadgetRange>,
    pub n1: usize,
    pub n2: usize,
    pub set: LabelledPointSet,
}

impl CompiledInstance {
    pub fn target_size(&self, k: usize) -> usize {
        self.n1 + self.n2 - k.min(self.instance.b())
    }

    /// The subset selected by `assignment`: every gadget's truth version plus
    /// each clause's cheapest completion. Its size is checked against
    /// `n1 + n2 - satisfied`.
    pub fn assignment_to_subset(&self, assignment: &[bool]) -> Result<Vec<usize>> {
        if assignment.len() != self.instance.a {
            return Err(Error::Precondition(format!(
                "assignment has {} values for {} variables",
                assignment.len(),
                self.instance.a
            )));
        }
        let subset = self.network.version(assignment);
        let expected = self.n1 + self.n2 - self.instance.satisfied(assignment);
        if subset.len() != expected {
            return Err(Error::Verification(format!(
                "subset has {} points, expected {expected}",
                subset.len()
            )));
        }
        Ok(subset)
    }

    pub fn manifest(&self) -> Manifest {
        let labels = self.network.labels();
        Manifest {
            a: self.instance.a,
            b: self.instance.b(),
            k: self.instance.k,
            n1: self.n1,
            n2: self.n2,
            target_size: self.target_size(self.instance.k),
            points: self.network.len(),
            red: labels.iter().filter(|&&l| l == RED).count(),
            blue: labels.iter().filter(|&&l| l == BLUE).count(),
            max_coordinate_bits: max_bits(self.network.points()),
            pages: self.embedding.pages.clone(),
            levels: self.levels.clone(),
            gadgets: self.ranges.clone(),
        }
    }
}

fn max_bits(points: &[Point2]) -> u64 {
    points
        .iter()
        .map(|p| p.x.bit_size().max(p.y.bit_size()))
        .max()
        .unwrap_or(0)
}

pub fn compile(inst: &Max2SatInstance) -> Result<CompiledInstance> {
    compile_with(inst, &LayoutConstants::default())
}

/// Position of a literal occurrence among the channels leaving its variable.
#[derive(Clone, Copy, Debug)]
enum Role {
    /// Partner to the left; `(span, clause)` orders nesting.
    Left(usize, usize),
    Unit(usize),
    Right(usize, usize),
}

impl Role {
    /// Left-to-right order of attachment columns on one side.
    fn order(self) -> (u8, i64, i64) {
        match self {
            Role::Left(s, c) => (0, s as i64, c as i64),
            Role::Unit(c) => (1, 0, c as i64),
            Role::Right(s, c) => (2, -(s as i64), -(c as i64)),
        }
    }
}

fn nesting_levels(inst: &Max2SatInstance, pages: &[Page]) -> Vec<usize> {
    let b = inst.b();
    let key = |c: usize| {
        let (i, j) = inst.clauses[c].span();
        (j - i, c)
    };
    let mut order: Vec<usize> = (0..b).collect();
    order.sort_by_key(|&c| key(c));
    let mut level = vec![0usize; b];
    for (pos, &c) in order.iter().enumerate() {
        let (i, j) = inst.clauses[c].span();
        let inner = order[..pos].iter().filter(|&&d| {
            let (p, q) = inst.clauses[d].span();
            pages[d] == pages[c] && i <= p && q <= j
        });
        level[c] = inner.map(|&d| level[d] + 1).max().unwrap_or(0);
    }
    level
}

/// Columns for the attachments of one variable. Neighbours on the same side
/// are `sep` columns apart; the two sides never share a column.
fn assign_columns(roles: &[(Page, Role, Attachment)], sep: usize) -> (Vec<usize>, usize) {
    let mut cols = vec![0usize; roles.len()];
    let mut used = BTreeSet::new();
    for side in [Page::Top, Page::Bottom] {
        let mut idx: Vec<usize> = (0..roles.len()).filter(|&i| roles[i].0 == side).collect();
        idx.sort_by_key(|&i| roles[i].1.order());
        let mut next = 1;
        for i in idx {
            let mut col = next;
            while used.contains(&col) || (col % 2 == 1) != roles[i].2.needs_blue_column() {
                col += 1;
            }
            cols[i] = col;
            used.insert(col);
            next = col + sep;
        }
    }
    let last = used.iter().max().map_or(1, |m| m + 1);
    let columns = if last % 2 == 0 { last + 1 } else { last + 2 };
    (cols, columns.max(3))
}

fn height(p: &Point2, side: Page) -> Rational {
    &p.y * &Rational::from(side.sign())
}

struct Route<'a> {
    c: &'a LayoutConstants,
    port: &'a Port,
    vertical: usize,
    turn: i32,
    tilt: usize,
    stretch: Rational,
    rise: usize,
    last_exit: Rational,
}

impl Route<'_> {
    fn steps(&self) -> Vec<ChannelStep> {
        let c = self.c;
        let s = c.step();
        let plain = || ChannelStep::new(s.clone(), s.clone(), 0);
        let mut v = vec![ChannelStep::new(c.port_entry.clone(), s.clone(), 0)];
        v.extend((0..self.vertical).map(|_| plain()));
        v.push(ChannelStep::new(s.clone(), c.bend_exit.clone(), self.turn));
        v.push(ChannelStep::new(c.bend_exit.clone(), s.clone(), 0));
        for t in 0..self.tilt {
            let e = if t == self.tilt / 2 { self.stretch.clone() } else { s.clone() };
            v.push(ChannelStep::new(e, s.clone(), 0));
        }
        v.push(ChannelStep::new(s.clone(), c.bend_exit.clone(), -self.turn));
        v.push(ChannelStep::new(c.bend_exit.clone(), s.clone(), 0));
        v.extend((0..self.rise).map(|_| plain()));
        v.last_mut().expect("non-empty route").exit = self.last_exit.clone();
        v
    }

    fn cap(&self) -> Result<Point2> {
        let t = trace_channel(self.port, &self.steps(), self.c)?;
        Ok(t.terminal[t.near()].clone())
    }
}

fn to_count(v: &num_bigint::BigInt) -> Result<usize> {
    use num_traits::ToPrimitive;
    v.to_usize()
        .ok_or_else(|| Error::Verification(format!("route length {v} out of range")))
}

/// Number of straight regions before the first bend so that the bend sits at
/// least at `base` above the spine.
fn vertical_run(port: &Port, base: &Rational, c: &LayoutConstants) -> usize {
    let side = port.attachment.side;
    let s4 = c.step() * Rational::from(4);
    let mut h = height(&port.axis, side) + &c.port_entry * &Rational::from(2) + &s4;
    let mut n = 0;
    while &h < base {
        h += &s4;
        n += 1;
    }
    n
}

/// Routes of the two channels of a clause so that the caps end exactly at
/// the clause offsets.
fn plan_pair<'a>(
    left: &'a Port,
    right: &'a Port,
    base: &Rational,
    c: &'a LayoutConstants,
) -> Result<(Route<'a>, Route<'a>)> {
    let side = left.attachment.side;
    let sg = side.sign() as i32;
    let s = c.step();
    let mk = |port: &'a Port, turn: i32| Route {
        c,
        port,
        vertical: vertical_run(port, base, c),
        turn,
        tilt: 1,
        stretch: s.clone(),
        rise: 1,
        last_exit: s.clone(),
    };
    let mut r1 = mk(left, -sg);
    let mut r2 = mk(right, sg);
    let hoff = &c.clause_horizontal_offset;
    let three_halves = &s * &Rational::from(3);
    let gap = |r1: &Route, r2: &Route| -> Result<Rational> { Ok(r2.cap()?.x - r1.cap()?.x) };
    // One more tilted region, or one unit of stretch, moves a cap sideways by
    // the same amount, so the counts follow from two traces.
    let at = |r1: &mut Route<'a>, r2: &mut Route<'a>, t: usize, stretch: &Rational| -> Result<Rational> {
        r1.tilt = 1 + t / 2;
        r2.tilt = 1 + t.div_ceil(2);
        r2.stretch = stretch.clone();
        gap(r1, r2)
    };
    let f0 = at(&mut r1, &mut r2, 0, &s)?;
    let delta = &f0 - &at(&mut r1, &mut r2, 1, &s)?;
    if &f0 < hoff || delta.signum() <= 0 {
        return Err(Error::Precondition(
            "literal attachments are too close for a clause".into(),
        ));
    }
    let t = to_count(&((&f0 - hoff) / &delta).floor())?;
    let ft = at(&mut r1, &mut r2, t, &s)?;
    let stretch = &s + &((&ft - hoff) / &delta);
    if stretch > three_halves || at(&mut r1, &mut r2, t, &stretch)? != *hoff {
        return Err(Error::Verification("channel tilt is not affine".into()));
    }
    let s4 = &s * &Rational::from(4);
    let h2_min = height(&r2.cap()?, side);
    let short = &h2_min + &c.clause_vertical_offset - height(&r1.cap()?, side);
    if short.signum() > 0 {
        r1.rise += to_count(&-(-&short / &s4).floor())?;
    }
    let target = height(&r1.cap()?, side) - &c.clause_vertical_offset;
    let mut rem = target - h2_min;
    while rem >= s4 {
        rem -= &s4;
        r2.rise += 1;
    }
    r2.last_exit = &s + &(rem / Rational::from(2));
    let (a1, a2) = (r1.cap()?, r2.cap()?);
    let up = Vec2::new(Rational::zero(), Rational::from(side.sign()));
    let want = a1
        .add(&Vec2::new(hoff.clone(), Rational::zero()))
        .along(&up, &-&c.clause_vertical_offset);
    if a2 != want {
        return Err(Error::Verification(format!(
            "channel caps {a1:?}, {a2:?} miss the clause offsets"
        )));
    }
    Ok((r1, r2))
}

pub fn compile_with(inst: &Max2SatInstance, c: &LayoutConstants) -> Result<CompiledInstance> {
    let embedding = two_page_assignment(inst)?;
    let pages = &embedding.pages;
    let a = inst.a;
    let b = inst.b();
    let levels = nesting_levels(inst, pages);

    // Attachments per variable, keyed by (clause, literal position).
    let mut roles: Vec<Vec<(Page, Role, Attachment)>> = vec![Vec::new(); a];
    let mut owner: Vec<Vec<(usize, usize)>> = vec![Vec::new(); a];
    for (ci, cl) in inst.clauses.iter().enumerate() {
        let lits = cl.literals();
        for (li, lit) in lits.iter().enumerate() {
            let other = if lits.len() == 2 { Some(lits[1 - li]) } else { None };
            let role = match other {
                Some(other) if other.var < lit.var => Role::Left(lit.var - other.var, ci),
                Some(other) => Role::Right(other.var - lit.var, ci),
                None => Role::Unit(ci),
            };
            let att = Attachment {
                column: 0,
                side: pages[ci],
                positive: lit.positive,
            };
            roles[lit.var].push((pages[ci], role, att));
            owner[lit.var].push((ci, li));
        }
    }

    let mut net = Network::new();
    let mut ranges = Vec::new();
    let mut variables = Vec::with_capacity(a);
    let mut ports: HashMap<(usize, usize), Port> = HashMap::new();
    // Two different clauses on one page with variables on both sides of a
    // gap need the wide gap; otherwise the narrow one suffices.
    let wide = |i: usize| {
        (0..b).any(|c1| {
            (0..b).any(|c2| {
                c1 != c2
                    && pages[c1] == pages[c2]
                    && inst.clauses[c1].span().0 <= i
                    && inst.clauses[c2].span().1 > i
            })
        })
    };
    let sep = c.clearance_columns();
    let mut x = Rational::zero();
    for var in 0..a {
        let (cols, columns) = assign_columns(&roles[var], sep);
        let atts: Vec<Attachment> = roles[var]
            .iter()
            .zip(&cols)
            .map(|((_, _, att), &column)| Attachment { column, ..*att })
            .collect();
        let start = net.len();
        let g = build_variable_gadget(
            &mut net,
            var,
            &Point2::new(x.clone(), Rational::zero()),
            columns,
            &atts,
            c,
        )?;
        ranges.push(GadgetRange {
            kind: "variable".into(),
            name: format!("x{var}"),
            start,
            end: net.len(),
        });
        for (port, key) in g.ports.iter().zip(&owner[var]) {
            ports.insert(*key, port.clone());
        }
        let gap = if wide(var) { sep.max(c.variable_gap_columns + 1) } else { c.variable_gap_columns + 1 };
        let span = (columns - 1 + gap) as i64;
        x = &x + &(&c.horizontal_pitch * &Rational::from(span));
        variables.push(g);
    }

    let mut channels = Vec::new();
    let mut clauses: Vec<Option<ClauseGadget>> = vec![None; b];
    for side in [Page::Top, Page::Bottom] {
        let up = Vec2::new(Rational::zero(), Rational::from(side.sign()));
        let top_of = |net: &Network, from: usize| {
            net.points()[from..]
                .iter()
                .map(|p| height(p, side))
                .max()
                .unwrap_or_else(Rational::zero)
        };
        let mut roof = top_of(&net, 0);
        let max_level = (0..b).filter(|&ci| pages[ci] == side).map(|ci| levels[ci]).max();
        for level in 0..=max_level.unwrap_or(0) {
            let base = &roof + &c.clearance;
            for ci in (0..b).filter(|&ci| pages[ci] == side && levels[ci] == level) {
                let lits = inst.clauses[ci].literals();
                let mut order: Vec<usize> = (0..lits.len()).collect();
                order.sort_by_key(|&li| lits[li].var);
                let start = net.len();
                let mut caps = Vec::new();
                let routes: Vec<Vec<ChannelStep>> = if order.len() == 2 {
                    let (r1, r2) = plan_pair(&ports[&(ci, order[0])], &ports[&(ci, order[1])], &base, c)?;
                    vec![r1.steps(), r2.steps()]
                } else {
                    let port = &ports[&(ci, 0)];
                    let s = c.step();
                    let mut steps = vec![ChannelStep::new(c.port_entry.clone(), s.clone(), 0)];
                    loop {
                        steps.push(ChannelStep::new(s.clone(), s.clone(), 0));
                        let t = trace_channel(port, &steps, c)?;
                        if height(&t.terminal[t.near()], side) >= base {
                            break;
                        }
                    }
                    vec![steps]
                };
                for (&li, steps) in order.iter().zip(&routes) {
                    let lit = lits[li];
                    let name = format!("c{ci}/x{}", lit.var);
                    let ch = build_channel(&mut net, &name, &ports[&(ci, li)], steps, c)?;
                    caps.push(ch.cap().clone());
                    channels.push(ChannelRecord {
                        clause: ci,
                        literal: lit,
                        channel: ch,
                    });
                }
                ranges.push(GadgetRange {
                    kind: "channel".into(),
                    name: format!("c{ci}"),
                    start,
                    end: net.len(),
                });
                let first = lits[order[0]];
                let second = order.get(1).map(|&li| lits[li]);
                let guards = clause_guards(
                    (first.var, first.positive),
                    second.map(|l| (l.var, l.positive)),
                );
                let cstart = net.len();
                let g = build_clause_gadget(
                    &mut net,
                    &format!("c{ci}"),
                    &caps[0],
                    caps.get(1),
                    &up,
                    guards,
                    c,
                )?;
                ranges.push(GadgetRange {
                    kind: "clause".into(),
                    name: format!("c{ci}"),
                    start: cstart,
                    end: net.len(),
                });
                let top = top_of(&net, start);
                if top > roof {
                    roof = top;
                }
                clauses[ci] = Some(g);
            }
        }
    }
    let clauses: Vec<ClauseGadget> = clauses.into_iter().map(|g| g.expect("every clause placed")).collect();

    let bits = max_bits(net.points());
    if bits > MAX_COORDINATE_BITS {
        return Err(Error::Verification(format!(
            "coordinates need {bits} bits, over the limit of {MAX_COORDINATE_BITS}"
        )));
    }
    net.certify()?;
    let (n1, n2) = count(&net, a, &variables, &channels, &clauses)?;
    let set = net.to_set()?;
    Ok(CompiledInstance {
        instance: inst.clone(),
        embedding,
        constants: c.clone(),
        network: net,
        variables,
        channels,
        clauses,
        levels,
        ranges,
        n1,
        n2,
        set,
    })
}

/// `n1` from the per-variable chains and `n2` from the clause completions,
/// checking that both versions of a chain have equal size, that chains share
/// no points, and that completions cost 5 without a true literal and 4 with.
fn count(
    net: &Network,
    a: usize,
    variables: &[VariableGadget],
    channels: &[ChannelRecord],
    clauses: &[ClauseGadget],
) -> Result<(usize, usize)> {
    let mut chain_of = vec![None; net.len()];
    let mut n1 = 0;
    for g in variables {
        let regions: Vec<usize> = g
            .regions
            .iter()
            .copied()
            .chain(channels.iter().filter(|r| r.channel.var == g.var).flat_map(|r| r.channel.regions.iter().copied()))
            .collect();
        let t = net.version_of(regions.iter().copied(), &vec![true; a]);
        let f = net.version_of(regions.iter().copied(), &vec![false; a]);
        if t.len() != f.len() {
            return Err(Error::Verification(format!(
                "x{}: true and false versions have {} and {} points",
                g.var,
                t.len(),
                f.len()
            )));
        }
        for &p in t.iter().chain(&f) {
            match chain_of[p] {
                Some(v) if v != g.var => {
                    return Err(Error::Verification(format!(
                        "point {p} is shared by x{v} and x{}",
                        g.var
                    )))
                }
                _ => chain_of[p] = Some(g.var),
            }
        }
        n1 += t.len();
    }
    let mut n2 = 0;
    for (ci, g) in clauses.iter().enumerate() {
        let region = net.region(g.region);
        let costs: Vec<usize> = (0..region.candidates.len())
            .map(|k| {
                net.candidate_points(g.region, k)
                    .into_iter()
                    .filter(|&p| chain_of[p].is_none())
                    .count()
            })
            .collect();
        let want: &[usize] = if costs.len() == 3 { &[5, 4, 4] } else { &[5, 4] };
        if costs != want {
            return Err(Error::Verification(format!(
                "clause {ci}: completions cost {costs:?}, expected {want:?}"
            )));
        }
        n2 += 5;
    }
    Ok((n1, n2))
}
