//! Variable gadgets, channels and clause gadgets.
//!
//! All three are chains of red regions in a `Network`. A variable gadget is a
//! horizontal row of red regions alternating with blue columns; its two
//! versions shift the red candidates diagonally in opposite directions.
//! Channels continue that pattern along a route, and a clause gadget is one
//! tall region whose three candidates reuse the channel end points.

use serde::Serialize;

use super::book::Page;
use super::layout::LayoutConstants;
use super::network::{Guard, HalfPlane, Network};
use crate::error::{Error, Result};
use crate::geometry::{Point2, Vec2};
use crate::rational::Rational;

fn two() -> Rational {
    Rational::from(2)
}

fn pt(x: Rational, y: Rational) -> Point2 {
    Point2::new(x, y)
}

fn axis_x() -> Vec2 {
    Vec2::new(Rational::one(), Rational::zero())
}

fn axis_y() -> Vec2 {
    Vec2::new(Rational::zero(), Rational::one())
}

/// Where a channel leaves a variable gadget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Attachment {
    pub column: usize,
    pub side: Page,
    /// Polarity of the literal the channel carries.
    pub positive: bool,
}

impl Attachment {
    /// Whether the attachment column must be a blue column (odd index).
    ///
    /// The channel's near end point belongs to the variable's true version
    /// exactly when the literal is positive; which column kind achieves that
    /// depends on the side.
    pub fn needs_blue_column(&self) -> bool {
        matches!(
            (self.side, self.positive),
            (Page::Top, true) | (Page::Bottom, false)
        )
    }
}

/// Start of a channel: the two blue points it grows from, one per version.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Port {
    pub var: usize,
    pub attachment: Attachment,
    /// `beta[0]` belongs to the true version, `beta[1]` to the false one.
    pub beta: [Point2; 2],
    pub axis: Point2,
    pub dir: Vec2,
}

#[derive(Clone, Debug, Serialize)]
pub struct VariableGadget {
    pub var: usize,
    /// Centre of column 0.
    pub origin: Point2,
    pub columns: usize,
    pub regions: Vec<usize>,
    pub ports: Vec<Port>,
}

impl VariableGadget {
    pub fn column_x(&self, j: usize, c: &LayoutConstants) -> Rational {
        &self.origin.x + &(&c.horizontal_pitch * &Rational::from(j as i64))
    }
}

/// Lays out a variable gadget of `columns` columns starting at `origin`.
///
/// Even columns are red regions, odd columns blue. Version 0 (true) places
/// the candidate at `+offset`, version 1 at `-offset` from the centre of
/// column 0; both are mirrored column by column to the right.
pub fn build_variable_gadget(
    net: &mut Network,
    var: usize,
    origin: &Point2,
    columns: usize,
    attachments: &[Attachment],
    c: &LayoutConstants,
) -> Result<VariableGadget> {
    if columns < 3 || columns.is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "a variable gadget needs an odd number of at least 3 columns, got {columns}"
        )));
    }
    for (i, a) in attachments.iter().enumerate() {
        if a.column == 0 || a.column + 1 >= columns {
            return Err(Error::Precondition(format!(
                "attachment on outermost column {} of x{var}",
                a.column
            )));
        }
        if a.needs_blue_column() != (a.column % 2 == 1) {
            return Err(Error::Precondition(format!(
                "{} literal of x{var} on the {:?} side needs a {} column, got column {}",
                if a.positive { "positive" } else { "negative" },
                a.side,
                if a.needs_blue_column() { "blue (odd)" } else { "red (even)" },
                a.column
            )));
        }
        for b in &attachments[..i] {
            if a.side == b.side && a.column.abs_diff(b.column) < 3 {
                return Err(Error::Precondition(format!(
                    "attachments of x{var} at columns {} and {} leave fewer than two free columns",
                    b.column, a.column
                )));
            }
        }
    }
    let half = &c.horizontal_pitch / &two();
    let hv = &c.vertical_unit / &two();
    let (sx, sy) = &c.candidate_offset;
    let mut cand = [
        pt(&origin.x + sx, &origin.y + sy),
        pt(&origin.x - sx, &origin.y - sy),
    ];
    let guards: [Guard; 2] = [vec![(var, true)], vec![(var, false)]];
    let mut regions = Vec::new();
    let mut at_column = Vec::with_capacity(columns);
    for j in 0..columns {
        let cx = &origin.x + &(&c.horizontal_pitch * &Rational::from(j as i64));
        let right = HalfPlane::through(&pt(&cx + &half, origin.y.clone()), axis_x());
        if j % 2 == 0 {
            let hps = vec![
                right.clone(),
                HalfPlane::through(&pt(cx.clone(), &origin.y + &hv), axis_y()),
                HalfPlane::through(&pt(cx.clone(), &origin.y - &hv), axis_y().neg()),
                HalfPlane::through(&pt(&cx - &half, origin.y.clone()), axis_x().neg()),
            ];
            regions.push(net.add_region(
                format!("x{var}/col{j}"),
                hps,
                vec![
                    (cand[0].clone(), guards[0].clone()),
                    (cand[1].clone(), guards[1].clone()),
                ],
            )?);
        }
        at_column.push(cand.clone());
        cand = [right.mirror(&cand[0]), right.mirror(&cand[1])];
    }
    let ports = attachments
        .iter()
        .map(|a| {
            let s = Rational::from(a.side.sign());
            let dir = Vec2::new(Rational::zero(), s.clone());
            let [p0, p1] = at_column[a.column].clone();
            let beta = if a.column % 2 == 1 {
                [p0, p1]
            } else {
                let edge = HalfPlane::through(&pt(origin.x.clone(), &origin.y + &(&s * &hv)), dir.clone());
                [edge.mirror(&p0), edge.mirror(&p1)]
            };
            Port {
                var,
                attachment: *a,
                axis: beta[0].midpoint(&beta[1]),
                beta,
                dir,
            }
        })
        .collect();
    Ok(VariableGadget {
        var,
        origin: origin.clone(),
        columns,
        regions,
        ports,
    })
}

/// One red region of a channel: distance from the incoming blue pair's
/// midpoint to the region's entry edge, distance from the red pair's midpoint
/// to the exit edge, and an optional bend (`+1` counter-clockwise, `-1`
/// clockwise) applied to the exit edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChannelStep {
    pub entry: Rational,
    pub exit: Rational,
    pub turn: i32,
}

impl ChannelStep {
    pub fn new(entry: Rational, exit: Rational, turn: i32) -> Self {
        ChannelStep { entry, exit, turn }
    }
}

/// A straight channel: the port region followed by `n` ordinary regions.
pub fn straight_steps(c: &LayoutConstants, n: usize) -> Vec<ChannelStep> {
    let s = c.step();
    let mut v = vec![ChannelStep::new(c.port_entry.clone(), s.clone(), 0)];
    v.extend((0..n).map(|_| ChannelStep::new(s.clone(), s.clone(), 0)));
    v
}

/// A channel that runs `runs[0]` regions, bends by `turn`, runs `runs[1]`,
/// bends back and runs `runs[2]` more.
pub fn bent_steps(c: &LayoutConstants, turn: i32, runs: [usize; 3]) -> Vec<ChannelStep> {
    let s = c.step();
    let bx = c.bend_exit.clone();
    let mut v = straight_steps(c, runs[0]);
    for (t, n) in [(turn, runs[1]), (-turn, runs[2])] {
        v.push(ChannelStep::new(s.clone(), bx.clone(), t));
        v.push(ChannelStep::new(bx.clone(), s.clone(), 0));
        v.extend((0..n).map(|_| ChannelStep::new(s.clone(), s.clone(), 0)));
    }
    v
}

#[derive(Clone, Debug)]
pub struct PlannedRegion {
    pub halfplanes: Vec<HalfPlane>,
    pub candidates: [Point2; 2],
}

/// Geometry of a channel, computed without touching a network.
#[derive(Clone, Debug)]
pub struct ChannelTrace {
    pub regions: Vec<PlannedRegion>,
    /// Blue end points; index is the version.
    pub terminal: [Point2; 2],
    /// Midpoint of the end points and final direction.
    pub axis: Point2,
    pub dir: Vec2,
    /// Axis points, for drawing.
    pub polyline: Vec<Point2>,
}

impl ChannelTrace {
    /// Version whose end point lies farther along the final direction.
    pub fn near(&self) -> usize {
        let a = self.terminal[0].sub(&self.axis).dot(&self.dir);
        if a.signum() > 0 {
            0
        } else {
            1
        }
    }
}

fn turn_dir(d: &Vec2, turn: i32, c: &LayoutConstants) -> Vec2 {
    match turn {
        0 => d.clone(),
        1 => c.bend.apply(d),
        _ => c.bend.inverse().apply(d),
    }
}

pub fn trace_channel(port: &Port, steps: &[ChannelStep], c: &LayoutConstants) -> Result<ChannelTrace> {
    let bends = steps.iter().filter(|s| s.turn != 0).count();
    if bends > 2 || steps.iter().any(|s| s.turn.abs() > 1) {
        return Err(Error::Precondition(
            "a channel route has at most two bends of the fixed angle".into(),
        ));
    }
    let w = &c.channel_half_width;
    let mut beta = port.beta.clone();
    let mut m = port.axis.clone();
    let mut d = port.dir.clone();
    let mut origin = m.clone();
    let mut regions = Vec::with_capacity(steps.len());
    let mut polyline = vec![m.clone()];
    for s in steps {
        let entry = HalfPlane::through(&m.along(&d, &s.entry), d.neg());
        let cands = [entry.mirror(&beta[0]), entry.mirror(&beta[1])];
        let mr = m.along(&d, &(&s.entry * &two()));
        let dout = turn_dir(&d, s.turn, c);
        let exit = HalfPlane::through(&mr.along(&dout, &s.exit), dout.clone());
        let n = d.perp();
        let halfplanes = vec![
            entry,
            exit.clone(),
            HalfPlane::through(&origin.along(&n, w), n.clone()),
            HalfPlane::through(&origin.along(&n, &-w), n.neg()),
        ];
        if s.turn != 0 {
            origin = mr.clone();
            d = dout;
            polyline.push(mr.clone());
        }
        beta = [exit.mirror(&cands[0]), exit.mirror(&cands[1])];
        regions.push(PlannedRegion {
            halfplanes,
            candidates: cands,
        });
        m = mr.along(&d, &(&s.exit * &two()));
    }
    polyline.push(m.clone());
    Ok(ChannelTrace {
        regions,
        terminal: beta,
        axis: m,
        dir: d,
        polyline,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Channel {
    pub var: usize,
    pub port: Port,
    pub positive: bool,
    pub steps: Vec<ChannelStep>,
    pub regions: Vec<usize>,
    /// Blue end points; index is the version.
    pub terminal: [Point2; 2],
    pub dir: Vec2,
    /// Version that carries a true literal.
    pub true_version: usize,
    pub polyline: Vec<Point2>,
}

impl Channel {
    /// End point present when the literal is true; the clause's `a`.
    pub fn cap(&self) -> &Point2 {
        &self.terminal[self.true_version]
    }
}

/// Adds the regions of a channel leaving `port`.
///
/// Fails if the literal-true version does not end on the near end point, if a
/// step is too short to hold its candidates, or on label clashes.
pub fn build_channel(
    net: &mut Network,
    name: &str,
    port: &Port,
    steps: &[ChannelStep],
    c: &LayoutConstants,
) -> Result<Channel> {
    let trace = trace_channel(port, steps, c)?;
    let true_version = if port.attachment.positive { 0 } else { 1 };
    if trace.near() != true_version {
        return Err(Error::Verification(format!(
            "{name}: the true literal does not reach the near end point"
        )));
    }
    let guards: [Guard; 2] = [vec![(port.var, true)], vec![(port.var, false)]];
    let mut regions = Vec::with_capacity(trace.regions.len());
    for (k, r) in trace.regions.into_iter().enumerate() {
        let [c0, c1] = r.candidates;
        regions.push(net.add_region(
            format!("{name}/{k}"),
            r.halfplanes,
            vec![(c0, guards[0].clone()), (c1, guards[1].clone())],
        )?);
    }
    Ok(Channel {
        var: port.var,
        port: port.clone(),
        positive: port.attachment.positive,
        steps: steps.to_vec(),
        regions,
        terminal: trace.terminal,
        dir: trace.dir,
        true_version,
        polyline: trace.polyline,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ClauseGadget {
    pub region: usize,
    pub a1: Point2,
    pub a2: Option<Point2>,
    /// Own candidate, used when no literal is true.
    pub r: Point2,
    pub u: Point2,
    pub v: Option<Point2>,
}

/// Literal guards of a clause: `u` when the first literal holds, `v` when only
/// the second does, `r` otherwise.
pub fn clause_guards(lit1: (usize, bool), lit2: Option<(usize, bool)>) -> (Guard, Option<Guard>, Guard) {
    let (v1, b1) = lit1;
    let u = vec![(v1, b1)];
    match lit2 {
        Some((v2, b2)) => (
            u,
            Some(vec![(v1, !b1), (v2, b2)]),
            vec![(v1, !b1), (v2, !b2)],
        ),
        None => (u, None, vec![(v1, !b1)]),
    }
}

/// Adds a clause region above the channel caps `a1` and `a2` (`up` is the
/// unit direction away from the spine). Without `a2` the clause has one
/// literal and the region keeps the same footprint.
pub fn build_clause_gadget(
    net: &mut Network,
    name: &str,
    a1: &Point2,
    a2: Option<&Point2>,
    up: &Vec2,
    guards: (Guard, Option<Guard>, Guard),
    c: &LayoutConstants,
) -> Result<ClauseGadget> {
    if !(up.x.is_zero() && up.y.abs() == Rational::one()) {
        return Err(Error::Precondition("clause direction must be vertical".into()));
    }
    let expected = a1
        .add(&Vec2::new(c.clause_horizontal_offset.clone(), Rational::zero()))
        .along(up, &-&c.clause_vertical_offset);
    if let Some(a2) = a2 {
        if *a2 != expected {
            return Err(Error::Precondition(format!(
                "{name}: a2 must sit at {expected:?}, got {a2:?}"
            )));
        }
    }
    let (gu, gv, gr) = guards;
    if a2.is_some() != gv.is_some() {
        return Err(Error::Precondition(format!("{name}: guards do not match the literals")));
    }
    let h1 = &c.clause_depth;
    let height = h1 + &c.clause_vertical_offset + &c.clause_headroom;
    let near = a1.along(up, h1);
    let far = near.along(up, &height);
    let left = &a1.x - &c.clause_margin;
    let right = &expected.x + &c.clause_margin;
    let hps = vec![
        HalfPlane::through(&near, up.neg()),
        HalfPlane::through(&far, up.clone()),
        HalfPlane::through(&pt(left.clone(), near.y.clone()), axis_x().neg()),
        HalfPlane::through(&pt(right.clone(), near.y.clone()), axis_x()),
    ];
    let r = pt(
        Rational::midpoint(&left, &right),
        near.along(up, &c.clause_core_depth).y,
    );
    let u = hps[0].mirror(a1);
    let v = a2.map(|a2| hps[0].mirror(a2));
    let mut cands = vec![(r.clone(), gr), (u.clone(), gu)];
    if let (Some(v), Some(gv)) = (&v, gv) {
        cands.push((v.clone(), gv));
    }
    let region = net.add_region(name, hps, cands)?;
    Ok(ClauseGadget {
        region,
        a1: a1.clone(),
        a2: a2.cloned(),
        r,
        u,
        v,
    })
}
