//! Oracle proofs for gadgets rebuilt in isolation.
//!
//! A gadget proof builds the gadget alone, certifies it, and then checks with
//! the exact oracle that both truth versions induce the classification of the
//! whole gadget, that they have the same size, and that a ring of probes
//! outside the gadget is classified blue.

use serde::Serialize;

use super::compile::CompiledInstance;
use super::gadget::{
    bent_steps, build_channel, build_clause_gadget, build_variable_gadget, clause_guards,
    straight_steps, Attachment, ChannelStep, Port, VariableGadget,
};
use super::layout::LayoutConstants;
use super::network::{Network, BLUE};
use super::book::Page;
use crate::equivalence::Oracle;
use crate::error::{Error, Result};
use crate::geometry::{Point2, Vec2};
use crate::model::{Classifier, LabelSet, LabelledPointSet};
use crate::rational::{q, Rational};
use crate::solver_exact::{all_minimum, SearchBudget};

/// Exterior probes per gadget proof.
pub const RING_PROBES: usize = 128;

#[derive(Clone, Debug, Serialize)]
pub struct GadgetProof {
    pub name: String,
    pub points: usize,
    /// Sizes of the true and false versions.
    pub sizes: [usize; 2],
    pub equivalent: [bool; 2],
    pub ring_probes: usize,
    /// Every ring probe is blue under both versions.
    pub ring_blue: bool,
}

impl GadgetProof {
    pub fn holds(&self) -> bool {
        self.equivalent == [true, true]
            && self.sizes[0] == self.sizes[1]
            && self.ring_probes >= RING_PROBES
            && self.ring_blue
    }
}

fn assignments(var: usize) -> [Vec<bool>; 2] {
    let mut t = vec![false; var + 1];
    t[var] = true;
    [t, vec![false; var + 1]]
}

/// Proves a network whose candidates are guarded by the single variable `var`.
pub fn prove_network(name: &str, net: &Network, var: usize) -> Result<GadgetProof> {
    net.certify()?;
    let set = net.to_set()?;
    let oracle = Oracle::new(&set);
    let ring = net.exterior_ring(RING_PROBES, &Rational::one());
    let blue = LabelSet::single(BLUE);
    let mut sizes = [0; 2];
    let mut equivalent = [false; 2];
    let mut ring_blue = true;
    for (i, asg) in assignments(var).iter().enumerate() {
        let v = net.version(asg);
        sizes[i] = v.len();
        equivalent[i] = oracle.check(&v)?.equivalent;
        let cls = Classifier::new(&set, &v);
        ring_blue &= ring.iter().all(|p| cls.classify(p) == blue);
    }
    Ok(GadgetProof {
        name: name.to_string(),
        points: net.len(),
        sizes,
        equivalent,
        ring_probes: ring.len(),
        ring_blue,
    })
}

fn rebuild_variable(g: &VariableGadget, c: &LayoutConstants) -> Result<Network> {
    let atts: Vec<Attachment> = g.ports.iter().map(|p| p.attachment).collect();
    let mut net = Network::new();
    build_variable_gadget(&mut net, g.var, &g.origin, g.columns, &atts, c)?;
    Ok(net)
}

/// Proves every variable gadget of a compiled instance, and every channel
/// together with the gadget it leaves.
pub fn prove_compiled(ci: &CompiledInstance) -> Result<Vec<GadgetProof>> {
    let c = &ci.constants;
    let mut out = Vec::new();
    for g in &ci.variables {
        let net = rebuild_variable(g, c)?;
        out.push(prove_network(&format!("x{}", g.var), &net, g.var)?);
    }
    for rec in &ci.channels {
        let ch = &rec.channel;
        let host = ci
            .variables
            .iter()
            .find(|g| g.var == ch.var)
            .ok_or_else(|| Error::Verification(format!("no gadget for x{}", ch.var)))?;
        let mut net = rebuild_variable(host, c)?;
        let name = format!("c{}/x{}", rec.clause, ch.var);
        build_channel(&mut net, &name, &ch.port, &ch.steps, c)?;
        out.push(prove_network(&name, &net, ch.var)?);
    }
    Ok(out)
}

fn origin() -> Point2 {
    Point2::new(q(0, 1), q(0, 1))
}

/// Variable gadget with `columns` columns and the given attachments, alone.
pub fn variable_network(columns: usize, attachments: &[Attachment], c: &LayoutConstants) -> Result<(Network, VariableGadget)> {
    let mut net = Network::new();
    let g = build_variable_gadget(&mut net, 0, &origin(), columns, attachments, c)?;
    Ok((net, g))
}

/// A channel leaving column 3 or 4 of a 9-column gadget.
pub fn channel_network(side: Page, positive: bool, steps: &[ChannelStep], c: &LayoutConstants) -> Result<Network> {
    let column = if (side == Page::Top) == positive { 3 } else { 4 };
    let a = Attachment { column, side, positive };
    let (mut net, g) = variable_network(9, &[a], c)?;
    build_channel(&mut net, "ch", &g.ports[0], steps, c)?;
    Ok(net)
}

/// The standard family of isolated gadget proofs: a minimal gadget, a gadget
/// with attachments on both sides, and straight, bent and stretched channels.
pub fn prove_standard(c: &LayoutConstants) -> Result<Vec<GadgetProof>> {
    let mut out = Vec::new();
    let (net, _) = variable_network(3, &[], c)?;
    out.push(prove_network("variable/3", &net, 0)?);
    let atts = [
        Attachment { column: 3, side: Page::Top, positive: true },
        Attachment { column: 6, side: Page::Top, positive: false },
        Attachment { column: 2, side: Page::Bottom, positive: true },
        Attachment { column: 5, side: Page::Bottom, positive: false },
    ];
    let (net, _) = variable_network(9, &atts, c)?;
    out.push(prove_network("variable/9", &net, 0)?);
    for side in [Page::Top, Page::Bottom] {
        for positive in [true, false] {
            let net = channel_network(side, positive, &straight_steps(c, 6), c)?;
            out.push(prove_network(&format!("straight/{side:?}/{positive}"), &net, 0)?);
        }
    }
    for turn in [1, -1] {
        let net = channel_network(Page::Top, true, &bent_steps(c, turn, [1, 0, 1]), c)?;
        out.push(prove_network(&format!("one-bend/{turn}"), &net, 0)?);
        let net = channel_network(Page::Top, true, &bent_steps(c, turn, [1, 4, 2]), c)?;
        out.push(prove_network(&format!("two-bend/{turn}"), &net, 0)?);
    }
    for stretch in [q(1, 2), q(3, 4), q(5, 4), q(3, 2)] {
        let mut steps = bent_steps(c, 1, [1, 4, 2]);
        steps[5].entry = stretch.clone();
        let net = channel_network(Page::Top, true, &steps, c)?;
        out.push(prove_network(&format!("stretched/{stretch}"), &net, 0)?);
    }
    Ok(out)
}

/// Minimum number of clause points completing a clause region, per truth
/// value of its two literals.
#[derive(Clone, Debug, Serialize)]
pub struct ClauseCompletion {
    pub literals: [bool; 2],
    pub minimum: usize,
    /// Completions of that size found.
    pub witnesses: usize,
}

/// Builds a clause over two straight channels and counts, for each truth
/// value of the literals, the fewest clause points that together with the
/// channel end points present induce the clause region. The search is
/// exhaustive up to `max_size` points.
pub fn clause_completions(c: &LayoutConstants, max_size: usize) -> Result<Vec<ClauseCompletion>> {
    let mut net = Network::new();
    let mut chans = Vec::new();
    for (i, x) in [q(0, 1), q(5, 1)].into_iter().enumerate() {
        let y = if i == 0 { q(0, 1) } else { q(-1, 2) };
        let (sx, sy) = c.candidate_offset.clone();
        let beta = [
            Point2::new(&x - &sx, &y + &sy),
            Point2::new(&x + &sx, &y - &sy),
        ];
        let port = Port {
            var: i,
            attachment: Attachment { column: 1, side: Page::Top, positive: true },
            axis: beta[0].midpoint(&beta[1]),
            beta,
            dir: Vec2::new(q(0, 1), q(1, 1)),
        };
        chans.push(build_channel(&mut net, &format!("c{i}"), &port, &straight_steps(c, 4), c)?);
    }
    let up = Vec2::new(q(0, 1), q(1, 1));
    let g = build_clause_gadget(
        &mut net,
        "clause",
        chans[0].cap(),
        Some(chans[1].cap()),
        &up,
        clause_guards((0, true), Some((1, true))),
        c,
    )?;
    net.certify()?;
    let find = |p: &Point2| {
        net.find(p)
            .ok_or_else(|| Error::Verification(format!("missing point {p:?}")))
    };
    // Terminal end points: [channel][version].
    let mut terminals = [[0usize; 2]; 2];
    for (i, ch) in chans.iter().enumerate() {
        for k in 0..2 {
            terminals[i][k] = find(&ch.terminal[k])?;
        }
    }
    let region = net.region(g.region);
    let mut global: Vec<usize> = terminals.iter().flatten().copied().collect();
    for k in 0..region.candidates.len() {
        global.extend(net.candidate_points(g.region, k));
    }
    global.sort_unstable();
    global.dedup();
    let local = |i: usize| global.binary_search(&i).expect("collected point");
    let set = LabelledPointSet::planar(
        2,
        global
            .iter()
            .map(|&i| (net.points()[i].clone(), net.labels()[i]))
            .collect(),
    )?;
    let term_local: Vec<usize> = terminals.iter().flatten().map(|&i| local(i)).collect();
    let clause_only: Vec<usize> = (0..global.len()).filter(|i| !term_local.contains(i)).collect();
    let mut out = Vec::new();
    for t1 in [true, false] {
        for t2 in [true, false] {
            let asg = [t1, t2];
            let ctx: Vec<usize> = chans
                .iter()
                .enumerate()
                .map(|(i, ch)| {
                    let k = if asg[i] { ch.true_version } else { 1 - ch.true_version };
                    local(terminals[i][k])
                })
                .collect();
            let mut reference: Vec<usize> = net
                .version_of([g.region], &asg)
                .into_iter()
                .map(local)
                .collect();
            reference.extend(&ctx);
            reference.sort_unstable();
            reference.dedup();
            let oracle = Oracle::with_reference(&set, &reference)?;
            let mut found = None;
            for k in 0..=max_size.min(clause_only.len()) {
                let mut count = 0;
                for combo in combinations(clause_only.len(), k) {
                    let mut sub = ctx.clone();
                    sub.extend(combo.iter().map(|&j| clause_only[j]));
                    if oracle.check(&sub)?.equivalent {
                        count += 1;
                    }
                }
                if count > 0 {
                    found = Some((k, count));
                    break;
                }
            }
            let (minimum, witnesses) = found.ok_or_else(|| {
                Error::Verification(format!("no completion of at most {max_size} points for {asg:?}"))
            })?;
            out.push(ClauseCompletion { literals: asg, minimum, witnesses });
        }
    }
    Ok(out)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// All minimum reduced subsets of a single-variable network, and whether
/// they are exactly its two truth versions.
pub fn minimum_subsets_are_versions(net: &Network, var: usize) -> Result<(Vec<Vec<usize>>, bool)> {
    let set = net.to_set()?;
    let mins = all_minimum(&set, &SearchBudget::default())?;
    let [t, f] = assignments(var);
    let mut want = vec![net.version(&t), net.version(&f)];
    want.sort();
    Ok((mins.clone(), mins == want))
}
