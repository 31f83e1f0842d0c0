//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

use std::collections::{BTreeSet, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nnreduce::equivalence::{is_equivalent_1d, Oracle};
use nnreduce::generate::{generate, GeneratorKind, GeneratorParams};
use nnreduce::geometry::{bisector, general_position, same_bisector, DegeneracyWitness, Point2};
use nnreduce::reduction::compile::compile;
use nnreduce::reduction::proof::{clause_completions, prove_compiled, prove_standard};
use nnreduce::reduction::{Clause, LayoutConstants, Literal, Max2SatInstance, Rotation};
use nnreduce::relevant::{relevant_points_by_definition, relevant_points_by_walls};
use nnreduce::solver_1d::solve_1d;
use nnreduce::solver_exact::{min_reduced, SearchBudget};
use nnreduce::{LabelledPointSet, Rational};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn params(n: usize, m: u32, spread: u64) -> GeneratorParams {
    GeneratorParams { n, rows: n, m, spread }
}

/// Sorted subsets of `0..n` by size, smallest first.
fn subsets_by_size(n: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = (1u32..1 << n)
        .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
        .collect();
    all.sort_by_key(Vec::len);
    all
}

fn line_instances() -> Vec<LabelledPointSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    (0..500)
        .map(|seed| {
            let n = rng.gen_range(1..=10);
            let m = rng.gen_range(1..=3);
            generate(GeneratorKind::Random1d, &params(n, m, 30), seed).unwrap()
        })
        .collect()
}

fn c1_line_optimality() -> Outcome {
    let start = Instant::now();
    let insts = line_instances();
    let mut mismatches = 0;
    for set in &insts {
        let got = solve_1d(set).map_err(|e| e.to_string())?.subset.len();
        let brute = subsets_by_size(set.len())
            .into_iter()
            .find(|s| is_equivalent_1d(set, s).unwrap().equivalent)
            .map(|s| s.len())
            .unwrap();
        if got != brute {
            mismatches += 1;
        }
    }
    let t = start.elapsed();
    ensure(mismatches == 0, || format!("{mismatches} mismatches"))?;
    ensure(t < Duration::from_secs(120), || format!("took {t:?}"))?;
    Ok(format!("{} instances, 0 mismatches, {t:.1?}", insts.len()))
}

fn c2_size_formula() -> Outcome {
    let mut checked = 0;
    for set in line_instances() {
        let r = solve_1d(&set).map_err(|e| e.to_string())?;
        let t = r.decomposition.t();
        if t < 2 {
            continue;
        }
        let savings: usize = r.selected.iter().map(|c| c.k() - 2).sum();
        let want = 2 * (t - 1) - savings;
        ensure(r.subset.len() == want, || {
            format!("size {} but formula gives {want} (t = {t})", r.subset.len())
        })?;
        checked += 1;
    }
    Ok(format!("{checked} instances with t >= 2"))
}

fn two_label_gp(count: usize, max_n: usize, seed0: u64) -> Vec<LabelledPointSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed0);
    let mut out = Vec::new();
    let mut seed = seed0 * 100_000;
    while out.len() < count {
        seed += 1;
        let n = rng.gen_range(2..=max_n);
        let set = generate(GeneratorKind::RandomGp, &params(n, 2, 0), seed).unwrap();
        if set.used_labels().len() == 2 {
            out.push(set);
        }
    }
    out
}

fn c3_general_position_uniqueness() -> Outcome {
    let insts = two_label_gp(200, 12, 3);
    for (k, set) in insts.iter().enumerate() {
        let rel = relevant_points_by_walls(set).relevant();
        let oracle = Oracle::new(set);
        ensure(oracle.check(&rel).unwrap().equivalent, || format!("instance {k}: rel(P) fails the oracle"))?;
        let exact = min_reduced(set, &SearchBudget::default()).map_err(|e| e.to_string())?;
        let mut sub = exact.subset.clone();
        sub.sort_unstable();
        ensure(exact.optimal && sub == rel, || {
            format!("instance {k}: exact minimum {sub:?} differs from rel(P) {rel:?}")
        })?;
        for drop in &rel {
            let smaller: Vec<usize> = rel.iter().copied().filter(|i| i != drop).collect();
            if smaller.is_empty() {
                continue;
            }
            ensure(!oracle.check(&smaller).unwrap().equivalent, || {
                format!("instance {k}: rel(P) without {drop} still passes")
            })?;
        }
    }
    Ok(format!("{} instances, 0 exceptions", insts.len()))
}

fn c4_distinct_bisectors() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for seed in 0..1000u64 {
        let n = rng.gen_range(2..=15);
        let set = generate(GeneratorKind::RandomGp, &params(n, 2, 0), 40_000 + seed).unwrap();
        let pts = set.planar_points();
        let mut lines = HashSet::new();
        for i in 0..n {
            for j in i + 1..n {
                lines.insert(bisector(&pts[i], &pts[j]).unwrap());
            }
        }
        ensure(lines.len() == n * (n - 1) / 2, || format!("seed {seed}: repeated bisector"))?;
    }
    let sq = [Point2::ints(0, 0), Point2::ints(1, 0), Point2::ints(1, 1), Point2::ints(0, 1)];
    ensure(same_bisector((&sq[0], &sq[1]), (&sq[3], &sq[2])).unwrap(), || "square: shared bisector missed".into())?;
    let pts: Vec<_> = sq.iter().cloned().map(Into::into).collect();
    let w = general_position(&pts);
    ensure(matches!(w, Err(DegeneracyWitness::Cocircular(_))), || format!("square: got {w:?}"))?;
    Ok("1000 sets with distinct bisectors; unit square detected as cocircular".into())
}

fn c5_relevant_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut insts = Vec::new();
    for seed in 0..80 {
        let n = rng.gen_range(2..=10);
        insts.push(generate(GeneratorKind::RandomGp, &params(n, rng.gen_range(2..=3), 0), seed).unwrap());
    }
    for seed in 0..60 {
        let mut p = params(rng.gen_range(2..=4), rng.gen_range(2..=3), 0);
        p.rows = rng.gen_range(2..=4);
        insts.push(generate(GeneratorKind::DegenerateGrid, &p, seed).unwrap());
    }
    for seed in 0..60 {
        let n = rng.gen_range(2..=10);
        insts.push(generate(GeneratorKind::Collinear, &params(n, rng.gen_range(2..=3), 0), seed).unwrap());
    }
    for (k, set) in insts.iter().enumerate() {
        let a = relevant_points_by_walls(set).relevant();
        let b = relevant_points_by_definition(set).relevant();
        ensure(a == b, || format!("instance {k}: walls {a:?} vs definition {b:?}"))?;
    }
    Ok(format!("{} instances (80 general position, 60 grids, 60 collinear)", insts.len()))
}

/// Independent nearest-label oracle for integer points and a query
/// `(a / d, b / d)`.
fn brute_labels(pts: &[(i64, i64)], labels: &[u32], members: &[usize], a: i64, b: i64, d: i64) -> BTreeSet<u32> {
    let dist = |i: usize| {
        let (x, y) = pts[i];
        let dx = (a - x * d) as i128;
        let dy = (b - y * d) as i128;
        dx * dx + dy * dy
    };
    let best = members.iter().map(|&i| dist(i)).min().unwrap();
    members.iter().filter(|&&i| dist(i) == best).map(|&i| labels[i]).collect()
}

fn c6_oracle_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut subsets, mut refuted, mut accepted) = (0usize, 0usize, 0usize);
    for k in 0..100 {
        let n = rng.gen_range(2..=9);
        let m: u32 = rng.gen_range(2..=3);
        let mut seen = HashSet::new();
        let mut pts = Vec::new();
        while pts.len() < n {
            let p = (rng.gen_range(0..5i64), rng.gen_range(0..5i64));
            if seen.insert(p) {
                pts.push(p);
            }
        }
        let labels: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=m)).collect();
        let set = LabelledPointSet::planar(
            m,
            pts.iter().zip(&labels).map(|(&(x, y), &l)| (Point2::ints(x, y), l)).collect(),
        )
        .unwrap();
        let all: Vec<usize> = (0..n).collect();
        let oracle = Oracle::new(&set);
        // Dense grid with step 1/8 over the bounding box grown by 2.
        let grid: Vec<(i64, i64)> = (-16..=48).flat_map(|a| (-16..=48).map(move |b| (a, b))).collect();
        let full_grid: Vec<BTreeSet<u32>> = grid.iter().map(|&(a, b)| brute_labels(&pts, &labels, &all, a, b, 8)).collect();
        for sub in subsets_by_size(n) {
            subsets += 1;
            let ok = oracle.check(&sub).unwrap().equivalent;
            let sampler_refutes = grid
                .iter()
                .zip(&full_grid)
                .any(|(&(a, b), f)| &brute_labels(&pts, &labels, &sub, a, b, 8) != f);
            if sampler_refutes {
                refuted += 1;
                ensure(!ok, || format!("instance {k}: sampler refutes {sub:?} but the oracle accepts"))?;
            }
            if ok {
                accepted += 1;
                for _ in 0..10_000 {
                    let d = rng.gen_range(1..=97i64);
                    let a = rng.gen_range(-3 * d..=8 * d);
                    let b = rng.gen_range(-3 * d..=8 * d);
                    let f = brute_labels(&pts, &labels, &all, a, b, d);
                    let g = brute_labels(&pts, &labels, &sub, a, b, d);
                    ensure(f == g, || format!("instance {k}: probe {a}/{d}, {b}/{d} refutes accepted {sub:?}"))?;
                }
            }
        }
    }
    Ok(format!(
        "100 instances, {subsets} subsets, {refuted} refuted by sampling (all rejected), {accepted} accepted and unrefuted by 10^4 probes each"
    ))
}

fn c7_clause_counts() -> Outcome {
    let c = LayoutConstants::default();
    ensure(
        c.clause_vertical_offset == Rational::new(1, 2) && c.clause_horizontal_offset == Rational::from(5),
        || "clause offsets are not (1/2, 5)".into(),
    )?;
    let got = clause_completions(&c, 5).map_err(|e| e.to_string())?;
    let mut line = Vec::new();
    for r in &got {
        let want = if r.literals == [false, false] { 5 } else { 4 };
        ensure(r.minimum == want, || format!("literals {:?}: minimum {} expected {want}", r.literals, r.minimum))?;
        line.push(format!("{:?}->{}", r.literals, r.minimum));
    }
    ensure(got.len() == 4, || "missing cases".into())?;
    Ok(format!("minimum completions {}", line.join(" ")))
}

fn formula(lits: &[Literal]) -> Max2SatInstance {
    Max2SatInstance::new(2, vec![Clause::new(lits.to_vec()).unwrap()], 1).unwrap()
}

fn c8_gadget_contracts() -> Outcome {
    let c = LayoutConstants::default();
    let mut proofs = prove_standard(&c).map_err(|e| e.to_string())?;
    for lits in [[Literal::pos(0), Literal::pos(1)], [Literal::neg(0), Literal::pos(1)]] {
        let ci = compile(&formula(&lits)).map_err(|e| e.to_string())?;
        proofs.extend(prove_compiled(&ci).map_err(|e| e.to_string())?);
    }
    for p in &proofs {
        ensure(p.holds() && p.ring_probes >= 100, || format!("{}: {p:?}", p.name))?;
    }
    Ok(format!("{} gadget and channel proofs, each with 128 exterior probes", proofs.len()))
}

fn c9_if_direction() -> Outcome {
    let start = Instant::now();
    let ci = compile(&formula(&[Literal::pos(0), Literal::pos(1)])).map_err(|e| e.to_string())?;
    ensure(ci.instance.a == 2 && ci.instance.b() == 1 && ci.n2 == 5, || "unexpected compiled shape".into())?;
    let oracle = Oracle::new(&ci.set);
    let mut sizes = Vec::new();
    for asg in [[true, true], [true, false], [false, true], [false, false]] {
        let sat = usize::from(asg[0] || asg[1]);
        let sub = ci.assignment_to_subset(&asg).map_err(|e| e.to_string())?;
        ensure(sub.len() == ci.n1 + 5 - sat, || format!("{asg:?}: size {}", sub.len()))?;
        ensure(oracle.check(&sub).unwrap().equivalent, || format!("{asg:?}: oracle rejects"))?;
        sizes.push(sub.len());
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(600), || format!("took {t:?}"))?;
    Ok(format!("{} points, n1 = {}, subset sizes {sizes:?}, {t:.1?}", ci.set.len(), ci.n1))
}

fn c10_bend_exactness() -> Outcome {
    let r = Rotation::bend();
    let (a, b, c) = (r.sin.numer(), r.cos.numer(), r.cos.denom());
    ensure(
        (a, b, c) == (&BigInt::from(11), &BigInt::from(60), &BigInt::from(61)) && r.sin.denom() == c,
        || format!("bend is {:?}", r),
    )?;
    ensure(a * a + b * b == c * c, || "not a Pythagorean triple".into())?;
    let r36 = r.pow(36);
    // Independent closed form: (60 + 11i)^36 / 61^36.
    let (mut re, mut im) = (BigInt::from(1), BigInt::from(0));
    for _ in 0..36 {
        let (a, b) = (&re * 60 - &im * 11, &re * 11 + &im * 60);
        (re, im) = (a, b);
    }
    let den = BigInt::from(61).pow(36);
    ensure(r36.cos == Rational::new(re, den.clone()) && r36.sin == Rational::new(im, den), || {
        "36-fold bend differs from the closed form".into()
    })?;
    ensure(r36.is_orthogonal(), || "36-fold bend is not orthogonal".into())?;
    ensure(r36.compose(&r.inverse().pow(36)) == Rotation::identity(), || "no exact inverse".into())?;
    let m = r36.matrix();
    Ok(format!("11^2 + 60^2 = 61^2; 36-fold bend cos has {} bits", m[0][0].bit_size()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1D optimality against brute force", c1_line_optimality),
        ("1D size formula", c2_size_formula),
        ("general position: rel(P) is the unique minimum", c3_general_position_uniqueness),
        ("distinct bisectors; unit square cocircular", c4_distinct_bisectors),
        ("relevant points: walls agree with definition", c5_relevant_agreement),
        ("oracle soundness against sampling and probes", c6_oracle_soundness),
        ("clause completion counts 5/4/4/4", c7_clause_counts),
        ("gadget contracts", c8_gadget_contracts),
        ("compiled (x0 or x1): all assignments pass", c9_if_direction),
        ("bend exactness", c10_bend_exactness),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = format!("criterion {}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|s| name.contains(s.as_str()) || id == *s) {
            continue;
        }
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let t = start.elapsed();
        match res {
            Ok(detail) => println!("{id:>12} PASS  {name}: {detail} [{t:.1?}]"),
            Err(why) => {
                failed += 1;
                println!("{id:>12} FAIL  {name}: {why} [{t:.1?}]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
