use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use nnreduce::equivalence::is_reduced_training_set;
use nnreduce::generate::{generate, GeneratorKind, GeneratorParams};
use nnreduce::geometry::general_position;
use nnreduce::model::{format_subset, parse_subset};
use nnreduce::reduction::compile::compile;
use nnreduce::reduction::proof::prove_compiled;
use nnreduce::reduction::Max2SatInstance;
use nnreduce::relevant::{reduce_general_position, relevant_points_by_definition, relevant_points_by_walls};
use nnreduce::solver_1d::solve_1d;
use nnreduce::solver_exact::{min_reduced, SearchBudget, MAX_POINTS};
use nnreduce::svg::{render_instance, render_layout};
use nnreduce::{Error, LabelledPointSet};

#[derive(Parser)]
#[command(name = "nnreduce", version, about = "Minimum reduced training sets for nearest-neighbour classification")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute a minimum reduced training set.
    Solve {
        instance: PathBuf,
        /// Write the subset file here.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Use the exact search even when a faster method applies.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 10_000_000)]
        budget_nodes: u64,
        #[arg(long, default_value_t = 600)]
        budget_seconds: u64,
        /// Largest subset size the exact search examines.
        #[arg(long)]
        max_size: Option<usize>,
        /// Print the full derivation (regions and chains in 1D, certificate in 2D).
        #[arg(long)]
        explain: bool,
    },
    /// Check that a subset induces the same classification as the instance.
    Verify { instance: PathBuf, subset: PathBuf },
    /// List the relevant points.
    Relevant {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Walls)]
        method: Method,
        /// Print one witness per relevant point.
        #[arg(long)]
        witnesses: bool,
    },
    /// Write a seeded random instance.
    Generate {
        #[arg(value_enum)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        /// Grid rows (degenerate-grid only); defaults to n.
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long, default_value_t = 2)]
        m: u32,
        /// Coordinates are drawn below this bound; 0 picks a default.
        #[arg(long, default_value_t = 0)]
        spread: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Draw an instance, optionally with a subset, as SVG.
    Render {
        instance: PathBuf,
        #[arg(long)]
        subset: Option<PathBuf>,
        #[arg(long)]
        svg: PathBuf,
    },
    /// Compile a V-cycle max2SAT formula to a red/blue instance.
    ReduceSat {
        formula: PathBuf,
        /// Instance file to write.
        #[arg(long)]
        instance: PathBuf,
        /// Manifest (JSON) to write.
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Write the instance as JSON instead of text.
        #[arg(long)]
        json: bool,
        /// Run the oracle proofs of every gadget and channel.
        #[arg(long)]
        prove: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Walls,
    Definition,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    RandomGp,
    DegenerateGrid,
    Collinear,
    #[value(name = "random-1d")]
    Random1d,
}

impl From<Kind> for GeneratorKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::RandomGp => GeneratorKind::RandomGp,
            Kind::DegenerateGrid => GeneratorKind::DegenerateGrid,
            Kind::Collinear => GeneratorKind::Collinear,
            Kind::Random1d => GeneratorKind::Random1d,
        }
    }
}

/// Outcome of a command, mapped onto the exit code.
enum Status {
    Ok,
    Negative,
    Budget,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Verification(_) => 1,
        Error::BudgetExhausted(_) => 3,
        _ => 2,
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Precondition(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Precondition(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<LabelledPointSet, Error> {
    LabelledPointSet::parse(&read(path)?)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn solve(
    set: &LabelledPointSet,
    out: &Option<PathBuf>,
    exact: bool,
    budget: SearchBudget,
    explain: bool,
) -> Result<Status, Error> {
    let mut report = String::new();
    let (subset, status) = if set.dim() == 1 && !exact {
        let r = solve_1d(set)?;
        report += &format!(
            "method: line solver\nregions: {}\nchains selected: {}\nsize: {} (formula {})\n",
            r.decomposition.t(),
            r.selected.len(),
            r.subset.len(),
            r.formula_size()
        );
        if explain {
            report += &r.explain(set);
        }
        (r.subset, Status::Ok)
    } else if !exact && general_position(set.points()).is_ok() {
        let r = reduce_general_position(set)?;
        report += &format!(
            "method: relevant points (general position, unique minimum)\nsize: {}\ncertificate: oracle {}, {} decision walls\n",
            r.subset.len(),
            if r.certificate.verdict.equivalent { "equivalent" } else { "NOT equivalent" },
            r.certificate.wall_pairs.len()
        );
        if explain {
            for (i, j) in &r.certificate.wall_pairs {
                report += &format!("  wall pair {i} {j}\n");
            }
        }
        (r.subset, Status::Ok)
    } else if set.len() > MAX_POINTS {
        eprintln!(
            "warning: minimum reduction is NP-hard without general position; the exact search handles at most {MAX_POINTS} points"
        );
        let rel = relevant_points_by_walls(set).relevant();
        let ok = !rel.is_empty() && is_reduced_training_set(set, &rel)?.equivalent;
        let sub = if ok { rel } else { (0..set.len()).collect() };
        report += &format!("method: fallback (not optimal)\nsize: {}\n", sub.len());
        (sub, Status::Budget)
    } else {
        if !exact {
            eprintln!("warning: not in general position; minimum reduction is NP-hard in general, using exact search");
        }
        let r = min_reduced(set, &budget)?;
        report += &format!(
            "method: exact search\nsize: {}\noptimal: {}\nnodes: {}\noracle calls: {}\n",
            r.subset.len(),
            r.optimal,
            r.nodes,
            r.oracle_calls
        );
        let status = if r.optimal { Status::Ok } else { Status::Budget };
        (r.subset, status)
    };
    match out {
        Some(p) => {
            write(p, &format_subset(&subset))?;
            print!("{report}");
        }
        None => {
            print!("{report}subset:\n{}", format_subset(&subset));
        }
    }
    Ok(status)
}

fn run(cli: Cli) -> Result<Status, Error> {
    match cli.cmd {
        Cmd::Solve {
            instance,
            out,
            exact,
            budget_nodes,
            budget_seconds,
            max_size,
            explain,
        } => {
            let set = load(&instance)?;
            let budget = SearchBudget {
                max_size: max_size.unwrap_or(MAX_POINTS),
                node_limit: budget_nodes,
                time_limit: Duration::from_secs(budget_seconds),
            };
            solve(&set, &out, exact, budget, explain)
        }
        Cmd::Verify { instance, subset } => {
            let set = load(&instance)?;
            let sub = parse_subset(&read(&subset)?)?;
            let v = is_reduced_training_set(&set, &sub)?;
            if v.equivalent {
                println!("equivalent");
                return Ok(Status::Ok);
            }
            println!("not equivalent");
            if let Some(c) = v.counterexample {
                println!("counterexample: {}", c.point);
                println!("instance labels: {:?}", c.full.labels());
                println!("subset labels: {:?}", c.subset.labels());
            }
            Ok(Status::Negative)
        }
        Cmd::Relevant {
            instance,
            method,
            witnesses,
        } => {
            let set = load(&instance)?;
            let reports = match method {
                Method::Walls => vec![relevant_points_by_walls(&set)],
                Method::Definition => vec![relevant_points_by_definition(&set)],
                Method::Both => vec![relevant_points_by_walls(&set), relevant_points_by_definition(&set)],
            };
            let first = reports[0].relevant();
            println!("{}", first.iter().map(usize::to_string).collect::<Vec<_>>().join(" "));
            if witnesses {
                for r in &reports {
                    for (i, w) in &r.witnesses {
                        println!("{i}: {w:?}");
                    }
                }
            }
            if reports.iter().any(|r| r.relevant() != first) {
                println!("methods disagree: {:?}", reports[1].relevant());
                return Ok(Status::Negative);
            }
            Ok(Status::Ok)
        }
        Cmd::Generate {
            kind,
            n,
            rows,
            m,
            spread,
            seed,
            json,
            out,
        } => {
            let params = GeneratorParams {
                n,
                rows: rows.unwrap_or(n),
                m,
                spread,
            };
            let set = generate(kind.into(), &params, seed)?;
            let text = if json { set.to_json() + "\n" } else { set.to_text() };
            emit(&out, &text)?;
            Ok(Status::Ok)
        }
        Cmd::Render { instance, subset, svg } => {
            let set = load(&instance)?;
            let sub = match subset {
                Some(p) => Some(parse_subset(&read(&p)?)?),
                None => None,
            };
            write(&svg, &render_instance(&set, sub.as_deref())?)?;
            Ok(Status::Ok)
        }
        Cmd::ReduceSat {
            formula,
            instance,
            manifest,
            svg,
            json,
            prove,
        } => {
            let inst = Max2SatInstance::parse(&read(&formula)?)?;
            let ci = compile(&inst)?;
            let text = if json { ci.set.to_json() + "\n" } else { ci.set.to_text() };
            write(&instance, &text)?;
            let m = ci.manifest();
            let mtext = serde_json::to_string_pretty(&m).expect("serializable manifest");
            write(&manifest, &(mtext + "\n"))?;
            if let Some(p) = svg {
                write(&p, &render_layout(&ci)?)?;
            }
            println!(
                "points: {} (n1 = {}, n2 = {}), target size for k = {}: {}",
                m.points, m.n1, m.n2, m.k, m.target_size
            );
            if prove {
                let proofs = prove_compiled(&ci)?;
                let mut all = true;
                for p in &proofs {
                    all &= p.holds();
                    println!(
                        "{} {}: {} points, versions {:?}, {} ring probes",
                        if p.holds() { "ok  " } else { "FAIL" },
                        p.name,
                        p.points,
                        p.sizes,
                        p.ring_probes
                    );
                }
                if !all {
                    return Ok(Status::Negative);
                }
            }
            Ok(Status::Ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = run(cli);
    let _ = std::io::stdout().flush();
    match status {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Negative) => ExitCode::from(1),
        Ok(Status::Budget) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
