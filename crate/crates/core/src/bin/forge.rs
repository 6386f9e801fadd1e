use std::fs;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gapforge::biwheel::prob::probability_grid;
use gapforge::biwheel::{build_biwheel, check_amplifier, BiWheel};
use gapforge::e3lin2::{balance_negations, eval_e3lin2, generate_planted, parse_e3lin2};
use gapforge::graph::{
    collapse_tour, expand_forced, expand_tour, export_tsplib, metric_closure, CollapseMode, DistanceMatrix,
    ReductionGraph, TourMultiset,
};
use gapforge::hybrid::{build_hybrid, project_consistent, round_consistent, HybridInstance};
use gapforge::oracle::{brute_permutation, held_karp};
use gapforge::pipeline::{run_pipeline, PipelineConfig, PipelineReport, Target};
use gapforge::reduction::{AssignmentFile, Reduction};
use gapforge::weight::{format_weight, parse_weight, Weight};
use gapforge::{Error, Result};

#[derive(Parser)]
#[command(name = "forge", version, about = "Build and check MAX-E3-LIN2 to TSP/ATSP reductions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Out {
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct Expansion {
    /// Replace forced edges by paths of this many edges (0 = no expansion).
    #[arg(long = "L", default_value_t = 0)]
    l: usize,
    /// Reject non-uniformly traversed forced paths (default).
    #[arg(long, conflicts_with = "lenient")]
    strict: bool,
    /// Pad non-uniformly traversed forced paths instead of rejecting them.
    #[arg(long)]
    lenient: bool,
}

impl Expansion {
    fn mode(&self) -> CollapseMode {
        if self.lenient {
            CollapseMode::Lenient
        } else {
            CollapseMode::Strict
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Tsplib,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Hk,
    Perm,
}

#[derive(Subcommand)]
enum Cmd {
    /// Random MAX-E3-LIN2 instance with a planted assignment.
    Gen {
        #[arg(long, default_value_t = 3)]
        vars: usize,
        #[arg(long, default_value_t = 1)]
        eqs: usize,
        #[arg(long, default_value_t = 0)]
        flips: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Where to write the planted assignment.
        #[arg(long)]
        assign_out: Option<PathBuf>,
        #[command(flatten)]
        out: Out,
    },
    /// Rewrite to right-hand side b with balanced negations (4 copies each).
    Balance {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
        b: u8,
        #[command(flatten)]
        out: Out,
    },
    /// Hybrid instance from a balanced instance.
    ToHybrid {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
        b: u8,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Balance the instance first.
        #[arg(long)]
        balance: bool,
        #[command(flatten)]
        out: Out,
    },
    /// Undirected reduction graph from a Hybrid instance with b = 0.
    ToTsp {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Directed reduction graph from a Hybrid instance with b = 1.
    ToAtsp {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "1/8")]
        lambda: String,
        #[command(flatten)]
        out: Out,
    },
    /// Tour from an assignment.
    Tour {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        assign: PathBuf,
        /// Write the quasi-tour before bridging instead of the tour.
        #[arg(long)]
        quasi: bool,
        #[command(flatten)]
        expansion: Expansion,
        #[command(flatten)]
        out: Out,
    },
    /// Assignment from a tour.
    Extract {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        tour: PathBuf,
        #[command(flatten)]
        expansion: Expansion,
        #[command(flatten)]
        out: Out,
    },
    /// Per-gadget local costs and credits of a tour.
    Audit {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        tour: PathBuf,
        #[command(flatten)]
        expansion: Expansion,
        #[command(flatten)]
        out: Out,
    },
    /// Check the cut condition on a bi-wheel.
    AmplifierCheck {
        /// Wheel JSON; otherwise one is generated from --n and --seed.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Random subsets to test when the wheel is too large to scan.
        #[arg(long)]
        budget: Option<u64>,
        #[command(flatten)]
        out: Out,
    },
    /// Normalisation and monotonicity checks of the cut probabilities.
    ProbCheck {
        #[arg(long, default_value_t = 6)]
        max_n: i64,
        #[arg(long, default_value_t = 8)]
        ratio_max_n: i64,
        #[command(flatten)]
        out: Out,
    },
    /// Exact tour on a distance matrix.
    Oracle {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Hk)]
        method: Method,
        #[command(flatten)]
        out: Out,
    },
    /// Metric closure of a (possibly expanded) graph as JSON or TSPLIB.
    Export {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Shorthand for --format tsplib.
        #[arg(long)]
        tsplib: bool,
        #[arg(long = "L", default_value_t = 10)]
        l: usize,
        #[command(flatten)]
        out: Out,
    },
    /// End-to-end run on a planted instance.
    Pipeline {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        vars: usize,
        #[arg(long, default_value_t = 1)]
        eqs: usize,
        #[arg(long, default_value_t = 0)]
        flips: usize,
        #[arg(long, default_value = "1/8")]
        lambda: String,
        #[arg(long = "L", default_value_t = 10)]
        l: usize,
        #[arg(long, default_value_t = 100)]
        mutations: usize,
        #[arg(long, value_enum, default_value_t = TargetArg::Both)]
        target: TargetArg,
        #[arg(long)]
        lenient: bool,
        #[command(flatten)]
        out: Out,
    },
    /// Print the checks of a saved pipeline report.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    Tsp,
    Atsp,
    Both,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::input(format!("{}: {e}", path.display())))
}

fn read_json(path: &Path) -> Result<Value> {
    Ok(serde_json::from_str(&read(path)?)?)
}

/// Writes a line to stdout; a closed pipe ends the process quietly.
fn say(text: &str) {
    if let Err(e) = writeln!(std::io::stdout().lock(), "{text}") {
        if e.kind() == ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
    }
}

fn emit(out: &Out, text: &str) -> Result<()> {
    match &out.out {
        Some(p) => Ok(fs::write(p, text)?),
        None => {
            say(text);
            Ok(())
        }
    }
}

fn emit_json(out: &Out, v: &Value) -> Result<()> {
    emit(out, &serde_json::to_string_pretty(v)?)
}

/// Prints a one-line summary to stdout when the artifact went to a file.
fn note(out: &Out, v: Value) {
    if out.out.is_some() {
        say(&v.to_string());
    }
}

fn load_reduction(path: &Path) -> Result<Reduction> {
    Reduction::from_json(&read_json(path)?)
}

fn load_graph(path: &Path) -> Result<ReductionGraph> {
    let v = read_json(path)?;
    if v.get("kind").is_some() {
        Ok(Reduction::from_json(&v)?.graph().clone())
    } else {
        ReductionGraph::from_json(&v)
    }
}

/// Reads a tour, collapsing it first when it lives on the expanded graph.
fn load_tour(red: &Reduction, path: &Path, exp: &Expansion) -> Result<(TourMultiset, Value)> {
    let v = read_json(path)?;
    if exp.l == 0 {
        return Ok((TourMultiset::from_json(red.graph(), &v)?, Value::Null));
    }
    let ex = expand_forced(red.graph(), exp.l)?;
    let te = TourMultiset::from_json(&ex.graph, &v)?;
    let (t, rep) = collapse_tour(&ex, &te, exp.mode())?;
    Ok((t, serde_json::to_value(rep)?))
}

fn weight_arg(s: &str) -> Result<Weight> {
    parse_weight(s)
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Gen { vars, eqs, flips, seed, assign_out, out } => {
            let (inst, planted) = generate_planted(vars, eqs, flips, seed)?;
            emit(&out, inst.to_text().trim_end())?;
            if let Some(p) = assign_out {
                let f = AssignmentFile { original: Some(planted.clone()), hybrid: None };
                fs::write(p, serde_json::to_string_pretty(&f)?)?;
            }
            note(&out, json!({"vars": vars, "eqs": eqs, "planted_unsat": eval_e3lin2(&inst, &planted)?}));
        }
        Cmd::Balance { input, b, out } => {
            let inst = parse_e3lin2(&read(&input)?)?;
            let bal = balance_negations(&inst, b == 1);
            emit(&out, bal.to_text().trim_end())?;
            note(&out, json!({"equations": bal.num_equations(), "balanced": bal.is_balanced()}));
        }
        Cmd::ToHybrid { input, b, seed, balance, out } => {
            let mut inst = parse_e3lin2(&read(&input)?)?;
            if balance {
                inst = balance_negations(&inst, b == 1);
            }
            let h = build_hybrid(&inst, b == 1, seed)?;
            emit_json(&out, &h.to_json())?;
            note(&out, serde_json::to_value(h.counts())?);
        }
        Cmd::ToTsp { input, out } => {
            let h = HybridInstance::from_json(&read_json(&input)?)?;
            let red = Reduction::build(&h, None)?;
            emit_json(&out, &red.to_json())?;
            note(&out, json!({"vertices": red.graph().num_vertices(), "edges": red.graph().num_edges()}));
        }
        Cmd::ToAtsp { input, lambda, out } => {
            let h = HybridInstance::from_json(&read_json(&input)?)?;
            let red = Reduction::build(&h, Some(weight_arg(&lambda)?))?;
            emit_json(&out, &red.to_json())?;
            note(&out, json!({"vertices": red.graph().num_vertices(), "edges": red.graph().num_edges()}));
        }
        Cmd::Tour { graph, assign, quasi, expansion, out } => {
            let red = load_reduction(&graph)?;
            let f: AssignmentFile = serde_json::from_str(&read(&assign)?)?;
            let a = f.resolve(red.hybrid())?;
            let c = red.tour_from_assignment(&a)?;
            let t = if quasi { &c.quasi_tour } else { &c.tour };
            let tour_json = if expansion.l == 0 {
                t.to_json()
            } else {
                let ex = expand_forced(red.graph(), expansion.l)?;
                expand_tour(&ex, t)?.to_json()
            };
            emit_json(&out, &tour_json)?;
            note(&out, serde_json::to_value(&c)?);
        }
        Cmd::Extract { graph, tour, expansion, out } => {
            let red = load_reduction(&graph)?;
            let (t, collapse) = load_tour(&red, &tour, &expansion)?;
            let ex = red.extract(&t)?;
            let h = red.hybrid();
            let rounded = round_consistent(h, &ex.assignment)?;
            let num_vars = h.wheels().iter().map(|w| w.var as usize).max().unwrap_or(0);
            let original = project_consistent(h, &rounded, num_vars)?;
            let v = json!({
                "hybrid": ex.assignment.iter().map(|&b| u8::from(b)).collect::<Vec<_>>(),
                "original": original.iter().map(|&b| u8::from(b)).collect::<Vec<_>>(),
                "unsat": ex.unsat,
                "dishonest_vars": ex.dishonest_vars,
                "tour_cost": format_weight(&ex.tour_cost),
                "allowance": format_weight(&ex.allowance),
                "collapse": collapse,
            });
            emit_json(&out, &v)?;
            note(&out, json!({"unsat": ex.unsat, "allowance": format_weight(&ex.allowance)}));
        }
        Cmd::Audit { graph, tour, expansion, out } => {
            let red = load_reduction(&graph)?;
            let (t, _) = load_tour(&red, &tour, &expansion)?;
            let rep = red.audit(&t)?;
            emit_json(&out, &serde_json::to_value(&rep)?)?;
            note(&out, json!({"total_credit": format_weight(&rep.total_credit), "tour_cost": format_weight(&rep.tour_cost)}));
        }
        Cmd::AmplifierCheck { input, n, seed, budget, out } => {
            let w: BiWheel = match input {
                Some(p) => serde_json::from_str(&read(&p)?)?,
                None => build_biwheel(n, seed)?,
            };
            let cert = check_amplifier(&w, budget)?;
            emit_json(&out, &json!({"wheel": w, "certificate": cert}))?;
            if cert.violating_set.is_some() {
                return Err(Error::invariant("wheel violates the cut condition"));
            }
        }
        Cmd::ProbCheck { max_n, ratio_max_n, out } => {
            let g = probability_grid(max_n, 2..=ratio_max_n)?;
            emit_json(&out, &serde_json::to_value(&g)?)?;
            if g.max_sum_error > 1e-9 || g.max_k0_difference > 1e-9 || g.ratio_true != g.ratio_cells {
                return Err(Error::invariant("probability grid check failed"));
            }
        }
        Cmd::Oracle { matrix, method, out } => {
            let m = DistanceMatrix::from_json(&read_json(&matrix)?)?;
            let r = match method {
                Method::Hk => held_karp(&m)?,
                Method::Perm => brute_permutation(&m)?,
            };
            emit_json(&out, &serde_json::to_value(&r)?)?;
        }
        Cmd::Export { graph, format, tsplib, l, out } => {
            let g = load_graph(&graph)?;
            let g = if l == 0 { g } else { expand_forced(&g, l)?.graph };
            let m = metric_closure(&g)?;
            let name = graph.file_stem().and_then(|s| s.to_str()).unwrap_or("forge");
            match (tsplib, format) {
                (true, _) | (_, Format::Tsplib) => emit(&out, export_tsplib(&m, name)?.trim_end())?,
                _ => emit_json(&out, &m.to_json())?,
            }
            note(&out, json!({"dimension": m.n(), "symmetric": m.is_symmetric()}));
        }
        Cmd::Pipeline { seed, vars, eqs, flips, lambda, l, mutations, target, lenient, out } => {
            let cfg = PipelineConfig {
                seed,
                num_vars: vars,
                num_eqs: eqs,
                flips,
                target: match target {
                    TargetArg::Tsp => Target::Tsp,
                    TargetArg::Atsp => Target::Atsp,
                    TargetArg::Both => Target::Both,
                },
                lambda: weight_arg(&lambda)?,
                l,
                mutations,
                collapse: if lenient { CollapseMode::Lenient } else { CollapseMode::Strict },
                ..Default::default()
            };
            let rep = run_pipeline(&cfg)?;
            emit(&out, &rep.to_json_string())?;
            finish_report(&rep)?;
        }
        Cmd::Report { input } => {
            let v = read_json(&input)?;
            let checks = v.get("checks").and_then(Value::as_array).ok_or_else(|| Error::input("not a pipeline report"))?;
            let mut failed = 0;
            for c in checks {
                let pass = c["pass"].as_bool().unwrap_or(false);
                failed += usize::from(!pass);
                say(&format!(
                    "{} {}: {} {} {}",
                    if pass { "PASS" } else { "FAIL" },
                    c["name"].as_str().unwrap_or("?"),
                    c["lhs"].as_str().unwrap_or("?"),
                    c["relation"].as_str().unwrap_or("?"),
                    c["rhs"].as_str().unwrap_or("?")
                ));
            }
            for r in v.get("ratios").and_then(Value::as_array).into_iter().flatten() {
                let pass = r["pass"].as_bool().unwrap_or(false);
                failed += usize::from(!pass);
                say(&format!("{} {}: {} = {}", if pass { "PASS" } else { "FAIL" }, r["name"].as_str().unwrap_or("?"), r["ratio"], r["claimed"]));
            }
            if failed > 0 {
                return Err(Error::Invariant(format!("{failed} report checks failed")));
            }
        }
    }
    Ok(())
}

fn finish_report(rep: &PipelineReport) -> Result<()> {
    match rep.failed_checks().next() {
        Some(c) => Err(Error::Invariant(format!("check {} failed: {} {} {}", c.name, c.lhs, c.relation, c.rhs))),
        None if !rep.ok => Err(Error::invariant("ratio check failed")),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("forge: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
