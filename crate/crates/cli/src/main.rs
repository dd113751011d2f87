//! `qmc-theta`: theta-of-the-complement lower bounds for quantum Max Cut,
//! checked against rounding experiments and exact diagonalization.
//!
//! Exit status is 0 when every check passes, 1 when a check fails or the graph
//! has no edges, 2 on usage errors and 3 when a computation fails.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use qmc_theta::graph::{named_graph, parse_family_spec, parse_graph};
use qmc_theta::report::{
    self, constants, BoundReport, ConstantEntry, RunOptions, SweepRow, CSV_HEADER, REPORT_VERSION,
};
use qmc_theta::rounding::Model;
use qmc_theta::{Error, Graph};

#[derive(Parser)]
#[command(name = "qmc-theta", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Theta of the complement and the implied bounds.
    Theta(SingleArgs),
    /// Bound, Monte-Carlo rounding and exact value, with consistency checks.
    Verify(SingleArgs),
    /// Moment-matrix relaxation and its rank-3 rounding ratio.
    Gp(SingleArgs),
    /// One CSV row per graph. Family parameters accept inclusive ranges,
    /// e.g. `cycle:5..9`.
    Sweep(SweepArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// Rounding and exact-value model.
    #[arg(long, default_value = "qmc", value_parser = parse_model)]
    model: Model,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Solver tolerance.
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    /// Write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Largest vertex count for exact diagonalization and brute-force cuts.
    #[arg(long, default_value_t = 20)]
    max_exact_n: usize,
}

impl Common {
    fn options(&self) -> RunOptions {
        RunOptions {
            model: self.model,
            trials: self.trials,
            seed: self.seed,
            tol: self.tol,
            max_exact_n: self.max_exact_n,
        }
    }
}

#[derive(Args)]
struct SingleArgs {
    /// Edge-list or DIMACS file.
    #[arg(long, conflicts_with = "family", required_unless_present = "family")]
    graph: Option<PathBuf>,
    /// Named family, e.g. `cycle:5`, `complete_bipartite:2:3`, `petersen`.
    #[arg(long, value_parser = check_family)]
    family: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    graph: Vec<PathBuf>,
    #[arg(long, value_parser = check_family)]
    family: Vec<String>,
    /// Write the CSV table here (stdout otherwise).
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

fn parse_model(s: &str) -> Result<Model, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Expands `a..b` parameters into every combination.
fn expand_family(spec: &str) -> Result<Vec<String>, String> {
    let mut parts = spec.split(':');
    let name = parts.next().unwrap_or_default();
    let mut out = vec![name.to_string()];
    for p in parts {
        let values: Vec<String> = match p.split_once("..") {
            Some((lo, hi)) => {
                let lo: usize = lo.parse().map_err(|_| format!("bad range `{p}`"))?;
                let hi: usize = hi.parse().map_err(|_| format!("bad range `{p}`"))?;
                if lo > hi {
                    return Err(format!("empty range `{p}`"));
                }
                (lo..=hi).map(|v| v.to_string()).collect()
            }
            None => vec![p.to_string()],
        };
        out = out
            .iter()
            .flat_map(|prefix| values.iter().map(move |v| format!("{prefix}:{v}")))
            .collect();
    }
    Ok(out)
}

fn check_family(spec: &str) -> Result<String, String> {
    for s in expand_family(spec)? {
        let (family, params) = parse_family_spec(&s).map_err(|e| e.to_string())?;
        named_graph(family, &params, 0).map_err(|e| e.to_string())?;
    }
    Ok(spec.to_string())
}

fn family_graph(spec: &str, seed: u64) -> Result<Graph, Error> {
    let (family, params) = parse_family_spec(spec)?;
    named_graph(family, &params, seed)
}

fn file_graph(path: &PathBuf) -> Result<Graph, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_graph(&text).map_err(|e| format!("{}: {e}", path.display()))
}

enum Failure {
    Usage(String),
    NoEdges,
    Compute(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if matches!(e.root(), Error::NoEdges) {
            Failure::NoEdges
        } else {
            Failure::Compute(e)
        }
    }
}

fn write_json<T: Serialize>(path: &PathBuf, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".into(), |v| format!("{v:.10}"))
}

fn print_report(r: &BoundReport) {
    println!(
        "graph  {}  (n = {}, m = {})",
        r.graph.source, r.graph.n, r.graph.m
    );
    if let Some(t) = &r.theta {
        println!("kappa  {:.10}", t.kappa);
        println!("t      {:.10}", t.t);
        println!("residual {:.3e}  ({} iterations)", t.residual, t.iterations);
    }
    for b in &r.bounds {
        let c = r
            .constants
            .iter()
            .find(|c| c.model == b.model)
            .expect("constant per model");
        println!(
            "bound[{}]  {:.10}   c = {} = {:.12}",
            b.model.name(),
            b.bound,
            c.symbol,
            c.value
        );
    }
    if let Some(e) = &r.rounding {
        println!(
            "rounding[{}]  mean {:.10} +- {:.3e}  best {:.10}  ({} trials, seed {})",
            e.model.name(),
            e.mean,
            e.stderr,
            e.best,
            e.trials,
            e.seed
        );
    }
    if let Some(e) = &r.exact {
        match &e.skipped {
            Some(why) => println!("exact  skipped: {why}"),
            None => println!(
                "exact  qmc {}  xx {}  mc {}",
                fmt_opt(e.qmc),
                fmt_opt(e.xx),
                e.mc.map_or_else(|| "n/a".into(), |v| v.to_string())
            ),
        }
    }
    if let Some(gp) = &r.gp {
        println!("gp relaxation {:.10}", gp.relaxation_value);
        println!(
            "gp mean {:.10} +- {:.3e}  ratio {:.6} +- {:.3e}{}",
            gp.mean,
            gp.stderr,
            gp.ratio,
            gp.ratio_stderr,
            if gp.upper_bound_denominator {
                "  (denominator is the relaxation value, an upper bound)"
            } else {
                ""
            }
        );
    }
    for c in &r.checks {
        println!(
            "[{}] {}: {} = {:.12} vs {} = {:.12}, slack {:+.3e}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.lhs_name,
            c.lhs,
            c.rhs_name,
            c.rhs,
            c.slack
        );
        if let Some(note) = &c.note {
            println!("       {note}");
        }
    }
}

fn run_single(command: &str, args: &SingleArgs) -> Result<bool, Failure> {
    let opts = args.common.options();
    let (graph, source) = match (&args.graph, &args.family) {
        (Some(path), _) => (
            file_graph(path).map_err(Failure::Usage)?,
            path.display().to_string(),
        ),
        (None, Some(spec)) => (family_graph(spec, opts.seed)?, spec.clone()),
        (None, None) => {
            return Err(Failure::Usage(
                "one of --graph or --family is required".into(),
            ))
        }
    };
    let report = match command {
        "theta" => report::cmd_theta(&graph, &source, opts)?,
        "verify" => report::cmd_verify(&graph, &source, opts)?,
        _ => report::cmd_gp(&graph, &source, opts)?,
    };
    print_report(&report);
    if let Some(path) = &args.common.json {
        write_json(path, &report)?;
    }
    Ok(report.all_passed)
}

#[derive(Serialize)]
struct SweepReport<'a> {
    report_version: u32,
    command: &'static str,
    options: RunOptions,
    constants: Vec<ConstantEntry>,
    rows: &'a [SweepRow],
}

fn run_sweep(args: &SweepArgs) -> Result<bool, Failure> {
    let opts = args.common.options();
    let mut inputs: Vec<(String, Graph)> = Vec::new();
    for path in &args.graph {
        inputs.push((
            path.display().to_string(),
            file_graph(path).map_err(Failure::Usage)?,
        ));
    }
    for spec in &args.family {
        for s in expand_family(spec).map_err(Failure::Usage)? {
            let g = family_graph(&s, opts.seed)?;
            inputs.push((s, g));
        }
    }
    if inputs.is_empty() {
        return Err(Failure::Usage(
            "sweep needs at least one --graph or --family".into(),
        ));
    }
    let rows = inputs
        .par_iter()
        .map(|(source, g)| report::sweep_row(g, source, opts))
        .collect::<Result<Vec<_>, Error>>()?;

    let mut buffer = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buffer);
        let io = |e: csv::Error| Failure::Io(e.to_string());
        w.write_record(CSV_HEADER).map_err(io)?;
        for row in &rows {
            w.write_record(row.csv_fields()).map_err(io)?;
        }
        w.flush().map_err(|e| Failure::Io(e.to_string()))?;
    }
    match &args.csv {
        Some(path) => {
            fs::write(path, &buffer).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?
        }
        None => std::io::stdout()
            .write_all(&buffer)
            .map_err(|e| Failure::Io(e.to_string()))?,
    }
    if let Some(path) = &args.common.json {
        write_json(
            path,
            &SweepReport {
                report_version: REPORT_VERSION,
                command: "sweep",
                options: opts,
                constants: constants(),
                rows: &rows,
            },
        )?;
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Theta(a) => run_single("theta", a),
        Command::Verify(a) => run_single("verify", a),
        Command::Gp(a) => run_single("gp", a),
        Command::Sweep(a) => run_sweep(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more checks failed");
            ExitCode::from(1)
        }
        Err(Failure::NoEdges) => {
            eprintln!("bound = 0 (no edges)");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
