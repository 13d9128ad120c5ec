//! `w1conc` command-line front end.
//!
//! Exit status: 0 on success with no violations, 2 when a comparison reports a
//! violation, 1 on any error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use w1conc::bounds::{bound_modified, bound_rd, bound_t1, BoundReport, RdConstants};
use w1conc::covering::{enumerate_tree_net, greedy_cover, FiniteMetricSpace};
use w1conc::harness::{read_results, report_tables, run_experiment, write_results, ExperimentConfig, ExperimentResults};
use w1conc::markov::{bound_markov_with, default_markov_c_d};
use w1conc::measure::{DiscreteMeasure, Metric, Point};
use w1conc::seed::SEED_ENV;
use w1conc::wasserstein::{w1, w1_exact};
use w1conc::{Error, Result};

#[derive(Parser)]
#[command(name = "w1conc", version, about = "Wasserstein deviation bounds and Monte-Carlo checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// W₁ between two measures stored as CSV rows `x1,…,xd,weight`.
    W1 {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value = "euclidean")]
        metric: MetricArg,
        /// Hölder exponent for `--metric holder`.
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// Also print the optimal plan as `i,j,mass` rows.
        #[arg(long)]
        plan: bool,
    },
    /// Evaluate a deviation bound and print its report as JSON.
    Bound {
        #[command(subcommand)]
        bound: BoundCmd,
    },
    /// Greedy δ-cover of a point set stored as CSV rows `x1,…,xd`.
    Cover {
        points: PathBuf,
        #[arg(long)]
        delta: f64,
        /// Also build the spanning-tree net of 1-Lipschitz functions at this ε.
        #[arg(long)]
        tree_eps: Option<f64>,
    },
    /// Run an i.i.d. experiment config.
    Simulate(RunArgs),
    /// Run a Markov-chain experiment config.
    Markov(RunArgs),
    /// Print the tables of a saved results file.
    Report { results: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed and the environment seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Results JSON; the CSV is written next to it.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum BoundCmd {
    /// `log 𝒞_t − nt²/(8C)`.
    T1 {
        #[arg(long)]
        c: f64,
        #[arg(long)]
        log_ct: f64,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        n: usize,
    },
    /// T₁ bound with the ℝ^d covering constant.
    T1Rd {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        n: usize,
    },
    /// Bound under the modified inequality `W₁ ≤ C(H + √H)`.
    Modified {
        #[arg(long)]
        c: f64,
        #[arg(long)]
        log_ct: f64,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        n: usize,
    },
    /// Occupation-measure bound of a contracting chain.
    Markov {
        #[arg(long)]
        c: f64,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        m1: f64,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long)]
        c_d: Option<f64>,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Euclidean,
    Sup,
    Holder,
}

fn metric_of(m: MetricArg, alpha: f64) -> Metric {
    match m {
        MetricArg::Euclidean => Metric::Euclidean,
        MetricArg::Sup => Metric::SupNormPath,
        MetricArg::Holder => Metric::HolderSeminorm { alpha },
    }
}

/// Numeric CSV rows; a first row that does not parse is taken as a header.
fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().filter(|f| !f.is_empty()).map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) if !v.is_empty() => rows.push(v),
            Ok(_) => {}
            Err(_) if i == 0 => {}
            Err(e) => return Err(Error::config(path.display().to_string(), format!("line {}: {e}", i + 1))),
        }
    }
    Ok(rows)
}

fn read_measure(path: &Path) -> Result<DiscreteMeasure> {
    let rows = read_rows(path)?;
    let mut points = Vec::with_capacity(rows.len());
    let mut weights = Vec::with_capacity(rows.len());
    for (i, mut r) in rows.into_iter().enumerate() {
        if r.len() < 2 {
            return Err(Error::config(path.display().to_string(), format!("row {} needs coordinates and a weight", i + 1)));
        }
        weights.push(r.pop().expect("nonempty"));
        points.push(Point::new(r)?);
    }
    DiscreteMeasure::from_weighted_points(points, weights)
}

fn print_report(r: &BoundReport) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(r)?);
    Ok(())
}

fn bound(cmd: BoundCmd) -> Result<u8> {
    let report = match cmd {
        BoundCmd::T1 { c, log_ct, t, n } => bound_t1(c, log_ct, t, n),
        BoundCmd::T1Rd { a, c, d, t, n } => bound_rd(a, c, d, t, n, &RdConstants::default_for(d))?,
        BoundCmd::Modified { c, log_ct, t, n } => bound_modified(c, log_ct, t, n),
        BoundCmd::Markov { c, r, m1, d, c_d, t, n } => bound_markov_with(c, r, m1, d, t, n, c_d.unwrap_or_else(|| default_markov_c_d(d)))?,
    };
    print_report(&report)?;
    Ok(0)
}

fn resolve_seed(cli: Option<u64>) -> Result<Option<u64>> {
    if cli.is_some() {
        return Ok(cli);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| Error::config(SEED_ENV, format!("`{v}` is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

fn run(args: RunArgs, markov: bool) -> Result<u8> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if markov != cfg.kernel.is_some() {
        let want = if markov { "a `kernel`" } else { "a `law`" };
        return Err(Error::config("kernel", format!("this subcommand needs {want}")));
    }
    if let Some(s) = resolve_seed(args.seed)? {
        cfg.seed = s;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(o) = args.output {
        cfg.output = Some(o);
    }
    let rows = run_experiment(&cfg)?;
    let results = ExperimentResults { config: cfg.clone(), rows };
    print!("{}", report_tables(&results.rows)?.text);
    if let Some(out) = &cfg.output {
        let csv = write_results(&results, out)?;
        eprintln!("wrote {} and {}", out.display(), csv.display());
    }
    Ok(exit_for(&results))
}

fn exit_for(results: &ExperimentResults) -> u8 {
    let v = results.violations();
    if v > 0 {
        eprintln!("{v} violation(s)");
        2
    } else {
        0
    }
}

fn dispatch(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::W1 { a, b, metric, alpha, plan } => {
            let mu = read_measure(&a)?;
            let nu = read_measure(&b)?;
            let metric = metric_of(metric, alpha);
            if plan {
                let (v, coupling) = w1_exact(&mu, &nu, &metric)?;
                println!("{v}");
                for (i, row) in coupling.plan.iter().enumerate() {
                    for (j, &m) in row.iter().enumerate() {
                        if m > 0.0 {
                            println!("{i},{j},{m}");
                        }
                    }
                }
            } else {
                println!("{}", w1(&mu, &nu, &metric)?);
            }
            Ok(0)
        }
        Command::Bound { bound: b } => bound(b),
        Command::Cover { points, delta, tree_eps } => {
            let pts = read_rows(&points)?.into_iter().map(Point::new).collect::<Result<Vec<_>>>()?;
            let space = FiniteMetricSpace::new(pts, Metric::Euclidean, 0)?;
            let cover = greedy_cover(&space, delta)?;
            println!("centers: {}", cover.count);
            println!("radius: {}", cover.radius);
            println!("center_indices: {:?}", cover.centers);
            if let Some(eps) = tree_eps {
                let net = enumerate_tree_net(&space, eps)?;
                println!("tree_net_size: {}", net.count());
                println!("tree_net_cap: {}", net.size_cap());
                println!("tree_net_radius: {}", net.radius);
            }
            Ok(0)
        }
        Command::Simulate(args) => run(args, false),
        Command::Markov(args) => run(args, true),
        Command::Report { results } => {
            let r = read_results(&results)?;
            print!("{}", report_tables(&r.rows)?.text);
            Ok(exit_for(&r))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
