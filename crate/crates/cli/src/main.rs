use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use geoentropy::experiment::{
    default_k_grid, emit_csv, knee_location, run_sweep_observed, stepped_k_grid, SweepConfig, WeightKind, WeightSpec,
    DEFAULT_REALIZATIONS, DEFAULT_SAMPLES,
};
use geoentropy::graph::{gibbs_entropy, largest_component_size, pair_count, read_graph_file};
use geoentropy::rng::StreamKey;
use geoentropy::volume::{normalized_entropy_of, Baseline, Integrand, Regularizer, DEFAULT_LOG10_CAP};
use geoentropy::Error;

const EXIT_BAD_ARGS: u8 = 2;
const EXIT_ESTIMATION: u8 = 3;

#[derive(Parser)]
#[command(name = "geoentropy", version, about = "Geometric entropy of random graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the edge count of G(n, k) and write the entropy curve as CSV.
    Sweep(SweepArgs),
    /// Estimate the normalized entropy of a single graph, printed as JSON.
    Entropy(EntropyArgs),
    /// Print ln[C(C(n,2), k) / n!].
    Gibbs {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Print the size of the largest connected component.
    Components {
        #[arg(long)]
        graph: PathBuf,
    },
}

#[derive(Args)]
struct EstimatorArgs {
    #[arg(long, default_value_t = WeightKind::Constant, value_parser = parse_from_str::<WeightKind>)]
    weight_model: WeightKind,
    /// Edge weight (constant model) or coupling coefficient (theta-coupled).
    #[arg(long, default_value_t = 0.2)]
    r: f64,
    #[arg(long, default_value_t = 0.1)]
    theta_min: f64,
    #[arg(long, default_value_t = 10.0)]
    theta_max: f64,
    /// Monte Carlo samples per volume estimate.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exclude samples whose log10 sqrt|det g| exceeds this.
    #[arg(long, default_value_t = DEFAULT_LOG10_CAP)]
    log10_cap: f64,
    #[arg(long, default_value_t = Regularizer::Hypercube, value_parser = parse_from_str::<Regularizer>)]
    regularizer: Regularizer,
    /// How the bare volume in the denominator is obtained.
    #[arg(long, default_value_t = Baseline::SharedStream, value_parser = parse_from_str::<Baseline>)]
    baseline: Baseline,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k_max: usize,
    /// Uniform k spacing; without it the grid is dense up to 3n, geometric beyond.
    #[arg(long)]
    k_step: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_REALIZATIONS)]
    realizations: usize,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
    /// Smoothing window for the knee summary.
    #[arg(long, default_value_t = 3)]
    knee_window: usize,
    /// Report progress on standard error.
    #[arg(long)]
    progress: bool,
    #[command(flatten)]
    est: EstimatorArgs,
}

#[derive(Args)]
struct EntropyArgs {
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    est: EstimatorArgs,
}

fn parse_from_str<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    BadArgs(String),
    Estimation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::EstimationFailed(_) => Failure::Estimation(e.to_string()),
            other => Failure::BadArgs(other.to_string()),
        }
    }
}

fn base_config(n: usize, est: &EstimatorArgs) -> SweepConfig {
    let weight = match est.weight_model {
        WeightKind::Constant => WeightSpec::constant(est.r),
        WeightKind::ThetaCoupled => WeightSpec::theta_coupled(est.r),
    };
    let mut cfg = SweepConfig::new(n, weight);
    cfg.theta_min = est.theta_min;
    cfg.theta_max = est.theta_max;
    cfg.n_samples = est.samples;
    cfg.master_seed = est.seed;
    cfg.log10_cap = est.log10_cap;
    cfg.regularizer = est.regularizer;
    cfg.baseline = est.baseline;
    cfg
}

fn sweep(a: SweepArgs) -> Result<(), Failure> {
    if a.k_max > pair_count(a.n) {
        return Err(Error::EdgeCountOutOfRange { k: a.k_max, max: pair_count(a.n) }.into());
    }
    let mut cfg = base_config(a.n, &a.est);
    cfg.k_values = match a.k_step {
        Some(0) => return Err(Failure::BadArgs("--k-step must be positive".into())),
        Some(step) => stepped_k_grid(a.k_max, step),
        None => default_k_grid(a.n, a.k_max),
    };
    cfg.n_realizations = a.realizations;
    cfg.out = Some(a.out.clone());
    if a.threads == Some(0) {
        return Err(Failure::BadArgs("--threads must be positive".into()));
    }
    cfg.validate()?;

    let show = a.progress;
    let curve = run_sweep_observed(&cfg, a.threads, |done, total| {
        if show && (done == total || done % 50 == 0) {
            eprintln!("{done}/{total} realizations");
        }
    })?;
    emit_csv(&curve, &cfg, &a.out)?;

    let knee = match knee_location(&curve, a.knee_window) {
        Ok(k) => json!({ "x_star": k.x_star(), "max_slope": k.max_slope() }),
        Err(_) => serde_json::Value::Null,
    };
    let empty: Vec<usize> = curve.rows.iter().filter(|r| !r.has_value()).map(|r| r.k).collect();
    println!(
        "{}",
        json!({ "out": a.out.display().to_string(), "rows": curve.rows.len(), "knee": knee, "rows_without_value": empty })
    );
    if !empty.is_empty() {
        return Err(Failure::Estimation(format!("no realization succeeded at k = {empty:?}")));
    }
    Ok(())
}

fn entropy(a: EntropyArgs) -> Result<(), Failure> {
    let file = read_graph_file(&a.graph)?;
    let cfg = base_config(file.graph.n(), &a.est);
    let model = cfg.weight.model()?;
    let integrand = Integrand::from_graph_with_overrides(&file.graph, &model, &file.weights)?;
    let b = cfg.parameter_box()?;
    let s = normalized_entropy_of(&integrand, &b, &cfg.estimator_options(), StreamKey::root(cfg.master_seed))?;

    let mut config = serde_json::to_value(&cfg).expect("config serializes");
    if let serde_json::Value::Object(m) = &mut config {
        m.remove("k_values");
        m.remove("n_realizations");
        m.remove("out");
        m.insert("graph".into(), json!(a.graph.display().to_string()));
        m.insert("k".into(), json!(file.graph.edge_count()));
    }
    let out = json!({
        "log_volume": s.numerator.log_integral,
        "s": s.s_tilde,
        "stderr": s.stderr,
        "excluded_fraction": s.numerator.excluded_fraction(),
        "log_baseline": s.log_baseline,
        "config": config,
    });
    println!("{out}");
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Sweep(a) => sweep(a),
        Command::Entropy(a) => entropy(a),
        Command::Gibbs { n, k } => {
            println!("{:.16e}", gibbs_entropy(n, k)?);
            Ok(())
        }
        Command::Components { graph } => {
            println!("{}", largest_component_size(&read_graph_file(&graph)?.graph));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::BadArgs(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_BAD_ARGS)
        }
        Err(Failure::Estimation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_ESTIMATION)
        }
    }
}
