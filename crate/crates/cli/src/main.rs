mod config;
mod output;
mod suites;

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use config::{Format, Resolved, Settings, StopKind};
use immunet::{
    apply_node_costs, eigen_score_plan, greedy_walk_edges, greedy_walk_nodes, greedy_walk_nonuniform, greedy_walk_sparse,
    hit_walks, hybrid_plan, line_pagerank_plan, load_edge_list, make_adversarial, node_heuristic_plan, product_degree_plan,
    sis_simulate, sis_simulate_nonuniform, CostMode, Graph, GreedyConfig, HitWalksMode, NodeScorer, RemovalPlan, Stop,
    TransmissionMatrix, WalkLength,
};

/// Error carrying the process exit code: 1 for a failed run or property, 2
/// for usage and I/O problems.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    pub fn property(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<immunet::Error> for Failure {
    fn from(e: immunet::Error) -> Self {
        use immunet::Error::*;
        let code = match e {
            NotConverged { .. } | Overflow { .. } | Unreachable { .. } => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Greedywalk,
    GreedywalkSparse,
    Primaldual,
    HitwalksFirst,
    Productdegree,
    Eigenscore,
    Linepagerank,
    Hybrid,
    GreedywalkNodes,
    DegreeNodes,
    EigenscoreNodes,
    GreedywalkNonuniform,
}

impl Algorithm {
    fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }

    fn needs_threshold(self) -> bool {
        matches!(
            self,
            Algorithm::Greedywalk
                | Algorithm::GreedywalkSparse
                | Algorithm::Primaldual
                | Algorithm::HitwalksFirst
                | Algorithm::GreedywalkNodes
        )
    }

    fn recomputes_eigenvectors(self) -> bool {
        matches!(self, Algorithm::Eigenscore | Algorithm::Hybrid | Algorithm::EigenscoreNodes)
    }
}

const DEFAULT_COMPARE: [Algorithm; 7] = [
    Algorithm::Greedywalk,
    Algorithm::GreedywalkSparse,
    Algorithm::HitwalksFirst,
    Algorithm::Productdegree,
    Algorithm::Eigenscore,
    Algorithm::Linepagerank,
    Algorithm::Hybrid,
];

#[derive(Parser)]
#[command(name = "immunet", version, about = "Spectral-radius reduction for epidemic control")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Inputs {
    /// Edge list `u v [cost]`.
    graph: PathBuf,
    /// Node costs, `v cost` per line.
    #[arg(long)]
    cost_file: Option<PathBuf>,
    /// Transmission rates, `u v beta` per line.
    #[arg(long)]
    rates_file: Option<PathBuf>,
    /// TOML file with defaults for the algorithm flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: Settings,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm and write its removal plan.
    Run {
        #[arg(value_enum)]
        algorithm: Algorithm,
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Run several algorithms with the same stopping rule, one λ₁ column each.
    Compare {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, value_enum, value_delimiter = ',')]
        algorithms: Vec<Algorithm>,
    },
    /// Run a property suite; exit 1 with a counterexample if any check fails.
    Validate {
        #[arg(value_enum)]
        suite: suites::Suite,
        #[command(flatten)]
        opts: suites::Options,
        /// Machine-readable JSON report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the clique–caterpillar–star instance as an edge list.
    MakeAdversarial {
        #[arg(long = "Tprime", value_name = "T'")]
        t_prime: usize,
        /// Spine length; defaults to 3·T'.
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte-Carlo SIS extinction times.
    Sis {
        graph: PathBuf,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long)]
        rates_file: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        runs: usize,
        #[arg(long, default_value_t = 100.0)]
        horizon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `all`, or comma-separated node ids.
        #[arg(long, default_value = "all")]
        initial: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn in_file(path: &Path) -> impl Fn(immunet::Error) -> Failure + '_ {
    move |e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    }
}

fn load_graph(path: &Path, cost_file: Option<&Path>) -> Result<Graph, Failure> {
    let loaded = load_edge_list(open(path)?, CostMode::Column).map_err(in_file(path))?;
    if loaded.duplicates > 0 || loaded.self_loops > 0 {
        log::info!("{}: {} duplicate edges, {} self-loops", path.display(), loaded.duplicates, loaded.self_loops);
    }
    match cost_file {
        Some(c) => apply_node_costs(loaded.graph, open(c)?).map_err(in_file(c)),
        None => Ok(loaded.graph),
    }
}

fn load_rates(graph: &Graph, path: Option<&Path>, delta: f64) -> Result<Option<TransmissionMatrix>, Failure> {
    path.map(|p| TransmissionMatrix::read(graph, open(p)?, delta).map_err(in_file(p)))
        .transpose()
}

fn greedy_config(cfg: &Resolved, t: f64, budget: Option<usize>) -> GreedyConfig {
    let mut g = GreedyConfig::new(t);
    g.epsilon = cfg.epsilon;
    g.k_cap = cfg.k_cap;
    if let Some(k) = cfg.k {
        g.walk_length = WalkLength::Fixed(k);
    }
    g.max_removals = budget;
    g.power.seed = cfg.seed;
    g
}

/// Keeps the first `b` steps.
fn truncate(mut plan: RemovalPlan, b: usize) -> RemovalPlan {
    if plan.len() <= b {
        return plan;
    }
    plan.sequence.truncate(b);
    plan.cumulative_cost.truncate(b);
    plan.lambda_trajectory.truncate(b + 1);
    plan.completed = false;
    let mut left = b;
    for p in &mut plan.phases {
        p.len = p.len.min(left);
        left -= p.len;
    }
    plan
}

fn run_algorithm(alg: Algorithm, graph: &Graph, rates: Option<&TransmissionMatrix>, cfg: &Resolved) -> Result<RemovalPlan, Failure> {
    let budget = cfg
        .budget
        .map(|b| b.resolve(graph.present_node_count(), graph.edge_count()));
    let threshold = || {
        cfg.threshold
            .ok_or_else(|| Failure::usage(format!("{} needs --T", alg.name())))
    };
    let stop = || -> Result<Stop, Failure> {
        Ok(match cfg.stop {
            StopKind::Threshold => Stop::Threshold(threshold()?),
            StopKind::Budget => Stop::Budget(budget.expect("checked when resolving")),
        })
    };
    if alg.recomputes_eigenvectors() && graph.edge_count() > 1_000_000 {
        log::warn!("{} recomputes an eigenvector per step; m = {} will be slow", alg.name(), graph.edge_count());
    }
    let plan = match alg {
        Algorithm::Greedywalk => greedy_walk_edges(graph, &greedy_config(cfg, threshold()?, budget))?,
        Algorithm::GreedywalkSparse => greedy_walk_sparse(graph, &greedy_config(cfg, threshold()?, budget))?,
        Algorithm::GreedywalkNodes => greedy_walk_nodes(graph, &greedy_config(cfg, threshold()?, budget))?,
        Algorithm::GreedywalkNonuniform => {
            let rates = match rates {
                Some(r) => r.clone(),
                None => return Err(Failure::usage("greedywalk-nonuniform needs --rates-file")),
            };
            greedy_walk_nonuniform(graph, &rates, &greedy_config(cfg, cfg.delta, budget))?
        }
        Algorithm::Primaldual => hit_walks(graph, &greedy_config(cfg, threshold()?, None), HitWalksMode::Full)?,
        Algorithm::HitwalksFirst => hit_walks(graph, &greedy_config(cfg, threshold()?, None), HitWalksMode::FirstIteration)?,
        Algorithm::Productdegree => product_degree_plan(graph, stop()?)?,
        Algorithm::Eigenscore => eigen_score_plan(graph, stop()?)?,
        Algorithm::Linepagerank => line_pagerank_plan(graph, stop()?)?,
        Algorithm::Hybrid => hybrid_plan(graph, stop()?)?,
        Algorithm::DegreeNodes => node_heuristic_plan(graph, NodeScorer::Degree, stop()?)?,
        Algorithm::EigenscoreNodes => node_heuristic_plan(graph, NodeScorer::EigenScore, stop()?)?,
    };
    Ok(match budget {
        Some(b) => truncate(plan, b),
        None => plan,
    })
}

fn plan_summary(alg: Algorithm, plan: &RemovalPlan, graph: &Graph, cfg: &Resolved, seconds: f64) -> serde_json::Value {
    let k = alg.needs_threshold().then(|| {
        cfg.threshold
            .map(|t| greedy_config(cfg, t, None).walk_length_for(graph.present_node_count()))
    });
    json!({
        "algorithm": alg.name(),
        "wall_time_seconds": seconds,
        "removals": plan.len(),
        "total_cost": plan.total_cost(),
        "initial_lambda1": plan.initial_lambda(),
        "final_lambda1": plan.final_lambda(),
        "completed": plan.completed,
        "walk_length": k.flatten(),
        "phases": plan.phases,
    })
}

/// With a threshold stop, a plan that never got below T is a failed run.
fn check_completed(alg: Algorithm, plan: &RemovalPlan, cfg: &Resolved) -> Result<(), Failure> {
    if cfg.stop == StopKind::Threshold && cfg.budget.is_none() && !plan.completed {
        return Err(Failure::property(format!(
            "{} stopped after {} removals without reaching its threshold (λ₁ = {})",
            alg.name(),
            plan.len(),
            output::sig12(plan.final_lambda())
        )));
    }
    Ok(())
}

fn cmd_run(alg: Algorithm, inputs: Inputs) -> Result<(), Failure> {
    let Format::Csv = inputs.format;
    let cfg = config::resolve(inputs.settings, inputs.config.as_deref())?;
    let graph = load_graph(&inputs.graph, inputs.cost_file.as_deref())?;
    let rates = load_rates(&graph, inputs.rates_file.as_deref(), cfg.delta)?;
    let start = Instant::now();
    let plan = run_algorithm(alg, &graph, rates.as_ref(), &cfg)?;
    let seconds = start.elapsed().as_secs_f64();
    output::emit(inputs.out.as_deref(), &output::plan_csv(&graph, &plan))?;
    let manifest = json!({
        "command": "run",
        "version": env!("CARGO_PKG_VERSION"),
        "graph": inputs.graph,
        "nodes": graph.present_node_count(),
        "edges": graph.edge_count(),
        "config": cfg,
        "result": plan_summary(alg, &plan, &graph, &cfg, seconds),
    });
    output::emit_manifest(inputs.out.as_deref(), &manifest)?;
    check_completed(alg, &plan, &cfg)
}

fn cmd_compare(inputs: Inputs, algorithms: Vec<Algorithm>) -> Result<(), Failure> {
    let Format::Csv = inputs.format;
    let algorithms = if algorithms.is_empty() { DEFAULT_COMPARE.to_vec() } else { algorithms };
    let cfg = config::resolve(inputs.settings, inputs.config.as_deref())?;
    let graph = load_graph(&inputs.graph, inputs.cost_file.as_deref())?;
    let rates = load_rates(&graph, inputs.rates_file.as_deref(), cfg.delta)?;
    let results: Vec<Result<(RemovalPlan, f64), Failure>> = std::thread::scope(|s| {
        let handles: Vec<_> = algorithms
            .iter()
            .map(|&alg| {
                let (graph, rates, cfg) = (&graph, rates.as_ref(), &cfg);
                s.spawn(move || {
                    let start = Instant::now();
                    run_algorithm(alg, graph, rates, cfg).map(|p| (p, start.elapsed().as_secs_f64()))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("algorithm thread panicked")).collect()
    });
    let mut plans = Vec::new();
    let mut times = Vec::new();
    for (alg, r) in algorithms.iter().zip(results) {
        let (p, t) = r.map_err(|mut f| {
            f.message = format!("{}: {}", alg.name(), f.message);
            f
        })?;
        plans.push(p);
        times.push(t);
    }
    if plans.windows(2).any(|w| w[0].kind != w[1].kind) {
        return Err(Failure::usage("compare needs algorithms of one kind (all edge or all node removal)"));
    }
    let names: Vec<String> = algorithms.iter().map(|a| a.name()).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    output::emit(inputs.out.as_deref(), &output::compare_csv(&graph, &refs, &plans))?;
    let summaries: Vec<_> = algorithms
        .iter()
        .zip(&plans)
        .zip(&times)
        .map(|((&a, p), &t)| plan_summary(a, p, &graph, &cfg, t))
        .collect();
    let manifest = json!({
        "command": "compare",
        "version": env!("CARGO_PKG_VERSION"),
        "graph": inputs.graph,
        "nodes": graph.present_node_count(),
        "edges": graph.edge_count(),
        "config": cfg,
        "results": summaries,
    });
    output::emit_manifest(inputs.out.as_deref(), &manifest)
}

fn cmd_make_adversarial(t_prime: usize, q: Option<usize>, out: Option<PathBuf>) -> Result<(), Failure> {
    let inst = make_adversarial(t_prime, q.unwrap_or(3 * t_prime))?;
    output::emit(out.as_deref(), &inst.graph.to_edge_list())?;
    let manifest = json!({
        "command": "make-adversarial",
        "version": env!("CARGO_PKG_VERSION"),
        "nodes": inst.graph.node_count(),
        "edges": inst.graph.edge_count(),
        "instance": inst,
    });
    output::emit_manifest(out.as_deref(), &manifest)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sis(
    graph_path: PathBuf,
    beta: Option<f64>,
    delta: f64,
    rates_file: Option<PathBuf>,
    runs: usize,
    horizon: f64,
    seed: u64,
    initial: String,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let graph = load_graph(&graph_path, None)?;
    let initial: Vec<usize> = if initial.trim() == "all" {
        (0..graph.node_count()).filter(|&v| graph.is_present(v)).collect()
    } else {
        initial
            .split(',')
            .map(|s| {
                let label: u64 = s.trim().parse().map_err(|_| Failure::usage(format!("bad node id `{s}`")))?;
                graph
                    .node_by_label(label)
                    .ok_or_else(|| Failure::usage(format!("node {label} is not in the graph")))
            })
            .collect::<Result<_, _>>()?
    };
    let outcome = match (load_rates(&graph, rates_file.as_deref(), delta)?, beta) {
        (Some(rates), _) => sis_simulate_nonuniform(&graph, &rates, &initial, horizon, runs, seed)?,
        (None, Some(beta)) => sis_simulate(&graph, beta, delta, &initial, horizon, runs, seed)?,
        (None, None) => return Err(Failure::usage("sis needs --beta or --rates-file")),
    };
    let mut csv = String::from("rank,extinction_time,censored\n");
    for (i, t) in outcome.times_with_censoring().iter().enumerate() {
        let censored = i >= outcome.extinction_times.len();
        csv.push_str(&format!("{},{},{}\n", i + 1, output::sig12(*t), u8::from(censored)));
    }
    output::emit(out.as_deref(), &csv)?;
    let manifest = json!({
        "command": "sis",
        "version": env!("CARGO_PKG_VERSION"),
        "graph": graph_path,
        "beta": beta,
        "delta": delta,
        "rates_file": rates_file,
        "runs": runs,
        "horizon": horizon,
        "seed": seed,
        "initially_infected": initial.len(),
        "median": outcome.median(),
        "mean": outcome.mean(),
        "censored_fraction": outcome.censored_fraction(),
    });
    output::emit_manifest(out.as_deref(), &manifest)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { algorithm, inputs } => cmd_run(algorithm, inputs),
        Command::Compare { inputs, algorithms } => cmd_compare(inputs, algorithms),
        Command::Validate { suite, opts, out } => suites::cmd_validate(suite, &opts, out.as_deref()),
        Command::MakeAdversarial { t_prime, q, out } => cmd_make_adversarial(t_prime, q, out),
        Command::Sis {
            graph,
            beta,
            delta,
            rates_file,
            runs,
            horizon,
            seed,
            initial,
            out,
        } => cmd_sis(graph, beta, delta, rates_file, runs, horizon, seed, initial, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
