use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};

use stabilab::commands::{self, exit, CheckMode, Outcome, UsageError, WitnessRequest};
use stabilab::format::parse_script;
use stabilab::loader::{load_algorithm, load_config, load_ids, load_problem_file, load_topology, problem_for, Loaded};
use stabilab::report::RunReport;
use stabilab_core::checker::DEFAULT_CONFIG_CAP;
use stabilab_core::scheduler::{CentralPolicy, Strategy};
use stabilab_core::{Daemon, Exponent, ProblemSpec, Topology, WitnessMode};

/// Self-stabilization laboratory: model checking and memory lower-bound
/// witnesses for algorithms in the state model.
#[derive(Parser)]
#[command(name = "stabilab", version)]
struct Cli {
    /// Write the machine-readable run report here.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Worker threads for parallel steps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct TopoArgs {
    /// Ring size.
    #[arg(long)]
    ring: Option<usize>,
    /// Permute each node's port labels.
    #[arg(long)]
    scrambled: bool,
    /// Seed for --scrambled.
    #[arg(long)]
    seed: Option<u64>,
    /// Topology JSON file.
    #[arg(long, value_name = "FILE")]
    topology: Option<PathBuf>,
}

impl TopoArgs {
    fn load(&self) -> Result<Topology> {
        load_topology(self.ring, self.scrambled, self.seed, self.topology.as_deref())
    }
}

#[derive(Args)]
struct ProblemArgs {
    /// coloring, leader, tree or trivial.
    #[arg(long)]
    problem: Option<String>,
    /// Problem JSON file instead of --problem.
    #[arg(long, value_name = "FILE")]
    problem_file: Option<PathBuf>,
    /// Algorithm field holding the specification variable.
    #[arg(long)]
    var: Option<String>,
    /// Number of colors (default: max degree + 1).
    #[arg(long)]
    palette: Option<u64>,
}

impl ProblemArgs {
    fn load(&self, f: u32, loaded: Option<&Loaded>) -> Result<ProblemSpec> {
        match (&self.problem, &self.problem_file) {
            (Some(p), None) => problem_for(p, f, loaded.map(|l| &l.algorithm), self.var.as_deref(), self.palette),
            (None, Some(path)) => load_problem_file(path),
            _ => Err(UsageError("give exactly one of --problem or --problem-file".into()).into()),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Guaranteed,
    Empirical,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckDaemon {
    Sync,
    Distributed,
}

#[derive(Clone, Copy, ValueEnum)]
enum SimDaemon {
    Sync,
    Central,
    CentralHigh,
    Random,
    Script,
}

#[derive(Subcommand)]
enum Cmd {
    /// Count the identifier-free behaviors for f bits and degree d.
    Count {
        #[arg(long)]
        f: u32,
        #[arg(long, default_value_t = 2)]
        d: usize,
    },
    /// Group identifiers by the behavior they induce.
    Bucket {
        #[arg(long)]
        alg: String,
        #[arg(long, default_value_t = 1)]
        lo: u64,
        #[arg(long)]
        hi: u64,
        #[arg(long, default_value_t = 2)]
        d: usize,
    },
    /// Build and replay a lower-bound witness on an oriented ring.
    Witness {
        #[arg(long)]
        alg: String,
        /// Identifier exponent: ids range over 1..=floor(n^c). Integer,
        /// decimal or p/q.
        #[arg(long)]
        c: String,
        #[command(flatten)]
        problem: ProblemArgs,
        /// Ring size (default: the guaranteed threshold).
        #[arg(long)]
        n: Option<usize>,
        /// Default: guaranteed without --n, empirical with it.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Witness file.
        #[arg(long, default_value = "witness.json")]
        out: PathBuf,
    },
    /// Exhaustively model-check an instance.
    Check {
        #[arg(long)]
        alg: String,
        #[command(flatten)]
        topo: TopoArgs,
        /// Comma-separated ids by node (default 1..=n).
        #[arg(long)]
        ids: Option<String>,
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_enum, default_value = "sync")]
        daemon: CheckDaemon,
        /// Largest number of configurations to enumerate.
        #[arg(long, default_value_t = DEFAULT_CONFIG_CAP)]
        cap: u64,
    },
    /// Run one execution.
    Simulate {
        #[arg(long)]
        alg: String,
        #[command(flatten)]
        topo: TopoArgs,
        #[arg(long)]
        ids: Option<String>,
        /// Comma-separated initial states by node.
        #[arg(long)]
        init: String,
        #[arg(long, value_enum, default_value = "sync")]
        daemon: SimDaemon,
        /// Seed for the random daemon.
        #[arg(long = "daemon-seed", default_value_t = 0)]
        daemon_seed: u64,
        /// JSON array of node-index arrays for the script daemon.
        #[arg(long, value_name = "FILE")]
        script: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        budget: usize,
    },
    /// Check that no homogeneous configuration is legal.
    VerifySpec {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        topo: TopoArgs,
        #[arg(long)]
        f: u32,
    },
    /// Re-check a witness file against its algorithm.
    Replay {
        #[arg(long, value_name = "FILE")]
        witness: PathBuf,
        #[arg(long)]
        alg: String,
    },
}

fn degree_of(t: &Topology) -> Result<usize> {
    t.regular_degree().ok_or_else(|| UsageError("the topology is not regular".into()).into())
}

fn run(cmd: &Cmd) -> Result<Outcome> {
    match cmd {
        Cmd::Count { f, d } => commands::count(*f, *d),
        Cmd::Bucket { alg, lo, hi, d } => commands::bucket(&load_algorithm(alg, *d)?, *lo, *hi),
        Cmd::Witness { alg, c, problem, n, mode, out } => {
            let c: Exponent = c.parse().map_err(|e| UsageError(format!("--c: {e}")))?;
            let loaded = load_algorithm(alg, 2)?;
            let spec = problem.load(loaded.algorithm.f(), Some(&loaded))?;
            let mode = match (mode, n) {
                (Some(ModeArg::Guaranteed), _) | (None, None) => WitnessMode::Guaranteed,
                _ => WitnessMode::Empirical,
            };
            let req = WitnessRequest { loaded: &loaded, c, problem: spec, n: *n, mode, out: Some(out.as_path()) };
            commands::witness(&req).map(|(o, _)| o)
        }
        Cmd::Check { alg, topo, ids, problem, daemon, cap } => {
            let topology = topo.load()?;
            let loaded = load_algorithm(alg, degree_of(&topology)?)?;
            let ids = load_ids(ids.as_deref(), topology.n())?;
            let spec = problem.load(loaded.algorithm.f(), Some(&loaded))?;
            let mode = match daemon {
                CheckDaemon::Sync => CheckMode::Synchronous,
                CheckDaemon::Distributed => CheckMode::Distributed,
            };
            commands::check(&loaded, &topology, &ids, &spec, mode, *cap)
        }
        Cmd::Simulate { alg, topo, ids, init, daemon, daemon_seed, script, budget } => {
            let topology = topo.load()?;
            let loaded = load_algorithm(alg, degree_of(&topology)?)?;
            let ids = load_ids(ids.as_deref(), topology.n())?;
            let init = load_config(init, loaded.algorithm.f())?;
            let daemon = match (daemon, script) {
                (SimDaemon::Script, Some(path)) => {
                    let text = std::fs::read_to_string(path)?;
                    Daemon::Adversarial(Strategy::Scripted(parse_script(&text)?))
                }
                (SimDaemon::Script, None) => return Err(UsageError("--daemon script needs --script FILE".into()).into()),
                (_, Some(_)) => return Err(UsageError("--script applies to --daemon script only".into()).into()),
                (SimDaemon::Sync, None) => Daemon::Synchronous,
                (SimDaemon::Central, None) => Daemon::Central(CentralPolicy::LowestIndex),
                (SimDaemon::CentralHigh, None) => Daemon::Central(CentralPolicy::HighestIndex),
                (SimDaemon::Random, None) => Daemon::Random { seed: *daemon_seed },
            };
            commands::simulate(&loaded, &topology, &ids, &daemon, &init, *budget)
        }
        Cmd::VerifySpec { problem, topo, f } => {
            let topology = topo.load()?;
            commands::verify_spec(&problem.load(*f, None)?, &topology, *f)
        }
        Cmd::Replay { witness, alg } => commands::replay(Path::new(witness), &load_algorithm(alg, 2)?),
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE } else { exit::OK });
        }
    };
    let started = Instant::now();
    let outcome = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run(&cli.cmd)),
            Err(e) => Err(e.into()),
        },
        None => run(&cli.cmd),
    };
    let (code, output, inputs) = match outcome {
        Ok(o) => {
            print!("{}", o.text);
            (o.exit, o.output, o.inputs)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = commands::exit_code_for(&e);
            (code, serde_json::json!({ "error": format!("{e:#}") }), Default::default())
        }
    };
    if let Some(path) = &cli.json {
        let report = RunReport::new(argv[1..].to_vec(), inputs, code, output, started.elapsed().as_secs_f64());
        if let Err(e) = report.write(path) {
            eprintln!("error: {e:#}");
            return ExitCode::from(exit::FAILURE);
        }
    }
    ExitCode::from(code)
}
