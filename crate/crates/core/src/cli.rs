//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage error, 3 invalid config or input file,
//! 4 I/O failure, 5 runtime failure.

use crate::baseline::Policy;
use crate::config::{parse_config, RunConfig};
use crate::episode::{run_episode, run_genome, EpisodeError, EpisodeOptions};
use crate::eval::{evaluate_breakdown, serve, SocketWorker, Worker, WorkerPool};
use crate::neat::{load_genome, save_genome, Genome, GenomeFileError, GenomeMetadata};
use crate::replay::analyze_kiting;
use crate::scenario::{Formation, Scenario, TrainingSet};
use crate::sensors::{OUTPUT_COUNT, SENSOR_COUNT};
use crate::sweep::{summarize, sweep_genome, write_sweep_csv, SweepOptions};
use crate::training::{
    write_stats_csv, Checkpoint, EvolutionState, TrainError, TrainOptions, Trainer,
};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_RUNTIME: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "kiteneat",
    version,
    about = "Evolve and inspect kiting controllers"
)]
pub struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run NEAT training and write genome, statistics and checkpoints.
    Train(TrainArgs),
    /// Score a genome on the training set or on given scenarios.
    Evaluate(EvaluateArgs),
    /// Run a genome across formations and zealot counts.
    Sweep(SweepArgs),
    /// Write a tick-by-tick replay of one episode.
    Replay(ReplayArgs),
    /// Score a scripted policy on a scenario.
    Baseline(BaselineArgs),
    /// Serve evaluation requests over TCP.
    Worker(WorkerArgs),
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides `evolution.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides `evolution.generations`.
    #[arg(long)]
    pub generations: Option<u32>,
    /// In-process evaluation threads.
    #[arg(long, default_value_t = default_workers())]
    pub workers: usize,
    /// Remote workers (`host:port`) to use instead of in-process threads.
    #[arg(long = "connect", value_delimiter = ',')]
    pub connect: Vec<String>,
    /// Continue from a checkpoint instead of seeding a new population.
    #[arg(long)]
    pub resume: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Simulation settings and default training set.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// `formation:zealots[:seed]`; repeatable.
    #[arg(long = "scenario")]
    pub scenarios: Vec<String>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub genome: PathBuf,
    #[command(flatten)]
    pub scenarios: ScenarioArgs,
    /// Seed mixed into spawn seeds, as during training.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Training generation whose spawn layouts to use.
    #[arg(long)]
    pub generation: Option<u32>,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub genome: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated formations.
    #[arg(long, value_delimiter = ',', default_values_t = Formation::SWEEP_DEFAULT.map(|f| f.name().to_string()))]
    pub formations: Vec<String>,
    #[arg(long, default_value_t = 30)]
    pub max_zealots: usize,
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
    /// Base spawn seed; repeat r uses seed + r.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = default_workers())]
    pub workers: usize,
    /// Simulation settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Also print a per-formation summary.
    #[arg(long)]
    pub summary: bool,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub genome: PathBuf,
    /// `formation:zealots[:seed]`.
    #[arg(long)]
    pub scenario: String,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    /// `formation:zealots[:seed]`.
    #[arg(long)]
    pub scenario: String,
    /// stand_and_fire, flee, random or idle.
    #[arg(long)]
    pub policy: String,
    /// Seed of the random policy.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WorkerArgs {
    /// Address to listen on, e.g. 0.0.0.0:7100.
    #[arg(long)]
    pub listen: String,
    /// Exit after serving this many connections.
    #[arg(long)]
    pub max_connections: Option<usize>,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// A failed command and the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn config(m: impl ToString) -> Self {
        CliError {
            code: EXIT_CONFIG,
            message: m.to_string(),
        }
    }
    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError {
            code: EXIT_IO,
            message: format!("{}: {e}", path.display()),
        }
    }
    fn runtime(m: impl ToString) -> Self {
        CliError {
            code: EXIT_RUNTIME,
            message: m.to_string(),
        }
    }
}

impl From<EpisodeError> for CliError {
    fn from(e: EpisodeError) -> Self {
        match e {
            EpisodeError::Scenario(_) | EpisodeError::Layout { .. } => CliError::config(e),
            EpisodeError::Sim(_) => CliError::runtime(e),
        }
    }
}

impl From<TrainError> for CliError {
    fn from(e: TrainError) -> Self {
        match e {
            TrainError::Config(_) => CliError::config(e),
            TrainError::Checkpoint { .. } | TrainError::Stats(_) => CliError {
                code: EXIT_IO,
                message: e.to_string(),
            },
            TrainError::Pool { .. } => CliError::runtime(e),
        }
    }
}

/// Record of one command invocation and the files it produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    pub args: Vec<String>,
    pub config_path: Option<PathBuf>,
    pub config_hash: Option<String>,
    pub output: PathBuf,
    pub seed: Option<u64>,
    pub started_unix: u64,
    pub finished_unix: u64,
    /// Relative path → sha256 hex of each artifact.
    pub artifacts: BTreeMap<String, String>,
}

impl RunManifest {
    fn start(command: &str, args: &[String], output: &Path) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            args: args.to_vec(),
            config_path: None,
            config_hash: None,
            output: output.to_path_buf(),
            seed: None,
            started_unix: unix_now(),
            finished_unix: 0,
            artifacts: BTreeMap::new(),
        }
    }

    fn add(&mut self, base: &Path, file: &Path) -> Result<(), CliError> {
        let bytes = std::fs::read(file).map_err(|e| CliError::io(file, e))?;
        let name = file
            .strip_prefix(base)
            .unwrap_or(file)
            .to_string_lossy()
            .replace('\\', "/");
        self.artifacts
            .insert(name, hex::encode(Sha256::digest(&bytes)));
        Ok(())
    }

    fn write(mut self, path: &Path) -> Result<(), CliError> {
        self.finished_unix = unix_now();
        let json = serde_json::to_string_pretty(&self).expect("manifest serializes");
        std::fs::write(path, json + "\n").map_err(|e| CliError::io(path, e))
    }

    /// Sidecar manifest path for a single-file output.
    pub fn sidecar(file: &Path) -> PathBuf {
        let mut name = file.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        file.with_file_name(name)
    }
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .try_init();
    let raw: Vec<String> = args
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match execute(cli.command, &raw) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

pub fn execute(command: Command, raw_args: &[String]) -> Result<(), CliError> {
    match command {
        Command::Train(a) => cmd_train(a, raw_args),
        Command::Evaluate(a) => cmd_evaluate(a, raw_args),
        Command::Sweep(a) => cmd_sweep(a, raw_args),
        Command::Replay(a) => cmd_replay(a, raw_args),
        Command::Baseline(a) => cmd_baseline(a, raw_args),
        Command::Worker(a) => cmd_worker(a),
    }
}

fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text, path, std::env::vars()).map_err(CliError::config)
}

fn read_config(path: Option<&Path>) -> Result<RunConfig, CliError> {
    match path {
        Some(p) => load_config(p),
        None => Ok(RunConfig::default()),
    }
}

fn read_genome(path: &Path) -> Result<(Genome, GenomeMetadata), CliError> {
    load_genome(path, SENSOR_COUNT, OUTPUT_COUNT).map_err(|e| match e {
        GenomeFileError::Io(io) => CliError::io(path, io),
        other => CliError::config(format!("{}: {other}", path.display())),
    })
}

fn parse_scenario(spec: &str, config: &RunConfig) -> Result<Scenario, CliError> {
    let s = Scenario::parse_spec(spec, &config.simulation.template()).map_err(CliError::config)?;
    s.validate().map_err(CliError::config)?;
    Ok(s)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).expect("report serializes");
    writeln!(w)
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(path, e))
}

fn finish_single(mut manifest: RunManifest, file: &Path) -> Result<(), CliError> {
    let base = file.parent().unwrap_or(Path::new(""));
    manifest.add(base, file)?;
    manifest.write(&RunManifest::sidecar(file))
}

pub fn cmd_train(a: TrainArgs, raw_args: &[String]) -> Result<(), CliError> {
    let mut config = load_config(&a.config)?;
    if let Some(seed) = a.seed {
        config.evolution.seed = seed;
    }
    if let Some(g) = a.generations {
        config.evolution.generations = g;
    }
    config.evolution.validate().map_err(CliError::config)?;
    let set = config.training_set().map_err(CliError::config)?;

    let out = &a.out;
    let checkpoints = out.join("checkpoints");
    std::fs::create_dir_all(&checkpoints).map_err(|e| CliError::io(&checkpoints, e))?;
    let mut manifest = RunManifest::start("train", raw_args, out);
    manifest.config_path = Some(a.config.clone());
    manifest.config_hash = Some(config.evolution.hash());
    manifest.seed = Some(config.evolution.seed);

    let state = match &a.resume {
        Some(p) => Checkpoint::load(p)?.state,
        None => EvolutionState::new(config.evolution.clone(), set)?,
    };
    let pool = if a.connect.is_empty() {
        WorkerPool::in_process(a.workers)
    } else {
        let mut workers: Vec<Box<dyn Worker>> = Vec::new();
        for addr in &a.connect {
            let w = SocketWorker::connect(addr.as_str())
                .map_err(|e| CliError::runtime(format!("connecting to {addr}: {e}")))?;
            workers.push(Box::new(w));
        }
        WorkerPool::new(workers)
    };
    let options = TrainOptions {
        checkpoint_every: config.checkpoint_every,
        checkpoint_dir: Some(checkpoints.clone()),
        workers: a.workers,
    };
    let outcome = Trainer::new(state, pool, options).run()?;

    let genome_path = out.join("best_genome.json");
    save_genome(
        &genome_path,
        &outcome.best,
        &config.evolution.hash(),
        outcome.best_generation,
    )
    .map_err(|e| CliError::io(&genome_path, e))?;
    let stats_path = out.join("stats.csv");
    write_stats_csv(create(&stats_path)?, &outcome.history)
        .map_err(|e| CliError::io(&stats_path, e))?;

    manifest.add(out, &genome_path)?;
    manifest.add(out, &stats_path)?;
    let mut cps: Vec<PathBuf> = std::fs::read_dir(&checkpoints)
        .map_err(|e| CliError::io(&checkpoints, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    cps.sort();
    for cp in cps {
        manifest.add(out, &cp)?;
    }
    manifest.write(&out.join("manifest.json"))?;
    println!(
        "best fitness {} (generation {}), {} generations, output in {}",
        outcome.best.fitness,
        outcome.best_generation,
        outcome.history.len(),
        out.display()
    );
    Ok(())
}

#[derive(Debug, Serialize)]
struct EvaluationReport {
    genome: PathBuf,
    total_fitness: f64,
    scenarios: Vec<ScenarioReport>,
}

#[derive(Debug, Serialize)]
struct ScenarioReport {
    scenario: String,
    spawn_seed: u64,
    fitness: f64,
    remaining_ranged: usize,
    remaining_melee: usize,
    frames: u64,
}

pub fn cmd_evaluate(a: EvaluateArgs, raw_args: &[String]) -> Result<(), CliError> {
    let config = read_config(a.scenarios.config.as_deref())?;
    let (genome, _) = read_genome(&a.genome)?;
    let mut set = if a.scenarios.scenarios.is_empty() {
        config.training_set().map_err(CliError::config)?
    } else {
        let list = a
            .scenarios
            .scenarios
            .iter()
            .map(|s| parse_scenario(s, &config))
            .collect::<Result<Vec<_>, _>>()?;
        TrainingSet::new(list).map_err(CliError::config)?
    };
    if let Some(g) = a.generation {
        set = set.for_generation(a.seed.unwrap_or(config.evolution.seed), g);
    }
    let results = evaluate_breakdown(&genome, &set)?;
    let scenarios: Vec<ScenarioReport> = set
        .scenarios()
        .iter()
        .zip(&results)
        .map(|(s, r)| ScenarioReport {
            scenario: s.label(),
            spawn_seed: s.spawn_seed,
            fitness: r.fitness,
            remaining_ranged: r.remaining_ranged(),
            remaining_melee: r.remaining_melee(),
            frames: r.frames,
        })
        .collect();
    let report = EvaluationReport {
        genome: a.genome.clone(),
        total_fitness: results.iter().map(|r| r.fitness).sum(),
        scenarios,
    };
    for s in &report.scenarios {
        println!(
            "{:<26} fitness {:>8.1}  ranged {}  melee {:>2}  frames {}",
            s.scenario, s.fitness, s.remaining_ranged, s.remaining_melee, s.frames
        );
    }
    println!(
        "total fitness {} of {}",
        report.total_fitness,
        set.max_fitness()
    );
    if let Some(out) = &a.out {
        write_json(out, &report)?;
        let mut m = RunManifest::start("evaluate", raw_args, out);
        m.config_path = a.scenarios.config.clone();
        m.seed = a.seed;
        finish_single(m, out)?;
    }
    Ok(())
}

pub fn cmd_sweep(a: SweepArgs, raw_args: &[String]) -> Result<(), CliError> {
    let config = read_config(a.config.as_deref())?;
    let (genome, _) = read_genome(&a.genome)?;
    let formations = a
        .formations
        .iter()
        .map(|f| f.parse::<Formation>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::config)?;
    let options = SweepOptions {
        formations,
        max_zealots: a.max_zealots,
        repeats: a.repeats,
        base_seed: a.seed,
        template: config.simulation.template(),
        workers: a.workers,
    };
    let rows = sweep_genome(&genome, &options).map_err(|e| match e {
        crate::sweep::SweepError::Episode(ep) => CliError::from(ep),
        other => CliError::config(other),
    })?;
    write_sweep_csv(create(&a.out)?, &rows).map_err(|e| CliError::io(&a.out, e))?;
    if a.summary {
        for s in summarize(&rows) {
            println!(
                "{:<22} min remaining ranged {:.1}  all melee destroyed up to {}",
                s.formation, s.min_mean_remaining_ranged, s.annihilated_up_to
            );
        }
    }
    let mut m = RunManifest::start("sweep", raw_args, &a.out);
    m.config_path = a.config.clone();
    m.seed = Some(a.seed);
    finish_single(m, &a.out)?;
    println!("{} rows written to {}", rows.len(), a.out.display());
    Ok(())
}

pub fn cmd_replay(a: ReplayArgs, raw_args: &[String]) -> Result<(), CliError> {
    let config = read_config(a.config.as_deref())?;
    let (genome, _) = read_genome(&a.genome)?;
    let scenario = parse_scenario(&a.scenario, &config)?;
    let result = run_genome(&genome, &scenario, EpisodeOptions::recorded())?;
    let replay = result.replay.expect("recorded");
    let mut w = create(&a.out)?;
    replay
        .write_jsonl(&mut w)
        .map_err(|e| CliError::io(&a.out, e))?;
    drop(w);
    let k = analyze_kiting(&replay);
    println!(
        "{} frames, fitness {}, fires {}, fire-retreat rate {:.3}, mean nearest-melee distance {:.2}, contact fraction {:.3}",
        result.frames, result.fitness, k.fires, k.fire_retreat_rate, k.mean_nearest_distance, k.contact_fraction
    );
    let mut m = RunManifest::start("replay", raw_args, &a.out);
    m.config_path = a.config.clone();
    m.seed = Some(scenario.spawn_seed);
    finish_single(m, &a.out)
}

#[derive(Debug, Serialize)]
struct BaselineReport {
    policy: Policy,
    scenario: String,
    spawn_seed: u64,
    policy_seed: u64,
    fitness: f64,
    max_fitness: f64,
    remaining_ranged: usize,
    remaining_melee: usize,
    frames: u64,
}

pub fn cmd_baseline(a: BaselineArgs, raw_args: &[String]) -> Result<(), CliError> {
    let config = read_config(a.config.as_deref())?;
    let policy: Policy = a.policy.parse().map_err(CliError::config)?;
    let scenario = parse_scenario(&a.scenario, &config)?;
    let r = run_episode(
        &scenario,
        &mut policy.controller(a.seed),
        EpisodeOptions::default(),
    )?;
    let report = BaselineReport {
        policy,
        scenario: scenario.label(),
        spawn_seed: scenario.spawn_seed,
        policy_seed: a.seed,
        fitness: r.fitness,
        max_fitness: scenario.max_fitness(),
        remaining_ranged: r.remaining_ranged(),
        remaining_melee: r.remaining_melee(),
        frames: r.frames,
    };
    println!(
        "{}",
        serde_json::to_string(&report).expect("report serializes")
    );
    if let Some(out) = &a.out {
        write_json(out, &report)?;
        let mut m = RunManifest::start("baseline", raw_args, out);
        m.config_path = a.config.clone();
        m.seed = Some(a.seed);
        finish_single(m, out)?;
    }
    Ok(())
}

pub fn cmd_worker(a: WorkerArgs) -> Result<(), CliError> {
    let listener = TcpListener::bind(&a.listen)
        .map_err(|e| CliError::runtime(format!("binding {}: {e}", a.listen)))?;
    eprintln!(
        "listening on {}",
        listener.local_addr().map_err(CliError::runtime)?
    );
    serve(listener, a.max_connections).map_err(CliError::runtime)
}
