//! `qabc` command line.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use qabc_core::doe::{main_effects, run_taguchi, Factor, TaguchiConfig};
use qabc_core::{
    evaluate, generate_scenario, is_feasible, run_qabc, GenerationParams, ObjectiveConfig, ObservationWeights,
    QabcParams, QueueMode, Scenario,
};

use crate::error::{Error, Result};
use crate::files::{effects_csv, read_scenario, rows_csv, write_scenario, write_text};
use crate::record::{convergence_csv, RunRecord};
use crate::verify::run_verify;

#[derive(Debug, Parser)]
#[command(
    name = "qabc",
    version,
    about = "Quantum-inspired bee colony task offloading for vehicular edge/cloud networks"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QueueModeArg {
    LoadAware,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// N_p = 40, I = 20, L = 15
    PaperBest,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Scenario file to read
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output directory
    #[arg(long, global = true, env = "QABC_OUT_DIR", default_value = ".")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = QueueModeArg::LoadAware)]
    pub queue_mode: QueueModeArg,
    /// Fixed edge queue time in constant mode (s)
    #[arg(long, global = true, default_value_t = 0.0)]
    pub q_edge: f64,
    /// Fixed cloud queue time in constant mode (s)
    #[arg(long, global = true, default_value_t = 0.0)]
    pub q_cloud: f64,
    /// Population size N_p
    #[arg(long, global = true)]
    pub np: Option<usize>,
    /// Iterations I
    #[arg(long, global = true)]
    pub iters: Option<usize>,
    /// Scout stagnation limit L
    #[arg(long, global = true)]
    pub limit: Option<u32>,
    /// Rotation half-width in radians
    #[arg(long, global = true)]
    pub phi: Option<f64>,
    #[arg(long, global = true)]
    pub eta0: Option<f64>,
    #[arg(long, global = true)]
    pub eta1: Option<f64>,
    #[arg(long, global = true)]
    pub eta2: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub preset: Option<Preset>,
    /// Seconds per unit of relative capacity excess
    #[arg(long, global = true)]
    pub lambda_cap: Option<f64>,
    /// Seconds per missed deadline
    #[arg(long, global = true)]
    pub lambda_deadline: Option<f64>,
    /// Comma-separated per-task objective weights
    #[arg(long, global = true, value_delimiter = ',')]
    pub task_weights: Vec<f64>,
    /// Worker threads; 0 uses every core, 1 runs sequentially
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Debug, Args, Default)]
pub struct GenArgs {
    #[arg(long)]
    pub vehicles: Option<usize>,
    #[arg(long)]
    pub rsus: Option<usize>,
    #[arg(long)]
    pub tasks_per_vehicle: Option<usize>,
    /// Highway length in meters (default 400 m per RSU)
    #[arg(long)]
    pub highway_m: Option<f64>,
    /// RSU coverage radius in meters
    #[arg(long)]
    pub range_m: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random scenario file
    Generate {
        #[arg(long)]
        vehicles: usize,
        #[arg(long)]
        rsus: usize,
        #[arg(long)]
        tasks_per_vehicle: usize,
        #[arg(long)]
        highway_m: Option<f64>,
        #[arg(long)]
        range_m: Option<f64>,
        /// File name inside the output directory
        #[arg(long, default_value = "scenario.json")]
        file: String,
    },
    /// Run the colony and write run.json and convergence.csv
    Optimize {
        #[command(flatten)]
        gen: GenArgs,
    },
    /// Compare seeded colony runs with exhaustive enumeration
    Verify {
        #[command(flatten)]
        gen: GenArgs,
        /// Number of seeded colony runs
        #[arg(long, default_value_t = 50)]
        runs: usize,
    },
    /// Run the L9 tuning experiment and write rows.csv and effects.csv
    Taguchi {
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long, default_value_t = 5)]
        replicates: usize,
    },
}

fn generation_params(
    vehicles: usize,
    rsus: usize,
    tasks_per_vehicle: usize,
    highway_m: Option<f64>,
    range_m: Option<f64>,
) -> GenerationParams {
    let mut p = GenerationParams::with_counts(vehicles, rsus, tasks_per_vehicle);
    if let Some(h) = highway_m {
        p.highway_m = h;
    }
    if let Some(r) = range_m {
        p.rsu_range_m = r;
    }
    p
}

fn usage_error(msg: &str) -> ExitCode {
    let err = Cli::command().error(clap::error::ErrorKind::ArgumentConflict, msg);
    let _ = err.print();
    ExitCode::from(2)
}

impl GlobalArgs {
    pub fn qabc_params(&self) -> QabcParams {
        let mut p = match self.preset {
            Some(Preset::PaperBest) => QabcParams::paper_best(self.seed),
            None => QabcParams { seed: self.seed, ..QabcParams::default() },
        };
        if let Some(v) = self.np {
            p.n_pop = v;
        }
        if let Some(v) = self.iters {
            p.n_iter = v;
        }
        if let Some(v) = self.limit {
            p.scout_limit = v;
        }
        if let Some(v) = self.phi {
            p.phi = v;
        }
        let d = ObservationWeights::default();
        p.weights = ObservationWeights {
            eta0: self.eta0.unwrap_or(d.eta0),
            eta1: self.eta1.unwrap_or(d.eta1),
            eta2: self.eta2.unwrap_or(d.eta2),
        };
        p.parallel = self.threads != 1;
        p
    }

    pub fn objective(&self) -> ObjectiveConfig {
        let d = ObjectiveConfig::default();
        ObjectiveConfig {
            queue_mode: match self.queue_mode {
                QueueModeArg::LoadAware => QueueMode::LoadAware,
                QueueModeArg::Constant => QueueMode::Constant { q_edge_s: self.q_edge, q_cloud_s: self.q_cloud },
            },
            lambda_cap: self.lambda_cap.unwrap_or(d.lambda_cap),
            lambda_deadline: self.lambda_deadline.unwrap_or(d.lambda_deadline),
            task_weights: self.task_weights.clone(),
        }
    }
}

/// Resolves the single scenario source: a file or generation flags.
fn scenario_source(global: &GlobalArgs, gen: &GenArgs) -> std::result::Result<ScenarioSource, String> {
    let any_gen = gen.vehicles.is_some()
        || gen.rsus.is_some()
        || gen.tasks_per_vehicle.is_some()
        || gen.highway_m.is_some()
        || gen.range_m.is_some();
    match (&global.scenario, any_gen) {
        (Some(_), true) => Err("--scenario cannot be combined with generation flags".into()),
        (Some(path), false) => Ok(ScenarioSource::File(path.clone())),
        (None, true) => match (gen.vehicles, gen.rsus, gen.tasks_per_vehicle) {
            (Some(v), Some(r), Some(t)) => Ok(ScenarioSource::Generate(
                Box::new(generation_params(v, r, t, gen.highway_m, gen.range_m)),
                global.seed,
            )),
            _ => Err("generation needs --vehicles, --rsus and --tasks-per-vehicle".into()),
        },
        (None, false) => Err("a scenario is required: pass --scenario FILE or generation flags".into()),
    }
}

enum ScenarioSource {
    File(PathBuf),
    Generate(Box<GenerationParams>, u64),
}

impl ScenarioSource {
    fn load(&self) -> Result<Scenario> {
        match self {
            ScenarioSource::File(p) => read_scenario(p),
            ScenarioSource::Generate(params, seed) => Ok(generate_scenario(params, *seed)?),
        }
    }
}

fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if threads == 1 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Format(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn fmt_decision(d: &qabc_core::DecisionVector) -> String {
    d.tiers().iter().map(|t| (*t as u8).to_string()).collect::<Vec<_>>().join("")
}

fn cmd_generate(global: &GlobalArgs, params: &GenerationParams, file: &str) -> Result<()> {
    let scenario = generate_scenario(params, global.seed)?;
    let path = global.out.join(file);
    write_scenario(&path, &scenario)?;
    println!(
        "{}: {} vehicles, {} RSUs, {} tasks",
        path.display(),
        scenario.vehicles().len(),
        scenario.rsus().len(),
        scenario.task_count()
    );
    Ok(())
}

fn cmd_optimize(global: &GlobalArgs, scenario: &Scenario) -> Result<()> {
    let params = global.qabc_params();
    let objective = global.objective();
    let result = with_pool(global.threads, || run_qabc(scenario, &objective, &params))??;
    let report = evaluate(scenario, &result.best_decision, &objective)?;
    let record = RunRecord::new(&params, &objective, &result, &report);

    write_text(&global.out.join("run.json"), &record.to_json())?;
    write_text(&global.out.join("convergence.csv"), &convergence_csv(&result.convergence)?)?;

    println!("best fitness: {} s", result.best_fitness_s);
    println!("total latency: {} s", report.total_latency_s);
    println!("plan: {}", fmt_decision(&result.best_decision));
    if !is_feasible(&report) {
        println!("warning: best plan is infeasible (capacity exceeded or tier unreachable)");
    }
    println!("evaluations: {}", result.evaluations);
    Ok(())
}

fn cmd_verify(global: &GlobalArgs, scenario: &Scenario, runs: usize) -> Result<()> {
    let params = global.qabc_params();
    let objective = global.objective();
    let report = with_pool(global.threads, || run_verify(scenario, &objective, &params, runs, params.parallel))??;
    write_text(&global.out.join("verify.json"), &report.to_json())?;

    println!("oracle optimum: {} s ({} plans)", report.oracle_fitness_s, report.oracle_evaluations);
    println!("oracle plan: {}", fmt_decision(&report.oracle_decision));
    println!("hit rate: {}/{} = {}", report.hits, report.runs, report.hit_rate);
    println!("gap: mean {} max {}", report.mean_gap, report.max_gap);
    for b in &report.baselines {
        println!("baseline {:?}: {} s", b.kind, b.fitness_s);
    }
    if report.below_oracle > 0 {
        return Err(Error::Format(format!("{} runs reported fitness below the oracle optimum", report.below_oracle)));
    }
    Ok(())
}

fn cmd_taguchi(global: &GlobalArgs, scenario: &Scenario, replicates: usize) -> Result<()> {
    let base = global.qabc_params();
    let objective = global.objective();
    // rows/replicates are the parallel unit; each run stays sequential
    let config = TaguchiConfig {
        replicates,
        base_seed: global.seed,
        parallel: base.parallel,
        base: QabcParams { parallel: false, ..base },
    };
    let report = with_pool(global.threads, || run_taguchi(scenario, &objective, &config))??;
    write_text(&global.out.join("rows.csv"), &rows_csv(&report)?)?;
    write_text(&global.out.join("effects.csv"), &effects_csv(&report)?)?;

    for f in Factor::ALL {
        let best = report.best_level(f);
        println!("best {}: {} (S/N {} dB)", f.name(), best.value, best.snr_db);
    }
    for e in main_effects(&report) {
        println!("rank {}: {} delta {} dB", e.rank, e.factor.name(), e.delta_db);
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> std::result::Result<Result<()>, ExitCode> {
    let g = &cli.global;
    let load = |gen: &GenArgs| scenario_source(g, gen).map_err(|m| usage_error(&m));
    Ok(match &cli.command {
        Command::Generate { vehicles, rsus, tasks_per_vehicle, highway_m, range_m, file } => {
            if g.scenario.is_some() {
                return Err(usage_error("generate does not read --scenario"));
            }
            let params = generation_params(*vehicles, *rsus, *tasks_per_vehicle, *highway_m, *range_m);
            cmd_generate(g, &params, file)
        }
        Command::Optimize { gen } => load(gen)?.load().and_then(|s| cmd_optimize(g, &s)),
        Command::Verify { gen, runs } => load(gen)?.load().and_then(|s| cmd_verify(g, &s, *runs)),
        Command::Taguchi { gen, replicates } => load(gen)?.load().and_then(|s| cmd_taguchi(g, &s, *replicates)),
    })
}

/// Runs a parsed command line and maps the outcome to an exit code.
pub fn run(cli: Cli) -> ExitCode {
    match dispatch(&cli) {
        Err(code) => code,
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
