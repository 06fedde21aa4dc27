use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use graphon_hawkes::config::{RunConfig, SCHEMA_VERSION};
use graphon_hawkes::experiments::{
    convergence_sweep, profile_error_curve, run_figure, ExperimentPlan, FigureId, ReplicaSeeds, Setup,
};
use graphon_hawkes::graphon::{io as graph_io, Quadrature};
use graphon_hawkes::hawkes_sim::{simulate, simulate_coupled};
use graphon_hawkes::limit_solver::macroscopic_profile;
use graphon_hawkes::longtime::{analyse, longtime_baseline, stationary_limit, Criticality, DiscreteOperator, CRITICAL_BAND};
use graphon_hawkes::{par, Error, Result};

fn version_line() -> String {
    format!("{} (config schema {SCHEMA_VERSION})", env!("CARGO_PKG_VERSION"))
}

#[derive(Parser, Debug)]
#[command(name = "graphon-hawkes", version = version_line(), about = "Hawkes processes on graphon-sampled networks")]
struct Cli {
    /// Master seed; overrides `run.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, short, global = true)]
    quiet: bool,
    /// Validate and print the resolved plan without computing.
    #[arg(long, global = true)]
    dry_run: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ConfigArg {
    /// Run configuration (TOML).
    #[arg(long, short)]
    config: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample positions and an interaction graph.
    SampleGraph(ConfigArg),
    /// Simulate the network; `--coupled` also drives the limit process with the same noise.
    Simulate {
        #[command(flatten)]
        cfg: ConfigArg,
        #[arg(long)]
        coupled: bool,
    },
    /// Solve the limit intensity λ(t, x) and the input field u(t, x).
    SolveLimit(ConfigArg),
    /// Spectral report, stationary limit or growth rate.
    Longtime(ConfigArg),
    /// Coupling error against N.
    Sweep(ConfigArg),
    /// Spatial-profile error against N.
    ProfileError(ConfigArg),
    /// Run one of the four figure configurations.
    Figure {
        /// fig1, fig2, fig3 or fig4
        id: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        t_end: Option<f64>,
        /// Row stride of the field CSV.
        #[arg(long, default_value_t = 50)]
        field_stride: usize,
    },
    /// Check a configuration file and exit.
    ValidateConfig {
        path: PathBuf,
    },
}

struct Ctx {
    seed: Option<u64>,
    out: Option<PathBuf>,
    quiet: bool,
    dry_run: bool,
}

impl Ctx {
    fn say(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", msg.as_ref());
        }
    }

    fn load(&self, path: &Path) -> Result<RunConfig> {
        let mut cfg = RunConfig::load(path)?;
        if let Some(seed) = self.seed {
            cfg.run.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.output.dir = out.clone();
        }
        Ok(cfg)
    }

    /// Prints the plan; returns true when the caller should stop there.
    fn plan(&self, plan: &serde_json::Value, dir: &Path) -> Result<bool> {
        if self.dry_run {
            println!("{}", serde_json::to_string_pretty(plan).expect("json"));
            return Ok(true);
        }
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_json(&dir.join("plan.json"), plan)?;
        Ok(false)
    }
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("json");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn config_plan(cfg: &RunConfig, command: &str) -> serde_json::Value {
    let seeds = ReplicaSeeds::single(cfg.run.seed);
    json!({
        "command": command,
        "schema_version": SCHEMA_VERSION,
        "config": cfg,
        "graph_seed": seeds.graph,
        "spike_seed": seeds.spikes,
    })
}

fn run(cli: Cli) -> Result<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Error::InvalidArgument("--threads must be at least 1".into()));
        }
        par::init_threads(t);
    }
    let ctx = Ctx {
        seed: cli.seed,
        out: cli.out,
        quiet: cli.quiet,
        dry_run: cli.dry_run,
    };
    match cli.command {
        Command::ValidateConfig { path } => {
            let cfg = ctx.load(&path)?;
            ctx.say(format!(
                "{}: ok (schema {SCHEMA_VERSION}, N = {}, T = {})",
                path.display(),
                cfg.positions.n,
                cfg.run.t_end
            ));
            Ok(())
        }
        Command::SampleGraph(a) => {
            let cfg = ctx.load(&a.config)?;
            let dir = cfg.output.dir.clone();
            if ctx.plan(&config_plan(&cfg, "sample-graph"), &dir)? {
                return Ok(());
            }
            let setup = Setup::from_config(&cfg)?;
            let graph = setup.sample(cfg.positions.n, ReplicaSeeds::single(cfg.run.seed).graph)?;
            graph_io::save(&graph, &dir.join("graph.txt"))?;
            let summary = serde_json::to_value(graph.summary()).expect("json");
            write_json(&dir.join("graph_summary.json"), &summary)?;
            ctx.say(serde_json::to_string_pretty(&summary).expect("json"));
            Ok(())
        }
        Command::Simulate { cfg: a, coupled } => {
            let cfg = ctx.load(&a.config)?;
            let dir = cfg.output.dir.clone();
            let mut plan = config_plan(&cfg, "simulate");
            plan["coupled"] = json!(coupled);
            if ctx.plan(&plan, &dir)? {
                return Ok(());
            }
            let setup = Setup::from_config(&cfg)?;
            let seeds = ReplicaSeeds::single(cfg.run.seed);
            let graph = setup.sample(cfg.positions.n, seeds.graph)?;
            let t = cfg.run.t_end;
            let opts = cfg.sim_options();
            let record = if coupled {
                let field = setup.solve(t, &cfg.solver_options())?;
                simulate_coupled(&graph, &setup.model, &field, t, seeds.spikes, &opts)?
            } else {
                simulate(&graph, &setup.model, t, seeds.spikes, &opts)?
            };
            record.write_spikes_csv(&dir.join("spikes.csv"))?;
            record.write_summary_csv(&dir.join("summary.csv"))?;
            let mut stats = json!({
                "n": record.n(),
                "t_end": t,
                "events": record.total_events(),
                "stats": record.stats,
                "acceptance_rate": record.stats.acceptance_rate(),
            });
            if let Some((sup, delta)) = record.coupling_means() {
                stats["mean_sup_diff"] = json!(sup);
                stats["mean_delta"] = json!(delta);
            }
            write_json(&dir.join("simulation.json"), &stats)?;
            ctx.say(format!(
                "{} events from {} neurons on [0, {t}]",
                record.total_events(),
                record.n()
            ));
            Ok(())
        }
        Command::SolveLimit(a) => {
            let cfg = ctx.load(&a.config)?;
            let dir = cfg.output.dir.clone();
            if ctx.plan(&config_plan(&cfg, "solve-limit"), &dir)? {
                return Ok(());
            }
            let setup = Setup::from_config(&cfg)?;
            let field = setup.solve(cfg.run.t_end, &cfg.solver_options())?;
            let u = macroscopic_profile(&field, &setup.kernel, &setup.model)?;
            field.write_csv(&dir.join("lambda.csv"), "lambda", cfg.output.field_stride)?;
            u.write_csv(&dir.join("u.csv"), "u", cfg.output.field_stride)?;
            write_json(&dir.join("solve.json"), &field.metadata())?;
            ctx.say(format!(
                "solved on {} cells x {} steps; sup lambda = {:.6}",
                field.cells(),
                field.grid().steps,
                field.sup()
            ));
            Ok(())
        }
        Command::Longtime(a) => {
            let cfg = ctx.load(&a.config)?;
            let dir = cfg.output.dir.clone();
            if ctx.plan(&config_plan(&cfg, "longtime"), &dir)? {
                return Ok(());
            }
            let setup = Setup::from_config(&cfg)?;
            let quad = Quadrature::new(setup.model.measure.clone(), cfg.run.cells)?;
            let op = DiscreteOperator::new(&setup.kernel, &quad);
            let report = analyse(&op, &setup.model.kernel, cfg.run.tol, CRITICAL_BAND)?;
            let mut out = report.to_json();
            if report.class == Criticality::Subcritical {
                if let Ok(u) = longtime_baseline(&setup.model, &op) {
                    let lim = stationary_limit(&op, &report, &u, cfg.run.tol)?;
                    let mut csv = String::from("x,ell,ell_neumann\n");
                    for ((x, l), n) in op.nodes().iter().zip(&lim.ell).zip(&lim.neumann) {
                        csv.push_str(&format!("{x:?},{l:?},{n:?}\n"));
                    }
                    std::fs::write(dir.join("ell.csv"), csv).map_err(|e| Error::io(&dir, e))?;
                    out["ell_min"] = json!(lim.ell.iter().copied().fold(f64::INFINITY, f64::min));
                    out["ell_max"] = json!(lim.ell.iter().copied().fold(f64::NEG_INFINITY, f64::max));
                    out["neumann_agreement"] = json!(lim.agreement);
                }
            }
            write_json(&dir.join("longtime.json"), &out)?;
            ctx.say(serde_json::to_string_pretty(&out).expect("json"));
            Ok(())
        }
        Command::Sweep(a) => {
            let cfg = ctx.load(&a.config)?;
            let dir = cfg.output.dir.clone();
            let plan = ExperimentPlan::from_config(&cfg)?;
            if ctx.plan(&plan.to_json(), &dir)? {
                return Ok(());
            }
            let table = convergence_sweep(&plan)?;
            table.write_csv(&dir)?;
            write_json(&dir.join("convergence.json"), &table.summary_json())?;
            for r in &table.rows {
                ctx.say(format!(
                    "N = {:>6}  annealed {:.5} ± {:.5}  quenched {:.5} ± {:.5}",
                    r.n, r.annealed_mean, r.annealed_se, r.quenched_mean, r.quenched_se
                ));
            }
            ctx.say(format!(
                "slope {:.3} ± {:.3}, decreasing: {}",
                table.slope.slope, table.slope.slope_se, table.monotone
            ));
            Ok(())
        }
        Command::ProfileError(a) => {
            let cfg = ctx.load(&a.config)?;
            let dir = cfg.output.dir.clone();
            let plan = ExperimentPlan::from_config(&cfg)?;
            if ctx.plan(&plan.to_json(), &dir)? {
                return Ok(());
            }
            let table = profile_error_curve(&plan)?;
            table.write_csv(&dir)?;
            for r in &table.rows {
                ctx.say(format!("N = {:>6}  error {:.5} ± {:.5}", r.n, r.mean, r.se));
            }
            ctx.say(format!("decreasing: {}", table.decreasing));
            Ok(())
        }
        Command::Figure {
            id,
            n,
            t_end,
            field_stride,
        } => {
            let id = FigureId::parse(&id)?;
            let (n0, t0) = id.default_size();
            let (n, t) = (n.unwrap_or(n0), t_end.unwrap_or(t0));
            let seed = ctx.seed.unwrap_or(0);
            let dir = ctx.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            let seeds = ReplicaSeeds::single(seed);
            let plan = json!({
                "command": "figure",
                "figure": id.as_str(),
                "n": n,
                "t_end": t,
                "seed": seed,
                "graph_seed": seeds.graph,
                "spike_seed": seeds.spikes,
                "field_stride": field_stride,
            });
            if ctx.plan(&plan, &dir)? {
                return Ok(());
            }
            let bundle = run_figure(id, n, t, seed)?;
            bundle.write(&dir, field_stride.max(1))?;
            let mean = bundle.meta["mean_empirical_rate"].as_f64().unwrap_or(f64::NAN);
            ctx.say(format!(
                "{}: N = {n}, T = {t}, {} events, mean trailing-window rate {mean:.4}",
                id.as_str(),
                bundle.record.total_events()
            ));
            if let Some(check) = bundle.meta.get("ell_check") {
                ctx.say(format!("stationary limit check: {check}"));
            }
            Ok(())
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 2,
        e if e.is_numerical() => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if cli.quiet { "error" } else { "warn" }))
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
