//! Command-line front end: `simulate`, `compare`, `sweep`, `warmstart`,
//! and the offline `cluster` command over exported demand databases.
//!
//! Flags override config keys; config keys override built-in defaults.
//! Exit codes: 0 success, 2 config error, 3 degenerate scenario, 4 I/O.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ofdma_sched::baselines::SchedulerKind;
use ofdma_sched::error::{Error, Result};
use ofdma_sched::ml::{kmeans_fit, DemandDatabase, DEFAULT_KMEANS_MAX_ITERS};
use ofdma_sched::sim::{
    compare_schedulers, format_real6, render_compare_summary, render_sweep_summary,
    render_warmstart_summary, run_scenario, warmstart_study, weight_sweep, ScenarioConfig,
};

#[derive(Parser)]
#[command(
    name = "ofdma-sched",
    version,
    about = "OFDMA downlink scheduling simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Config keys that every scenario subcommand may override from the
/// command line.
#[derive(Args, Clone)]
struct Overrides {
    /// Number of UEs (M).
    #[arg(long)]
    ues: Option<usize>,
    /// Number of resource blocks (N).
    #[arg(long)]
    rbs: Option<usize>,
    /// Number of TTIs to simulate.
    #[arg(long)]
    ttis: Option<usize>,
    /// Replace the config's seed list with a single master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Scheduler: ga_adaptive, max_tp, pf.
    #[arg(long)]
    scheduler: Option<String>,
    /// Fraction of GBR UEs in [0, 1].
    #[arg(long)]
    gbr_fraction: Option<f64>,
    /// UE speed in km/h.
    #[arg(long)]
    speed: Option<f64>,
    /// CSV output path.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Summary output path.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Demand database export path.
    #[arg(long)]
    demand_db: Option<PathBuf>,
}

impl Overrides {
    fn apply(&self, cfg: &mut ScenarioConfig) -> Result<()> {
        if let Some(ues) = self.ues {
            cfg.ues = ues;
        }
        if let Some(rbs) = self.rbs {
            cfg.rbs = Some(rbs);
        }
        if let Some(ttis) = self.ttis {
            cfg.ttis = ttis;
        }
        if let Some(seed) = self.seed {
            cfg.seeds = vec![seed];
        }
        if let Some(s) = &self.scheduler {
            cfg.scheduler = SchedulerKind::parse(s)?;
        }
        if let Some(f) = self.gbr_fraction {
            cfg.gbr_fraction = f;
        }
        if let Some(v) = self.speed {
            cfg.speed_kmh = v;
        }
        if self.csv.is_some() {
            cfg.output.csv = self.csv.clone();
        }
        if self.summary.is_some() {
            cfg.output.summary = self.summary.clone();
        }
        if self.demand_db.is_some() {
            cfg.output.demand_db = self.demand_db.clone();
        }
        cfg.validate()
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write the per-TTI CSV plus summary.
    Simulate {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run several schedulers on identical traces and compare them.
    Compare {
        config: PathBuf,
        /// Comma-separated scheduler list.
        #[arg(long, default_value = "ga_adaptive,max_tp,pf")]
        schedulers: String,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Sweep fixed w1 values and report fairness/satisfaction per point.
    Sweep {
        config: PathBuf,
        /// Comma-separated w1 grid, each in [0, 1].
        #[arg(long = "w1-grid", default_value = "0,0.25,0.5,0.75,1")]
        w1_grid: String,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Measure GA generations-to-threshold with and without warm starts.
    Warmstart {
        config: PathBuf,
        #[arg(long, default_value_t = 20)]
        repeats: usize,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Cluster an exported demand database offline.
    Cluster {
        /// Demand database file (one demand vector per line).
        demand_db: PathBuf,
        #[arg(short, long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn load_config(path: &PathBuf, overrides: &Overrides) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::load(path)?;
    overrides.apply(&mut cfg)?;
    Ok(cfg)
}

fn parse_w1_grid(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::Config(format!("bad w1 value '{s}'")))
        })
        .collect()
}

fn parse_schedulers(text: &str) -> Result<Vec<SchedulerKind>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(SchedulerKind::parse)
        .collect()
}

fn write_summary_if_configured(cfg: &ScenarioConfig, text: &str) -> Result<()> {
    if let Some(path) = &cfg.output.summary {
        std::fs::write(path, text)?;
    }
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map(format_real6).unwrap_or_else(|| "n/a".into())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { config, overrides } => {
            let cfg = load_config(&config, &overrides)?;
            let artifact = run_scenario(&cfg)?;
            let s = &artifact.run.summary;
            println!(
                "simulated {} TTIs with {} (seed {})",
                cfg.ttis,
                s.scheduler.name(),
                s.seed
            );
            println!(
                "peak={} average={} edge={} jain={} satisfaction={}",
                format_real6(s.peak),
                format_real6(s.average),
                format_real6(s.edge),
                opt(s.jain),
                opt(s.satisfaction),
            );
            if cfg.output.csv.is_none() {
                // No CSV path configured: emit the records on stdout.
                print!("{}", artifact.csv);
            }
        }
        Command::Compare {
            config,
            schedulers,
            overrides,
        } => {
            let cfg = load_config(&config, &overrides)?;
            let list = parse_schedulers(&schedulers)?;
            let rows = compare_schedulers(&cfg, &list)?;
            println!("scheduler\tpeak\taverage\tedge\tjain\tsatisfaction");
            for r in &rows {
                println!(
                    "{}\t{}\t{}\t{}\t{}\t{}",
                    r.scheduler.name(),
                    format_real6(r.peak),
                    format_real6(r.average),
                    format_real6(r.edge),
                    opt(r.jain),
                    opt(r.satisfaction),
                );
            }
            write_summary_if_configured(
                &cfg,
                &render_compare_summary(&cfg.echo(), &cfg.seeds, &rows),
            )?;
        }
        Command::Sweep {
            config,
            w1_grid,
            overrides,
        } => {
            let cfg = load_config(&config, &overrides)?;
            let grid = parse_w1_grid(&w1_grid)?;
            let rows = weight_sweep(&cfg, &grid)?;
            println!("w1\tjain\tsatisfaction\taverage_throughput");
            for r in &rows {
                println!(
                    "{}\t{}\t{}\t{}",
                    format_real6(r.w1),
                    opt(r.jain),
                    opt(r.satisfaction),
                    format_real6(r.average_throughput),
                );
            }
            write_summary_if_configured(
                &cfg,
                &render_sweep_summary(&cfg.echo(), &cfg.seeds, &rows),
            )?;
        }
        Command::Warmstart {
            config,
            repeats,
            overrides,
        } => {
            let cfg = load_config(&config, &overrides)?;
            let report = warmstart_study(&cfg, repeats)?;
            println!(
                "samples={} median_warm={} median_cold={}",
                report.samples.len(),
                opt(report.median_warm),
                opt(report.median_cold),
            );
            write_summary_if_configured(
                &cfg,
                &render_warmstart_summary(&cfg.echo(), &cfg.seeds, &report),
            )?;
        }
        Command::Cluster { demand_db, k, seed } => {
            let db = DemandDatabase::import(&demand_db, usize::MAX >> 1)?;
            let model = kmeans_fit(&db, k, seed, DEFAULT_KMEANS_MAX_ITERS)?;
            println!(
                "rows={} k={} inertia={}",
                db.len(),
                k,
                format_real6(model.inertia())
            );
            let mut sizes = vec![0usize; k];
            for &a in model.assignments() {
                sizes[a] += 1;
            }
            for (c, centroid) in model.centroids().iter().enumerate() {
                let rendered: Vec<String> = centroid.iter().map(|&v| format_real6(v)).collect();
                println!(
                    "cluster {c}: size={} centroid=[{}]",
                    sizes[c],
                    rendered.join(", ")
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
