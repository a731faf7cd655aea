use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use harvest_cli::{diagnose, execute, exit_status, output, presets, ConfigError, Overrides, RunConfig};

/// Correlation harvesting sweeps for detectors near a (1+1)-D black hole.
/// Without a subcommand, `run` is assumed.
#[derive(Parser, Debug)]
#[command(name = "harvest", version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    point: PointArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a sweep (or a single point) and write one row per value.
    Run(PointArgs),
    /// Evaluate one point and print the quadrature ladder of every element.
    Diagnose(PointArgs),
    /// List the built-in presets.
    Presets,
}

#[derive(Args, Debug, Default)]
struct PointArgs {
    /// JSON file with the same keys as the flags (`mass_over_sigma`, ...).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    /// ss, fs, ff or flatboost.
    #[arg(long)]
    scenario: Option<String>,
    /// boulware, unruh, hh or minkowski.
    #[arg(long)]
    vacuum: Option<String>,
    /// M/σ.
    #[arg(long)]
    mass: Option<f64>,
    /// Ωσ.
    #[arg(long)]
    gap: Option<f64>,
    /// d_AB/σ.
    #[arg(long)]
    dab: Option<f64>,
    /// Alice's position: d(r_A, r_s)/σ, or d(r_A, 0)/σ with --placement from_center.
    #[arg(long, allow_negative_numbers = true)]
    dist: Option<f64>,
    #[arg(long)]
    placement: Option<String>,
    /// δ/σ, the delay of Bob's peak (FS).
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    /// FlatBoost speed override.
    #[arg(long)]
    speed: Option<f64>,
    /// λ̃ used for the mutual information.
    #[arg(long)]
    lambda: Option<f64>,
    /// dist, delta, mass, gap, dab or speed.
    #[arg(long)]
    axis: Option<String>,
    /// lo:hi:lin|log:n
    #[arg(long, allow_hyphen_values = true)]
    range: Option<String>,
    /// Explicit comma-separated sweep values.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    values: Option<Vec<f64>>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or jsonl.
    #[arg(long)]
    format: Option<String>,
    /// Relative ladder tolerance.
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Number of ladder refinements allowed after the first rung.
    #[arg(long)]
    max_refinements: Option<usize>,
    /// Start the ladder this many rungs further down.
    #[arg(long)]
    escalate: Option<usize>,
}

impl PointArgs {
    fn resolve(self) -> Result<RunConfig, ConfigError> {
        let file = match &self.config {
            Some(path) => Overrides::from_file(path)?,
            None => Overrides::default(),
        };
        let flags = Overrides {
            preset: self.preset,
            scenario: self.scenario,
            vacuum: self.vacuum,
            mass_over_sigma: self.mass,
            gap_over_sigma: self.gap,
            dab_over_sigma: self.dab,
            dist_over_sigma: self.dist,
            placement: self.placement,
            delta_over_sigma: self.delta,
            speed: self.speed,
            lambda: self.lambda,
            axis: self.axis,
            range: self.range,
            values: self.values,
            out: self.out,
            format: self.format,
            quadrature: None,
        };
        let mut run = RunConfig::resolve(file.layered(flags))?;
        let q = &mut run.scenario.quadrature;
        if let Some(t) = self.rel_tol {
            q.rel_tol = t;
        }
        if let Some(n) = self.max_refinements {
            q.max_refinements = n;
        }
        if let Some(n) = self.escalate {
            *q = q.escalated(n);
        }
        q.validate().map_err(|e| ConfigError(e.to_string()))?;
        Ok(run)
    }
}

fn init_threads() -> Result<(), ConfigError> {
    let Ok(raw) = std::env::var("HH_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| ConfigError(format!("HH_THREADS='{raw}' is not a thread count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| ConfigError(e.to_string()))
}

fn run(args: PointArgs) -> Result<i32, ConfigError> {
    let cfg = args.resolve()?;
    let rows = execute(&cfg);
    for r in rows.iter().filter_map(|r| r.error.as_ref().map(|e| (r.axis_value, e))) {
        eprintln!("point {}: {}", r.0, r.1);
    }
    let text = output::render(&rows, cfg.format);
    match &cfg.out {
        Some(path) => output::write_atomic(path, &text)
            .map_err(|e| ConfigError(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(exit_status(&rows))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| match cli.command {
        None => run(cli.point),
        Some(Command::Run(a)) => run(a),
        Some(Command::Diagnose(a)) => a.resolve().map(|cfg| {
            let (text, ok) = diagnose(&cfg);
            print!("{text}");
            if ok {
                0
            } else {
                2
            }
        }),
        Some(Command::Presets) => {
            for p in presets::all() {
                println!("{:<6} {}", p.name, p.about);
            }
            Ok(0)
        }
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
