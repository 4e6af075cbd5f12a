use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use nanomass::cavity::{build_drift_matrix, intracavity_power, solve_steady_state, stability_check};
use nanomass::noise::BandIntegralMethod;
use nanomass::sweep::run::point_parameters;
use nanomass::sweep::{
    emit, evaluate_point, parse_config, run_sweep, to_csv, to_json, OutputFormat, SensorConfig, SensorKind,
    SweepConfig,
};

const EXIT_CONFIG: u8 = 2;
const EXIT_PHYSICS: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(name = "nanomass", version, about = "Quantum limits to nanomechanical mass sensing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the free cantilever sensor and write a data file.
    FreeSweep(SweepArgs),
    /// Sweep the cavity sensor and write a data file.
    CavitySweep(SweepArgs),
    /// Evaluate a single grid value and print the rows.
    Point(PointArgs),
    /// Classify the linearised cavity dynamics at one grid value.
    Stability(PointArgs),
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `output_path`.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Overrides `output_format` (csv or json).
    #[arg(long)]
    format: Option<OutputFormat>,
    /// Overrides `method` (quadrature, lorentzian or narrowband).
    #[arg(long)]
    method: Option<BandIntegralMethod>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct PointArgs {
    #[arg(long)]
    config: PathBuf,
    /// Sweep-axis value to evaluate (default: first grid value).
    #[arg(long)]
    value: Option<f64>,
    #[arg(long)]
    format: Option<OutputFormat>,
    #[arg(long)]
    method: Option<BandIntegralMethod>,
}

enum Failure {
    Config(String),
    Physics(String),
    Io(String),
}

impl Failure {
    fn report(self) -> ExitCode {
        let (code, msg) = match self {
            Failure::Config(m) => (EXIT_CONFIG, m),
            Failure::Physics(m) => (EXIT_PHYSICS, m),
            Failure::Io(m) => (EXIT_IO, m),
        };
        eprintln!("error: {msg}");
        ExitCode::from(code)
    }
}

fn load(path: &PathBuf, method: Option<BandIntegralMethod>) -> Result<SweepConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = parse_config(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    if let Some(m) = method {
        cfg.method = m;
    }
    Ok(cfg)
}

fn sweep(args: SweepArgs, expected: SensorKind) -> Result<(), Failure> {
    let mut cfg = load(&args.config, args.method)?;
    if cfg.sensor.kind() != expected {
        return Err(Failure::Config(format!(
            "config describes the {:?} sensor; use the matching subcommand",
            cfg.sensor.kind()
        )
        .to_lowercase()));
    }
    if let Some(o) = args.output {
        cfg.output_path = o;
    }
    if let Some(f) = args.format {
        cfg.output_format = f;
    }
    if args.jobs == Some(0) {
        return Err(Failure::Config("--jobs must be at least 1".into()));
    }
    let rows = run_sweep(&cfg, args.jobs).map_err(|e| Failure::Io(e.to_string()))?;
    emit(&rows, &cfg, &cfg.output_path, cfg.output_format)
        .map_err(|e| Failure::Io(format!("cannot write {}: {e}", cfg.output_path.display())))?;
    let failed = rows.iter().filter(|r| !r.is_ok()).count();
    eprintln!(
        "wrote {} rows to {} ({failed} failed)",
        rows.len(),
        cfg.output_path.display()
    );
    if failed == rows.len() {
        return Err(Failure::Physics("no grid point produced a result".into()));
    }
    Ok(())
}

fn point(args: PointArgs) -> Result<(), Failure> {
    let cfg = load(&args.config, args.method)?;
    let value = args.value.unwrap_or(cfg.grid[0]);
    let rows = evaluate_point(&cfg, value);
    let out = match args.format.unwrap_or(cfg.output_format) {
        OutputFormat::Csv => to_csv(&rows),
        OutputFormat::Json => to_json(&rows),
    };
    print!("{out}");
    if rows.iter().all(|r| !r.is_ok()) {
        return Err(Failure::Physics(rows[0].message.clone()));
    }
    Ok(())
}

fn stability(args: PointArgs) -> Result<(), Failure> {
    let cfg = load(&args.config, None)?;
    let value = args.value.unwrap_or(cfg.grid[0]);
    let (sensor, _) = point_parameters(&cfg, value).map_err(|e| Failure::Config(e.to_string()))?;
    let p = match sensor {
        SensorConfig::Cavity(p) => p,
        SensorConfig::Free(_) => {
            return Err(Failure::Config("stability applies to the cavity sensor".into()))
        }
    };
    let ss = solve_steady_state(&p).map_err(|e| Failure::Physics(e.to_string()))?;
    let drift = build_drift_matrix(&p, &ss);
    let report = stability_check(&drift).map_err(|e| Failure::Physics(e.to_string()))?;
    let out = json!({
        "axis": cfg.sweep_axis.as_str(),
        "axis_value": value,
        "stable": report.stable,
        "failed_condition": report.failed.map(|c| c.to_string()),
        "steady_state": ss,
        "intracavity_power_w": intracavity_power(&p, &ss),
        "drift_matrix": drift.a,
        "coupling": drift.coupling,
        "time_scale": report.scale,
        "scaled_characteristic_polynomial": report.scaled_polynomial.coefficients(),
        "hurwitz_second_determinant": report.second_determinant,
        "hurwitz_third_determinant": report.third_determinant,
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("report serialises"));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::FreeSweep(a) => sweep(a, SensorKind::Free),
        Command::CavitySweep(a) => sweep(a, SensorKind::Cavity),
        Command::Point(a) => point(a),
        Command::Stability(a) => stability(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}
