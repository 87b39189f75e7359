use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use oscbath::simulate::{run_fidelity, run_simulation, run_sweep, Preset, SimulationConfig, SweepSpec};
use serde_json::json;

mod config;
mod output;

use config::{ConfigError, ConfigFile};
use output::{fmt12, series, write_csv};

#[derive(Parser)]
#[command(name = "oscbath", version, about = "Entanglement dynamics of a squeezed probe in a harmonic bath")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Desk,
    Paper,
}

#[derive(clap::Args)]
struct Common {
    /// JSON config document
    config: PathBuf,
    /// Overrides `output_dir` from the config
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Resolution preset applied on top of the config
    #[arg(long, value_enum)]
    preset: Option<PresetArg>,
}

#[derive(Subcommand)]
enum Command {
    /// Entanglement trace, NMBQ, and any diagnostics enabled in `outputs`
    Simulate(Common),
    /// NMBQ over a list or range of α values
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "alpha")]
        param: String,
        /// `a,b,c` or `start:stop:step`
        #[arg(long)]
        values: String,
        /// Concurrent cells (defaults to the number of cores)
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Energy absorbed by each environment mode over time
    Occupancy(Common),
    /// Fidelity between two single-mode squeezed probes
    Fidelity {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        r1: Option<f64>,
        #[arg(long)]
        r2: Option<f64>,
    },
}

/// Failure classes, mapped to exit codes.
enum Failure {
    Config(anyhow::Error),
    Numerical(anyhow::Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.into())
    }
}

fn numerical<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Numerical(e.into())
}

struct Resolved {
    cfg: SimulationConfig,
    out: PathBuf,
}

fn resolve(common: &Common, tweak: impl FnOnce(&mut SimulationConfig)) -> Result<Resolved, Failure> {
    let ConfigFile { output_dir, simulation: mut cfg, .. } = config::load(&common.config)?;
    match common.preset {
        Some(PresetArg::Desk) => cfg.apply_preset(Preset::Desk),
        Some(PresetArg::Paper) => cfg.apply_preset(Preset::Paper),
        None => {}
    }
    tweak(&mut cfg);
    cfg.validate().map_err(|e| Failure::Config(anyhow::anyhow!("invalid configuration: {e}")))?;
    let out = common.output_dir.clone().unwrap_or(output_dir);
    std::fs::create_dir_all(&out)
        .with_context(|| format!("creating output directory {}", out.display()))
        .map_err(Failure::Config)?;
    Ok(Resolved { cfg, out })
}

fn write_manifest(out: &Path, command: &str, cfg: &SimulationConfig, extra: serde_json::Value) -> Result<()> {
    let manifest = json!({
        "software": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": cfg,
        "results": extra,
    });
    let path = out.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")
        .with_context(|| format!("writing {}", path.display()))
}

fn simulate(common: &Common) -> Result<(), Failure> {
    let Resolved { cfg, out } = resolve(common, |_| {})?;
    let result = run_simulation(&cfg).map_err(numerical)?;
    let times = result.grid.times();
    let mut files = Vec::new();
    if cfg.outputs.entanglement {
        write_csv(&out.join("entanglement.csv"), &["t", "E"], series(&times, result.entanglement.values()))
            .map_err(numerical)?;
        files.push("entanglement.csv");
    }
    if let Some(energy) = &result.energy {
        write_csv(&out.join("energy.csv"), &["t", "E_sys"], series(&times, energy)).map_err(numerical)?;
        files.push("energy.csv");
    }
    if let Some(occ) = &result.occupancy {
        write_occupancy(&out, occ).map_err(numerical)?;
        files.push("occupancy.csv");
    }
    let mut fidelity_nm = None;
    if let Some(fid) = &result.fidelity {
        write_fidelity(&out, &times, fid).map_err(numerical)?;
        files.extend(["fidelity.csv", "energy_probe1.csv", "energy_probe2.csv"]);
        fidelity_nm = Some(fid.quantifier);
    }
    let results = json!({
        "nmbq": result.nmbq,
        "min_symplectic_eigenvalue": result.min_symplectic_eigenvalue,
        "fidelity_nm": fidelity_nm,
        "files": files,
    });
    write_manifest(&out, "simulate", &cfg, results).map_err(numerical)?;
    if cfg.outputs.nmbq {
        println!("nmbq = {}", fmt12(result.nmbq));
    }
    Ok(())
}

fn write_occupancy(out: &Path, occ: &oscbath::OccupancyGrid) -> Result<()> {
    let rows = occ
        .times
        .iter()
        .zip(&occ.values)
        .flat_map(|(t, row)| occ.omegas.iter().zip(row).map(move |(w, v)| vec![fmt12(*t), fmt12(*w), fmt12(*v)]));
    write_csv(&out.join("occupancy.csv"), &["t", "omega", "occupancy"], rows)
}

fn write_fidelity(out: &Path, times: &[f64], fid: &oscbath::simulate::FidelityOutcome) -> Result<()> {
    write_csv(&out.join("fidelity.csv"), &["t", "F"], series(times, fid.trace.values()))?;
    write_csv(&out.join("energy_probe1.csv"), &["t", "E_sys"], series(times, &fid.energy_1))?;
    write_csv(&out.join("energy_probe2.csv"), &["t", "E_sys"], series(times, &fid.energy_2))
}

fn sweep(common: &Common, param: &str, values: &str, workers: Option<usize>) -> Result<(), Failure> {
    if param != "alpha" {
        return Err(Failure::Config(anyhow::anyhow!(
            "unsupported sweep parameter {param:?}; only `alpha` is available"
        )));
    }
    let values = config::parse_values(values).map_err(|e| Failure::Config(anyhow::anyhow!("--values: {e}")))?;
    let Resolved { cfg, out } = resolve(common, |_| {})?;
    let spec = SweepSpec::alpha(cfg.clone(), values);
    let rows = run_sweep(&spec, workers).map_err(|e| Failure::Config(e.into()))?;
    let csv_rows = rows.iter().map(|r| vec![fmt12(r.value), r.nmbq.as_ref().map_or("nan".into(), |v| fmt12(*v))]);
    write_csv(&out.join("sweep.csv"), &["alpha", "nmbq"], csv_rows).map_err(numerical)?;
    let failures: Vec<_> = rows
        .iter()
        .filter_map(|r| r.nmbq.as_ref().err().map(|e| json!({"alpha": r.value, "error": e.to_string()})))
        .collect();
    write_manifest(&out, "sweep", &cfg, json!({"values": spec.values, "failures": failures, "files": ["sweep.csv"]}))
        .map_err(numerical)?;
    for r in &rows {
        match &r.nmbq {
            Ok(v) => println!("alpha = {}  nmbq = {}", fmt12(r.value), fmt12(*v)),
            Err(e) => eprintln!("alpha = {}  failed: {e}", fmt12(r.value)),
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(numerical(anyhow::anyhow!("{} of {} sweep cells failed", failures.len(), rows.len())))
    }
}

fn occupancy(common: &Common) -> Result<(), Failure> {
    let Resolved { cfg, out } = resolve(common, |c| {
        c.outputs.occupancy = true;
        c.outputs.fidelity = false;
    })?;
    let result = run_simulation(&cfg).map_err(numerical)?;
    let occ = result.occupancy.as_ref().expect("occupancy requested");
    write_occupancy(&out, occ).map_err(numerical)?;
    write_manifest(&out, "occupancy", &cfg, json!({"files": ["occupancy.csv"]})).map_err(numerical)
}

fn fidelity(common: &Common, r1: Option<f64>, r2: Option<f64>) -> Result<(), Failure> {
    let Resolved { cfg, out } = resolve(common, |c| {
        if let Some(r) = r1 {
            c.fidelity.r1 = r;
        }
        if let Some(r) = r2 {
            c.fidelity.r2 = r;
        }
    })?;
    let fid = run_fidelity(&cfg).map_err(numerical)?;
    let times = fid.trace.grid().times();
    write_fidelity(&out, &times, &fid).map_err(numerical)?;
    let files = ["fidelity.csv", "energy_probe1.csv", "energy_probe2.csv"];
    write_manifest(&out, "fidelity", &cfg, json!({"fidelity_nm": fid.quantifier, "files": files}))
        .map_err(numerical)?;
    println!("fidelity_nm = {}", fmt12(fid.quantifier));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Simulate(c) => simulate(c),
        Command::Sweep { common, param, values, workers } => sweep(common, param, values, *workers),
        Command::Occupancy(c) => occupancy(c),
        Command::Fidelity { common, r1, r2 } => fidelity(common, *r1, *r2),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
