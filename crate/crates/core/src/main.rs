use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use seiscontrol::bundle::{write_bundle, write_ensemble};
use seiscontrol::catalog::{estimate_b, exceedance_table, read_catalog};
use seiscontrol::dataset::{synth_groningen, write_density, write_extraction, write_wells};
use seiscontrol::scenario::{
    run_many, sweep_dtc, sweep_k3, DatasetSource, EnsembleStats, Mode, Prepared, ScenarioConfig,
};
use seiscontrol::units::HOURS_PER_MONTH;
use seiscontrol::Error;

#[derive(Parser)]
#[command(name = "seiscontrol", version, about = "Closed-loop induced-seismicity simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write one result bundle per run.
    Simulate {
        /// Scenario config (TOML). Without it the built-in defaults run.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long, env = "SEISCONTROL_OUT_DIR", default_value = "out")]
        out_dir: PathBuf,
    },
    /// Estimate Gutenberg-Richter a and b and tabulate exceedance counts.
    CatalogStats {
        catalog: PathBuf,
        /// Completeness magnitude.
        #[arg(long, default_value_t = 1.0)]
        mc: f64,
        /// Magnitude step of the exceedance table.
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        /// Table path [default: exceedance.csv next to the catalog].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scenario-1 sweep over k3 or the control period (months).
    Sweep {
        #[arg(value_enum)]
        parameter: SweepParam,
        /// Comma-separated values.
        #[arg(value_delimiter = ',', num_args = 1.., required = true)]
        values: Vec<f64>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, env = "SEISCONTROL_OUT_DIR", default_value = "out")]
        out_dir: PathBuf,
    },
    /// Write the synthetic dataset as CSV files plus a config that uses them.
    Synth {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, env = "SEISCONTROL_OUT_DIR", default_value = "out")]
        out_dir: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    NoControl,
    Scenario1,
    Scenario2,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::NoControl => Mode::NoControl,
            ModeArg::Scenario1 => Mode::Scenario1,
            ModeArg::Scenario2 => Mode::Scenario2,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepParam {
    K3,
    Dtc,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } => 2,
        Error::Config(_) | Error::Domain(_) => 3,
        Error::Numerical { .. } | Error::State(_) => 4,
        Error::InsufficientData { .. } | Error::Degenerate(_) => 5,
        Error::Io { .. } => 6,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate {
            config,
            seed,
            mode,
            runs,
            out_dir,
        } => simulate(config, seed, mode, runs, &out_dir),
        Command::CatalogStats { catalog, mc, step, out } => catalog_stats(&catalog, mc, step, out),
        Command::Sweep {
            parameter,
            values,
            config,
            seed,
            out_dir,
        } => sweep(parameter, values, config, seed, &out_dir),
        Command::Synth { seed, out_dir } => synth(seed, &out_dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn load_config(path: Option<PathBuf>, seed: Option<u64>) -> Result<ScenarioConfig, Error> {
    let mut cfg = match path {
        Some(p) => ScenarioConfig::load(&p)?,
        None => ScenarioConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn simulate(
    config: Option<PathBuf>,
    seed: Option<u64>,
    mode: Option<ModeArg>,
    runs: Option<usize>,
    out_dir: &Path,
) -> Result<(), Error> {
    let mut cfg = load_config(config, seed)?;
    if let Some(m) = mode {
        cfg.mode = m.into();
    }
    if let Some(r) = runs {
        cfg.runs = r;
    }
    cfg.validate()?;
    let prep = Prepared::new(&cfg)?;
    let grid_hash = prep.dataset.grid.content_hash();
    let results = run_many(&prep, cfg.runs)?;
    for r in &results {
        let dir = if cfg.runs == 1 {
            out_dir.to_path_buf()
        } else {
            out_dir.join(format!("run_{:03}", r.run))
        };
        write_bundle(&dir, &cfg, r, &grid_hash)?;
        println!(
            "run {}: {} events (expected {:.1}), extracted {:.4e} m3 -> {}",
            r.run,
            r.total_events(),
            r.expected_events(),
            r.extracted_volume(),
            dir.display()
        );
    }
    if cfg.runs > 1 {
        let stats = EnsembleStats::from_results(&results)?;
        let path = out_dir.join("ensemble.csv");
        write_ensemble(&path, &stats, prep.axis.steps_per_month)?;
        println!(
            "ensemble: mean {:.1} std {:.1} expected {:.1} -> {}",
            stats.terminal_mean(),
            stats.terminal_std(),
            stats.terminal_expected(),
            path.display()
        );
    }
    Ok(())
}

fn catalog_stats(path: &Path, mc: f64, step: f64, out: Option<PathBuf>) -> Result<(), Error> {
    if step.is_nan() || step <= 0.0 {
        return Err(Error::Config(format!("--step must be positive, got {step}")));
    }
    let (_, catalog) = read_catalog(path)?;
    let (a, b) = estimate_b(&catalog, mc)?;
    let n = catalog.above(mc).len();
    println!("events >= {mc}: {n}");
    println!("a_hat = {a:.4}");
    println!("b_hat = {b:.4}");
    let out = out.unwrap_or_else(|| path.with_file_name("exceedance.csv"));
    let mut w = csv::Writer::from_path(&out).map_err(|e| Error::Io {
        path: out.clone(),
        source: e.into(),
    })?;
    let io = |e: csv::Error| Error::Io {
        path: out.clone(),
        source: e.into(),
    };
    w.write_record(["magnitude", "n_exceeding"]).map_err(io)?;
    for (m, count) in exceedance_table(&catalog, mc, step) {
        w.write_record([format!("{m:.3}"), count.to_string()]).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io {
        path: out.clone(),
        source: e,
    })?;
    println!("exceedance table -> {}", out.display());
    Ok(())
}

fn dedupe(values: Vec<f64>) -> Vec<f64> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for v in values {
        if seen.insert(v.to_bits()) {
            out.push(v);
        } else {
            eprintln!("warning: duplicate sweep value {v} ignored");
        }
    }
    out
}

fn sweep(
    parameter: SweepParam,
    values: Vec<f64>,
    config: Option<PathBuf>,
    seed: Option<u64>,
    out_dir: &Path,
) -> Result<(), Error> {
    let cfg = load_config(config, seed)?;
    let values = dedupe(values);
    std::fs::create_dir_all(out_dir).map_err(|e| Error::Io {
        path: out_dir.into(),
        source: e,
    })?;
    let (path, text) = match parameter {
        SweepParam::K3 => {
            let rows = sweep_k3(&cfg, &values)?;
            let mut s = String::from("k3,extracted_volume_m3,total_events\n");
            for r in rows {
                s += &format!("{},{},{}\n", r.k3, r.extracted_volume, r.total_events);
            }
            (out_dir.join("sweep_k3.csv"), s)
        }
        SweepParam::Dtc => {
            let hours: Vec<f64> = values.iter().map(|m| m * HOURS_PER_MONTH).collect();
            let rows = sweep_dtc(&cfg, &hours)?;
            let mut s = String::from("dtc_months,dtc_hr,total_events,mean_abs_sigma\n");
            for (m, r) in values.iter().zip(rows) {
                s += &format!("{},{},{},{}\n", m, r.dt_c, r.total_events, r.mean_abs_sigma);
            }
            (out_dir.join("sweep_dtc.csv"), s)
        }
    };
    std::fs::write(&path, &text).map_err(|e| Error::Io {
        path: path.clone(),
        source: e,
    })?;
    print!("{text}");
    std::io::stdout().flush().ok();
    println!("-> {}", path.display());
    Ok(())
}

fn synth(seed: u64, out_dir: &Path) -> Result<(), Error> {
    let ds = synth_groningen(seed)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::Io {
        path: out_dir.into(),
        source: e,
    })?;
    write_wells(&out_dir.join("wells.csv"), &ds.wells, &ds.shares)?;
    write_extraction(&out_dir.join("extraction.csv"), &ds.extraction)?;
    write_density(&out_dir.join("density.csv"), &ds.grid, &ds.density)?;
    let cfg = ScenarioConfig {
        dataset: DatasetSource::Files {
            grid: ds.grid_spec.clone(),
            wells: "wells.csv".into(),
            extraction: "extraction.csv".into(),
            density: "density.csv".into(),
        },
        ..ScenarioConfig::default()
    };
    let path = out_dir.join("scenario.toml");
    std::fs::write(&path, cfg.to_toml()).map_err(|e| Error::Io {
        path: path.clone(),
        source: e,
    })?;
    println!(
        "{} active cells, {} wells -> {}",
        ds.grid.active_count(),
        ds.wells.len(),
        out_dir.display()
    );
    Ok(())
}
