use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use helical_oseen::decomposition::decompose;
use helical_oseen::io::{ExperimentConfig, PresetReport, Snapshot};
use helical_oseen::presets::{self, Preset, PresetOptions};
use helical_oseen::spectral::ops::curl;
use helical_oseen::spectral::transform::{forward, inverse};

#[derive(Parser)]
#[command(name = "helical-oseen", version, about = "Helical perturbations of the Lamb–Oseen vortex")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML experiment configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Preset name, or `all`
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Seed (overrides the configuration)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Only print the JSON summary
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured simulation; writes CSV and optional snapshots
    Simulate,
    /// Split a snapshot into a·u^LO(0) + v
    Decompose {
        snapshot: PathBuf,
        /// Weight exponent of L²_m (must exceed 1)
        #[arg(long, default_value_t = 1.5)]
        m: f64,
    },
    /// Run verification presets
    Verify,
    /// Algebraic decay rate of the radial mean for weighted data
    RateStudy {
        /// Comma-separated weight exponents
        #[arg(long, value_delimiter = ',')]
        m: Vec<f64>,
    },
    /// Poincaré and Ladyzhenskaya sweeps over seeded fields
    SweepInequality {
        #[arg(long)]
        seed_count: Option<usize>,
    },
}

type Outcome = Result<(bool, serde_json::Value), String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate => simulate(&cli.common),
        Command::Decompose { snapshot, m } => decompose_cmd(&cli.common, snapshot, *m),
        Command::Verify => verify(&cli.common),
        Command::RateStudy { m } => rate(&cli.common, m),
        Command::SweepInequality { seed_count } => sweep(&cli.common, *seed_count),
    };
    match result {
        Ok((ok, summary)) => {
            let text = serde_json::to_string_pretty(&summary).unwrap();
            if let Some(dir) = &cli.common.out {
                if let Err(e) = std::fs::create_dir_all(dir)
                    .and_then(|_| std::fs::write(dir.join("summary.json"), &text))
                {
                    eprintln!("error: writing summary: {e}");
                    return ExitCode::from(2);
                }
            }
            println!("{text}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load_config(c: &Common) -> Result<ExperimentConfig, String> {
    let mut cfg = match &c.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            ExperimentConfig::parse(&text).map_err(|e| e.to_string())?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(s) = c.seed {
        cfg.initial.seed = s;
    }
    Ok(cfg)
}

fn options(c: &Common, cfg: &ExperimentConfig) -> PresetOptions {
    PresetOptions {
        seed: c.seed.unwrap_or(cfg.initial.seed),
        out: c.out.clone(),
        seed_count: cfg.study.seed_count,
        m_list: cfg.study.m_list.clone(),
    }
}

fn simulate(c: &Common) -> Outcome {
    let cfg = load_config(c)?;
    let out = c.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let run = presets::simulate(&cfg, &out).map_err(|e| e.to_string())?;
    let last = run.records.last().expect("at least the initial record");
    if !c.quiet {
        eprintln!(
            "{} records, {} steps, t = {}, ‖v‖ = {:.6e}",
            run.records.len(),
            run.steps,
            run.state.t,
            last.l2_v
        );
    }
    let failure = run.failure.as_ref().map(|e| e.to_string());
    if let Some(f) = &failure {
        eprintln!("run stopped early: {f}");
    }
    Ok((
        failure.is_none(),
        json!({
            "command": "simulate",
            "passed": failure.is_none(),
            "records": run.records.len(),
            "steps": run.steps,
            "t": run.state.t,
            "csv": out.join(&cfg.output.csv),
            "failure": failure,
        }),
    ))
}

fn decompose_cmd(c: &Common, path: &Path, m: f64) -> Outcome {
    let snap = Snapshot::read(path).map_err(|e| e.to_string())?;
    let omega = match snap.vorticity {
        Some(w) => w,
        None => inverse(&curl(&forward(&snap.velocity))),
    };
    let d = decompose(&omega, m).map_err(|e| e.to_string())?;
    let report = d.to_report();
    if let Some(dir) = &c.out {
        std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
        std::fs::write(dir.join("decomposition.txt"), &report).map_err(|e| e.to_string())?;
    }
    if !c.quiet {
        eprint!("{report}");
    }
    Ok((
        true,
        json!({
            "command": "decompose",
            "passed": true,
            "snapshot": path,
            "time": snap.time,
            "a": d.a,
            "m": m,
            "h1_v": d.h1_v,
            "weighted_l2m_omega": d.weighted_norm,
        }),
    ))
}

fn report_summary(command: &str, reports: &[PresetReport], quiet: bool) -> (bool, serde_json::Value) {
    let ok = reports.iter().all(|r| r.passed());
    for r in reports {
        if quiet {
            continue;
        }
        eprint!("{}", r.to_text());
    }
    for r in reports.iter().filter(|r| !r.passed()) {
        eprintln!("{}", r.headline());
    }
    let items: Vec<_> = reports
        .iter()
        .map(|r| {
            json!({
                "preset": r.preset,
                "criterion": r.criterion,
                "passed": r.passed(),
                "failing": r.failing().iter().map(|c| c.name.clone()).collect::<Vec<_>>(),
            })
        })
        .collect();
    (ok, json!({ "command": command, "passed": ok, "presets": items }))
}

fn verify(c: &Common) -> Outcome {
    let cfg = load_config(c)?;
    let name = c
        .preset
        .clone()
        .or_else(|| cfg.study.preset.clone())
        .ok_or_else(|| format!("--preset is required (one of: all, {})", Preset::names().join(", ")))?;
    let list: Vec<Preset> = if name == "all" {
        Preset::ALL.to_vec()
    } else {
        vec![Preset::parse(&name)
            .ok_or_else(|| format!("unknown preset '{name}' (one of: all, {})", Preset::names().join(", ")))?]
    };
    let opts = options(c, &cfg);
    let reports = list
        .into_iter()
        .map(|p| presets::run_preset(p, &opts))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    Ok(report_summary("verify", &reports, c.quiet))
}

fn rate(c: &Common, m: &[f64]) -> Outcome {
    let cfg = load_config(c)?;
    let mut opts = options(c, &cfg);
    if !m.is_empty() {
        opts.m_list = m.to_vec();
    }
    if let Some(bad) = opts.m_list.iter().find(|&&m| !(m > 1.0 && m < 2.0)) {
        return Err(format!("m = {bad}: the rate study needs 1 < m < 2 (m > 1 for the decomposition)"));
    }
    let r = presets::rate_study_preset(&opts).map_err(|e| e.to_string())?;
    Ok(report_summary("rate-study", &[r], c.quiet))
}

fn sweep(c: &Common, seed_count: Option<usize>) -> Outcome {
    let cfg = load_config(c)?;
    let mut opts = options(c, &cfg);
    if let Some(n) = seed_count {
        opts.seed_count = n;
    }
    if opts.seed_count == 0 {
        return Err("--seed-count must be positive".into());
    }
    let reports = vec![
        presets::poincare_suite(&opts).map_err(|e| e.to_string())?,
        presets::ladyzhenskaya_suite(&opts).map_err(|e| e.to_string())?,
    ];
    Ok(report_summary("sweep-inequality", &reports, c.quiet))
}
