//! `qps-witness`: config-driven witness evaluation, paper-reproduction
//! cases, parameter sweeps and LP certificate search for phase-space
//! classical-simulation tests.

mod cases;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use qps_core::lp::{self, Feasibility};
use qps_core::povm::PovmModel;
use qps_core::witness::{evaluate_witness, TestFunction};

use config::{write_json, write_sweep_csv, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "qps-witness",
    about = "Dual-form phase-space classical-simulation witnesses for quantum-optical measurements",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named reproduction case with its published parameters.
    Reproduce {
        /// One of: pnr-svs, pnr-cat, click-n10, onoff-nogo, uhd-fock1,
        /// bhd-fock3-sweep, ephd-fock1-sweep, chsh-demo
        case_id: String,
        /// Output directory for report JSON and CSV data.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Evaluate a single witness from a config file.
    Witness {
        #[arg(long)]
        config: PathBuf,
    },
    /// Sweep a parameter axis, emitting one CSV row per value.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        axis: Axis,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
    },
    /// Discretize the config's scenario and search for an optimal test
    /// function (dual certificate).
    Lp {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Axis {
    S,
    T,
    K,
}

fn init_threads() {
    if let Ok(v) = std::env::var("QPS_WITNESS_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

fn cmd_reproduce(case_id: &str, out: &PathBuf) -> Result<bool> {
    let case_dir = out.join(case_id);
    let checks = cases::run_case(case_id, &case_dir)?;
    let mut all = true;
    for c in &checks {
        let status = if c.passed { "pass" } else { "MISS" };
        println!("  [{status}] {}: {}", c.label, c.detail);
        all &= c.passed;
    }
    write_json(
        &case_dir.join("targets.json"),
        &json!({ "case": case_id, "all_passed": all, "targets": checks }),
    )?;
    println!(
        "{case_id}: {} ({} targets, reports in {})",
        if all { "all targets hit" } else { "TARGET MISSES" },
        checks.len(),
        case_dir.display()
    );
    Ok(all)
}

fn cmd_witness(cfg_path: &PathBuf) -> Result<()> {
    let cfg = ExperimentConfig::load(cfg_path)?;
    let report = evaluate_witness(&cfg.state, &cfg.povm, &cfg.test_function, cfg.s(), &cfg.grid())
        .map_err(|e| anyhow!("witness evaluation: {e}"))?;
    let out = cfg
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from("witness_report.json"));
    write_json(&out, &json!({ "config": cfg, "report": report }))?;
    println!(
        "lhs = {:.6}, rhs = {:.6}, violated = {} -> {}",
        report.lhs,
        report.rhs,
        report.violated,
        out.display()
    );
    Ok(())
}

fn cmd_sweep(cfg_path: &PathBuf, axis: Axis, from: f64, to: f64, steps: usize) -> Result<()> {
    if steps < 2 {
        bail!("need at least 2 sweep steps");
    }
    let cfg = ExperimentConfig::load(cfg_path)?;
    let grid = cfg.grid();
    let mut rows = Vec::with_capacity(steps);
    for i in 0..steps {
        let x = from + (to - from) * i as f64 / (steps - 1) as f64;
        let (state, povm, lambda, s) = match axis {
            Axis::S => (cfg.state.clone(), cfg.povm.clone(), cfg.test_function.clone(), x),
            Axis::T => {
                let g = match cfg.test_function {
                    TestFunction::PhotocountExp { g, .. } => g,
                    ref other => bail!("t-axis sweeps need a photocount-exp test function, got {other:?}"),
                };
                (
                    cfg.state.clone(),
                    cfg.povm.clone(),
                    TestFunction::PhotocountExp { t: x, g },
                    cfg.s(),
                )
            }
            Axis::K => {
                let s = match cfg.povm {
                    PovmModel::Bhd { s, .. } => s,
                    ref other => bail!("K-axis sweeps need a bhd scheme, got {}", other.scheme_name()),
                };
                let k = x.round() as u32;
                if k < 1 || (x - k as f64).abs() > 1e-9 {
                    bail!("K-axis sweep values must be positive integers, got {x}");
                }
                (
                    cfg.state.clone(),
                    PovmModel::bhd_equispaced(k, s),
                    cfg.test_function.clone(),
                    cfg.s.unwrap_or(s),
                )
            }
        };
        let rep = evaluate_witness(&state, &povm, &lambda, s, &grid)
            .map_err(|e| anyhow!("sweep point {x}: {e}"))?;
        rows.push((x, rep.lhs, rep.rhs, rep.relative_violation, rep.violated));
    }
    let out = cfg
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from("sweep.csv"));
    write_sweep_csv(&out, &rows)?;
    write_json(
        &out.with_extension("json"),
        &json!({ "config": cfg, "axis": match axis { Axis::S => "s", Axis::T => "t", Axis::K => "K" },
                 "from": from, "to": to, "steps": steps }),
    )?;
    println!("{} rows -> {}", rows.len(), out.display());
    Ok(())
}

fn cmd_lp(cfg_path: &PathBuf) -> Result<()> {
    let cfg = ExperimentConfig::load(cfg_path)?;
    let (ps, search) = cases::phase_space_lp_from_config(&cfg)?;
    let feas = ps
        .primal_feasible(lp::FEASIBILITY_EPSILON, &search)
        .map_err(|e| anyhow!("feasibility solve: {e}"))?;
    let cert = ps
        .find_optimal_lambda(&search)
        .map_err(|e| anyhow!("dual solve: {e}"))?;
    let (verdict, detail) = match &feas {
        Feasibility::Feasible { max_residual, .. } => {
            ("feasible", format!("max residual {max_residual:.2e}"))
        }
        Feasibility::Infeasible { .. } => ("infeasible", format!("certificate gap {:.6}", cert.gap)),
        Feasibility::Inconclusive { t_star, epsilon } => (
            "inconclusive-at-tolerance",
            format!("residual {t_star:.2e} at epsilon {epsilon:.0e}"),
        ),
    };
    let out = cfg
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from("lp_certificate.json"));
    write_json(
        &out,
        &json!({
            "config": cfg,
            "verdict": verdict,
            "certificate": cert,
            "grid_points": ps.grid_points.len(),
        }),
    )?;
    println!("{verdict}: {detail} -> {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    let result: Result<bool> = match &cli.command {
        Command::Reproduce { case_id, out } => cmd_reproduce(case_id, out),
        Command::Witness { config } => cmd_witness(config).map(|_| true),
        Command::Sweep {
            config,
            axis,
            from,
            to,
            steps,
        } => cmd_sweep(config, *axis, *from, *to, *steps).map(|_| true),
        Command::Lp { config } => cmd_lp(config).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
