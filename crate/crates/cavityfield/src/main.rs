//! Batch CLI over the library: mapping diagnostics, full solves, convergence
//! sweeps and boundary-residual reports from a single JSON config.
//!
//! Exit codes: 0 success, 2 configuration/geometry error, 3 solver failure,
//! 4 output I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use cavityfield::config::{FilterMode, RunConfig};
use cavityfield::pipeline::{self, CaseSolution};
use cavityfield::report::{
    self, FailureReport, MappingReport, ResidualReport, SolverReport, SCHEMA_VERSION,
};
use cavityfield::{Error, SolverConfig};

#[derive(Parser)]
#[command(
    name = "cavityfield",
    about = "Stress and displacement around shallow cavities in a gravitational half-plane",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Conformal-mapping diagnostics: report JSON plus grid CSVs.
    Map {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full solve: boundary traces, optional interior rings, solver report.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the configured filter mode (on, off, both).
        #[arg(long)]
        filter: Option<FilterMode>,
        /// Emit filtered and unfiltered traces (same as --filter both).
        #[arg(long)]
        compare_filter: bool,
        /// Extra interior ring radii, comma separated.
        #[arg(long, value_delimiter = ',')]
        rings: Option<Vec<f64>>,
    },
    /// Convergence sweep over the free-surface half-width or the truncation.
    Converge {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Half-width values, comma separated.
        #[arg(long, value_delimiter = ',')]
        sweep_x0: Option<Vec<f64>>,
        /// Truncation values, comma separated.
        #[arg(long, value_delimiter = ',')]
        sweep_n0: Option<Vec<usize>>,
    },
    /// Boundary-residual report (filtered and unfiltered).
    Residuals {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_IO: u8 = 4;

fn config_exit(err: &Error) -> u8 {
    match err {
        Error::SolverDiverged { .. } | Error::SingularSystem { .. } => EXIT_SOLVER,
        _ => EXIT_CONFIG,
    }
}

fn fail(code: u8, err: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(code)
}

fn out_dir(config: &RunConfig, flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| config.outputs.clone())
        .unwrap_or_else(|| PathBuf::from("cavityfield-out"))
}

fn theta_grid(count: usize) -> Vec<f64> {
    // Cell-centered so the grid never hits the image of infinity exactly.
    (0..count)
        .map(|i| 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / count as f64)
        .collect()
}

fn solve_from_config(config: &RunConfig) -> cavityfield::Result<CaseSolution> {
    let spec = config.build_spec()?;
    pipeline::solve_case(
        &spec,
        &config.material()?,
        &config.solver_config(),
        &config.map_options(),
    )
}

fn cmd_map(config_path: &Path, out: Option<PathBuf>) -> ExitCode {
    let config = match RunConfig::from_path(config_path) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    let sol = match solve_from_config(&config) {
        Ok(s) => s,
        Err(e) => return fail(config_exit(&e), e),
    };
    let report = match MappingReport::build(&sol, &config) {
        Ok(r) => r,
        Err(e) => return fail(config_exit(&e), e),
    };
    let dir = out_dir(&config, out);
    let write = || -> cavityfield::Result<()> {
        std::fs::create_dir_all(&dir)?;
        report::write_json(&dir.join("mapping_report.json"), &report)?;
        // Forward boundary correspondence.
        let mut boundary = Vec::new();
        for p in &sol.spec.points {
            let w = sol.map.forward.eval(*p)?;
            let zeta = sol.map.verruijt.zeta_of_w(w)?;
            boundary.push((zeta.norm(), zeta.arg(), *p));
        }
        report::write_grid_csv(&dir.join("forward_boundary.csv"), &config, &boundary)?;
        // Backward-mapped annulus grid.
        let alpha = sol.map.alpha();
        let mut grid = Vec::new();
        for i in 0..=24 {
            let rho = alpha + (1.0 - alpha) * i as f64 / 24.0;
            for theta in theta_grid(config.grids.theta_count.min(360)) {
                let zeta = Complex64::from_polar(rho.min(0.999_999), theta);
                grid.push((rho, theta, sol.map.z_of_zeta(zeta)?));
            }
        }
        report::write_grid_csv(&dir.join("annulus_grid.csv"), &config, &grid)?;
        Ok(())
    };
    if let Err(e) = write() {
        return fail(EXIT_IO, e);
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "map: {} h={:.6} alpha={:.6} validity={:.3e} -> {}",
        SCHEMA_VERSION,
        report.h,
        report.alpha,
        report.validity_metric,
        dir.display()
    );
    ExitCode::SUCCESS
}

fn emit_traces(
    sol: &CaseSolution,
    config: &RunConfig,
    dir: &Path,
    filtered: bool,
    rings: &[f64],
) -> cavityfield::Result<()> {
    let tag = if filtered { "filtered" } else { "raw" };
    let thetas = theta_grid(config.grids.theta_count);
    let surface = sol.ring_fields(1.0, &thetas, filtered)?;
    report::write_field_csv(
        &dir.join(format!("surface_trace_{tag}.csv")),
        config,
        &surface,
    )?;
    let cavity = sol.ring_fields(sol.map.alpha(), &thetas, filtered)?;
    report::write_field_csv(
        &dir.join(format!("cavity_trace_{tag}.csv")),
        config,
        &cavity,
    )?;
    for (i, rho) in rings.iter().enumerate() {
        let alpha = sol.map.alpha();
        let rho = rho.clamp(alpha, 1.0);
        let ring = sol.ring_fields(rho, &thetas, filtered)?;
        report::write_field_csv(&dir.join(format!("ring_{i}_{tag}.csv")), config, &ring)?;
    }
    Ok(())
}

fn cmd_solve(
    config_path: &Path,
    out: Option<PathBuf>,
    filter: Option<FilterMode>,
    compare: bool,
    rings: Option<Vec<f64>>,
) -> ExitCode {
    let mut config = match RunConfig::from_path(config_path) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    if let Some(f) = filter {
        config.filter = f;
    }
    if compare {
        config.filter = FilterMode::Both;
    }
    if let Some(r) = rings {
        config.grids.rings = r;
    }
    if let Err(e) = config.validate() {
        return fail(EXIT_CONFIG, e);
    }
    let dir = out_dir(&config, out);
    let sol = match solve_from_config(&config) {
        Ok(s) => s,
        Err(e) => {
            // Solver failures still owe a report.
            let code = config_exit(&e);
            if code == EXIT_SOLVER {
                let failure = FailureReport {
                    schema_version: SCHEMA_VERSION,
                    config: config.clone(),
                    error: e.to_string(),
                };
                let _ = std::fs::create_dir_all(&dir)
                    .map_err(Error::from)
                    .and_then(|()| report::write_json(&dir.join("solver_report.json"), &failure));
            }
            return fail(code, e);
        }
    };
    let write = || -> cavityfield::Result<()> {
        std::fs::create_dir_all(&dir)?;
        report::write_json(
            &dir.join("solver_report.json"),
            &SolverReport::build(&sol, &config),
        )?;
        match config.filter {
            FilterMode::On => emit_traces(&sol, &config, &dir, true, &config.grids.rings)?,
            FilterMode::Off => emit_traces(&sol, &config, &dir, false, &config.grids.rings)?,
            FilterMode::Both => {
                emit_traces(&sol, &config, &dir, true, &config.grids.rings)?;
                emit_traces(&sol, &config, &dir, false, &config.grids.rings)?;
            }
        }
        Ok(())
    };
    if let Err(e) = write() {
        return fail(EXIT_IO, e);
    }
    for w in sol.map.warnings() {
        eprintln!("warning: {w}");
    }
    println!(
        "solve: iterations={} stop={:?} equilibrium(A-1)={:.3e} -> {}",
        sol.state.iterations,
        sol.state.stop,
        sol.equilibrium.a_minus1_rel,
        dir.display()
    );
    ExitCode::SUCCESS
}

fn cmd_converge(
    config_path: &Path,
    out: Option<PathBuf>,
    sweep_x0: Option<Vec<f64>>,
    sweep_n0: Option<Vec<usize>>,
) -> ExitCode {
    let config = match RunConfig::from_path(config_path) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    if sweep_x0.is_some() == sweep_n0.is_some() {
        return fail(EXIT_CONFIG, "pass exactly one of --sweep-x0 or --sweep-n0");
    }
    let dir = out_dir(&config, out);
    let filtered = config.filter != FilterMode::Off;
    let phi_count = config.grids.theta_count.min(720);
    let material = match config.material() {
        Ok(m) => m,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    let result = if let Some(x0s) = &sweep_x0 {
        pipeline::sweep_x0(
            |x0| config.build_spec_with_x0(x0),
            &material,
            &config.solver_config(),
            &config.map_options(),
            x0s,
            phi_count,
            filtered,
        )
    } else {
        let n0s = sweep_n0.as_ref().unwrap();
        let cfg = config.solver_config();
        config.build_spec().and_then(|spec| {
            pipeline::sweep_n0(
                &spec,
                &material,
                &cfg,
                &config.map_options(),
                n0s,
                phi_count,
                filtered,
            )
        })
    };
    let sweep = match result {
        Ok(s) => s,
        Err(e) => return fail(config_exit(&e), e),
    };
    let label = if sweep_x0.is_some() { "x0" } else { "n0" };
    let write = || -> cavityfield::Result<()> {
        std::fs::create_dir_all(&dir)?;
        report::write_sweep_csv(
            &dir.join("convergence_summary.csv"),
            &config,
            &sweep.values,
            &sweep.sup_diffs,
            &sweep.errors,
        )?;
        for (value, trace) in sweep.values.iter().zip(&sweep.traces) {
            if trace.is_empty() {
                continue;
            }
            report::write_hoop_trace_csv(
                &dir.join(format!("cavity_trace_{label}_{value}.csv")),
                &config,
                phi_count,
                trace,
            )?;
        }
        Ok(())
    };
    if let Err(e) = write() {
        return fail(EXIT_IO, e);
    }
    let failed = sweep.errors.iter().flatten().count();
    println!(
        "converge: {} member(s), {} failed, sup diffs {:?} -> {}",
        sweep.values.len(),
        failed,
        sweep.sup_diffs,
        dir.display()
    );
    ExitCode::SUCCESS
}

fn cmd_residuals(config_path: &Path, out: Option<PathBuf>) -> ExitCode {
    let config = match RunConfig::from_path(config_path) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    let sol = match solve_from_config(&config) {
        Ok(s) => s,
        Err(e) => return fail(config_exit(&e), e),
    };
    let count = config.grids.theta_count;
    let build = || -> cavityfield::Result<ResidualReport> {
        Ok(ResidualReport {
            schema_version: SCHEMA_VERSION,
            config: config.clone(),
            filtered: pipeline::boundary_residuals(&sol, 5.0, count, true)?,
            unfiltered: pipeline::boundary_residuals(&sol, 5.0, count, false)?,
            gamma_h_kpa: config.material.gamma_kpa * (-sol.spec.center.im),
            surface_displacement_scale_kpa_m: config.material.gamma_kpa
                * (-sol.spec.center.im)
                * (-sol.spec.center.im),
        })
    };
    let rep = match build() {
        Ok(r) => r,
        Err(e) => return fail(config_exit(&e), e),
    };
    let dir = out_dir(&config, out);
    let write = || -> cavityfield::Result<()> {
        std::fs::create_dir_all(&dir)?;
        report::write_json(&dir.join("residual_report.json"), &rep)?;
        Ok(())
    };
    if let Err(e) = write() {
        return fail(EXIT_IO, e);
    }
    println!(
        "residuals: free={:.4} kPa constrained={:.4} kPa·m cavity L2={:.5} -> {}",
        rep.filtered.free_traction_max,
        rep.filtered.constrained_displacement_max,
        rep.filtered.cavity_traction_rel_l2,
        dir.display()
    );
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    // Keep the default solver parameters in scope for --help sanity.
    let _ = SolverConfig::default();
    let cli = Cli::parse();
    match cli.command {
        Command::Map { config, out } => cmd_map(&config, out),
        Command::Solve {
            config,
            out,
            filter,
            compare_filter,
            rings,
        } => cmd_solve(&config, out, filter, compare_filter, rings),
        Command::Converge {
            config,
            out,
            sweep_x0,
            sweep_n0,
        } => cmd_converge(&config, out, sweep_x0, sweep_n0),
        Command::Residuals { config, out } => cmd_residuals(&config, out),
    }
}
