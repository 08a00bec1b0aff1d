//! Report and file-output schemas: JSON diagnostics plus the CSV emitters.
//!
//! Every artifact starts with a schema version and a single-line config
//! echo, and all floats are printed through one fixed formatting so that
//! identical configurations produce byte-identical files.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::config::RunConfig;
use crate::field::FieldSample;
use crate::pipeline::{BoundaryResiduals, CaseSolution};
use crate::solver::StopReason;
use crate::Result;

/// Version tag carried by every emitted file.
pub const SCHEMA_VERSION: &str = "cavityfield/1";

fn fmt(v: f64) -> String {
    format!("{v:.12e}")
}

fn complex_pairs(values: &[Complex64]) -> Vec<[f64; 2]> {
    values.iter().map(|c| [c.re, c.im]).collect()
}

#[derive(Serialize)]
pub struct ConditionEstimates {
    pub forward_collocation: f64,
    pub backward_fit: f64,
}

/// Mapping diagnostics for the `map` subcommand.
#[derive(Serialize)]
pub struct MappingReport {
    pub schema_version: &'static str,
    pub config: RunConfig,
    pub robin_constant: f64,
    pub charges: Vec<f64>,
    pub charge_points: Vec<[f64; 2]>,
    pub backward_coeffs: Vec<[f64; 2]>,
    pub charges_sum: f64,
    pub collocation_modulus_max_err: f64,
    pub roundtrip_max_err: f64,
    pub condition_estimates: ConditionEstimates,
    pub h: f64,
    pub a: f64,
    pub alpha: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub validity_metric: f64,
    pub im_w_t1: f64,
    pub im_w_t2: f64,
    pub warnings: Vec<String>,
}

impl MappingReport {
    pub fn build(sol: &CaseSolution, config: &RunConfig) -> Result<Self> {
        let map = &sol.map;
        let mut modulus_err: f64 = 0.0;
        let mut roundtrip: f64 = 0.0;
        let scale = sol.spec.size();
        for p in &sol.spec.points {
            let w = map.forward.eval(*p)?;
            modulus_err = modulus_err.max((w.norm() - 1.0).abs());
            roundtrip = roundtrip.max((map.backward.eval(w)? - p).norm() / scale);
        }
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            config: config.clone(),
            robin_constant: map.forward.robin_constant,
            charges: map.forward.charges.clone(),
            charge_points: complex_pairs(&map.forward.charge_points),
            backward_coeffs: complex_pairs(&map.backward.coeffs),
            charges_sum: map.forward.charges_sum(),
            collocation_modulus_max_err: modulus_err,
            roundtrip_max_err: roundtrip,
            condition_estimates: ConditionEstimates {
                forward_collocation: map.forward.condition_estimate,
                backward_fit: map.backward.condition_estimate,
            },
            h: map.verruijt.h,
            a: map.verruijt.a,
            alpha: map.verruijt.alpha,
            theta1: map.theta1,
            theta2: map.theta2,
            validity_metric: map.validity.max_unit_circle_deviation,
            im_w_t1: map.validity.im_w_t1,
            im_w_t2: map.validity.im_w_t2,
            warnings: map.warnings(),
        })
    }
}

/// Solve diagnostics for the `solve` subcommand.
#[derive(Serialize)]
pub struct SolverReport {
    pub schema_version: &'static str,
    pub config: RunConfig,
    pub iterations: usize,
    pub stop: StopReason,
    pub residual_history: Vec<f64>,
    pub equilibrium: crate::solver::EquilibriumReport,
    pub condition_estimates: [f64; 2],
    pub factorizations: usize,
    pub w_area: f64,
    pub resultant_coeff: [f64; 2],
    pub warnings: Vec<String>,
}

impl SolverReport {
    pub fn build(sol: &CaseSolution, config: &RunConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            config: config.clone(),
            iterations: sol.state.iterations,
            stop: sol.state.stop,
            residual_history: sol.state.residual_history.clone(),
            equilibrium: sol.equilibrium,
            condition_estimates: [
                sol.state.condition_estimates.0,
                sol.state.condition_estimates.1,
            ],
            factorizations: sol.state.factorizations,
            w_area: sol.w_area,
            resultant_coeff: [
                sol.cavity_data.resultant_coeff.re,
                sol.cavity_data.resultant_coeff.im,
            ],
            warnings: sol.map.warnings(),
        }
    }
}

/// Residual metrics for the `residuals` subcommand.
#[derive(Serialize)]
pub struct ResidualReport {
    pub schema_version: &'static str,
    pub config: RunConfig,
    pub filtered: BoundaryResiduals,
    pub unfiltered: BoundaryResiduals,
    /// Reference scales the residuals are judged against.
    pub gamma_h_kpa: f64,
    pub surface_displacement_scale_kpa_m: f64,
}

/// Failure note written when a solve aborts but a report is still owed.
#[derive(Serialize)]
pub struct FailureReport {
    pub schema_version: &'static str,
    pub config: RunConfig,
    pub error: String,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn config_echo(config: &RunConfig) -> Result<String> {
    Ok(serde_json::to_string(config)?)
}

/// Writes field samples with the standard column set.
pub fn write_field_csv(path: &Path, config: &RunConfig, samples: &[FieldSample]) -> Result<()> {
    let mut out = Vec::new();
    writeln!(out, "# schema={SCHEMA_VERSION}").unwrap();
    writeln!(out, "# config={}", config_echo(config)?).unwrap();
    writeln!(
        out,
        "theta_deg,rho,x,y,sigma_rho,sigma_theta,tau_rhotheta,sigma_x,sigma_y,tau_xy,u,v,filtered"
    )
    .unwrap();
    for s in samples {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt(s.theta.to_degrees()),
            fmt(s.rho),
            fmt(s.z.re),
            fmt(s.z.im),
            fmt(s.sigma_rho),
            fmt(s.sigma_theta),
            fmt(s.tau_rho_theta),
            fmt(s.sigma_x),
            fmt(s.sigma_y),
            fmt(s.tau_xy),
            fmt(s.u),
            fmt(s.v),
            u8::from(s.filtered),
        )
        .unwrap();
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Writes an annulus-to-physical grid (mapping diagnostics).
pub fn write_grid_csv(
    path: &Path,
    config: &RunConfig,
    rows: &[(f64, f64, Complex64)],
) -> Result<()> {
    let mut out = Vec::new();
    writeln!(out, "# schema={SCHEMA_VERSION}").unwrap();
    writeln!(out, "# config={}", config_echo(config)?).unwrap();
    writeln!(out, "rho,theta,x,y").unwrap();
    for (rho, theta, z) in rows {
        writeln!(
            out,
            "{},{},{},{}",
            fmt(*rho),
            fmt(*theta),
            fmt(z.re),
            fmt(z.im)
        )
        .unwrap();
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Writes one sweep member's cavity hoop-stress trace sampled at the shared
/// w-plane anchor angles.
pub fn write_hoop_trace_csv(
    path: &Path,
    config: &RunConfig,
    phi_count: usize,
    sigma_theta: &[f64],
) -> Result<()> {
    let mut out = Vec::new();
    writeln!(out, "# schema={SCHEMA_VERSION}").unwrap();
    writeln!(out, "# config={}", config_echo(config)?).unwrap();
    writeln!(out, "phi_deg,sigma_theta").unwrap();
    for (i, v) in sigma_theta.iter().enumerate() {
        let phi = 360.0 * (i as f64 + 0.5) / phi_count as f64;
        writeln!(out, "{},{}", fmt(phi), fmt(*v)).unwrap();
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Writes a sweep summary: one row per member plus the sup-norm step to the
/// previous member.
pub fn write_sweep_csv(
    path: &Path,
    config: &RunConfig,
    values: &[f64],
    sup_diffs: &[f64],
    errors: &[Option<String>],
) -> Result<()> {
    let mut out = Vec::new();
    writeln!(out, "# schema={SCHEMA_VERSION}").unwrap();
    writeln!(out, "# config={}", config_echo(config)?).unwrap();
    writeln!(out, "value,sup_diff_from_previous,error").unwrap();
    for (i, v) in values.iter().enumerate() {
        let diff = if i == 0 {
            String::new()
        } else {
            fmt(sup_diffs[i - 1])
        };
        let err = errors[i].as_deref().unwrap_or("");
        writeln!(out, "{},{},{}", fmt(*v), diff, err).unwrap();
    }
    std::fs::write(path, out)?;
    Ok(())
}
