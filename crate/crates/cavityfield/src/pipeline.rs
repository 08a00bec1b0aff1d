//! One-call case driver tying the mapping, series and solver stages
//! together, plus the boundary-residual metrics and convergence sweeps the
//! verification workflow is built on.

use num_complex::Complex64;

use crate::annulus::{compose, CompositeMap, MapOptions};
use crate::field::{self, lanczos_weights, FieldPoint, FieldSample, LanczosWeights};
use crate::geometry::{area_and_resultant, cavity_traction, CavitySpec, MaterialParams};
use crate::series::{
    cavity_rhs, kernel_coeffs, ring_expand, AnnulusCoeffs, CavityRhs, RingExpansion,
};
use crate::solver::{
    assemble_systems, check_equilibrium, iterate, EquilibriumReport, SolverConfig, SolverState,
};
use crate::Result;

/// A fully solved case: geometry, maps, kernel, solved coefficients and the
/// equilibrium report.
pub struct CaseSolution {
    pub spec: CavitySpec,
    pub material: MaterialParams,
    pub map: CompositeMap,
    pub kernel: AnnulusCoeffs,
    pub cavity_data: CavityRhs,
    pub inner_ring: RingExpansion,
    pub state: SolverState,
    pub equilibrium: EquilibriumReport,
    /// Excavated-area datum from the collocation trace.
    pub w_area: f64,
}

/// Runs the full chain for one cavity: compose the two-step map, expand the
/// kernel and the cavity data, assemble and iterate the coefficient systems.
pub fn solve_case(
    spec: &CavitySpec,
    material: &MaterialParams,
    cfg: &SolverConfig,
    map_options: &MapOptions,
) -> Result<CaseSolution> {
    material.validate()?;
    cfg.validate()?;
    let map = compose(spec, map_options)?;
    let kappa = material.kappa();
    let kernel = kernel_coeffs(kappa, map.theta1, map.theta2, cfg.m_trunc)?;
    let systems = assemble_systems(&kernel, cfg)?;
    let cavity_data = cavity_rhs(&map, material, cfg.m_trunc)?;
    let inner_ring = ring_expand(&map, map.alpha(), cfg.m_trunc)?;
    let state = iterate(&systems, &kernel, &cavity_data, &inner_ring, cfg)?;
    let (w_area, _) = area_and_resultant(spec, material.gamma_kpa)?;
    let equilibrium = check_equilibrium(&state, w_area, material.gamma_kpa, kappa);
    Ok(CaseSolution {
        spec: spec.clone(),
        material: *material,
        map,
        kernel,
        cavity_data,
        inner_ring,
        state,
        equilibrium,
        w_area,
    })
}

impl CaseSolution {
    pub fn lanczos(&self) -> LanczosWeights {
        lanczos_weights(self.state.config.n0)
    }

    fn weights(&self, filtered: bool) -> Option<LanczosWeights> {
        filtered.then(|| self.lanczos())
    }

    /// Excavation-field samples along `|zeta| = rho`.
    pub fn ring_fields(
        &self,
        rho: f64,
        thetas: &[f64],
        filtered: bool,
    ) -> Result<Vec<FieldSample>> {
        field::ring_fields(
            &self.state,
            &self.map,
            &self.material,
            rho,
            thetas,
            self.weights(filtered).as_ref(),
        )
    }

    /// Total-field samples at physical or annulus points.
    pub fn physical_fields(
        &self,
        points: &[FieldPoint],
        filtered: bool,
    ) -> Result<Vec<FieldSample>> {
        field::physical_fields(
            &self.state,
            &self.map,
            &self.material,
            points,
            self.weights(filtered).as_ref(),
        )
    }

    /// Cavity-boundary samples anchored at fixed w-plane angles.
    ///
    /// The w-plane unit circle is the cavity image independent of the joint
    /// placement, so traces taken this way stay comparable across sweeps
    /// that move the joints (and with them the annulus parameterization).
    pub fn cavity_trace_at_w_angles(
        &self,
        phis: &[f64],
        filtered: bool,
    ) -> Result<Vec<FieldSample>> {
        let thetas = phis
            .iter()
            .map(|&phi| {
                Ok(self
                    .map
                    .verruijt
                    .zeta_of_w(Complex64::from_polar(1.0, phi))?
                    .arg())
            })
            .collect::<Result<Vec<f64>>>()?;
        let mut samples = Vec::with_capacity(thetas.len());
        // One table build, many angles.
        let weights = self.weights(filtered);
        let series = field::build_ring_series(
            &self.state,
            &self.map,
            self.material.kappa(),
            self.map.alpha(),
            weights.as_ref(),
        )?;
        for &theta in &thetas {
            let p = series.eval(&self.map, theta, weights.as_ref())?;
            samples.push(sample_from(&p, self.map.alpha(), theta, &self.material, filtered));
        }
        Ok(samples)
    }

    /// Reconstructed physical traction on the cavity face at an annulus
    /// angle: the curvilinear radial components rotated into the global
    /// frame, with the outward normal of the geomaterial (pointing into the
    /// opening).
    pub fn cavity_face_traction(&self, theta: f64, filtered: bool) -> Result<Complex64> {
        let weights = self.weights(filtered);
        let series = field::build_ring_series(
            &self.state,
            &self.map,
            self.material.kappa(),
            self.map.alpha(),
            weights.as_ref(),
        )?;
        let p = series.eval(&self.map, theta, weights.as_ref())?;
        Ok(-(p.zeta * p.dz / (p.zeta * p.dz).norm()) * p.radial)
    }

    /// True whether an annulus angle lies on the free ground-surface arc
    /// (the arc between the joint images not containing the far field at
    /// `theta = 0`).
    pub fn on_free_arc(&self, theta: f64) -> bool {
        let tau = 2.0 * std::f64::consts::PI;
        let t = theta.rem_euclid(tau);
        let lo = self.map.theta2.rem_euclid(tau);
        let hi = self.map.theta1.rem_euclid(tau);
        t > lo && t < hi
    }
}

fn sample_from(
    p: &field::RingPoint,
    rho: f64,
    theta: f64,
    mat: &MaterialParams,
    filtered: bool,
) -> FieldSample {
    let g = mat.shear_modulus_kpa();
    let sigma_rho = p.radial.re;
    let sigma_theta = p.trace - sigma_rho;
    let (sigma_x, sigma_y, tau_xy) = if p.dz.is_finite() {
        let rot = (p.zeta.conj() / p.zeta) * (p.dz.conj() / p.dz);
        let dev = (Complex64::new(p.trace, 0.0) - 2.0 * p.radial.conj()) * rot;
        (
            0.5 * (p.trace - dev.re),
            0.5 * (p.trace + dev.re),
            0.5 * dev.im,
        )
    } else {
        (0.0, 0.0, 0.0)
    };
    FieldSample {
        rho,
        theta,
        z: p.z,
        sigma_rho,
        sigma_theta,
        tau_rho_theta: p.radial.im,
        sigma_x,
        sigma_y,
        tau_xy,
        u: p.displacement.re / (2.0 * g),
        v: p.displacement.im / (2.0 * g),
        filtered,
    }
}

/// Boundary-condition residual metrics of a solved case.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct BoundaryResiduals {
    /// Max traction magnitude on the free surface arc (kPa), joints excluded.
    pub free_traction_max: f64,
    /// Max displacement-series magnitude on the constrained arc (kPa m),
    /// joints excluded; includes the far-field point when the exclusion
    /// swallows the whole arc.
    pub constrained_displacement_max: f64,
    /// Relative L2 mismatch of the reconstructed cavity traction against the
    /// prescribed excavation traction.
    pub cavity_traction_rel_l2: f64,
    /// Angular joint exclusion applied (degrees).
    pub joint_exclusion_deg: f64,
    /// Free-arc and constrained-arc sample counts that survived exclusion.
    pub free_samples: usize,
    pub constrained_samples: usize,
}

/// Evaluates the three boundary residuals on `count`-point angular grids,
/// excluding `exclusion_deg` around each joint.
///
/// The mixed boundary conditions switch discontinuously at the joints, so
/// pointwise convergence there is impossible for any truncation; hence the
/// exclusion. The far-field point `theta = 0` is always added to the
/// constrained set so the metric never degenerates to an empty maximum when
/// the joints crowd the far-field arc.
pub fn boundary_residuals(
    sol: &CaseSolution,
    exclusion_deg: f64,
    count: usize,
    filtered: bool,
) -> Result<BoundaryResiduals> {
    let tau = 2.0 * std::f64::consts::PI;
    let excl = exclusion_deg.to_radians();
    let near_joint = |t: f64| {
        let d1 = (t - sol.map.theta1).rem_euclid(tau);
        let d1 = d1.min(tau - d1);
        let d2 = (t - sol.map.theta2).rem_euclid(tau);
        let d2 = d2.min(tau - d2);
        d1 < excl || d2 < excl
    };

    let weights = filtered.then(|| sol.lanczos());
    let surface = field::build_ring_series(
        &sol.state,
        &sol.map,
        sol.material.kappa(),
        1.0,
        weights.as_ref(),
    )?;
    let mut free_max: f64 = 0.0;
    let mut cons_max: f64 = 0.0;
    let mut free_n = 0usize;
    let mut cons_n = 0usize;
    for i in 0..count {
        let theta = tau * (i as f64 + 0.5) / count as f64;
        if near_joint(theta) {
            continue;
        }
        let p = surface.eval(&sol.map, theta, weights.as_ref())?;
        if sol.on_free_arc(theta) {
            free_max = free_max.max(p.radial.norm());
            free_n += 1;
        } else {
            cons_max = cons_max.max(p.displacement.norm());
            cons_n += 1;
        }
    }
    // Far-field anchor of the constrained arc.
    let p0 = surface.eval(&sol.map, 0.0, weights.as_ref())?;
    cons_max = cons_max.max(p0.displacement.norm());
    cons_n += 1;

    let cavity = field::build_ring_series(
        &sol.state,
        &sol.map,
        sol.material.kappa(),
        sol.map.alpha(),
        weights.as_ref(),
    )?;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..count {
        let theta = tau * (i as f64 + 0.5) / count as f64;
        let p = cavity.eval(&sol.map, theta, weights.as_ref())?;
        let frame = p.zeta * p.dz;
        let reconstructed = -(frame / frame.norm()) * p.radial;
        // The clockwise trace direction is minus the ring velocity.
        let tangent_cw = -(Complex64::new(0.0, 1.0) * frame) / frame.norm();
        let prescribed = cavity_traction(p.z, tangent_cw, &sol.material)?;
        num += (reconstructed - prescribed).norm_sqr();
        den += prescribed.norm_sqr();
    }
    let rel_l2 = if den > 0.0 { (num / den).sqrt() } else { 0.0 };

    Ok(BoundaryResiduals {
        free_traction_max: free_max,
        constrained_displacement_max: cons_max,
        cavity_traction_rel_l2: rel_l2,
        joint_exclusion_deg: exclusion_deg,
        free_samples: free_n,
        constrained_samples: cons_n,
    })
}

/// Result of a one-parameter convergence sweep.
#[derive(Clone, Debug, serde::Serialize)]
pub struct SweepResult {
    pub values: Vec<f64>,
    /// Hoop-stress traces along the cavity boundary, one per value, sampled
    /// at shared physically-anchored points.
    pub traces: Vec<Vec<f64>>,
    /// Sup-norm differences between consecutive traces.
    pub sup_diffs: Vec<f64>,
    /// Per-value solve outcomes (`None` means the member failed; the sweep
    /// continues).
    pub errors: Vec<Option<String>>,
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Solves the same cavity for each normalized free-surface half-width and
/// compares cavity hoop-stress traces at fixed w-plane angles.
///
/// `spec_for` regenerates the boundary for a half-width (the joints move
/// with it); pass `|x0| build_case_boundary(&preset, x0)` for the bundled
/// generators.
pub fn sweep_x0(
    spec_for: impl Fn(f64) -> Result<CavitySpec>,
    material: &MaterialParams,
    cfg: &SolverConfig,
    map_options: &MapOptions,
    x0_values: &[f64],
    phi_count: usize,
    filtered: bool,
) -> Result<SweepResult> {
    let phis: Vec<f64> = (0..phi_count)
        .map(|i| 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / phi_count as f64)
        .collect();
    let mut traces = Vec::new();
    let mut errors = Vec::new();
    for &x0 in x0_values {
        let run = spec_for(x0)
            .and_then(|spec| solve_case(&spec, material, cfg, map_options))
            .and_then(|sol| sol.cavity_trace_at_w_angles(&phis, filtered));
        match run {
            Ok(samples) => {
                traces.push(samples.iter().map(|s| s.sigma_theta).collect());
                errors.push(None);
            }
            Err(e) => {
                traces.push(Vec::new());
                errors.push(Some(e.to_string()));
            }
        }
    }
    let sup_diffs = successive_diffs(&traces);
    Ok(SweepResult {
        values: x0_values.to_vec(),
        traces,
        sup_diffs,
        errors,
    })
}

/// Solves one composed case at several coefficient truncations, reusing the
/// map, kernel and cavity data across members.
pub fn sweep_n0(
    spec: &CavitySpec,
    material: &MaterialParams,
    base: &SolverConfig,
    map_options: &MapOptions,
    n0_values: &[usize],
    phi_count: usize,
    filtered: bool,
) -> Result<SweepResult> {
    let map = compose(spec, map_options)?;
    let kappa = material.kappa();
    let kernel = kernel_coeffs(kappa, map.theta1, map.theta2, base.m_trunc)?;
    let cavity_data = cavity_rhs(&map, material, base.m_trunc)?;
    let inner_ring = ring_expand(&map, map.alpha(), base.m_trunc)?;
    let phis: Vec<f64> = (0..phi_count)
        .map(|i| 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / phi_count as f64)
        .collect();
    let thetas: Vec<f64> = phis
        .iter()
        .map(|&phi| {
            Ok(map
                .verruijt
                .zeta_of_w(Complex64::from_polar(1.0, phi))?
                .arg())
        })
        .collect::<Result<_>>()?;

    let mut traces = Vec::new();
    let mut errors = Vec::new();
    for &n0 in n0_values {
        let cfg = SolverConfig { n0, ..*base };
        let run = (|| -> Result<Vec<f64>> {
            cfg.validate()?;
            let systems = assemble_systems(&kernel, &cfg)?;
            let state = iterate(&systems, &kernel, &cavity_data, &inner_ring, &cfg)?;
            let weights = filtered.then(|| lanczos_weights(n0));
            let series =
                field::build_ring_series(&state, &map, kappa, map.alpha(), weights.as_ref())?;
            thetas
                .iter()
                .map(|&t| {
                    let p = series.eval(&map, t, weights.as_ref())?;
                    Ok(p.trace - p.radial.re)
                })
                .collect()
        })();
        match run {
            Ok(trace) => {
                traces.push(trace);
                errors.push(None);
            }
            Err(e) => {
                traces.push(Vec::new());
                errors.push(Some(e.to_string()));
            }
        }
    }
    let sup_diffs = successive_diffs(&traces);
    Ok(SweepResult {
        values: n0_values.iter().map(|&n| n as f64).collect(),
        traces,
        sup_diffs,
        errors,
    })
}

fn successive_diffs(traces: &[Vec<f64>]) -> Vec<f64> {
    let mut out = Vec::new();
    for pair in traces.windows(2) {
        if pair[0].is_empty() || pair[1].is_empty() {
            out.push(f64::NAN);
        } else {
            out.push(sup_diff(&pair[0], &pair[1]));
        }
    }
    out
}
