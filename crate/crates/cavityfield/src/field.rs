//! Reconstruction of stresses and displacements from solved coefficients,
//! with optional Lanczos filtering, plus superposition of the initial field.
//!
//! All ring evaluation goes through per-ring coefficient tables: for a fixed
//! radius the angular series coefficients are assembled once (including the
//! ring-expansion convolutions), after which each angle costs one short
//! two-sided series sum.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::annulus::CompositeMap;
use crate::geometry::{initial_stress, MaterialParams};
use crate::series::{ring_expand, SeriesCoeffs};
use crate::solver::SolverState;
use crate::{Error, Result};

/// Sigma-factor weights damping the Gibbs oscillation of truncated series.
#[derive(Clone, Debug)]
pub struct LanczosWeights {
    order: i32,
    weights: Vec<f64>,
}

/// `L_0 = 1`, `L_k = sin(k pi / n0) / (k pi / n0)` for `0 < |k| <= n0`.
pub fn lanczos_weights(n0: usize) -> LanczosWeights {
    assert!(n0 >= 1);
    let mut weights = Vec::with_capacity(n0 + 1);
    weights.push(1.0);
    for k in 1..=n0 {
        let x = k as f64 * std::f64::consts::PI / n0 as f64;
        weights.push(x.sin() / x);
    }
    LanczosWeights {
        order: n0 as i32,
        weights,
    }
}

impl LanczosWeights {
    /// Weight for series index `k` (even in `k`, zero beyond the order).
    #[inline]
    pub fn get(&self, k: i32) -> f64 {
        let idx = k.unsigned_abs() as usize;
        if idx <= self.order as usize {
            self.weights[idx]
        } else {
            0.0
        }
    }

    pub fn order(&self) -> i32 {
        self.order
    }
}

/// Evaluates a two-sided series at unit-modulus `sigma`.
///
/// Without weights this is the raw truncated sum, arithmetic untouched (no
/// multiplications by one); with weights each index-`k` term is scaled by
/// `L_k`.
pub fn eval_series(
    coeffs: &SeriesCoeffs,
    sigma: Complex64,
    weights: Option<&LanczosWeights>,
) -> Complex64 {
    match weights {
        None => coeffs.eval(sigma),
        Some(w) => {
            let inv = 1.0 / sigma;
            let mut acc = coeffs.get(0) * w.get(0);
            let mut pos = Complex64::new(1.0, 0.0);
            let mut neg = Complex64::new(1.0, 0.0);
            for k in 1..=coeffs.order() {
                pos *= sigma;
                neg *= inv;
                acc += w.get(k) * (coeffs.get(k) * pos) + w.get(-k) * (coeffs.get(-k) * neg);
            }
            acc
        }
    }
}

/// Rigid-body displacement constant forcing the surface displacement series
/// to vanish at the image of infinity; under filtering the same weights are
/// applied to the kept unit powers.
pub fn rigid_constant(
    state: &SolverState,
    kappa: f64,
    weights: Option<&LanczosWeights>,
) -> Complex64 {
    let n0 = state.a.order();
    let mut c0 = Complex64::default();
    for k in -n0..=n0 {
        if k == 0 {
            continue;
        }
        let term = (kappa * state.a.get(k - 1) + state.b.get(k - 1)) / k as f64;
        c0 -= match weights {
            None => term,
            Some(w) => w.get(k) * term,
        };
    }
    c0
}

/// Per-ring angular series: traction kernel, trace kernel and displacement,
/// ready for repeated evaluation along the ring.
pub struct RingSeries {
    pub rho: f64,
    traction: SeriesCoeffs,
    trace: SeriesCoeffs,
    displacement: SeriesCoeffs,
}

/// Assembles the ring tables at radius `rho` from a solved state.
pub fn build_ring_series(
    state: &SolverState,
    map: &CompositeMap,
    kappa: f64,
    rho: f64,
    weights: Option<&LanczosWeights>,
) -> Result<RingSeries> {
    let n0 = state.a.order();
    let m = state.config.m_trunc;
    let ring = ring_expand(map, rho, m)?;
    let c0 = rigid_constant(state, kappa, weights);

    let mut pow = vec![0.0; (2 * (n0 + 2) + 1) as usize];
    for e in -(n0 + 2)..=(n0 + 2) {
        pow[(e + n0 + 2) as usize] = rho.powi(e);
    }
    let rp = |e: i32| pow[(e + n0 + 2) as usize];

    let mut traction = SeriesCoeffs::zeros(n0);
    let mut trace = SeriesCoeffs::zeros(n0);
    let mut displacement = SeriesCoeffs::zeros(n0);
    let m_i = ring.coeffs.order();
    for k in -n0..=n0 {
        let mut conv = Complex64::default();
        for l in (k + 1 - n0).max(-m_i)..=(k + 1 + n0).min(m_i) {
            let f = ring.coeffs.get(l);
            if f != Complex64::default() {
                conv += f * state.a.get(l - k - 1).conj() * rp(l - k - 2);
            }
        }
        traction.set(
            k,
            state.a.get(k) * rp(k) - state.b.get(k) * rp(-k - 2) + (k + 1) as f64 * conv,
        );
        trace.set(k, state.a.get(k) * rp(k));
        if k != 0 {
            let mut gconv = Complex64::default();
            for l in (k - n0).max(-m_i)..=(k + n0).min(m_i) {
                let f = ring.coeffs.get(l);
                if f != Complex64::default() {
                    gconv += f * state.a.get(l - k).conj() * rp(l - k);
                }
            }
            displacement.set(
                k,
                kappa * state.a.get(k - 1) * rp(k) / k as f64
                    + state.b.get(k - 1) * rp(-k) / k as f64
                    - gconv,
            );
        }
    }
    let mut g0 = c0 + (kappa * state.a.get(-1) - state.b.get(-1)) * rho.ln();
    for l in -n0.min(m_i)..=n0.min(m_i) {
        let f = ring.coeffs.get(l);
        if f != Complex64::default() {
            g0 -= f * state.a.get(l).conj() * rp(l);
        }
    }
    displacement.set(0, g0);

    Ok(RingSeries {
        rho,
        traction,
        trace,
        displacement,
    })
}

/// Raw curvilinear evaluation at one angle of a ring table.
pub struct RingPoint {
    pub zeta: Complex64,
    /// Physical image; infinite at the image of infinity (`zeta = 1`).
    pub z: Complex64,
    /// `sigma_rho + i tau_rho_theta` of the excavation field.
    pub radial: Complex64,
    /// `sigma_theta + sigma_rho` of the excavation field.
    pub trace: f64,
    /// `2 G (u + i v)` of the excavation field (kPa m).
    pub displacement: Complex64,
    /// Composite map derivative at the point (infinite at `zeta = 1`).
    pub dz: Complex64,
}

impl RingSeries {
    pub fn eval(
        &self,
        map: &CompositeMap,
        theta: f64,
        weights: Option<&LanczosWeights>,
    ) -> Result<RingPoint> {
        let sigma = Complex64::from_polar(1.0, theta);
        let zeta = self.rho * sigma;
        let g0 = eval_series(&self.displacement, sigma, weights);
        if (zeta - Complex64::new(1.0, 0.0)).norm() < 1e-12 {
            // Image of infinity: the map derivative blows up, so tractions
            // and the stress trace vanish in the limit.
            return Ok(RingPoint {
                zeta,
                z: Complex64::new(f64::INFINITY, 0.0),
                radial: Complex64::default(),
                trace: 0.0,
                displacement: g0,
                dz: Complex64::new(f64::INFINITY, 0.0),
            });
        }
        let dz = map.dz_dzeta(zeta)?;
        let radial = eval_series(&self.traction, sigma, weights) / dz;
        let trace = 4.0 * (eval_series(&self.trace, sigma, weights) / dz).re;
        Ok(RingPoint {
            zeta,
            z: map.z_of_zeta(zeta)?,
            radial,
            trace,
            displacement: g0,
            dz,
        })
    }
}

/// One evaluated sample; stresses in kPa, displacements in meters.
#[derive(Clone, Copy, Debug)]
pub struct FieldSample {
    pub rho: f64,
    pub theta: f64,
    pub z: Complex64,
    pub sigma_rho: f64,
    pub sigma_theta: f64,
    pub tau_rho_theta: f64,
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub tau_xy: f64,
    pub u: f64,
    pub v: f64,
    pub filtered: bool,
}

fn sample_from_ring_point(
    p: &RingPoint,
    rho: f64,
    theta: f64,
    shear_modulus: f64,
    filtered: bool,
) -> FieldSample {
    let sigma_rho = p.radial.re;
    let tau = p.radial.im;
    let sigma_theta = p.trace - sigma_rho;
    // Deviator rotation into the rectangular frame; the factor has unit
    // modulus, the trace carries over unchanged.
    let (sigma_x, sigma_y, tau_xy) = if p.dz.is_finite() {
        let rot = (p.zeta.conj() / p.zeta) * (p.dz.conj() / p.dz);
        let deviator = (Complex64::new(p.trace, 0.0) - 2.0 * p.radial.conj()) * rot;
        (
            0.5 * (p.trace - deviator.re),
            0.5 * (p.trace + deviator.re),
            0.5 * deviator.im,
        )
    } else {
        (0.0, 0.0, 0.0)
    };
    let disp = p.displacement / (2.0 * shear_modulus);
    FieldSample {
        rho,
        theta,
        z: p.z,
        sigma_rho,
        sigma_theta,
        tau_rho_theta: tau,
        sigma_x,
        sigma_y,
        tau_xy,
        u: disp.re,
        v: disp.im,
        filtered,
    }
}

/// Excavation-field samples along the ring `|zeta| = rho` at the given
/// angles. Initial stresses are not superposed here; see
/// [`physical_fields`] for totals.
pub fn ring_fields(
    state: &SolverState,
    map: &CompositeMap,
    mat: &MaterialParams,
    rho: f64,
    thetas: &[f64],
    weights: Option<&LanczosWeights>,
) -> Result<Vec<FieldSample>> {
    let series = build_ring_series(state, map, mat.kappa(), rho, weights)?;
    let g = mat.shear_modulus_kpa();
    thetas
        .iter()
        .map(|&theta| {
            let p = series.eval(map, theta, weights)?;
            Ok(sample_from_ring_point(&p, rho, theta, g, weights.is_some()))
        })
        .collect()
}

/// A request point for [`physical_fields`].
#[derive(Clone, Copy, Debug)]
pub enum FieldPoint {
    Physical(Complex64),
    Annulus { rho: f64, theta: f64 },
}

/// Total-field samples (excavation plus initial stresses) at physical or
/// annulus points; the curvilinear components are the final polar ones,
/// back-rotated with the same unit-modulus factor.
pub fn physical_fields(
    state: &SolverState,
    map: &CompositeMap,
    mat: &MaterialParams,
    points: &[FieldPoint],
    weights: Option<&LanczosWeights>,
) -> Result<Vec<FieldSample>> {
    let kappa = mat.kappa();
    let g = mat.shear_modulus_kpa();
    let mut tables: BTreeMap<u64, RingSeries> = BTreeMap::new();
    let mut out = Vec::with_capacity(points.len());
    for point in points {
        let (rho, theta) = match point {
            FieldPoint::Annulus { rho, theta } => (*rho, *theta),
            FieldPoint::Physical(z) => {
                let zeta = invert_map(map, *z)?;
                (zeta.norm(), zeta.arg())
            }
        };
        let alpha = map.alpha();
        if !(alpha - 1e-9..=1.0 + 1e-9).contains(&rho) {
            return Err(Error::OutsideDomain(format!(
                "radius {rho} outside the annulus [{alpha}, 1]"
            )));
        }
        let rho = rho.clamp(alpha, 1.0);
        let table = match tables.entry(rho.to_bits()) {
            std::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(build_ring_series(state, map, kappa, rho, weights)?)
            }
        };
        let p = table.eval(map, theta, weights)?;
        if !p.z.is_finite() {
            return Err(Error::OutsideDomain(
                "total fields are undefined at the image of infinity".into(),
            ));
        }
        let mut sample = sample_from_ring_point(&p, rho, theta, g, weights.is_some());
        let head = initial_stress(p.z, mat)?;
        sample.sigma_x += head.sigma_x;
        sample.sigma_y += head.sigma_y;
        sample.tau_xy += head.tau_xy;
        // Final polar components per the back-rotation of the total field.
        let rot = (p.zeta.conj() / p.zeta) * (p.dz.conj() / p.dz);
        let deviator =
            Complex64::new(sample.sigma_y - sample.sigma_x, 2.0 * sample.tau_xy) * rot.conj();
        let trace = sample.sigma_x + sample.sigma_y;
        sample.sigma_rho = 0.5 * (trace - deviator.re);
        sample.sigma_theta = 0.5 * (trace + deviator.re);
        sample.tau_rho_theta = 0.5 * deviator.im;
        out.push(sample);
    }
    Ok(out)
}

/// Inverts the composite map by damped Newton from the best seed of a coarse
/// annulus grid.
pub fn invert_map(map: &CompositeMap, z_target: Complex64) -> Result<Complex64> {
    let alpha = map.alpha();
    let mut best = Complex64::from_polar(0.5 * (1.0 + alpha), 1.0);
    let mut best_dist = f64::INFINITY;
    for i in 0..=12 {
        let rho = alpha + (0.9999 - alpha) * i as f64 / 12.0;
        for j in 0..72 {
            let zeta =
                Complex64::from_polar(rho, 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / 72.0);
            if let Ok(z) = map.z_of_zeta(zeta) {
                let d = (z - z_target).norm();
                if d < best_dist {
                    best_dist = d;
                    best = zeta;
                }
            }
        }
    }
    let tol = 1e-10 * (1.0 + z_target.norm());
    let mut zeta = best;
    let mut err = best_dist;
    for _ in 0..50 {
        if err <= tol {
            break;
        }
        let dz = map.dz_dzeta(zeta)?;
        let residual = map.z_of_zeta(zeta)? - z_target;
        let mut step = residual / dz;
        // Damp until the residual actually shrinks.
        let mut improved = false;
        for _ in 0..20 {
            let cand = zeta - step;
            if let Ok(z) = map.z_of_zeta(cand) {
                let e = (z - z_target).norm();
                if e < err {
                    zeta = cand;
                    err = e;
                    improved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if err > tol {
        return Err(Error::OutsideDomain(format!(
            "inverse mapping did not converge at {z_target} (residual {err:.3e})"
        )));
    }
    let rho = zeta.norm();
    if !(alpha - 1e-6..=1.0 + 1e-6).contains(&rho) {
        return Err(Error::OutsideDomain(format!(
            "point {z_target} maps to |zeta| = {rho}, outside the annulus"
        )));
    }
    Ok(zeta)
}
