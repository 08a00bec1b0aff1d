//! First mapping step: Charge Simulation Method conformal map between the
//! cavity exterior in the physical plane and the exterior of the unit circle,
//! plus the fitted Laurent-type series for the backward direction.
//!
//! Forward: `w(z) = (z - z_c) exp(G + sum Q_k ln((z - Z_k)/(z - z_0)))` with
//! real charges `Q_k` at points `Z_k` just inside the cavity and the Robin
//! constant `G`. The ratio inside the logarithm keeps the argument free of
//! branch-cut jumps everywhere outside the cavity. Backward: a truncated
//! Laurent series `z(w) = sum q_k w^-k`, `k = -1 .. len-2`, fitted through
//! the collocation correspondences.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::geometry::{point_in_polygon, CavitySpec};
use crate::linalg;
use crate::{Error, Result};

/// Condition estimate above which mapping diagnostics carry a warning.
pub const CONDITION_WARNING: f64 = 1e10;

/// Solved forward map: charges, charge points and the Robin constant.
#[derive(Clone, Debug)]
pub struct CsmForwardMap {
    /// Robin constant of the cavity exterior.
    pub robin_constant: f64,
    /// Charge locations, nominally strictly inside the cavity trace.
    pub charge_points: Vec<Complex64>,
    /// Real charges, summing to zero.
    pub charges: Vec<f64>,
    /// Cavity center (also the branch anchor `z_0`).
    pub center: Complex64,
    /// Pivot-ratio condition estimate of the collocation solve.
    pub condition_estimate: f64,
    /// Charge points that fell outside the trace (geometry warning, not an
    /// error; the map may still collocate acceptably).
    pub charge_points_outside: usize,
}

impl CsmForwardMap {
    /// Forward evaluation `w(z)`; `z` must stay away from the charge points
    /// and the center.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let anchor = z - self.center;
        if anchor.norm() < 1e-14 {
            return Err(Error::OutsideDomain(format!(
                "z = {z} coincides with the branch anchor"
            )));
        }
        let mut exponent = Complex64::new(self.robin_constant, 0.0);
        for (q, zk) in self.charges.iter().zip(&self.charge_points) {
            let d = z - zk;
            if d.norm() < 1e-14 {
                return Err(Error::OutsideDomain(format!(
                    "z = {z} coincides with a charge point"
                )));
            }
            exponent += q * (d / anchor).ln();
        }
        Ok(anchor * exponent.exp())
    }

    /// Analytic derivative `dw/dz`.
    pub fn deriv(&self, z: Complex64) -> Result<Complex64> {
        let w = self.eval(z)?;
        let anchor = z - self.center;
        let mut s = 1.0 / anchor;
        for (q, zk) in self.charges.iter().zip(&self.charge_points) {
            s += q * (1.0 / (z - zk) - 1.0 / anchor);
        }
        Ok(w * s)
    }

    pub fn charges_sum(&self) -> f64 {
        self.charges.iter().sum()
    }
}

/// Charge point layout: each collocation point offset along the inward
/// normal by `k2` times the mean neighбor spacing, with cyclic wraparound.
fn charge_points(points: &[Complex64], k2: f64) -> Vec<Complex64> {
    let n = points.len();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let prev = points[(k + n - 1) % n];
        let next = points[(k + 1) % n];
        let spacing = 0.5 * ((next - points[k]).norm() + (points[k] - prev).norm());
        let angle = (next - prev).arg() - std::f64::consts::FRAC_PI_2;
        out.push(points[k] + k2 * spacing * Complex64::from_polar(1.0, angle));
    }
    out
}

/// Solves the collocation system for the charges and the Robin constant.
///
/// The assembled system has `2N + 1` unknowns: the `2N` charges plus the
/// Robin constant, with the zero-sum charge condition as the last row.
pub fn solve_forward(spec: &CavitySpec, k2: f64) -> Result<CsmForwardMap> {
    let n = spec.points.len();
    if n < 16 {
        return Err(Error::InvalidGeometry(format!(
            "charge simulation needs at least 16 collocation points, got {n}"
        )));
    }
    if !(k2 > 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "assignment factor must be positive, got {k2}"
        )));
    }
    let zk = charge_points(&spec.points, k2);
    let outside = zk
        .iter()
        .filter(|p| !point_in_polygon(**p, &spec.points))
        .count();

    let mut matrix = DMatrix::<f64>::zeros(n + 1, n + 1);
    let mut rhs = DVector::<f64>::zeros(n + 1);
    for i in 0..n {
        for (j, z) in zk.iter().enumerate() {
            matrix[(i, j)] = (spec.points[i] - z).norm().ln();
        }
        matrix[(i, n)] = 1.0;
        rhs[i] = -(spec.points[i] - spec.center).norm().ln();
    }
    for j in 0..n {
        matrix[(n, j)] = 1.0;
    }
    let (sol, condition) = linalg::solve_real(matrix, rhs, "charge collocation")?;
    Ok(CsmForwardMap {
        robin_constant: sol[n],
        charge_points: zk,
        charges: sol.as_slice()[..n].to_vec(),
        center: spec.center,
        condition_estimate: condition,
        charge_points_outside: outside,
    })
}

/// Fitted backward series `z(w) = sum q_k w^-k`, `k = -1 .. coeffs.len()-2`.
#[derive(Clone, Debug)]
pub struct CsmBackwardMap {
    /// Coefficients ordered by exponent `-k` with `k` starting at -1, i.e.
    /// `coeffs[0]` multiplies `w`, `coeffs[1]` is the constant term.
    pub coeffs: Vec<Complex64>,
    pub condition_estimate: f64,
}

impl CsmBackwardMap {
    /// `z(w)`. Nominally `|w| >= 1`; moderately smaller moduli are permitted
    /// (the companion points of the ring expansions need them) with accuracy
    /// degrading gracefully.
    pub fn eval(&self, w: Complex64) -> Result<Complex64> {
        if w.norm() < 1e-14 {
            return Err(Error::OutsideDomain(
                "backward series is singular at w = 0".into(),
            ));
        }
        let inv = 1.0 / w;
        let mut acc = Complex64::default();
        // Horner in 1/w over coeffs[1..], then the linear term.
        for c in self.coeffs.iter().skip(1).rev() {
            acc = acc * inv + c;
        }
        Ok(acc + self.coeffs[0] * w)
    }

    /// `dz/dw`.
    pub fn deriv(&self, w: Complex64) -> Result<Complex64> {
        if w.norm() < 1e-14 {
            return Err(Error::OutsideDomain(
                "backward series is singular at w = 0".into(),
            ));
        }
        let inv = 1.0 / w;
        let mut acc = Complex64::default();
        let len = self.coeffs.len();
        // d/dw of q_k w^-k is -k q_k w^{-k-1}; k runs 1..=len-2 here.
        for idx in (2..len).rev() {
            let k = (idx - 1) as f64;
            acc = acc * inv - k * self.coeffs[idx] * inv;
        }
        Ok(acc * inv + self.coeffs[0])
    }
}

/// Fits the backward series through the square point-correspondence system:
/// one Laurent coefficient per collocation point.
pub fn fit_backward(map: &CsmForwardMap, spec: &CavitySpec) -> Result<CsmBackwardMap> {
    fit_backward_with_len(map, spec, spec.points.len())
}

/// Fits a backward series of `series_len` coefficients to all collocation
/// correspondences; when `series_len < 2N` the system is solved in least
/// squares.
///
/// The square fit interpolates exactly but its Vandermonde-type matrix turns
/// ill-conditioned beyond roughly 150 points; the oversampled least-squares
/// fit stays near-orthogonal at any collocation density and is what the
/// solve pipeline uses for fine traces.
pub fn fit_backward_with_len(
    map: &CsmForwardMap,
    spec: &CavitySpec,
    series_len: usize,
) -> Result<CsmBackwardMap> {
    let n = spec.points.len();
    if series_len < 4 || series_len > n {
        return Err(Error::InvalidGeometry(format!(
            "backward series length {series_len} must lie in [4, {n}]"
        )));
    }
    let mut images = Vec::with_capacity(n);
    for p in &spec.points {
        images.push(map.eval(*p)?);
    }
    let matrix = DMatrix::<Complex64>::from_fn(n, series_len, |i, j| {
        // Column j carries exponent -(j - 1): w, 1, w^-1, ...
        let e = 1 - j as i32;
        images[i].powi(e)
    });
    let rhs = DVector::from_iterator(n, spec.points.iter().copied());
    let (coeffs, condition) = if series_len == n {
        linalg::solve_complex(matrix, rhs, "backward point correspondence")?
    } else {
        linalg::lstsq_complex(&matrix, &rhs, "backward least squares")?
    };
    Ok(CsmBackwardMap {
        coeffs: coeffs.as_slice().to_vec(),
        condition_estimate: condition,
    })
}
