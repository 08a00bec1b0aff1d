//! Riemann–Hilbert kernel coefficients on the annulus, sampled ring
//! expansions, and the cavity right-hand-side coefficients.
//!
//! The kernel `X(zeta) = (zeta - t1)^(-1/2 - i lambda) (zeta - t2)^(-1/2 + i
//! lambda)` with `lambda = ln(kappa) / 2 pi` is expanded into a power series
//! about the origin and a series in `1/zeta` about infinity. With principal
//! arguments for the joint points the two expansions are branch-consistent:
//! their boundary values agree on the free arc and satisfy
//! `kappa X_in = -X_out` on the constrained arc, which is exactly the jump
//! structure the mixed boundary problem needs.

use num_complex::Complex64;

use crate::annulus::CompositeMap;
use crate::geometry::MaterialParams;
use crate::{Error, Result};

/// Two-sided coefficient vector indexed by `-order ..= order`; indices
/// outside the stored range read as zero.
#[derive(Clone, Debug)]
pub struct SeriesCoeffs {
    order: i32,
    data: Vec<Complex64>,
}

impl SeriesCoeffs {
    pub fn zeros(order: i32) -> Self {
        assert!(order >= 0);
        Self {
            order,
            data: vec![Complex64::default(); 2 * order as usize + 1],
        }
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    #[inline]
    pub fn get(&self, k: i32) -> Complex64 {
        if k.abs() > self.order {
            Complex64::default()
        } else {
            self.data[(k + self.order) as usize]
        }
    }

    #[inline]
    pub fn set(&mut self, k: i32, value: Complex64) {
        debug_assert!(k.abs() <= self.order);
        self.data[(k + self.order) as usize] = value;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, Complex64)> + '_ {
        self.data
            .iter()
            .enumerate()
            .map(move |(i, c)| (i as i32 - self.order, *c))
    }

    /// Evaluates `sum_k c_k sigma^k` at a unit-modulus `sigma` by incremental
    /// powers.
    pub fn eval(&self, sigma: Complex64) -> Complex64 {
        let inv = 1.0 / sigma;
        let mut acc = self.get(0);
        let mut pos = Complex64::new(1.0, 0.0);
        let mut neg = Complex64::new(1.0, 0.0);
        for k in 1..=self.order {
            pos *= sigma;
            neg *= inv;
            acc += self.get(k) * pos + self.get(-k) * neg;
        }
        acc
    }
}

/// Kernel data of the homogeneous Riemann–Hilbert problem.
#[derive(Clone, Debug)]
pub struct AnnulusCoeffs {
    /// `ln(kappa) / 2 pi`.
    pub lambda: f64,
    /// Joint points `e^{i theta1}`, `e^{i theta2}` on the unit circle.
    pub joint1: Complex64,
    pub joint2: Complex64,
    /// Interior expansion coefficients of the kernel, indices `0..=order`.
    pub interior: Vec<Complex64>,
    /// Exterior expansion coefficients (of powers `zeta^-k`), `0..=order+1`;
    /// the first two are exactly 0 and 1.
    pub exterior: Vec<Complex64>,
    /// Running binomial products feeding both expansions.
    pub binom: Vec<Complex64>,
    theta1: f64,
    theta2: f64,
}

/// Builds the kernel expansions up to `order` for a Kolosov parameter and
/// the two joint angles.
pub fn kernel_coeffs(kappa: f64, theta1: f64, theta2: f64, order: usize) -> Result<AnnulusCoeffs> {
    if !(kappa > 1.0) {
        return Err(Error::InvalidMaterial(format!(
            "Kolosov parameter must exceed 1, got {kappa}"
        )));
    }
    if order < 8 {
        return Err(Error::InvalidConfig {
            field: "m_trunc".into(),
            message: format!("kernel truncation must be at least 8, got {order}"),
        });
    }
    let lambda = kappa.ln() / (2.0 * std::f64::consts::PI);
    let exp_in = Complex64::new(-0.5, -lambda);
    let joint1 = Complex64::from_polar(1.0, theta1);
    let joint2 = Complex64::from_polar(1.0, theta2);

    // Running binomial products; the ratio form keeps magnitudes tame.
    let mut binom = Vec::with_capacity(order + 2);
    binom.push(Complex64::new(1.0, 0.0));
    for k in 1..=order + 1 {
        let prev = binom[k - 1];
        binom.push(prev * (Complex64::new(0.5 - k as f64, -lambda) / k as f64));
    }

    let mut j1_neg = Vec::with_capacity(order + 2);
    let mut j2_neg = Vec::with_capacity(order + 2);
    let mut j1_pos = Vec::with_capacity(order + 2);
    let mut j2_pos = Vec::with_capacity(order + 2);
    j1_neg.push(Complex64::new(1.0, 0.0));
    j2_neg.push(Complex64::new(1.0, 0.0));
    j1_pos.push(Complex64::new(1.0, 0.0));
    j2_pos.push(Complex64::new(1.0, 0.0));
    let (inv1, inv2) = (1.0 / joint1, 1.0 / joint2);
    for k in 1..=order + 1 {
        j1_neg.push(j1_neg[k - 1] * inv1);
        j2_neg.push(j2_neg[k - 1] * inv2);
        j1_pos.push(j1_pos[k - 1] * joint1);
        j2_pos.push(j2_pos[k - 1] * joint2);
    }

    // Principal fractional powers of the joints fix the interior branch.
    let lead = -((exp_in * Complex64::new(0.0, theta1)).exp()
        * (exp_in.conj() * Complex64::new(0.0, theta2)).exp());
    let mut interior = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let mut conv = Complex64::default();
        for l in 0..=k {
            conv += binom[l] * binom[k - l].conj() * j1_neg[l] * j2_neg[k - l];
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        interior.push(lead * sign * conv);
    }

    let mut exterior = Vec::with_capacity(order + 2);
    exterior.push(Complex64::default());
    for k in 1..=order + 1 {
        let mut conv = Complex64::default();
        for l in 0..k {
            conv += binom[l] * binom[k - 1 - l].conj() * j1_pos[l] * j2_pos[k - 1 - l];
        }
        let sign = if (k - 1) % 2 == 0 { 1.0 } else { -1.0 };
        exterior.push(sign * conv);
    }

    Ok(AnnulusCoeffs {
        lambda,
        joint1,
        joint2,
        interior,
        exterior,
        binom,
        theta1,
        theta2,
    })
}

impl AnnulusCoeffs {
    /// Interior coefficient, zero outside the stored range.
    #[inline]
    pub fn interior_coeff(&self, k: i32) -> Complex64 {
        if k < 0 || k as usize >= self.interior.len() {
            Complex64::default()
        } else {
            self.interior[k as usize]
        }
    }

    /// Exterior coefficient (of `zeta^-k`), zero outside the stored range.
    #[inline]
    pub fn exterior_coeff(&self, k: i32) -> Complex64 {
        if k < 0 || k as usize >= self.exterior.len() {
            Complex64::default()
        } else {
            self.exterior[k as usize]
        }
    }

    /// Truncated interior series at `|zeta| < 1`.
    pub fn eval_interior_series(&self, zeta: Complex64) -> Complex64 {
        let mut acc = Complex64::default();
        for c in self.interior.iter().rev() {
            acc = acc * zeta + c;
        }
        acc
    }

    /// Truncated exterior series at `|zeta| > 1`.
    pub fn eval_exterior_series(&self, zeta: Complex64) -> Complex64 {
        let inv = 1.0 / zeta;
        let mut acc = Complex64::default();
        for c in self.exterior.iter().rev() {
            acc = acc * inv + c;
        }
        acc
    }

    /// Branch-exact interior form `lead * (1 - zeta/t1)^a (1 - zeta/t2)^a*`
    /// with principal logarithms; the series oracle and jump-test reference.
    pub fn eval_interior_direct(&self, zeta: Complex64) -> Complex64 {
        let a = Complex64::new(-0.5, -self.lambda);
        let lead = -((a * Complex64::new(0.0, self.theta1)).exp()
            * (a.conj() * Complex64::new(0.0, self.theta2)).exp());
        lead * ((a * (1.0 - zeta / self.joint1).ln()).exp()
            * (a.conj() * (1.0 - zeta / self.joint2).ln()).exp())
    }

    /// Branch-exact exterior form `(1 - t1/zeta)^a (1 - t2/zeta)^a* / zeta`,
    /// normalized so `zeta X -> 1` at infinity.
    pub fn eval_exterior_direct(&self, zeta: Complex64) -> Complex64 {
        let a = Complex64::new(-0.5, -self.lambda);
        ((a * (1.0 - self.joint1 / zeta).ln()).exp()
            * (a.conj() * (1.0 - self.joint2 / zeta).ln()).exp())
            / zeta
    }
}

/// Discrete Fourier extraction of two-sided coefficients from `samples` point
/// evaluations of a target on the unit circle.
///
/// `samples` must be at least `4 * order + 1` so the retained band is
/// oversampled twofold against aliasing.
pub fn fourier_coeffs<F>(target: F, order: usize, samples: usize) -> Result<SeriesCoeffs>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    if samples < 4 * order + 1 {
        return Err(Error::InvalidConfig {
            field: "samples".into(),
            message: format!("need at least {} samples for order {order}", 4 * order + 1),
        });
    }
    let p = samples;
    let mut roots = Vec::with_capacity(p);
    for j in 0..p {
        roots.push(Complex64::from_polar(
            1.0,
            2.0 * std::f64::consts::PI * j as f64 / p as f64,
        ));
    }
    let mut values = Vec::with_capacity(p);
    for root in &roots {
        values.push(target(*root)?);
    }
    let mut coeffs = SeriesCoeffs::zeros(order as i32);
    let p_i64 = p as i64;
    for k in -(order as i32)..=order as i32 {
        let mut acc = Complex64::default();
        for (j, value) in values.iter().enumerate() {
            let idx = (-(k as i64) * j as i64).rem_euclid(p_i64) as usize;
            acc += value * roots[idx];
        }
        coeffs.set(k, acc / p as f64);
    }
    Ok(coeffs)
}

/// Sampled expansion of the companion-point difference quotient on the ring
/// `|zeta| = rho`.
#[derive(Clone, Debug)]
pub struct RingExpansion {
    pub rho: f64,
    pub coeffs: SeriesCoeffs,
}

/// Expands `(z[w(rho sigma)] - z[w(sigma/rho)]) / conj(dz/dzeta at rho sigma)`
/// into a two-sided series of `order` terms per side.
///
/// At `rho = 1` the numerator vanishes identically, so the expansion is zero;
/// that ring is returned without sampling (the derivative in the denominator
/// blows up at the image of infinity).
pub fn ring_expand(map: &CompositeMap, rho: f64, order: usize) -> Result<RingExpansion> {
    ring_expand_with_samples(map, rho, order, 4 * order + 1)
}

/// Same as [`ring_expand`] with an explicit sample count (used by the
/// aliasing diagnostics).
pub fn ring_expand_with_samples(
    map: &CompositeMap,
    rho: f64,
    order: usize,
    samples: usize,
) -> Result<RingExpansion> {
    let alpha = map.alpha();
    if !(rho >= alpha - 1e-12 && rho <= 1.0) {
        return Err(Error::OutsideDomain(format!(
            "ring radius {rho} outside the annulus [{alpha}, 1]"
        )));
    }
    if rho == 1.0 {
        return Ok(RingExpansion {
            rho,
            coeffs: SeriesCoeffs::zeros(order as i32),
        });
    }
    let coeffs = fourier_coeffs(
        |sigma| {
            let inner = map.z_of_zeta(rho * sigma)?;
            let outer = map.z_of_zeta(sigma / rho)?;
            let deriv = map.dz_dzeta(rho * sigma)?;
            if deriv.norm() < 1e-300 {
                return Err(Error::DegenerateMap(format!(
                    "singular map derivative at rho = {rho}, sigma = {sigma}"
                )));
            }
            Ok((inner - outer) / deriv.conj())
        },
        order,
        samples,
    )?;
    Ok(RingExpansion { rho, coeffs })
}

/// Cavity-side data of the solve: Fourier coefficients of the boundary
/// integrand plus the unit weight they scale with.
#[derive(Clone, Debug)]
pub struct CavityRhs {
    /// Coefficients of `y(S) (k0 i dy/dsigma + dx/dsigma)` on the cavity ring.
    pub fourier: SeriesCoeffs,
    /// Unit weight gradient the traction data is proportional to.
    pub gamma: f64,
    /// Coefficient of the multivalued logarithm in the integrated traction;
    /// spontaneously equals `-i W gamma` for any closed cavity.
    pub resultant_coeff: Complex64,
}

impl CavityRhs {
    /// Integrated-traction coefficient of `sigma^-k`, `k >= 1`.
    pub fn integrated_neg(&self, k: i32) -> Complex64 {
        debug_assert!(k >= 1);
        self.gamma * self.fourier.get(-k - 1) / k as f64
    }

    /// Integrated-traction coefficient of `sigma^k`, `k >= 1`.
    pub fn integrated_pos(&self, k: i32) -> Complex64 {
        debug_assert!(k >= 1);
        -self.gamma * self.fourier.get(k - 1) / k as f64
    }
}

/// Samples the excavation-traction integrand on the cavity ring and extracts
/// its Fourier data.
pub fn cavity_rhs(map: &CompositeMap, mat: &MaterialParams, order: usize) -> Result<CavityRhs> {
    let alpha = map.alpha();
    let k0 = mat.k0;
    let fourier = fourier_coeffs(
        |sigma| {
            let zeta = alpha * sigma;
            let z = map.z_of_zeta(zeta)?;
            let dz = map.dz_dzeta(zeta)?;
            let mirrored = dz.conj() / (sigma * sigma);
            let dx_dsigma = 0.5 * alpha * (dz - mirrored);
            let idy_dsigma = 0.5 * alpha * (dz + mirrored);
            Ok(z.im * (k0 * idy_dsigma + dx_dsigma))
        },
        order,
        4 * order + 1,
    )?;
    let resultant_coeff = -mat.gamma_kpa * fourier.get(-1);
    Ok(CavityRhs {
        fourier,
        gamma: mat.gamma_kpa,
        resultant_coeff,
    })
}
