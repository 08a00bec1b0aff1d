//! Cavity boundaries, the initial gravitational stress field, excavation
//! tractions and the excavated-area resultant.
//!
//! Conventions: meters, kPa, kN/m; the unit weight gradient `gamma_kpa` is
//! applied as `gamma * y` with `y <= 0`, so in-situ stresses are negative
//! (compressive) below ground. Cavity traces run clockwise, keeping the
//! remaining geomaterial on the left; the signed shoelace area of a valid
//! trace is negative.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Plane-strain vs plane-stress switch for the Kolosov parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaneMode {
    PlaneStrain,
    PlaneStress,
}

/// Elastic and gravitational constants of the geomaterial.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MaterialParams {
    /// Elastic modulus (MPa).
    pub e_mpa: f64,
    /// Poisson ratio.
    pub nu: f64,
    /// Unit weight gradient (kPa per meter of depth).
    pub gamma_kpa: f64,
    /// Lateral stress coefficient.
    pub k0: f64,
    pub plane_mode: PlaneMode,
}

impl MaterialParams {
    pub fn new(
        e_mpa: f64,
        nu: f64,
        gamma_kpa: f64,
        k0: f64,
        plane_mode: PlaneMode,
    ) -> Result<Self> {
        let m = Self {
            e_mpa,
            nu,
            gamma_kpa,
            k0,
            plane_mode,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_mpa > 0.0) {
            return Err(Error::InvalidMaterial(format!(
                "E must be positive, got {}",
                self.e_mpa
            )));
        }
        if !(0.0..0.5).contains(&self.nu) {
            return Err(Error::InvalidMaterial(format!(
                "nu must lie in [0, 0.5), got {}",
                self.nu
            )));
        }
        // Zero is allowed so the unloaded case stays expressible in tests
        // and sweeps; only negative gradients are rejected.
        if !(self.gamma_kpa >= 0.0) {
            return Err(Error::InvalidMaterial(format!(
                "gamma must be non-negative, got {}",
                self.gamma_kpa
            )));
        }
        if !(self.k0 > 0.0) {
            return Err(Error::InvalidMaterial(format!(
                "k0 must be positive, got {}",
                self.k0
            )));
        }
        Ok(())
    }

    /// Kolosov parameter: `3 - 4 nu` (plane strain) or `(3 - nu)/(1 - nu)`
    /// (plane stress). Always exceeds 1 for a valid Poisson ratio.
    pub fn kappa(&self) -> f64 {
        match self.plane_mode {
            PlaneMode::PlaneStrain => 3.0 - 4.0 * self.nu,
            PlaneMode::PlaneStress => (3.0 - self.nu) / (1.0 - self.nu),
        }
    }

    /// Shear modulus in kPa: `E / (2 (1 + nu))`.
    pub fn shear_modulus_kpa(&self) -> f64 {
        self.e_mpa * 1e3 / (2.0 * (1.0 + self.nu))
    }
}

/// Stress components at a point (kPa).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StressTriple {
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub tau_xy: f64,
}

/// Initial geostatic stresses at a point of the half-plane.
///
/// Rejects points above the ground surface.
pub fn initial_stress(point: Complex64, mat: &MaterialParams) -> Result<StressTriple> {
    let y = point.im;
    if y > 0.0 {
        return Err(Error::OutsideDomain(format!(
            "point {point} lies above the ground surface"
        )));
    }
    Ok(StressTriple {
        sigma_x: mat.k0 * mat.gamma_kpa * y,
        sigma_y: mat.gamma_kpa * y,
        tau_xy: 0.0,
    })
}

/// Inverse traction `X + iY` applied on the cavity wall to simulate
/// excavation, at a boundary point with the given unit tangent taken in the
/// clockwise trace direction.
pub fn cavity_traction(
    point: Complex64,
    unit_tangent: Complex64,
    mat: &MaterialParams,
) -> Result<Complex64> {
    if point.im >= 0.0 {
        return Err(Error::OutsideDomain(format!(
            "cavity point {point} must lie below ground"
        )));
    }
    let norm = unit_tangent.norm();
    if norm < 1e-12 {
        return Err(Error::InvalidGeometry("zero tangent vector".into()));
    }
    let t = unit_tangent / norm;
    let y = point.im;
    // X = -k0 gamma y dy/dS, Y = gamma y dx/dS with dS along the clockwise trace.
    Ok(Complex64::new(
        -mat.k0 * mat.gamma_kpa * y * t.im,
        mat.gamma_kpa * y * t.re,
    ))
}

/// Signed shoelace area of a closed polygonal trace (negative for clockwise).
pub fn signed_shoelace_area(points: &[Complex64]) -> f64 {
    let n = points.len();
    let mut area = 0.0;
    for i in 0..n {
        let p = points[i];
        let q = points[(i + 1) % n];
        area += p.re * q.im - q.re * p.im;
    }
    0.5 * area
}

/// Even-odd ray-casting point-in-polygon test.
pub fn point_in_polygon(pt: Complex64, poly: &[Complex64]) -> bool {
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let (pi, pj) = (poly[i], poly[j]);
        if (pi.im > pt.im) != (pj.im > pt.im) {
            let x_cross = pj.re + (pt.im - pj.im) / (pi.im - pj.im) * (pi.re - pj.re);
            if pt.re < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn segments_properly_intersect(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let cross = |o: Complex64, p: Complex64, q: Complex64| {
        (p.re - o.re) * (q.im - o.im) - (p.im - o.im) * (q.re - o.re)
    };
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Ordered collocation trace of a cavity plus its center and the two
/// ground-surface joint points.
#[derive(Clone, Debug)]
pub struct CavitySpec {
    /// Boundary points in clockwise order (geomaterial on the left).
    pub points: Vec<Complex64>,
    /// Cavity center, strictly inside the trace.
    pub center: Complex64,
    /// Left joint point on the ground surface (`Im = 0`).
    pub t1: Complex64,
    /// Right joint point on the ground surface (`Im = 0`).
    pub t2: Complex64,
    pub label: String,
}

impl CavitySpec {
    pub fn new(
        points: Vec<Complex64>,
        center: Complex64,
        t1: Complex64,
        t2: Complex64,
        label: impl Into<String>,
    ) -> Result<Self> {
        let spec = Self {
            points,
            center,
            t1,
            t2,
            label: label.into(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.points.len();
        if n < 3 {
            return Err(Error::InvalidGeometry(format!(
                "trace needs at least 3 points, got {n}"
            )));
        }
        if let Some(p) = self.points.iter().find(|p| p.im >= 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "boundary point {p} does not lie below the ground surface"
            )));
        }
        let area = signed_shoelace_area(&self.points);
        if area.abs() < 1e-12 {
            return Err(Error::InvalidGeometry(
                "degenerate trace with zero area".into(),
            ));
        }
        if area > 0.0 {
            return Err(Error::InvalidGeometry(
                "trace must be clockwise (negative shoelace area)".into(),
            ));
        }
        if !point_in_polygon(self.center, &self.points) {
            return Err(Error::InvalidGeometry(format!(
                "center {} is not inside the trace",
                self.center
            )));
        }
        if self.t1.im != 0.0 || self.t2.im != 0.0 {
            return Err(Error::InvalidGeometry(
                "joint points must lie on the ground surface".into(),
            ));
        }
        let min_x = self
            .points
            .iter()
            .map(|p| p.re)
            .fold(f64::INFINITY, f64::min);
        let max_x = self
            .points
            .iter()
            .map(|p| p.re)
            .fold(f64::NEG_INFINITY, f64::max);
        if !(self.t1.re < min_x && self.t2.re > max_x) {
            return Err(Error::InvalidGeometry(format!(
                "joint points ({}, {}) must bracket the cavity x-range [{min_x}, {max_x}]",
                self.t1.re, self.t2.re
            )));
        }
        // Proper self-intersection test over non-adjacent segment pairs.
        for i in 0..n {
            let (a, b) = (self.points[i], self.points[(i + 1) % n]);
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (c, d) = (self.points[j], self.points[(j + 1) % n]);
                if segments_properly_intersect(a, b, c, d) {
                    return Err(Error::InvalidGeometry(format!(
                        "trace is self-intersecting (segments {i} and {j})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Reads a two-column `x,y` CSV (header optional); the center is the
    /// polygon centroid and the joints sit at `+-x0 * depth-of-centroid`.
    pub fn from_csv(path: &std::path::Path, x0: f64, label: impl Into<String>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let points = parse_xy_csv(&text)?;
        Self::from_points(points, x0, label)
    }

    /// Builds a spec from an explicit point list, deriving center and joints.
    pub fn from_points(points: Vec<Complex64>, x0: f64, label: impl Into<String>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InvalidGeometry(format!(
                "trace needs at least 3 points, got {}",
                points.len()
            )));
        }
        let center = polygon_centroid(&points);
        let depth = -center.im;
        if depth <= 0.0 {
            return Err(Error::InvalidGeometry(
                "cavity centroid must lie below ground".into(),
            ));
        }
        let half_width = x0 * depth;
        Self::new(
            points,
            center,
            Complex64::new(-half_width, 0.0),
            Complex64::new(half_width, 0.0),
            label,
        )
    }

    /// Largest distance from the center to the trace; the natural scale for
    /// relative tolerances.
    pub fn size(&self) -> f64 {
        self.points
            .iter()
            .map(|p| (p - self.center).norm())
            .fold(0.0, f64::max)
    }
}

fn polygon_centroid(points: &[Complex64]) -> Complex64 {
    let n = points.len();
    let mut cx = 0.0;
    let mut cy = 0.0;
    let mut area = 0.0;
    for i in 0..n {
        let p = points[i];
        let q = points[(i + 1) % n];
        let w = p.re * q.im - q.re * p.im;
        area += w;
        cx += (p.re + q.re) * w;
        cy += (p.im + q.im) * w;
    }
    area *= 0.5;
    Complex64::new(cx / (6.0 * area), cy / (6.0 * area))
}

fn parse_xy_csv(text: &str) -> Result<Vec<Complex64>> {
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split(',').map(str::trim);
        let (xs, ys) = match (cols.next(), cols.next()) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::InvalidGeometry(format!(
                    "line {}: expected two comma-separated columns",
                    lineno + 1
                )))
            }
        };
        match (xs.parse::<f64>(), ys.parse::<f64>()) {
            (Ok(x), Ok(y)) => points.push(Complex64::new(x, y)),
            _ if lineno == 0 => continue, // header row
            _ => {
                return Err(Error::InvalidGeometry(format!(
                    "line {}: cannot parse `{line}` as x,y",
                    lineno + 1
                )))
            }
        }
    }
    if points.is_empty() {
        return Err(Error::InvalidGeometry("no boundary points in CSV".into()));
    }
    Ok(points)
}

/// Excavated-area datum `W` (area divided by two pi) and the vertical
/// resultant `R_y = 2 pi W gamma` in kN/m. The horizontal resultant is
/// identically zero for any cavity shape.
pub fn area_and_resultant(spec: &CavitySpec, gamma_kpa: f64) -> Result<(f64, f64)> {
    let area = signed_shoelace_area(&spec.points).abs();
    if area < 1e-12 {
        return Err(Error::InvalidGeometry(
            "degenerate trace with zero area".into(),
        ));
    }
    let w = area / (2.0 * std::f64::consts::PI);
    Ok((w, area * gamma_kpa))
}

/// Reference depth normalizing the free-surface half-width of the
/// composite-ellipse family: all bundled case depths share the joint
/// placement `+-x0 * 10 m`, so the shallower variants keep the same
/// surface span as the deepest one.
pub const COMPOSITE_REFERENCE_DEPTH_M: f64 = 10.0;

/// Parametric cavity generators for the bundled numerical cases.
#[derive(Clone, Debug, PartialEq)]
pub enum CasePreset {
    /// Two half-ellipses with semi-axes (6, 5) for `x > 0` and (4, 5) for
    /// `x <= 0`, centered at depth `depth_m`; `half_count` points per half.
    CompositeEllipse { depth_m: f64, half_count: usize },
    /// Axisymmetric cavity traced through `z = -i a (1 + zeta)/(1 - zeta)
    /// + i sum b_k (zeta^k - zeta^-k)` sampled on `|zeta| = inner_radius`.
    Axisymmetric {
        mobius_a: f64,
        shape_coeffs: Vec<f64>,
        inner_radius: f64,
        half_count: usize,
    },
}

impl CasePreset {
    /// Named presets `case1`..`case4`: the composite ellipse at depths
    /// 10, 8, 6 and 5.2 m with 30 points per half.
    pub fn named(name: &str) -> Option<CasePreset> {
        let depth = match name {
            "case1" => 10.0,
            "case2" => 8.0,
            "case3" => 6.0,
            "case4" => 5.2,
            _ => return None,
        };
        Some(CasePreset::CompositeEllipse {
            depth_m: depth,
            half_count: 30,
        })
    }

    /// Same preset with a different collocation density.
    pub fn with_half_count(&self, n: usize) -> CasePreset {
        match self {
            CasePreset::CompositeEllipse { depth_m, .. } => CasePreset::CompositeEllipse {
                depth_m: *depth_m,
                half_count: n,
            },
            CasePreset::Axisymmetric {
                mobius_a,
                shape_coeffs,
                inner_radius,
                ..
            } => CasePreset::Axisymmetric {
                mobius_a: *mobius_a,
                shape_coeffs: shape_coeffs.clone(),
                inner_radius: *inner_radius,
                half_count: n,
            },
        }
    }
}

/// Builds the collocation trace of a preset cavity; `x0` is the normalized
/// free-surface half-width (joint abscissa over cavity depth).
pub fn build_case_boundary(preset: &CasePreset, x0: f64) -> Result<CavitySpec> {
    if x0 <= 0.0 {
        return Err(Error::InvalidGeometry(format!(
            "x0 must be positive, got {x0}"
        )));
    }
    match preset {
        CasePreset::CompositeEllipse {
            depth_m,
            half_count,
        } => {
            let (depth, n) = (*depth_m, *half_count);
            if n < 8 {
                return Err(Error::InvalidGeometry(format!(
                    "need at least 8 points per half, got {n}"
                )));
            }
            if depth <= 0.0 {
                return Err(Error::InvalidGeometry(format!(
                    "depth must be positive, got {depth}"
                )));
            }
            let mut points = Vec::with_capacity(2 * n);
            for i in 0..n {
                let ang = std::f64::consts::FRAC_PI_2 - i as f64 / n as f64 * std::f64::consts::PI;
                points.push(Complex64::new(6.0 * ang.cos(), 5.0 * ang.sin() - depth));
            }
            for i in 0..n {
                let ang = -std::f64::consts::FRAC_PI_2 - i as f64 / n as f64 * std::f64::consts::PI;
                points.push(Complex64::new(4.0 * ang.cos(), 5.0 * ang.sin() - depth));
            }
            let half_width = x0 * COMPOSITE_REFERENCE_DEPTH_M;
            CavitySpec::new(
                points,
                Complex64::new(0.0, -depth),
                Complex64::new(-half_width, 0.0),
                Complex64::new(half_width, 0.0),
                format!("composite-ellipse depth {depth}"),
            )
        }
        CasePreset::Axisymmetric {
            mobius_a,
            shape_coeffs,
            inner_radius,
            half_count,
        } => {
            let (a, alpha, n) = (*mobius_a, *inner_radius, *half_count);
            if n < 8 {
                return Err(Error::InvalidGeometry(format!(
                    "need at least 8 points per half, got {n}"
                )));
            }
            if !(a > 0.0) || !(0.0 < alpha && alpha < 1.0) {
                return Err(Error::InvalidGeometry(format!(
                    "axisymmetric parameters out of range: a = {a}, inner radius = {alpha}"
                )));
            }
            let mut points = Vec::with_capacity(2 * n);
            // Negative angles keep the trace clockwise (the raw counter-
            // clockwise sampling would put the charge points outside).
            for i in 0..2 * n {
                let sigma =
                    Complex64::from_polar(1.0, -(i as f64) * std::f64::consts::PI / n as f64);
                let zeta = alpha * sigma;
                let mut z = Complex64::new(0.0, -a) * (1.0 + zeta) / (1.0 - zeta);
                for (k, bk) in shape_coeffs.iter().enumerate() {
                    let kk = (k + 1) as i32;
                    z += Complex64::new(0.0, *bk) * (zeta.powi(kk) - zeta.powi(-kk));
                }
                points.push(z);
            }
            let depth = a * (1.0 + alpha * alpha) / (1.0 - alpha * alpha);
            CavitySpec::new(
                points,
                Complex64::new(0.0, -depth),
                Complex64::new(-x0 * depth, 0.0),
                Complex64::new(x0 * depth, 0.0),
                format!("axisymmetric a {a} alpha {alpha}"),
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn table1() -> MaterialParams {
        MaterialParams::new(20.0, 0.3, 20.0, 0.8, PlaneMode::PlaneStrain).unwrap()
    }

    #[test]
    fn kolosov_and_shear_modulus() {
        let m = table1();
        assert_relative_eq!(m.kappa(), 1.8, epsilon = 1e-15);
        assert_relative_eq!(m.shear_modulus_kpa(), 20e3 / 2.6, epsilon = 1e-9);
        let ps = MaterialParams::new(20.0, 0.3, 20.0, 0.8, PlaneMode::PlaneStress).unwrap();
        assert_relative_eq!(ps.kappa(), 2.7 / 0.7, epsilon = 1e-15);
        assert!(m.kappa() > 1.0);
    }

    #[test]
    fn material_validation() {
        assert!(MaterialParams::new(-1.0, 0.3, 20.0, 0.8, PlaneMode::PlaneStrain).is_err());
        assert!(MaterialParams::new(20.0, 0.5, 20.0, 0.8, PlaneMode::PlaneStrain).is_err());
        assert!(MaterialParams::new(20.0, 0.3, -1.0, 0.8, PlaneMode::PlaneStrain).is_err());
        assert!(MaterialParams::new(20.0, 0.3, 0.0, 0.8, PlaneMode::PlaneStrain).is_ok());
        assert!(MaterialParams::new(20.0, 0.3, 20.0, -0.1, PlaneMode::PlaneStrain).is_err());
    }

    #[test]
    fn initial_stress_examples() {
        let m = table1();
        let s = initial_stress(Complex64::new(3.0, 0.0), &m).unwrap();
        assert_eq!((s.sigma_x, s.sigma_y, s.tau_xy), (0.0, 0.0, 0.0));
        let s = initial_stress(Complex64::new(0.0, -10.0), &m).unwrap();
        assert_relative_eq!(s.sigma_x, -160.0, epsilon = 1e-12);
        assert_relative_eq!(s.sigma_y, -200.0, epsilon = 1e-12);
        assert_eq!(s.tau_xy, 0.0);
        let s = initial_stress(Complex64::new(1.0, -5.2), &m).unwrap();
        assert_relative_eq!(s.sigma_x, -83.2, epsilon = 1e-12);
        assert_relative_eq!(s.sigma_y, -104.0, epsilon = 1e-12);
        assert!(initial_stress(Complex64::new(0.0, 0.1), &m).is_err());
    }

    proptest! {
        #[test]
        fn initial_stress_linear_in_depth_and_gamma(y in -100.0f64..-0.01, scale in 0.1f64..5.0) {
            let m = table1();
            let mut m2 = m;
            m2.gamma_kpa *= scale;
            let s1 = initial_stress(Complex64::new(0.0, y), &m).unwrap();
            let s2 = initial_stress(Complex64::new(0.0, y), &m2).unwrap();
            prop_assert!((s2.sigma_x - scale * s1.sigma_x).abs() < 1e-9 * s1.sigma_x.abs().max(1.0));
            prop_assert!((s2.sigma_y - scale * s1.sigma_y).abs() < 1e-9 * s1.sigma_y.abs().max(1.0));
            prop_assert_eq!(s1.tau_xy, 0.0);
        }
    }

    #[test]
    fn traction_examples() {
        let m = table1();
        // Horizontal tangent at y = -5: dy/dS = 0 kills the X term.
        let t = cavity_traction(Complex64::new(1.0, -5.0), Complex64::new(1.0, 0.0), &m).unwrap();
        assert_eq!(t.re, 0.0);
        assert_relative_eq!(t.im, -100.0, epsilon = 1e-12);
        // Crown of Case 1 at (0, -5): purely vertical, magnitude gamma * 5.
        let t = cavity_traction(Complex64::new(0.0, -5.0), Complex64::new(-1.0, 0.0), &m).unwrap();
        assert_relative_eq!(t.norm(), 100.0, epsilon = 1e-12);
        // y -> 0 kills the traction.
        let t = cavity_traction(Complex64::new(0.0, -1e-9), Complex64::new(1.0, 0.0), &m).unwrap();
        assert!(t.norm() < 1e-6);
        assert!(cavity_traction(Complex64::new(0.0, -5.0), Complex64::new(0.0, 0.0), &m).is_err());
    }

    #[test]
    fn case1_area_matches_half_ellipse_closed_form() {
        // Shoelace on a densified boundary vs 25 pi from the two half-ellipses.
        let spec = build_case_boundary(
            &CasePreset::CompositeEllipse {
                depth_m: 10.0,
                half_count: 8000,
            },
            1.0,
        )
        .unwrap();
        let (w, ry) = area_and_resultant(&spec, 20.0).unwrap();
        assert_relative_eq!(w, 12.5, max_relative = 1e-7);
        assert_relative_eq!(ry, 500.0 * PI, max_relative = 1e-7);
    }

    #[test]
    fn unit_circle_area() {
        let n = 4000;
        let points: Vec<_> = (0..n)
            .map(|i| {
                let ang = -2.0 * PI * i as f64 / n as f64;
                Complex64::new(ang.cos(), ang.sin() - 10.0)
            })
            .collect();
        let spec = CavitySpec::from_points(points, 1.0, "circle").unwrap();
        let (w, ry) = area_and_resultant(&spec, 20.0).unwrap();
        assert_relative_eq!(w, 0.5, max_relative = 1e-6);
        assert_relative_eq!(ry, 20.0 * PI, max_relative = 1e-6);
    }

    #[test]
    fn degenerate_trace_rejected() {
        let pts = vec![Complex64::new(0.0, -1.0), Complex64::new(1.0, -1.0)];
        assert!(CavitySpec::from_points(pts, 1.0, "bad").is_err());
    }

    #[test]
    fn counterclockwise_trace_rejected() {
        let n = 64;
        let points: Vec<_> = (0..n)
            .map(|i| {
                let ang = 2.0 * PI * i as f64 / n as f64;
                Complex64::new(ang.cos(), ang.sin() - 10.0)
            })
            .collect();
        let err = CavitySpec::from_points(points, 1.0, "ccw").unwrap_err();
        assert!(err.to_string().contains("clockwise"));
    }

    #[test]
    fn area_invariant_under_cyclic_rotation_and_densification() {
        // An inscribed polygon converges as 1/n^2; beyond a few thousand
        // points further refinement moves W below the 1e-6 relative band.
        let coarse = build_case_boundary(
            &CasePreset::CompositeEllipse {
                depth_m: 10.0,
                half_count: 2000,
            },
            1.0,
        )
        .unwrap();
        let fine = build_case_boundary(
            &CasePreset::CompositeEllipse {
                depth_m: 10.0,
                half_count: 4000,
            },
            1.0,
        )
        .unwrap();
        let (w_coarse, _) = area_and_resultant(&coarse, 20.0).unwrap();
        let (w_fine, _) = area_and_resultant(&fine, 20.0).unwrap();
        assert_relative_eq!(w_coarse, w_fine, max_relative = 1e-6);

        let mut rotated = coarse.clone();
        rotated.points.rotate_left(17);
        let (w_rot, _) = area_and_resultant(&rotated, 20.0).unwrap();
        // Identical up to summation order.
        assert_relative_eq!(w_rot, w_coarse, max_relative = 1e-13);
    }

    #[test]
    fn traction_resultant_matches_area() {
        // Trapezoid sum of the inverse traction around the clockwise trace
        // must give (0, 2 pi W gamma).
        let m = table1();
        let spec = build_case_boundary(
            &CasePreset::CompositeEllipse {
                depth_m: 10.0,
                half_count: 2000,
            },
            1.0,
        )
        .unwrap();
        let pts = &spec.points;
        let n = pts.len();
        let mut resultant = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let prev = pts[(i + n - 1) % n];
            let next = pts[(i + 1) % n];
            let chord = next - prev;
            let tangent = chord / chord.norm();
            let ds = 0.5 * chord.norm();
            resultant += cavity_traction(pts[i], tangent, &m).unwrap() * ds;
        }
        let (w, ry) = area_and_resultant(&spec, m.gamma_kpa).unwrap();
        assert!(
            resultant.re.abs() < 1e-6 * ry,
            "horizontal {} vs {}",
            resultant.re,
            ry
        );
        assert_relative_eq!(
            resultant.im,
            2.0 * PI * w * m.gamma_kpa,
            max_relative = 1e-3
        );
    }

    #[test]
    fn composite_ellipse_collocation_points() {
        let spec = build_case_boundary(
            &CasePreset::CompositeEllipse {
                depth_m: 10.0,
                half_count: 30,
            },
            1.0,
        )
        .unwrap();
        assert_eq!(spec.points.len(), 60);
        // First point per Eq-of-case: (6 cos(pi/2), 5 sin(pi/2) - 10) = (0, -5).
        assert_relative_eq!(spec.points[0].re, 0.0, epsilon = 1e-12);
        assert_relative_eq!(spec.points[0].im, -5.0, epsilon = 1e-12);
        assert!(signed_shoelace_area(&spec.points) < 0.0);
        assert_eq!(spec.t1, Complex64::new(-10.0, 0.0));
        assert_eq!(spec.t2, Complex64::new(10.0, 0.0));
    }

    #[test]
    fn axisymmetric_circle_lands_on_verruijt_geometry() {
        // With all shape coefficients zero the trace is the circle of radius
        // 2 a alpha / (1 - alpha^2) centered at depth a (1+alpha^2)/(1-alpha^2).
        let (depth, radius): (f64, f64) = (10.0, 5.0);
        let alpha = radius / (depth + (depth * depth - radius * radius).sqrt());
        let a = (depth * depth - radius * radius).sqrt();
        let spec = build_case_boundary(
            &CasePreset::Axisymmetric {
                mobius_a: a,
                shape_coeffs: vec![],
                inner_radius: alpha,
                half_count: 30,
            },
            1.0,
        )
        .unwrap();
        let center = Complex64::new(0.0, -depth);
        for p in &spec.points {
            assert_relative_eq!((p - center).norm(), radius, epsilon = 1e-9);
        }
        assert!(signed_shoelace_area(&spec.points) < 0.0);
    }

    #[test]
    fn preset_validation_errors() {
        assert!(build_case_boundary(
            &CasePreset::CompositeEllipse {
                depth_m: 10.0,
                half_count: 4
            },
            1.0
        )
        .is_err());
        assert!(build_case_boundary(
            &CasePreset::CompositeEllipse {
                depth_m: -1.0,
                half_count: 30
            },
            1.0
        )
        .is_err());
        // Depth 4 puts the crown above ground.
        assert!(build_case_boundary(
            &CasePreset::CompositeEllipse {
                depth_m: 4.0,
                half_count: 30
            },
            1.0
        )
        .is_err());
    }

    #[test]
    fn csv_parsing_with_and_without_header() {
        let body = "x,y\n1.0,-9.0\n0.0,-8.0\n-1.0,-9.0\n0.0,-10.0\n";
        let pts = parse_xy_csv(body).unwrap();
        assert_eq!(pts.len(), 4);
        let no_header = "1.0,-9.0\n0.0,-8.0\n-1.0,-9.0\n";
        assert_eq!(parse_xy_csv(no_header).unwrap().len(), 3);
        assert!(parse_xy_csv("x,y\noops\n").is_err());
        assert!(parse_xy_csv("").is_err());
    }

    #[test]
    fn named_presets() {
        assert!(CasePreset::named("case1").is_some());
        assert!(CasePreset::named("case4").is_some());
        assert!(CasePreset::named("case5").is_none());
        match CasePreset::named("case2").unwrap() {
            CasePreset::CompositeEllipse {
                depth_m,
                half_count,
            } => {
                assert_eq!(depth_m, 8.0);
                assert_eq!(half_count, 30);
            }
            _ => panic!("wrong preset kind"),
        }
    }
}
