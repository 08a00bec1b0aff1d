//! Second mapping step: the Möbius map between the quasi half-plane and the
//! unit annulus, its composition with the charge-simulation map, and the
//! geomaterial simulation that snaps the quasi annulus onto an exact one.

use num_complex::Complex64;

use crate::csm::{self, CsmBackwardMap, CsmForwardMap};
use crate::geometry::CavitySpec;
use crate::{Error, Result};

/// Möbius map `w(zeta) = -i a (1 + zeta)/(1 - zeta) + i h` between the lower
/// half-plane with a unit circular cavity (surface line `Im w = h`) and the
/// annulus `alpha <= |zeta| <= 1`.
#[derive(Clone, Copy, Debug)]
pub struct VerruijtMap {
    /// Surface offset in the w-plane (`h > 1`; the cavity radius is fixed 1).
    pub h: f64,
    /// Möbius parameter `a = h (1 - alpha^2)/(1 + alpha^2) = sqrt(h^2 - 1)`.
    pub a: f64,
    /// Inner annulus radius `alpha = 1/(h + sqrt(h^2 - 1))`.
    pub alpha: f64,
}

/// Builds the Möbius map for a given w-plane surface offset.
pub fn build_verruijt(h: f64) -> Result<VerruijtMap> {
    if !(h >= 1.0 + 1e-6) {
        return Err(Error::DegenerateMap(format!(
            "w-plane cavity touches the surface: need h > 1, got h = {h}"
        )));
    }
    let alpha = 1.0 / (h + (h * h - 1.0).sqrt());
    let a = h * (1.0 - alpha * alpha) / (1.0 + alpha * alpha);
    Ok(VerruijtMap { h, a, alpha })
}

impl VerruijtMap {
    /// Exact Möbius inverse `zeta = (w - ih + ia)/(w - ih - ia)`.
    pub fn zeta_of_w(&self, w: Complex64) -> Result<Complex64> {
        let shifted = w - Complex64::new(0.0, self.h);
        let den = shifted - Complex64::new(0.0, self.a);
        if den.norm() < 1e-14 {
            return Err(Error::DegenerateMap(format!(
                "w = {w} is the pole of the inverse map"
            )));
        }
        Ok((shifted + Complex64::new(0.0, self.a)) / den)
    }

    pub fn w_of_zeta(&self, zeta: Complex64) -> Result<Complex64> {
        let den = 1.0 - zeta;
        if den.norm() < 1e-14 {
            return Err(Error::DegenerateMap("zeta = 1 maps to infinity".into()));
        }
        Ok(Complex64::new(0.0, -self.a) * (1.0 + zeta) / den + Complex64::new(0.0, self.h))
    }

    /// `dw/dzeta = -2 i a / (1 - zeta)^2`.
    pub fn dw_dzeta(&self, zeta: Complex64) -> Result<Complex64> {
        let den = 1.0 - zeta;
        if den.norm() < 1e-14 {
            return Err(Error::DegenerateMap("zeta = 1 maps to infinity".into()));
        }
        Ok(Complex64::new(0.0, -2.0 * self.a) / (den * den))
    }
}

/// Quality diagnostics of the geomaterial simulation.
#[derive(Clone, Copy, Debug)]
pub struct SimulationValidity {
    /// Max deviation of mapped ground-surface samples from the unit circle.
    pub max_unit_circle_deviation: f64,
    /// Imaginary parts of the joint images in the w-plane; `h` is anchored
    /// at the right joint, so any asymmetry shows up here.
    pub im_w_t1: f64,
    pub im_w_t2: f64,
    /// Deviation of the joint images from the unit circle.
    pub joint_deviation: f64,
}

/// Deviation from the unit circle above which `compose` warns / fails.
pub const VALIDITY_WARNING: f64 = 0.05;
pub const VALIDITY_ERROR: f64 = 0.2;

/// Two-step composite map with joint angles and simulation diagnostics.
#[derive(Clone, Debug)]
pub struct CompositeMap {
    pub forward: CsmForwardMap,
    pub backward: CsmBackwardMap,
    pub verruijt: VerruijtMap,
    /// Annulus polar angle of the left joint image.
    pub theta1: f64,
    /// Annulus polar angle of the right joint image (exactly on the unit
    /// circle by the choice of `h`).
    pub theta2: f64,
    pub validity: SimulationValidity,
}

/// Options for [`compose`].
#[derive(Clone, Copy, Debug)]
pub struct MapOptions {
    /// Assignment factor scaling the charge-point offsets.
    pub assignment_factor: f64,
    /// Backward-series length; `None` uses the square point-correspondence
    /// fit of one coefficient per collocation point.
    pub backward_series_len: Option<usize>,
}

impl Default for MapOptions {
    fn default() -> Self {
        Self {
            assignment_factor: 1.2,
            backward_series_len: None,
        }
    }
}

/// Builds the two-step composite map for a cavity: charge-simulation maps,
/// the Möbius map anchored at the right joint, and the joint angles that the
/// geomaterial simulation keeps on the exact unit circle.
pub fn compose(spec: &CavitySpec, options: &MapOptions) -> Result<CompositeMap> {
    let forward = csm::solve_forward(spec, options.assignment_factor)?;
    let backward = match options.backward_series_len {
        Some(len) => csm::fit_backward_with_len(&forward, spec, len)?,
        None => csm::fit_backward(&forward, spec)?,
    };
    let w_t1 = forward.eval(spec.t1)?;
    let w_t2 = forward.eval(spec.t2)?;
    let verruijt = build_verruijt(w_t2.im)?;

    let zeta_t1 = verruijt.zeta_of_w(w_t1)?;
    let zeta_t2 = verruijt.zeta_of_w(w_t2)?;
    let joint_deviation = (zeta_t1.norm() - 1.0)
        .abs()
        .max((zeta_t2.norm() - 1.0).abs());
    if joint_deviation > VALIDITY_ERROR {
        return Err(Error::DegenerateMap(format!(
            "joint images deviate {joint_deviation:.3} from the unit circle; \
             the cavity is too close to the surface for the annulus simulation"
        )));
    }

    // Surface samples above the cavity are where the quasi circle deviates
    // most; the grid spans five cavity half-widths plus the joints.
    let span = 5.0 * spec.points.iter().map(|p| p.re.abs()).fold(0.0, f64::max);
    let mut deviation = joint_deviation;
    for i in 0..=200 {
        let x = -span + 2.0 * span * i as f64 / 200.0;
        let w = forward.eval(Complex64::new(x, 0.0))?;
        let zeta = verruijt.zeta_of_w(w)?;
        deviation = deviation.max((zeta.norm() - 1.0).abs());
    }

    Ok(CompositeMap {
        forward,
        backward,
        verruijt,
        theta1: zeta_t1.arg(),
        theta2: zeta_t2.arg(),
        validity: SimulationValidity {
            max_unit_circle_deviation: deviation,
            im_w_t1: w_t1.im,
            im_w_t2: w_t2.im,
            joint_deviation,
        },
    })
}

impl CompositeMap {
    /// Composite backward evaluation `z(zeta) = z[w(zeta)]`.
    pub fn z_of_zeta(&self, zeta: Complex64) -> Result<Complex64> {
        self.backward.eval(self.verruijt.w_of_zeta(zeta)?)
    }

    /// Chain-rule derivative `dz/dzeta = z'(w) w'(zeta)`.
    pub fn dz_dzeta(&self, zeta: Complex64) -> Result<Complex64> {
        let w = self.verruijt.w_of_zeta(zeta)?;
        Ok(self.backward.deriv(w)? * self.verruijt.dw_dzeta(zeta)?)
    }

    /// Composite forward evaluation `zeta(z) = zeta[w(z)]`.
    pub fn zeta_of_z(&self, z: Complex64) -> Result<Complex64> {
        self.verruijt.zeta_of_w(self.forward.eval(z)?)
    }

    /// Inner annulus radius of the simulating annulus.
    pub fn alpha(&self) -> f64 {
        self.verruijt.alpha
    }

    /// Unit-modulus joint points `e^{i theta1}`, `e^{i theta2}`.
    pub fn joints(&self) -> (Complex64, Complex64) {
        (
            Complex64::from_polar(1.0, self.theta1),
            Complex64::from_polar(1.0, self.theta2),
        )
    }

    /// Human-readable diagnostics worth surfacing to a user.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.validity.max_unit_circle_deviation > VALIDITY_WARNING {
            out.push(format!(
                "geomaterial simulation quality is degraded: mapped surface deviates \
                 {:.4} from the unit circle (warning threshold {VALIDITY_WARNING})",
                self.validity.max_unit_circle_deviation
            ));
        }
        if self.forward.charge_points_outside > 0 {
            out.push(format!(
                "{} charge point(s) fell outside the cavity trace",
                self.forward.charge_points_outside
            ));
        }
        for (name, cond) in [
            ("forward collocation", self.forward.condition_estimate),
            ("backward fit", self.backward.condition_estimate),
        ] {
            if cond > csm::CONDITION_WARNING {
                out.push(format!("{name} solve condition estimate {cond:.3e}"));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_case_boundary, CasePreset};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn verruijt_closed_forms() {
        let v = build_verruijt(10.0).unwrap();
        assert_relative_eq!(v.alpha, 1.0 / (10.0 + 99.0f64.sqrt()), epsilon = 1e-14);
        assert_relative_eq!(v.a, 99.0f64.sqrt(), epsilon = 1e-12);
        assert!((v.a * v.a - (v.h * v.h - 1.0)).abs() < 1e-12);

        let v = build_verruijt(2.0).unwrap();
        assert_relative_eq!(v.alpha, 1.0 / (2.0 + 3.0f64.sqrt()), epsilon = 1e-14);
        assert!((v.a * v.a - 3.0).abs() < 1e-12);

        assert!(build_verruijt(1.0).is_err());
        assert!(build_verruijt(0.5).is_err());
    }

    #[test]
    fn mobius_point_values() {
        let v = build_verruijt(2.0).unwrap();
        // zeta = -1 maps to w = ih.
        let w = v.w_of_zeta(Complex64::new(-1.0, 0.0)).unwrap();
        assert!((w - Complex64::new(0.0, v.h)).norm() < 1e-14);
        // The unit circle maps onto the surface line Im w = h.
        for i in 0..100 {
            let zeta = Complex64::from_polar(1.0, 0.02 + 2.0 * PI * i as f64 / 101.0);
            let w = v.w_of_zeta(zeta).unwrap();
            assert!((w.im - v.h).abs() < 1e-10 * (1.0 + w.norm()));
        }
        // |zeta| = alpha maps onto the unit circle |w| = 1.
        for i in 0..100 {
            let zeta = Complex64::from_polar(v.alpha, 2.0 * PI * i as f64 / 100.0);
            let w = v.w_of_zeta(zeta).unwrap();
            assert!((w.norm() - 1.0).abs() < 1e-10);
        }
        assert!(v.w_of_zeta(Complex64::new(1.0, 0.0)).is_err());
    }

    proptest! {
        #[test]
        fn mobius_roundtrip(rho in 0.3f64..1.0, ang in 0.0f64..(2.0 * PI)) {
            let v = build_verruijt(2.0).unwrap();
            let zeta = Complex64::from_polar(rho.max(v.alpha), ang);
            if (zeta - Complex64::new(1.0, 0.0)).norm() > 1e-3 {
                let back = v.zeta_of_w(v.w_of_zeta(zeta).unwrap()).unwrap();
                prop_assert!((back - zeta).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn mobius_derivative_matches_finite_difference() {
        let v = build_verruijt(2.0).unwrap();
        let zeta = Complex64::new(0.3, 0.4);
        let h = 1e-7;
        let fd = (v.w_of_zeta(zeta + Complex64::new(h, 0.0)).unwrap()
            - v.w_of_zeta(zeta - Complex64::new(h, 0.0)).unwrap())
            / (2.0 * h);
        let an = v.dw_dzeta(zeta).unwrap();
        assert!((an - fd).norm() < 1e-6 * an.norm());
    }

    fn compose_case(depth: f64, n: usize) -> Result<CompositeMap> {
        let spec = build_case_boundary(
            &CasePreset::CompositeEllipse {
                depth_m: depth,
                half_count: n,
            },
            1.0,
        )?;
        compose(&spec, &MapOptions::default())
    }

    #[test]
    fn case1_compose_anchors_right_joint() {
        let map = compose_case(10.0, 30).unwrap();
        // h comes from T2, so its image sits exactly on the unit circle.
        assert!(map.validity.joint_deviation < 0.01);
        assert_relative_eq!(map.validity.im_w_t2, map.verruijt.h, epsilon = 1e-14);
        // Depth about twice the cavity size: good simulation.
        assert!(map.validity.max_unit_circle_deviation < VALIDITY_WARNING);
        assert!(map.warnings().is_empty(), "{:?}", map.warnings());
        assert!(map.theta2 > 0.0 && map.theta1 < 0.0);
    }

    #[test]
    fn validity_metric_decreases_with_depth() {
        // Paper trend across the four case depths: shallower is worse.
        let mut prev = f64::INFINITY;
        for depth in [5.2, 6.0, 8.0, 10.0] {
            let map = compose_case(depth, 30).unwrap();
            let dev = map.validity.max_unit_circle_deviation;
            assert!(
                dev < prev,
                "deviation {dev} at depth {depth} not below {prev}"
            );
            prev = dev;
        }
    }

    #[test]
    fn case4_warns_about_simulation_quality() {
        let map = compose_case(5.2, 30).unwrap();
        assert!(map.validity.max_unit_circle_deviation > VALIDITY_WARNING);
        assert!(!map.warnings().is_empty());
    }

    #[test]
    fn symmetric_circle_has_mirrored_joints() {
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
        let map = compose(
            &spec,
            &MapOptions {
                assignment_factor: 0.8,
                backward_series_len: None,
            },
        )
        .unwrap();
        let wrapped = (map.theta1 + map.theta2).rem_euclid(2.0 * PI);
        let dist = wrapped.min(2.0 * PI - wrapped);
        assert!(dist < 1e-8, "theta1 + theta2 = {}", map.theta1 + map.theta2);
    }

    #[test]
    fn inner_periphery_is_exact() {
        // The zeta-circle rho = alpha lands on |w| = 1 to Möbius exactness.
        let map = compose_case(10.0, 30).unwrap();
        for i in 0..200 {
            let zeta = Complex64::from_polar(map.alpha(), 2.0 * PI * i as f64 / 200.0);
            let w = map.verruijt.w_of_zeta(zeta).unwrap();
            assert!((w.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn composite_derivative_matches_finite_difference() {
        let map = compose_case(10.0, 30).unwrap();
        let alpha = map.alpha();
        for i in 0..20 {
            let rho = alpha + (1.0 - alpha) * (0.2 + 0.6 * i as f64 / 20.0);
            let zeta = Complex64::from_polar(rho, 2.0 * PI * (i as f64 + 0.4) / 20.0);
            let h = 1e-6;
            let fd = (map.z_of_zeta(zeta + Complex64::new(h, 0.0)).unwrap()
                - map.z_of_zeta(zeta - Complex64::new(h, 0.0)).unwrap())
                / (2.0 * h);
            let an = map.dz_dzeta(zeta).unwrap();
            assert!(
                (an - fd).norm() <= 1e-5 * an.norm(),
                "derivative mismatch at {zeta}: {an} vs {fd}"
            );
        }
    }

    #[test]
    fn cavity_ring_lands_on_boundary() {
        let spec = build_case_boundary(
            &CasePreset::CompositeEllipse {
                depth_m: 10.0,
                half_count: 30,
            },
            1.0,
        )
        .unwrap();
        let map = compose(&spec, &MapOptions::default()).unwrap();
        let dense = build_case_boundary(
            &CasePreset::CompositeEllipse {
                depth_m: 10.0,
                half_count: 2000,
            },
            1.0,
        )
        .unwrap();
        let tol = 1e-2 * spec.size();
        for i in 0..60 {
            let zeta = Complex64::from_polar(map.alpha(), 2.0 * PI * i as f64 / 60.0);
            let z = map.z_of_zeta(zeta).unwrap();
            let dist = dense
                .points
                .iter()
                .map(|p| (p - z).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(dist < tol, "ring point {z} is {dist} from the boundary");
        }
    }

    #[test]
    fn zeta_one_maps_to_infinity() {
        let map = compose_case(10.0, 30).unwrap();
        let z = map.z_of_zeta(Complex64::new(1.0 - 1e-9, 0.0)).unwrap();
        assert!(z.norm() > 1e6);
        assert!(map.z_of_zeta(Complex64::new(1.0, 0.0)).is_err());
    }
}
