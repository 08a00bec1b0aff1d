//! Acceptance battery: one test per verification criterion, each printing a
//! PASS line with the measured figure next to its pinned tolerance.
//!
//! The mapping criteria (1-3) run on the bundled 30-points-per-half trace
//! with the square backward fit. The solve criteria run the same geometry
//! with solve-grade refinement: 120 points per half and the least-squares
//! backward fit of length 120, which pins the mapped area to ~5e-8 relative.

use std::sync::OnceLock;
use std::time::Instant;

use num_complex::Complex64;

use cavityfield::annulus::{build_verruijt, MapOptions};
use cavityfield::csm::{fit_backward, solve_forward};
use cavityfield::field::{build_ring_series, lanczos_weights};
use cavityfield::geometry::{build_case_boundary, CasePreset, MaterialParams, PlaneMode};
use cavityfield::pipeline::{boundary_residuals, solve_case, sweep_n0, sweep_x0, CaseSolution};
use cavityfield::SolverConfig;

const GAMMA: f64 = 20.0;
const DEPTH: f64 = 10.0;
const GAMMA_H: f64 = GAMMA * DEPTH;
const KAPPA: f64 = 1.8;
const W_CASE1: f64 = 12.5;

fn table1() -> MaterialParams {
    MaterialParams::new(20.0, 0.3, GAMMA, 0.8, PlaneMode::PlaneStrain).unwrap()
}

fn solve_options() -> MapOptions {
    MapOptions {
        assignment_factor: 1.2,
        backward_series_len: Some(120),
    }
}

fn fine_spec(x0: f64) -> cavityfield::CavitySpec {
    build_case_boundary(
        &CasePreset::CompositeEllipse {
            depth_m: DEPTH,
            half_count: 120,
        },
        x0,
    )
    .unwrap()
}

/// Table-1 solution at x0 = 500, shared by the solve criteria.
fn table1_solution() -> &'static CaseSolution {
    static SOLUTION: OnceLock<CaseSolution> = OnceLock::new();
    SOLUTION.get_or_init(|| {
        solve_case(
            &fine_spec(500.0),
            &table1(),
            &SolverConfig::default(),
            &solve_options(),
        )
        .unwrap()
    })
}

fn theta_grid(count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / count as f64)
        .collect()
}

#[test]
fn criterion_01_mapping_roundtrip() {
    let start = Instant::now();
    let spec = build_case_boundary(
        &CasePreset::CompositeEllipse {
            depth_m: DEPTH,
            half_count: 30,
        },
        1.0,
    )
    .unwrap();
    let forward = solve_forward(&spec, 1.2).unwrap();
    let backward = fit_backward(&forward, &spec).unwrap();
    let scale = spec.size();
    let mut colloc: f64 = 0.0;
    for p in &spec.points {
        let rt = backward.eval(forward.eval(*p).unwrap()).unwrap();
        colloc = colloc.max((rt - p).norm());
    }
    let n = spec.points.len();
    let mut mid: f64 = 0.0;
    for i in 0..n {
        let m = 0.5 * (spec.points[i] + spec.points[(i + 1) % n]);
        let rt = backward.eval(forward.eval(m).unwrap()).unwrap();
        mid = mid.max((rt - m).norm());
    }
    let elapsed = start.elapsed();
    assert!(colloc <= 1e-6 * scale, "collocation roundtrip {colloc}");
    assert!(mid <= 1e-2 * scale, "midpoint roundtrip {mid}");
    assert!(elapsed.as_secs_f64() < 1.0, "mapping took {elapsed:?}");
    println!(
        "criterion 01 PASS mapping roundtrip: collocation {:.3e} <= {:.3e}, midpoints {:.3e} <= {:.3e}, {:?} < 1 s",
        colloc,
        1e-6 * scale,
        mid,
        1e-2 * scale,
        elapsed
    );
}

#[test]
fn criterion_02_charge_constraints() {
    let spec = build_case_boundary(
        &CasePreset::CompositeEllipse {
            depth_m: DEPTH,
            half_count: 30,
        },
        1.0,
    )
    .unwrap();
    let forward = solve_forward(&spec, 1.2).unwrap();
    let sum = forward.charges_sum().abs();
    let modulus = spec
        .points
        .iter()
        .map(|p| (forward.eval(*p).unwrap().norm() - 1.0).abs())
        .fold(0.0, f64::max);
    assert!(sum <= 1e-12, "charge sum {sum}");
    assert!(modulus <= 1e-8, "collocation modulus error {modulus}");
    println!(
        "criterion 02 PASS charge constraints: sum {sum:.3e} <= 1e-12, modulus error {modulus:.3e} <= 1e-8"
    );
}

#[test]
fn criterion_03_mobius_identities() {
    let v = build_verruijt(2.0021).unwrap();
    let identity = (v.a * v.a - (v.h * v.h - 1.0)).abs();
    assert!(identity <= 1e-12, "a^2 - (h^2 - 1) = {identity}");
    let mut roundtrip: f64 = 0.0;
    for i in 0..100 {
        // Deterministic quasi-random annulus points.
        let rho = v.alpha + (1.0 - v.alpha) * ((i as f64 * 0.618_034) % 1.0);
        let ang = 2.0 * std::f64::consts::PI * ((i as f64 * 0.381_966 + 0.05) % 1.0);
        let zeta = Complex64::from_polar(rho.max(v.alpha), ang);
        if (zeta - Complex64::new(1.0, 0.0)).norm() < 1e-3 {
            continue;
        }
        let back = v.zeta_of_w(v.w_of_zeta(zeta).unwrap()).unwrap();
        roundtrip = roundtrip.max((back - zeta).norm());
    }
    assert!(roundtrip <= 1e-12, "roundtrip {roundtrip}");
    let mut line: f64 = 0.0;
    for i in 0..360 {
        let zeta =
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / 360.0);
        let w = v.w_of_zeta(zeta).unwrap();
        line = line.max((w.im - v.h).abs() / (1.0 + w.norm()));
    }
    assert!(line <= 1e-10, "surface line deviation {line}");
    println!(
        "criterion 03 PASS Möbius identities: a^2 defect {identity:.3e} <= 1e-12, roundtrip {roundtrip:.3e} <= 1e-12, unit circle to Im w = h within {line:.3e} <= 1e-10"
    );
}

#[test]
fn criterion_04_equilibrium_single_valuedness() {
    let sol = table1_solution();
    let a_ref = Complex64::new(0.0, -W_CASE1 * GAMMA / (1.0 + KAPPA));
    let b_ref = Complex64::new(0.0, KAPPA * W_CASE1 * GAMMA / (1.0 + KAPPA));
    let a_err = (sol.state.a.get(-1) - a_ref).norm() / a_ref.norm();
    let b_err = (sol.state.b.get(-1) - b_ref).norm() / b_ref.norm();
    let k0_ref = Complex64::new(0.0, -W_CASE1 * GAMMA);
    let k0_err = (sol.cavity_data.resultant_coeff - k0_ref).norm() / k0_ref.norm();
    assert!(a_err <= 1e-6, "A_-1 relative error {a_err}");
    assert!(b_err <= 1e-6, "B_-1 relative error {b_err}");
    assert!(k0_err <= 1e-6, "K0 relative error {k0_err}");
    println!(
        "criterion 04 PASS equilibrium: A_-1 err {a_err:.3e}, B_-1 err {b_err:.3e}, K0 err {k0_err:.3e}, all <= 1e-6 (oracles -89.2857i / +160.714i / -250i)"
    );
}

#[test]
fn criterion_05_far_field() {
    let sol = table1_solution();
    let weights = lanczos_weights(sol.state.config.n0);
    let surface = build_ring_series(&sol.state, &sol.map, KAPPA, 1.0, Some(&weights)).unwrap();
    let g0_at_one = surface
        .eval(&sol.map, 0.0, Some(&weights))
        .unwrap()
        .displacement
        .norm();
    assert!(g0_at_one <= 1e-10, "|g0(1)| = {g0_at_one}");
    let mut traction: f64 = 0.0;
    for theta in [0.5f64.to_radians(), -(0.5f64.to_radians())] {
        let p = surface.eval(&sol.map, theta, Some(&weights)).unwrap();
        traction = traction.max(p.radial.norm());
    }
    assert!(
        traction <= 0.01 * GAMMA_H,
        "traction near the far-field point {traction}"
    );
    println!(
        "criterion 05 PASS far field: |g0(1)| {g0_at_one:.3e} <= 1e-10, filtered traction near theta=0 {traction:.3e} <= {:.1} kPa",
        0.01 * GAMMA_H
    );
}

#[test]
fn criterion_06_boundary_residuals() {
    let sol = table1_solution();
    let res = boundary_residuals(sol, 5.0, 720, true).unwrap();
    let shear = sol.material.shear_modulus_kpa();
    let disp = res.constrained_displacement_max / (2.0 * shear);
    let disp_limit = 0.05 * GAMMA_H * DEPTH / (2.0 * shear);
    assert!(
        res.free_traction_max <= 0.05 * GAMMA_H,
        "free traction {}",
        res.free_traction_max
    );
    assert!(disp <= disp_limit, "constrained displacement {disp}");
    assert!(
        res.cavity_traction_rel_l2 <= 0.02,
        "cavity L2 {}",
        res.cavity_traction_rel_l2
    );
    println!(
        "criterion 06 PASS boundary residuals: free traction {:.3e} <= {:.1} kPa, constrained displacement {:.3e} <= {:.3e} m, cavity traction L2 {:.3e} <= 0.02",
        res.free_traction_max,
        0.05 * GAMMA_H,
        disp,
        disp_limit,
        res.cavity_traction_rel_l2
    );
}

#[test]
fn criterion_07_lanczos_effect() {
    let sol = table1_solution();
    let thetas = theta_grid(720);
    let tv = |samples: &[cavityfield::FieldSample]| {
        samples
            .windows(2)
            .map(|w| (w[1].sigma_theta - w[0].sigma_theta).abs())
            .sum::<f64>()
    };
    let filtered = sol.ring_fields(sol.map.alpha(), &thetas, true).unwrap();
    let raw = sol.ring_fields(sol.map.alpha(), &thetas, false).unwrap();
    let (tv_f, tv_r) = (tv(&filtered), tv(&raw));
    assert!(tv_r > tv_f, "total variation raw {tv_r} vs filtered {tv_f}");
    println!(
        "criterion 07 PASS Lanczos effect: unfiltered hoop-stress total variation {tv_r:.1} > filtered {tv_f:.1}"
    );
}

#[test]
fn criterion_08_convergence_sweeps() {
    let preset = CasePreset::CompositeEllipse {
        depth_m: DEPTH,
        half_count: 120,
    };
    let x0s = [1.0, 10.0, 50.0, 100.0, 200.0, 500.0];
    let sweep = sweep_x0(
        |x0| build_case_boundary(&preset, x0),
        &table1(),
        &SolverConfig::default(),
        &solve_options(),
        &x0s,
        240,
        true,
    )
    .unwrap();
    assert!(
        sweep.errors.iter().all(Option::is_none),
        "{:?}",
        sweep.errors
    );
    for pair in sweep.sup_diffs.windows(2) {
        assert!(
            pair[1] < pair[0],
            "half-width sweep sup diffs not decreasing: {:?}",
            sweep.sup_diffs
        );
    }
    let x0_diffs = sweep.sup_diffs.clone();

    let spec = fine_spec(500.0);
    let sweep = sweep_n0(
        &spec,
        &table1(),
        &SolverConfig::default(),
        &solve_options(),
        &[20, 40, 80],
        240,
        true,
    )
    .unwrap();
    assert!(
        sweep.errors.iter().all(Option::is_none),
        "{:?}",
        sweep.errors
    );
    for pair in sweep.sup_diffs.windows(2) {
        assert!(
            pair[1] < pair[0],
            "truncation sweep sup diffs not decreasing: {:?}",
            sweep.sup_diffs
        );
    }
    println!(
        "criterion 08 PASS convergence: x0 sweep sup diffs {:?} and N0 sweep sup diffs {:?} both decreasing",
        x0_diffs, sweep.sup_diffs
    );
}

#[test]
fn criterion_09_linearity_in_gamma() {
    let sol = table1_solution();
    let mut doubled_mat = table1();
    doubled_mat.gamma_kpa *= 2.0;
    let doubled = solve_case(
        &fine_spec(500.0),
        &doubled_mat,
        &SolverConfig::default(),
        &solve_options(),
    )
    .unwrap();
    let scale = sol.state.d.max_abs();
    let mut worst: f64 = 0.0;
    for (n, c) in sol.state.d.iter() {
        worst = worst.max((doubled.state.d.get(n) - 2.0 * c).norm());
    }
    assert!(
        worst <= 1e-10 * scale,
        "coefficient linearity defect {worst}"
    );
    let thetas = theta_grid(64);
    let base = sol.ring_fields(sol.map.alpha(), &thetas, true).unwrap();
    let twice = doubled
        .ring_fields(doubled.map.alpha(), &thetas, true)
        .unwrap();
    let mut field_defect: f64 = 0.0;
    let mut field_scale: f64 = 0.0;
    for (a, b) in base.iter().zip(&twice) {
        for (x, y) in [
            (a.sigma_rho, b.sigma_rho),
            (a.sigma_theta, b.sigma_theta),
            (a.tau_rho_theta, b.tau_rho_theta),
            (a.u, b.u),
            (a.v, b.v),
        ] {
            field_defect = field_defect.max((y - 2.0 * x).abs());
            field_scale = field_scale.max(y.abs());
        }
    }
    assert!(
        field_defect <= 1e-10 * field_scale,
        "field linearity defect {field_defect}"
    );
    println!(
        "criterion 09 PASS linearity: doubling gamma doubles coefficients (defect {:.3e}) and fields (defect {:.3e}) within 1e-10 relative",
        worst / scale,
        field_defect / field_scale
    );
}

#[test]
fn criterion_10_axisymmetric_cross_check() {
    let (depth, radius): (f64, f64) = (10.0, 5.0);
    let alpha = radius / (depth + (depth * depth - radius * radius).sqrt());
    let a = (depth * depth - radius * radius).sqrt();
    let spec = build_case_boundary(
        &CasePreset::Axisymmetric {
            mobius_a: a,
            shape_coeffs: vec![],
            inner_radius: alpha,
            half_count: 120,
        },
        500.0,
    )
    .unwrap();
    let sol = solve_case(
        &spec,
        &table1(),
        &SolverConfig::default(),
        &MapOptions {
            assignment_factor: 0.8,
            backward_series_len: Some(120),
        },
    )
    .unwrap();
    let k0_ref = Complex64::new(0.0, -12.5 * GAMMA);
    let k0_err = (sol.cavity_data.resultant_coeff - k0_ref).norm() / k0_ref.norm();
    assert!(k0_err <= 1e-6, "circle K0 error {k0_err}");

    let count = 256;
    let plus: Vec<f64> = (1..count)
        .map(|i| std::f64::consts::PI * i as f64 / count as f64)
        .collect();
    let minus: Vec<f64> = plus.iter().map(|t| -t).collect();
    let up = sol.ring_fields(sol.map.alpha(), &plus, true).unwrap();
    let down = sol.ring_fields(sol.map.alpha(), &minus, true).unwrap();
    let scale = up.iter().map(|s| s.sigma_theta.abs()).fold(0.0, f64::max);
    let mut asym: f64 = 0.0;
    for (p, m) in up.iter().zip(&down) {
        asym = asym.max((p.sigma_theta - m.sigma_theta).abs());
    }
    assert!(
        asym <= 1e-6 * scale,
        "mirror asymmetry {asym} vs scale {scale}"
    );
    println!(
        "criterion 10 PASS axisymmetric cross-check: K0 err {k0_err:.3e} <= 1e-6 (W = 12.5), hoop-stress mirror asymmetry {:.3e} <= 1e-6 of trace scale",
        asym / scale
    );
}

#[test]
fn criterion_11_performance_and_factorization_reuse() {
    let start = Instant::now();
    let sol = solve_case(
        &fine_spec(500.0),
        &table1(),
        &SolverConfig::default(),
        &solve_options(),
    )
    .unwrap();
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() <= 60.0, "solve took {elapsed:?}");
    assert_eq!(
        sol.state.factorizations, 2,
        "expected one factorization per coefficient block"
    );
    assert!(sol.state.iterations >= 1);
    let (c_neg, c_pos) = sol.state.condition_estimates;
    assert!(
        c_neg.is_finite() && c_pos.is_finite(),
        "condition estimates {c_neg} {c_pos}"
    );
    println!(
        "criterion 11 PASS performance: full solve (N0 = 80, M = 360) in {elapsed:?} <= 60 s, {} LU factorizations for {} iteration passes",
        sol.state.factorizations, sol.state.iterations
    );
}
