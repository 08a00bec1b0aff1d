//! Full solve of the bundled over-/under-break cavity with the reference
//! parameter set (E = 20 MPa, nu = 0.3, gamma = 20 kPa/m, k0 = 0.8) and a
//! printout of the equilibrium checks, boundary residuals and the extreme
//! hoop stresses along the cavity wall.
//!
//! Run with: cargo run --example full_solve

use cavityfield::annulus::MapOptions;
use cavityfield::geometry::{build_case_boundary, CasePreset, MaterialParams, PlaneMode};
use cavityfield::pipeline::{boundary_residuals, solve_case};
use cavityfield::SolverConfig;

fn main() -> cavityfield::Result<()> {
    let material = MaterialParams::new(20.0, 0.3, 20.0, 0.8, PlaneMode::PlaneStrain)?;
    let spec = build_case_boundary(
        &CasePreset::CompositeEllipse {
            depth_m: 10.0,
            half_count: 120,
        },
        500.0,
    )?;
    let sol = solve_case(
        &spec,
        &material,
        &SolverConfig::default(),
        &MapOptions {
            assignment_factor: 1.2,
            backward_series_len: Some(120),
        },
    )?;

    println!("cavity: {}", sol.spec.label);
    println!(
        "excavated-area datum W = {:.6} m^2 (trace polygon)",
        sol.w_area
    );
    println!(
        "solver: {} correction passes, stop = {:?}, condition estimates {:.2} / {:.2}",
        sol.state.iterations,
        sol.state.stop,
        sol.state.condition_estimates.0,
        sol.state.condition_estimates.1
    );
    println!(
        "equilibrium: A_-1 rel {:.2e}, B_-1 rel {:.2e}, resultant rel {:.2e}, single-valuedness {:.2e}",
        sol.equilibrium.a_minus1_rel,
        sol.equilibrium.b_minus1_rel,
        sol.equilibrium.resultant_rel,
        sol.equilibrium.single_valued_rel
    );

    let res = boundary_residuals(&sol, 5.0, 720, true)?;
    println!(
        "boundary residuals (filtered): free-surface traction {:.3} kPa, cavity traction L2 {:.4}",
        res.free_traction_max, res.cavity_traction_rel_l2
    );

    // Hoop stress extremes along the cavity wall.
    let thetas: Vec<f64> = (0..720)
        .map(|i| 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / 720.0)
        .collect();
    let samples = sol.ring_fields(sol.map.alpha(), &thetas, true)?;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut z_lo, mut z_hi) = (samples[0].z, samples[0].z);
    let mut v_max = 0.0f64;
    for s in &samples {
        if s.sigma_theta < lo {
            lo = s.sigma_theta;
            z_lo = s.z;
        }
        if s.sigma_theta > hi {
            hi = s.sigma_theta;
            z_hi = s.z;
        }
        v_max = v_max.max(s.v.abs());
    }
    println!("\ncavity-wall excavation hoop stress (filtered):");
    println!("  min {lo:8.2} kPa near ({:6.2}, {:6.2})", z_lo.re, z_lo.im);
    println!("  max {hi:8.2} kPa near ({:6.2}, {:6.2})", z_hi.re, z_hi.im);
    println!("  largest vertical wall displacement {:.2} mm", v_max * 1e3);
    Ok(())
}
