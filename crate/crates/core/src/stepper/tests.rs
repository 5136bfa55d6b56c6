use std::f64::consts::PI;

use super::*;
use crate::constants::{ConstantSet, Provenance};
use crate::corpus::{normalize_h32, single_mode, white_noise};
use crate::functionals::ReportContext;
use crate::phi::{make_log_phi, PhiWeight};
use crate::spectral::{hs_norm, Grid};

fn grid(n: usize) -> Grid {
    Grid::new(2.0 * PI, n).unwrap()
}

fn ctx() -> ReportContext {
    ReportContext::new(PhiWeight::one(), QuadratureSpec::default(), 0.25, ConstantSet::default())
}

#[test]
fn phi_functions_are_continuous_at_the_switch() {
    for z in [-0.1f64, 0.1] {
        let z = z * (1.0 - 1e-12);
        let (a1, a2) = phi_functions(z);
        let e = z.exp_m1();
        assert!((a1 - e / z).abs() < 1e-14);
        assert!((a2 - (e - z) / (z * z)).abs() < 1e-13);
    }
    assert_eq!(phi_functions(0.0), (1.0, 0.5));
}

#[test]
fn linear_modes_decay_exactly() {
    let g = grid(64);
    let f = Field::from_fn(g, |x| 1e-12 * ((3.0 * x).sin() + (7.0 * x).cos())).unwrap();
    // R_ε has a linear part, so only the unregularized flow is purely linear here.
    let p = RegularizationParams::off();
    let dt = 0.05;
    let out = step_etd(SolverState::new(f.clone(), p, dt), &QuadratureSpec::default()).unwrap();
    assert_eq!(out.t, dt);
    for slot in [3usize, 7, 64 - 3, 64 - 7] {
        let xi = g.wavenumber(slot);
        let want = f.spectrum()[slot] * (-(p.nu() * xi * xi + xi.abs()) * dt).exp();
        assert!((out.f.spectrum()[slot] - want).norm() < 1e-10 * want.norm());
    }
}

#[test]
fn viscous_semigroup_coefficients() {
    let g = grid(64);
    let f = Field::zeros(g);
    let nu = 0.1;
    let coef = etd_coefficients(&f, nu, 0.3);
    for slot in [0usize, 1, 5, 40] {
        let xi = g.wavenumber(slot);
        assert!((coef[slot].0 - (-(nu * xi * xi + xi.abs()) * 0.3).exp()).abs() < 1e-15);
    }
    assert_eq!(coef[0], (1.0, 0.3, 0.15));
}

#[test]
fn zero_step_is_identity() {
    let f = single_mode(grid(32), 0.3, 2).unwrap();
    let s = step_etd(SolverState::new(f.clone(), RegularizationParams::off(), 0.0), &QuadratureSpec::default()).unwrap();
    assert_eq!(s.f, f);
    assert_eq!(s.t, 0.0);
}

#[test]
fn second_order_convergence() {
    let g = grid(64);
    let f = Field::from_fn(g, |x| 0.3 * x.sin() + 0.1 * (2.0 * x).cos()).unwrap();
    let p = RegularizationParams::off();
    let q = QuadratureSpec::default();
    let t = 0.02;
    let run = |dt: f64| integrate_fixed(&f, &p, &q, dt, (t / dt).round() as usize).unwrap();
    let reference = run(1.25e-4);
    let e1 = run(1e-3).sub(&reference).unwrap().l2_norm();
    let e2 = run(5e-4).sub(&reference).unwrap().l2_norm();
    let ratio = e1 / e2;
    assert!(ratio > 3.3 && ratio < 4.8, "{ratio}");
}

#[test]
fn guards() {
    let g = grid(64);
    let guards = GuardSpec::default();
    let zero = SolverState::new(Field::zeros(g), RegularizationParams::off(), 1e-3);
    assert_eq!(blowup_guard(&zero, &guards), Status::Running);
    let steep = SolverState::new(single_mode(g, 100.0, 1).unwrap(), RegularizationParams::off(), 1e-3);
    assert_eq!(blowup_guard(&steep, &guards), Status::HaltedBlowup);
    let noise = SolverState::new(white_noise(g, 0.01, 3).unwrap(), RegularizationParams::off(), 1e-3);
    assert!(tail_fraction(&noise.f) > 0.1);
    assert_eq!(blowup_guard(&noise, &guards), Status::HaltedResolution);
}

#[test]
fn zero_data_trajectory() {
    let spec = StepperSpec::new(0.1, 0.05);
    let traj = evolve(
        &Field::zeros(grid(32)),
        &RegularizationParams::off(),
        &QuadratureSpec::default(),
        &spec,
        &ctx(),
        EvolveOptions::default(),
    )
    .unwrap();
    assert_eq!(traj.status, Status::Finished);
    assert_eq!(traj.times(), vec![0.0, 0.05, 0.1]);
    for r in &traj.rows {
        assert_eq!(r.report.l2, 0.0);
        assert_eq!(r.report.a_phi, 0.0);
    }
    assert_eq!(traj.rows.last().unwrap().status, Status::Finished);
}

#[test]
fn small_data_decays_and_is_deterministic() {
    let g = grid(128);
    let f0 = normalize_h32(&single_mode(g, 1.0, 1).unwrap(), 0.05).unwrap();
    let spec = StepperSpec::new(0.5, 0.05);
    let run = || {
        evolve(
            &f0,
            &RegularizationParams::off(),
            &QuadratureSpec::default(),
            &spec,
            &ctx(),
            EvolveOptions::default(),
        )
        .unwrap()
    };
    let a = run();
    assert_eq!(a.status, Status::Finished);
    for w in a.rows.windows(2) {
        assert!(w[1].report.a_phi <= w[0].report.a_phi + 1e-10);
    }
    let b = run();
    assert_eq!(a.rows, b.rows);
}

#[test]
fn mean_is_conserved() {
    let g = grid(128);
    let f0 = Field::from_fn(g, |x| 0.7 + 0.3 * x.sin() + 0.2 * (2.0 * x).cos()).unwrap();
    let spec = StepperSpec::new(0.2, 0.1);
    let traj = evolve(
        &f0,
        &RegularizationParams::off(),
        &QuadratureSpec::default(),
        &spec,
        &ctx(),
        EvolveOptions::default(),
    )
    .unwrap();
    assert!((traj.final_field.mean() - 0.7).abs() < 1e-10);
}

#[test]
fn guard_halt_is_reported() {
    let g = grid(64);
    let spec = StepperSpec::new(0.1, 0.05);
    let traj = evolve(
        &white_noise(g, 0.01, 1).unwrap(),
        &RegularizationParams::off(),
        &QuadratureSpec::default(),
        &spec,
        &ctx(),
        EvolveOptions::default(),
    )
    .unwrap();
    assert_eq!(traj.status, Status::HaltedResolution);
    assert_eq!(traj.rows.len(), 1);
    assert_eq!(traj.rows[0].status, Status::HaltedResolution);
    assert!(traj.diagnostic.is_some());
}

#[test]
fn report_times_land_on_cadence() {
    let s = StepperSpec::new(0.25, 0.1);
    assert_eq!(s.report_times(), vec![0.0, 0.1, 0.2, 0.25]);
    assert!(StepperSpec::new(0.0, 0.1).validate().is_err());
}

#[test]
fn horizon_sentinels() {
    let g = grid(64);
    let c = ConstantSet::new(1.0, 1.0, 1.0, Provenance::User).unwrap();
    assert_eq!(local_time_horizon(&Field::zeros(g), &make_log_phi(1.0).unwrap(), &c), f64::INFINITY);
    let f = single_mode(g, 0.5, 1).unwrap();
    assert_eq!(local_time_horizon(&f, &PhiWeight::one(), &c), 0.0);
}

#[test]
fn horizon_shrinks_with_energy() {
    let g = grid(64);
    let phi = make_log_phi(1.0).unwrap();
    let c = ConstantSet::new(1.0, 8.0, 1.0, Provenance::User).unwrap();
    let base = single_mode(g, 1.0, 1).unwrap();
    let a1 = hs_norm(&base, 1.5).powi(2);
    let h: Vec<f64> = [0.1, 0.2, 0.4]
        .iter()
        .map(|&a| local_time_horizon(&base.scale((a / a1).sqrt()), &phi, &c))
        .collect();
    assert!(h.iter().all(|v| v.is_finite() && *v > 0.0), "{h:?}");
    assert!(h[0] >= h[1] && h[1] >= h[2], "{h:?}");
}
