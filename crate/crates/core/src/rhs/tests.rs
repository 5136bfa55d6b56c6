use std::f64::consts::PI;

use super::*;
use crate::spectral::{hs_norm, Grid};

fn grid(n: usize) -> Grid {
    Grid::new(2.0 * PI, n).unwrap()
}

fn raw() -> QuadratureSpec {
    QuadratureSpec::default().with_dealias(false)
}

fn rel(a: &Field, b: &Field) -> f64 {
    a.sub(b).unwrap().l2_norm() / b.l2_norm()
}

#[test]
fn slope_of_constant_vanishes() {
    let f = Field::from_fn(grid(32), |_| 3.0).unwrap();
    for alpha in [0.1, -1.0, 2.5] {
        assert!(slope_field(&f, alpha).unwrap().max_abs() < 1e-14);
    }
    assert!(matches!(slope_field(&f, 0.0), Err(Error::ZeroShift)));
}

#[test]
fn slope_of_sine_at_half_period() {
    let f = Field::from_fn(grid(32), f64::sin).unwrap();
    let d = slope_field(&f, PI).unwrap();
    for (x, v) in grid(32).nodes().iter().zip(d.samples()) {
        assert!((v - 2.0 / PI * x.sin()).abs() < 1e-14);
    }
}

#[test]
fn slope_tends_to_derivative() {
    let f = Field::from_fn(grid(64), |x| (x.sin()).exp()).unwrap();
    let alpha = 1e-6;
    let d = slope_field(&f, alpha).unwrap();
    let fx = derivative(&f, 1);
    let fxx = derivative(&f, 2);
    let err = d.sub(&fx).unwrap().max_abs();
    assert!(err <= alpha * fxx.max_abs());
}

#[test]
fn t_vanishes_on_constants() {
    let g = grid(64);
    let c = Field::from_fn(g, |_| 0.7).unwrap();
    let f = Field::from_fn(g, |x| 0.3 * x.sin() + 0.1 * (2.0 * x).cos()).unwrap();
    assert!(apply_T(&c, &f, &raw()).unwrap().max_abs() < 1e-14);
    assert!(apply_T(&f, &c, &raw()).unwrap().max_abs() < 1e-14);
}

#[test]
fn t_is_cubic_in_amplitude() {
    let g = grid(128);
    let ratios: Vec<f64> = [0.05, 0.1, 0.2]
        .iter()
        .map(|&a| {
            let f = Field::from_fn(g, |x| a * x.sin()).unwrap();
            apply_T(&f, &f, &raw()).unwrap().l2_norm() / (a * a * a)
        })
        .collect();
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    assert!(hi / lo < 1.1, "{ratios:?}");
}

#[test]
fn t_weight_below_one() {
    let g = grid(128);
    let f = Field::from_fn(g, |x| 2.0 * x.sin() + (3.0 * x).cos()).unwrap();
    for kernel in [AlphaKernel::Periodic, AlphaKernel::Truncated] {
        let w = max_t_weight(&f, &raw().with_kernel(kernel)).unwrap();
        assert!(w < 1.0 && w > 0.5);
    }
}

#[test]
fn t_preserves_parity() {
    let g = grid(128);
    let mirror = |v: &[f64]| -> Vec<f64> { (0..v.len()).map(|j| v[(v.len() - j) % v.len()]).collect() };
    let even = Field::from_fn(g, |x| 0.4 * x.cos() + 0.2 * (3.0 * x).cos()).unwrap();
    let te = apply_T(&even, &even, &raw()).unwrap();
    let odd = Field::from_fn(g, |x| 0.4 * x.sin() + 0.2 * (2.0 * x).sin()).unwrap();
    let to = apply_T(&odd, &odd, &raw()).unwrap();
    let scale = te.max_abs().max(to.max_abs());
    for ((a, b), (c, d)) in te.samples().iter().zip(mirror(te.samples())).zip(to.samples().iter().zip(mirror(to.samples()))) {
        assert!((a - b).abs() < 1e-12 * scale);
        assert!((c + d).abs() < 1e-12 * scale);
    }
}

#[test]
fn t_converges_under_refinement() {
    let g = grid(128);
    let f = Field::from_fn(g, |x| 0.5 * x.sin() + 0.2 * (4.0 * x).cos() + 0.05 * (9.0 * x).sin()).unwrap();
    let a = apply_T(&f, &f, &raw()).unwrap();
    let b = apply_T(&f, &f, &raw().with_order(16)).unwrap();
    assert!(rel(&a, &b) < 1e-8, "{}", rel(&a, &b));
}

#[test]
fn t_matches_uniform_midpoint_rule() {
    // The lattice-summed integrand is smooth and periodic in alpha, so the
    // midpoint rule over one period converges spectrally.
    let g = grid(64);
    let f = Field::from_fn(g, |x| 0.6 * x.sin() + 0.3 * (2.0 * x + 0.4).cos()).unwrap();
    let t = apply_T(&f, &f, &raw()).unwrap();
    let k = Kernels::new(&g, AlphaKernel::Periodic);
    let fx = derivative(&f, 1);
    let m = 4000;
    let h = g.length() / m as f64;
    let mut acc = vec![0.0; g.n()];
    for j in 0..m {
        let alpha = -0.5 * g.length() + (j as f64 + 0.5) * h;
        let (fs, gs) = (f.shift(alpha), fx.shift(alpha));
        let a = k.at(alpha);
        for i in 0..g.n() {
            acc[i] += h * (fx.samples()[i] - gs.samples()[i]) * a.t(f.samples()[i] - fs.samples()[i]);
        }
    }
    let oracle = Field::from_samples(g, acc.iter().map(|v| -v / PI).collect()).unwrap();
    assert!(rel(&t, &oracle) < 1e-10, "{}", rel(&t, &oracle));
}

#[test]
fn full_equation_mean_is_conserved() {
    let g = grid(128);
    let f = Field::from_fn(g, |x| 1.0 + 0.5 * x.sin() + 0.3 * (2.0 * x).cos()).unwrap();
    let r = rhs_full(&f, &QuadratureSpec::default()).unwrap();
    assert!(r.mean().abs() < 1e-12);
    let raw_t = apply_T(&f, &f, &raw()).unwrap();
    assert!(raw_t.mean().abs() < 1e-10 * raw_t.max_abs());
}

#[test]
fn rhs_full_small_amplitude_is_linear() {
    let g = grid(128);
    assert!(rhs_full(&Field::zeros(g), &raw()).unwrap().is_zero());
    // The relative size of the nonlinearity for a sin(x) is a^2/4 + O(a^4).
    for a in [0.01, 0.001] {
        let f = Field::from_fn(g, |x| a * x.sin()).unwrap();
        let d = abs_derivative(&f, 1.0);
        let r = rhs_full(&f, &raw()).unwrap();
        let ratio = r.add(&d).unwrap().l2_norm() / d.l2_norm();
        assert!((ratio / (a * a) - 0.25).abs() < 1e-3, "{ratio}");
    }
}

#[test]
fn rhs_full_matches_direct_quadrature() {
    let g = grid(256);
    let f = Field::from_fn(g, |x| 0.5 * x.sin() + 0.2 * (3.0 * x).cos()).unwrap();
    let r = rhs_full(&f, &raw()).unwrap();
    let periodic = full_integral(&f, &raw()).unwrap();
    assert!(rel(&periodic, &r) < 1e-9, "{}", rel(&periodic, &r));
    let truncated = full_integral(&f, &raw().with_kernel(AlphaKernel::Truncated)).unwrap();
    assert!(rel(&truncated, &r) < 2e-2 * 10.0);
}

#[test]
fn linear_integral_is_minus_abs_derivative() {
    let g = grid(128);
    let f = Field::from_fn(g, |x| (3.0 * x).sin() + 0.5 * (5.0 * x).cos()).unwrap();
    let lin = linear_integral(&f, &raw()).unwrap();
    let d = abs_derivative(&f, 1.0).scale(-1.0);
    assert!(rel(&lin, &d) < 1e-12);
}

#[test]
fn remainder_vanishes_on_constants_and_shrinks() {
    let g = grid(256);
    let bump = BumpSpec::default();
    let c = Field::from_fn(g, |_| 2.0).unwrap();
    assert!(apply_R_eps(&c, 0.1, &bump, &raw()).unwrap().max_abs() < 1e-14);
    let f = Field::from_fn(g, |x| 0.3 * x.sin() + 0.1 * (7.0 * x).cos()).unwrap();
    let norms: Vec<f64> = [1e-1, 1e-2, 1e-3]
        .iter()
        .map(|&e| {
            let p = RegularizationParams::new(e, 0.25).unwrap();
            let reg = rhs_regularized(&f, &p, &raw()).unwrap();
            let base = derivative(&f, 2).scale(p.nu()).add(&rhs_full(&f, &raw()).unwrap()).unwrap();
            let diff = reg.sub(&base).unwrap().l2_norm();
            let r = apply_R_eps(&f, e, &bump, &raw()).unwrap().without_mean().l2_norm();
            assert!((diff - r).abs() <= 1e-12 * r.max(1e-300));
            diff
        })
        .collect();
    assert!(norms[0] > norms[1] && norms[1] > norms[2], "{norms:?}");
}

#[test]
fn viscosity_from_eps() {
    let p = RegularizationParams::new((-10.0f64).exp(), 0.25).unwrap();
    assert!((p.nu() - 0.1).abs() < 1e-12);
    assert_eq!(RegularizationParams::off().nu(), 0.0);
    assert!(RegularizationParams::new(1.0, 0.25).is_err());
    assert!(RegularizationParams::new(0.1, 0.5).is_err());
}

#[test]
fn mollifier_is_an_approximate_identity() {
    let g = grid(128);
    let bump = BumpSpec::default();
    let c = Field::from_fn(g, |_| 1.5).unwrap();
    let mc = mollify_initial(&c, 0.3, &bump).unwrap();
    assert!(mc.sub(&c).unwrap().max_abs() < 1e-10);

    let k = 5.0;
    let s = Field::from_fn(g, |x| (k * x).sin()).unwrap();
    let ms = mollify_initial(&s, 0.1, &bump).unwrap();
    let want = s.scale(bump.chi_hat(0.1 * k));
    assert!(ms.sub(&want).unwrap().max_abs() < 1e-13);

    let f = Field::from_fn(g, |x| (x.sin()).exp() + 0.2 * (20.0 * x).cos()).unwrap();
    let errs: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&e| mollify_initial(&f, e, &bump).unwrap().sub(&f).unwrap().l2_norm())
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2]);
    for e in [0.5, 0.1, 0.01] {
        let m = mollify_initial(&f, e, &bump).unwrap();
        for (a, b) in m.spectrum().iter().zip(f.spectrum()) {
            assert!(a.norm() <= b.norm() * (1.0 + 1e-12) + 1e-15);
        }
        assert!(hs_norm(&m, 1.5) <= hs_norm(&f, 1.5));
    }
}

