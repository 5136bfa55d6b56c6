use std::f64::consts::PI;

use super::*;
use crate::corpus::{random_bandlimited, single_mode};
use crate::phi::make_log_phi;
use crate::rhs::{rhs_full, QuadratureSpec};
use crate::spectral::Grid;

fn grid(n: usize) -> Grid {
    Grid::new(2.0 * PI, n).unwrap()
}

fn raw() -> QuadratureSpec {
    QuadratureSpec::default().with_dealias(false)
}

#[test]
fn single_mode_energies() {
    let one = PhiWeight::one();
    for k in [1u32, 2, 5] {
        let e = energies(&single_mode(grid(64), 1.0, k).unwrap(), &one);
        let kf = k as f64;
        assert!((e.a - PI * kf.powi(3)).abs() < 1e-10 * e.a);
        assert!((e.b - PI * kf.powi(4)).abs() < 1e-10 * e.b);
        assert!((e.p - PI * kf.powi(5)).abs() < 1e-10 * e.p);
        assert_eq!(e.mu, 1.0);
    }
}

#[test]
fn energies_of_zero() {
    let phi = make_log_phi(1.0).unwrap();
    let e = energies(&Field::zeros(grid(32)), &phi);
    assert_eq!((e.a, e.b, e.p, e.mu), (0.0, 0.0, 0.0, 1.0));
}

#[test]
fn mu_when_a_equals_b() {
    // sin(x) has A = B under any weight, since |ξ| = 1.
    let phi = make_log_phi(1.0).unwrap();
    let e = energies(&single_mode(grid(32), 0.3, 1).unwrap(), &phi);
    assert!((e.a - e.b).abs() < 1e-14 * e.a);
    assert!((e.mu - 1.0 / phi.eval(1.0)).abs() < 1e-14);
}

#[test]
fn a_phi_is_h32_squared_for_unit_weight() {
    let f = random_bandlimited(grid(128), 1, 30, 1.0, 4).unwrap();
    let e = energies(&f, &PhiWeight::one());
    assert!((e.a - hs_norm(&f, 1.5).powi(2)).abs() < 1e-12 * e.a);
}

#[test]
fn q_for_sine() {
    let f = single_mode(grid(32), 1.0, 1).unwrap();
    let r = PI.sqrt();
    let h = |s: f64| (PI * 2f64.powf(s)).sqrt();
    let want = (r + PI) * r + r * h(1.75) + (h(19.0 / 12.0).powf(1.5) + r.sqrt()) * r.sqrt() * r;
    let got = q_functional(&f, &PhiWeight::one());
    assert!((got - want).abs() < 1e-12 * want);
    assert_eq!(q_functional(&Field::zeros(grid(32)), &PhiWeight::one()), 0.0);
}

#[test]
fn q_grows_at_least_quadratically() {
    let phi = make_log_phi(1.0).unwrap();
    for seed in 0..5 {
        let f = random_bandlimited(grid(128), 1, 20, 1.5, seed).unwrap();
        let r = q_functional(&f.scale(2.0), &phi) / q_functional(&f, &phi);
        assert!(r >= 4.0 - 1e-12, "{r}");
    }
}

#[test]
fn besov_of_sine() {
    // ∫ 4k² sin²(kα/2) / α² dα = 2πk³ = 2 ‖sin(kx)‖²_{Ḣ^{3/2}} on one period.
    for k in [1u32, 2, 4, 8] {
        let f = single_mode(grid(256), 1.0, k).unwrap();
        let b = besov_half_sq(&f, &raw()).unwrap();
        let kf = k as f64;
        // The supremum is sampled on the refined grid, off by O((k dx / 4)^2).
        assert!((b / (2.0 * PI * kf.powi(3)) - 1.0).abs() < 2e-3, "{k}: {b}");
        let ratio = b / hs_norm(&f, 2.0).powi(2);
        assert!((ratio * kf / 2.0 - 1.0).abs() < 2e-3);
    }
    assert_eq!(besov_half_sq(&Field::zeros(grid(64)), &raw()).unwrap(), 0.0);
}

#[test]
fn besov_scales_linearly_under_critical_rescaling() {
    let f = random_bandlimited(grid(128), 1, 10, 1.0, 2).unwrap();
    let lambda = 2.0;
    let g2 = Grid::new(2.0 * PI / lambda, 128).unwrap();
    let fl = Field::from_samples(g2, f.samples().iter().map(|v| v / lambda).collect()).unwrap();
    let (b, bl) = (besov_half_sq(&f, &raw()).unwrap(), besov_half_sq(&fl, &raw()).unwrap());
    assert!((bl / (lambda * b) - 1.0).abs() < 0.02, "{}", bl / b);
}

fn brute_holder(f: &Field, beta: f64) -> f64 {
    let g = derivative(f, 2);
    let s = g.samples();
    let n = s.len();
    let dx = f.grid().dx();
    let mut best = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let d = (i as i64 - j as i64).unsigned_abs() as usize;
            let d = d.min(n - d);
            if d > 0 {
                best = best.max((s[i] - s[j]).abs() / (d as f64 * dx).powf(beta));
            }
        }
    }
    best
}

#[test]
fn holder_matches_pairwise_sup() {
    for seed in 0..3 {
        let f = random_bandlimited(grid(256), 1, 12, 1.0, seed).unwrap();
        let h = holder_c2beta(&f, 0.25, &raw());
        let b = brute_holder(&f, 0.25);
        assert!((h / b - 1.0).abs() < 0.05, "{h} {b}");
    }
    let f = single_mode(grid(256), 1.0, 3).unwrap();
    let h = holder_c2beta(&f, 0.25, &raw());
    assert_eq!(holder_c2beta(&f.scale(2.0), 0.25, &raw()), 2.0 * h);
    assert_eq!(holder_c2beta(&Field::zeros(grid(64)), 0.25, &raw()), 0.0);
}

#[test]
fn holder_shift_ladder() {
    let f = Field::zeros(grid(64));
    let s = holder_shifts(&f, &raw());
    assert_eq!(*s.last().unwrap(), PI);
    assert!(s.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn log_energy_identity() {
    for seed in 0..3 {
        let f = random_bandlimited(grid(256), 1, 16, 1.0, seed).unwrap().scale(0.5);
        let lhs = rhs_full(&f, &raw()).unwrap().inner(&f).unwrap();
        let le = log_energy(&f, &raw()).unwrap();
        assert!(le > 0.0);
        assert!((lhs + le / PI).abs() < 1e-6 * le / PI, "{lhs} {le}");
        assert!(log_energy(&f.scale(2.0), &raw()).unwrap() >= le);
    }
    assert_eq!(log_energy(&Field::zeros(grid(64)), &raw()).unwrap(), 0.0);
}

#[test]
fn lipschitz_values() {
    let f = single_mode(grid(64), 0.3, 5).unwrap();
    assert!((lipschitz_seminorm(&f) / 1.5 - 1.0).abs() < 1e-6);
    assert_eq!(lipschitz_seminorm(&Field::zeros(grid(64))), 0.0);
    for seed in 0..4 {
        let f = random_bandlimited(grid(128), 1, 40, 0.5, seed).unwrap();
        let (a, b) = (lipschitz_refined(&f, 4), lipschitz_refined(&f, 8));
        assert!((a - b).abs() <= 1e-8 * b, "{a} {b}");
    }
}

#[test]
fn smallness_margin_values() {
    let c = ConstantSet::default();
    assert_eq!(smallness_margin(&Field::zeros(grid(64)), &c), 1.0);
    let f = single_mode(grid(64), 0.01, 1).unwrap();
    let want = 1.0 - 2.0 * (17.0f64 + 1.0).sqrt() * (2.0 + 0.01f64).powi(2) * (0.0001 * PI).sqrt();
    assert!((smallness_margin(&f, &c) - want).abs() < 1e-8);
    let m: Vec<f64> = [0.01, 0.02, 0.04]
        .iter()
        .map(|&a| smallness_margin(&single_mode(grid(64), a, 1).unwrap(), &c))
        .collect();
    assert!(m[0] > m[1] && m[1] > m[2]);
}

#[test]
fn report_is_translation_invariant() {
    let g = grid(128);
    let f = random_bandlimited(g, 1, 20, 1.0, 9).unwrap();
    let shifted = f.shift(7.0 * g.dx());
    let ctx = ReportContext::new(make_log_phi(1.0).unwrap(), raw(), 0.25, ConstantSet::default());
    let a = EnergyReport::compute(0.0, &f, &ctx).unwrap();
    let b = EnergyReport::compute(0.0, &shifted, &ctx).unwrap();
    let pairs = [
        (a.l2, b.l2),
        (a.lip, b.lip),
        (a.a_phi, b.a_phi),
        (a.b_phi, b.b_phi),
        (a.p_phi, b.p_phi),
        (a.mu_phi, b.mu_phi),
        (a.q_functional, b.q_functional),
        (a.besov_half_sq, b.besov_half_sq),
        (a.holder_c2beta, b.holder_c2beta),
        (a.log_energy, b.log_energy),
        (a.smallness_margin, b.smallness_margin),
    ];
    for (x, y) in pairs {
        assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0), "{x} {y}");
    }
    assert!(a.is_finite());
    assert_eq!(a.hs(1.5), Some(a.h32()));
}
