use std::f64::consts::PI;

use muskat::corpus::random_bandlimited;
use muskat::io::fmt_f64;
use muskat::rhs::{mollify_initial, rhs_full, BumpSpec, QuadratureSpec};
use muskat::{
    adapt_phi_to_data, apply_multiplier, hs_norm, make_log_phi, validate_phi, ConstantSet, EnergyReport, Field, Grid,
    PhiWeight, ReportContext, SymbolSpec,
};
use proptest::prelude::*;

fn grid(n: usize) -> Grid {
    Grid::new(2.0 * PI, n).unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

fn band() -> impl Strategy<Value = (u32, u32, f64, u64)> {
    (1u32..12, 0u32..8, 0.0f64..3.0, any::<u64>()).prop_map(|(lo, w, d, s)| (lo, lo + w, d, s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn abs_powers_compose((lo, hi, d, seed) in band(), a in 0.0f64..2.0, b in 0.0f64..2.0) {
        let f = random_bandlimited(grid(64), lo, hi, d, seed).unwrap();
        let ab = apply_multiplier(&apply_multiplier(&f, &SymbolSpec::AbsPower(a)).unwrap(), &SymbolSpec::AbsPower(b)).unwrap();
        let direct = apply_multiplier(&f, &SymbolSpec::AbsPower(a + b)).unwrap();
        let scale = direct.max_abs();
        for (x, y) in ab.samples().iter().zip(direct.samples()) {
            prop_assert!((x - y).abs() <= 1e-12 * scale.max(1e-300));
        }
    }

    #[test]
    fn log_phi_is_monotone_in_a(a in 0.01f64..1.0, da in 0.0f64..0.5, r in 0.0f64..1e6) {
        let b = (a + da).min(1.0);
        let (pa, pb) = (make_log_phi(a).unwrap(), make_log_phi(b).unwrap());
        prop_assert!(pa.eval(r) <= pb.eval(r));
        prop_assert!(validate_phi(&pa, grid(256).xi_max(), 256).unwrap().passes());
    }

    #[test]
    fn adapted_phi_stays_under_envelope((lo, hi, d, seed) in band()) {
        let f = random_bandlimited(grid(256), lo, hi + 40, d, seed).unwrap();
        let phi = adapt_phi_to_data(&f, 1.5).unwrap();
        let rs = phi.certificate().sample_grid.points();
        let ell = |r: f64| (4.0 + r).ln();
        for (i, &r0) in rs.iter().enumerate().step_by(37) {
            for &r in &rs[i..] {
                prop_assert!(phi.eval(r) <= phi.eval(r0) * ell(r) / ell(r0) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn mollification_never_raises_norms((lo, hi, d, seed) in band(), eps in 1e-3f64..0.5) {
        let f = random_bandlimited(grid(64), lo, hi, d, seed).unwrap();
        let g = mollify_initial(&f, eps, &BumpSpec::default()).unwrap();
        for (a, b) in f.spectrum().iter().zip(g.spectrum()) {
            prop_assert!(b.norm() <= a.norm() * (1.0 + 1e-14) + 1e-300);
        }
        for s in [0.5, 1.5, 2.0] {
            prop_assert!(hs_norm(&g, s) <= hs_norm(&f, s) * (1.0 + 1e-14));
        }
    }

    #[test]
    fn full_rhs_has_zero_mean((lo, hi, d, seed) in band(), amp in 0.01f64..0.5) {
        let f = random_bandlimited(grid(64), lo, hi, d, seed).unwrap();
        let f = f.scale(amp / f.max_abs());
        let r = rhs_full(&f, &QuadratureSpec::default()).unwrap();
        prop_assert!(r.spectrum()[0].norm() <= 1e-12 * r.max_abs().max(1e-300));
    }

    #[test]
    fn shortest_decimals_round_trip(v in any::<f64>()) {
        let s = fmt_f64(v);
        if v.is_nan() {
            prop_assert_eq!(s, "NaN");
        } else {
            prop_assert_eq!(s.parse::<f64>().unwrap(), v);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn reports_are_translation_invariant((lo, hi, d, seed) in band(), j in 1usize..63) {
        let g = grid(64);
        let f = random_bandlimited(g, lo, hi, d, seed).unwrap();
        let mut rotated = f.samples().to_vec();
        rotated.rotate_left(j);
        let h = Field::from_samples(g, rotated).unwrap();
        let ctx = ReportContext::new(make_log_phi(1.0).unwrap(), QuadratureSpec::default(), 0.25, ConstantSet::default());
        let a = EnergyReport::compute(0.0, &f, &ctx).unwrap();
        let b = EnergyReport::compute(0.0, &h, &ctx).unwrap();
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
        for (i, (x, y)) in pairs.into_iter().enumerate() {
            prop_assert!(close(x, y, 1e-10), "entry {i}: {x} vs {y}");
        }
        for (x, y) in a.hs.iter().zip(&b.hs) {
            prop_assert!(close(*x, *y, 1e-10));
        }
    }
}

#[test]
fn unit_weight_certifies_nothing_unbounded() {
    let c = validate_phi(&PhiWeight::one(), 1e3, 64).unwrap();
    assert!(!c.h1_pass);
}
