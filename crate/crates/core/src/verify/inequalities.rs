use rayon::prelude::*;

use super::calibrate::{energy_fit, lipschitz_fit, C2_FLOOR};
use super::{spread, trapezoid, CheckResult};
use crate::constants::ConstantSet;
use crate::corpus::power_law;
use crate::error::{config, Result};
use crate::functionals::{energies, smallness_margin};
use crate::phi::{adapt_phi_to_data, make_log_phi, PhiKind, PhiWeight};
use crate::rhs::{apply_R_eps, apply_T, BumpSpec, QuadratureSpec};
use crate::spectral::{h_norm, hs_norm, sobolev_phi_norm, weighted_norm, Field, Grid};
use crate::stepper::Trajectory;

/// Fitted `C0` (floored at 1) across an amplitude sweep run at
/// `amplitude_eps` and an `ε` sweep. The amplitude fits must agree within
/// `spread_tol`; the `ε` fits, listed with decreasing `ε`, must not increase.
pub fn check_lipschitz_budget(
    amplitude_runs: &[(f64, &Trajectory)],
    amplitude_eps: f64,
    eps_runs: &[(f64, &Trajectory)],
    beta: f64,
    spread_tol: f64,
) -> Result<CheckResult> {
    let mut r = CheckResult::new("lipschitz_budget");
    let fit = |eps: f64, t: &Trajectory| -> Result<(f64, f64)> {
        if t.status.is_halted() {
            return Err(config(format!("lipschitz_budget run stopped with {}", t.status.as_str())));
        }
        let raw = lipschitz_fit(t, eps, beta);
        Ok((raw, raw.max(1.0)))
    };
    let amp: Vec<(f64, f64)> = amplitude_runs.iter().map(|(_, t)| fit(amplitude_eps, t)).collect::<Result<_>>()?;
    let eps: Vec<(f64, f64)> = eps_runs.iter().map(|(e, t)| fit(*e, t)).collect::<Result<_>>()?;
    let amp_c0: Vec<f64> = amp.iter().map(|p| p.1).collect();
    let eps_c0: Vec<f64> = eps.iter().map(|p| p.1).collect();
    let s = spread(&amp_c0);
    let monotone = eps_c0.windows(2).all(|w| w[1] <= w[0]);
    r.series("amplitude", amplitude_runs.iter().map(|p| p.0).collect())
        .series("amplitude_c0", amp_c0.clone())
        .series("amplitude_raw", amp.iter().map(|p| p.0).collect())
        .series("eps", eps_runs.iter().map(|p| p.0).collect())
        .series("eps_c0", eps_c0.clone())
        .series("eps_raw", eps.iter().map(|p| p.0).collect())
        .measure("amplitude_spread", s)
        .tol("amplitude_spread", spread_tol)
        .fit("c0", amp_c0.iter().chain(&eps_c0).cloned().fold(1.0, f64::max))
        .decide(s <= spread_tol && monotone && amp_c0.iter().chain(&eps_c0).all(|&c| c >= 1.0));
    if !monotone {
        r.note("fitted C0 increases as eps decreases");
    }
    Ok(r)
}

/// Interval-wise `ΔA/Δt + νP + C1 B/(1 + lip²) <= C2 (√A + A) μ B` with the
/// given constants, and the spread of the per-run required `C2/C1`.
pub fn check_energy_inequality(runs: &[&Trajectory], constants: &ConstantSet, spread_tol: f64) -> Result<CheckResult> {
    let mut r = CheckResult::new("energy_inequality");
    let (c1, c2) = (constants.c1, constants.c2);
    let mut ratios = Vec::new();
    let mut worst_excess = f64::NEG_INFINITY;
    for t in runs {
        if t.status.is_halted() {
            return Err(config(format!("energy_inequality run stopped with {}", t.status.as_str())));
        }
        let fit = energy_fit(t);
        for ((d, w), v) in fit.d.iter().zip(&fit.w).zip(&fit.v) {
            worst_excess = worst_excess.max(c1 * w - d - c2 * v);
        }
        ratios.push(fit.required_c2(c1).max(C2_FLOOR) / c1);
    }
    let s = spread(&ratios);
    let holds = worst_excess <= 0.0;
    r.series("c2_over_c1", ratios)
        .measure("worst_excess", worst_excess)
        .measure("ratio_spread", s)
        .tol("worst_excess", 0.0)
        .tol("ratio_spread", spread_tol)
        .fit("c1", c1)
        .fit("c2", c2)
        .decide(holds && s <= spread_tol);
    Ok(r)
}

/// `A(t)` nonincreasing within `slack` and `∫ B dt <= 1/C0`. Vacuous when
/// the smallness margin of the data is not positive.
pub fn check_small_data_decay(traj: &Trajectory, f0: &Field, constants: &ConstantSet, slack: f64) -> Result<CheckResult> {
    let mut r = CheckResult::new("small_data_decay");
    let rows = &traj.rows;
    if rows.len() < 2 {
        return Err(config("small_data_decay needs at least two reports"));
    }
    let t: Vec<f64> = rows.iter().map(|x| x.report.t).collect();
    let a: Vec<f64> = rows.iter().map(|x| x.report.a_phi).collect();
    let b: Vec<f64> = rows.iter().map(|x| x.report.b_phi).collect();
    let rise = a.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let int_b = trapezoid(&t, &b);
    let bound = 1.0 / constants.c0;
    let margin = smallness_margin(f0, constants);
    let lip0 = rows[0].report.lip;
    r.series("t", t)
        .series("A", a.clone())
        .series("B", b)
        .measure("max_increase", rise)
        .measure("integral_b", int_b)
        .measure("smallness_margin", margin)
        .measure("proof_bound", 2.0 * (2.0 + lip0).powi(2) * a[0] / constants.c1)
        .tol("max_increase", slack)
        .tol("integral_b", bound);
    if margin <= 0.0 {
        r.vacuous(format!("smallness margin {margin:.3e} is not positive"));
    }
    let finished = !traj.status.is_halted();
    r.decide(finished && rise <= slack && int_b.is_finite() && int_b <= bound);
    Ok(r)
}

/// `‖f‖_{Ḣ^s} / (μ A^{2-s} B^{s-3/2})` for `s = 7/4, 2` and
/// `‖|D|^{7/4,φ²} f‖ / (μ A^{1/4} B^{1/4})`; zeros for zero data.
pub fn interpolation_ratios(f: &Field, phi: &PhiWeight) -> [f64; 3] {
    let e = energies(f, phi);
    if e.a == 0.0 || e.b == 0.0 {
        return [0.0; 3];
    }
    let r = |s: f64| hs_norm(f, s) / (e.mu * e.a.powf(2.0 - s) * e.b.powf(s - 1.5));
    [
        r(1.75),
        r(2.0),
        weighted_norm(f, 1.75, phi, 2) / (e.mu * e.a.powf(0.25) * e.b.powf(0.25)),
    ]
}

/// Envelope of [`interpolation_ratios`] on `calibration`, asserted on `test`
/// within `factor`.
pub fn check_interpolation(calibration: &[Field], test: &[Field], phi: &PhiWeight, factor: f64) -> Result<CheckResult> {
    let mut r = CheckResult::new("interpolation");
    let envelope = |fs: &[Field]| {
        fs.par_iter()
            .map(|f| interpolation_ratios(f, phi))
            .reduce(|| [0.0; 3], |a, b| [a[0].max(b[0]), a[1].max(b[1]), a[2].max(b[2])])
    };
    let cal = envelope(calibration);
    let obs = envelope(test);
    let names = ["s_7_4", "s_2", "weighted_7_4"];
    let mut ok = true;
    for i in 0..3 {
        r.fit(&format!("{}_envelope", names[i]), cal[i])
            .measure(&format!("{}_ratio", names[i]), if cal[i] > 0.0 { obs[i] / cal[i] } else { 0.0 });
        ok &= obs[i] <= factor * cal[i];
    }
    r.tol("ratio", factor)
        .measure("calibration_size", calibration.len() as f64)
        .measure("test_size", test.len() as f64)
        .decide(ok);
    Ok(r)
}

fn log_bound_ratio(f: &Field, quad: &QuadratureSpec) -> Result<f64> {
    let h2 = hs_norm(f, 2.0);
    if h2 == 0.0 {
        return Ok(0.0);
    }
    let t = apply_T(f, f, quad)?;
    let rhs = (1.0 + h_norm(f, 1.5)).powi(2) * (2.0 + h2 * h2).ln().sqrt() * h2;
    Ok(hs_norm(&t, 1.0) / rhs)
}

/// `‖T(f)f‖_{Ḣ¹} <= C (1 + ‖f‖_{H^{3/2}})² log(2 + ‖f‖²_{Ḣ²})^{1/2} ‖f‖_{Ḣ²}`
/// with `C` fitted on `calibration` and asserted on `test` within `factor`.
pub fn check_log_bound(calibration: &[Field], test: &[Field], quad: &QuadratureSpec, factor: f64) -> Result<CheckResult> {
    let mut r = CheckResult::new("log_bound");
    let max_ratio = |fs: &[Field]| -> Result<f64> {
        let v: Vec<f64> = fs.par_iter().map(|f| log_bound_ratio(f, quad)).collect::<Result<_>>()?;
        Ok(v.into_iter().fold(0.0, f64::max))
    };
    let c = max_ratio(calibration)?;
    let obs = max_ratio(test)?;
    r.fit("c", c)
        .measure("test_max", obs)
        .measure("ratio", if c > 0.0 { obs / c } else { 0.0 })
        .tol("ratio", factor)
        .decide(obs <= factor * c);
    Ok(r)
}

/// `C(ε) = max_f ‖R_ε f‖ / (ε^{1/2} ‖f‖_{Ḣ^{3/2}})` for each `ε`; the
/// spread over `ε` must stay within `spread_tol`.
pub fn check_r_eps_scaling(
    fields: &[Field],
    eps_list: &[f64],
    bump: &BumpSpec,
    quad: &QuadratureSpec,
    spread_tol: f64,
) -> Result<CheckResult> {
    let mut r = CheckResult::new("r_eps_scaling");
    let mut cs = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let mut c = 0.0f64;
        for f in fields {
            let h = hs_norm(f, 1.5);
            if h == 0.0 {
                continue;
            }
            let re = apply_R_eps(f, eps, bump, quad)?;
            c = c.max(re.l2_norm_spectral() / (eps.sqrt() * h));
        }
        cs.push(c);
    }
    let s = if cs.iter().all(|&c| c == 0.0) { 1.0 } else { spread(&cs) };
    r.series("eps", eps_list.to_vec())
        .series("c", cs.clone())
        .measure("spread", s)
        .tol("spread", spread_tol)
        .fit("c", cs.iter().cloned().fold(0.0, f64::max))
        .decide(s <= spread_tol);
    Ok(r)
}

/// The log weight passes its certificate; the weight adapted to a field
/// with `|c_k| = |k|^{-2.1}` on `n` nodes is unbounded and keeps the
/// weighted `Ḣ^{3/2}` norm within `factor` times the unweighted one plus 1.
pub fn check_phi_machinery(n: usize, seed: u64, factor: f64) -> Result<CheckResult> {
    let mut r = CheckResult::new("phi_machinery");
    let log = make_log_phi(1.0)?;
    let log_ok = log.certificate().passes();
    let f = power_law(Grid::new(2.0 * std::f64::consts::PI, n)?, 2.1, seed)?;
    let phi = adapt_phi_to_data(&f, 1.5)?;
    let cert = phi.certificate();
    let unbounded = match phi.kind() {
        PhiKind::Adapted { shells, .. } => shells.last().is_some_and(|s| s.cap.is_infinite() && s.c > 0.0),
        PhiKind::Log { .. } => true,
        _ => false,
    };
    let plain = hs_norm(&f, 1.5);
    let weighted = sobolev_phi_norm(&f, 1.5, &phi);
    let ratio = weighted / (factor * plain + 1.0);
    r.measure("log_phi_h2_c0", log.certificate().h2_c0)
        .measure("adapted_h2_c0", cert.h2_c0)
        .measure("adapted_growth", phi.eval(phi.r_max()) / phi.eval(1.0))
        .measure("weighted_h32", weighted)
        .measure("unweighted_h32", plain)
        .measure("norm_ratio", ratio)
        .tol("norm_ratio", 1.0)
        .decide(log_ok && unbounded && cert.monotone && cert.h3_pass && cert.at_least_one && ratio <= 1.0);
    if !log_ok {
        r.note("log weight failed its certificate");
    }
    Ok(r)
}
