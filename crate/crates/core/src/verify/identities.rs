use std::f64::consts::PI;

use rayon::prelude::*;

use super::{h12_distance, CheckResult};
use crate::error::{config, Result};
use crate::functionals::{lipschitz_seminorm, ReportContext};
use crate::rhs::{apply_T, linear_integral, AlphaKernel, QuadratureSpec, RegularizationParams};
use crate::spectral::{abs_derivative, derivative, hs_norm, Field, Grid};
use crate::stepper::{evolve, EvolveOptions, StepperSpec, Trajectory};

/// Relative residual of `(1/π) ∫_{|α|<A} ∂_x Δ_α f dα = -|D| f` with the
/// bare kernel `1/α`, for each truncation `A`.
pub fn check_linear_identity(f: &Field, a_values: &[f64], tol: f64) -> Result<CheckResult> {
    let mut r = CheckResult::new("linear_identity");
    let d = abs_derivative(f, 1.0);
    let scale = d.l2_norm_spectral();
    let mut res = Vec::with_capacity(a_values.len());
    for &a in a_values {
        let quad = QuadratureSpec::default()
            .with_dealias(false)
            .with_kernel(AlphaKernel::Truncated)
            .with_a_max(a);
        let lin = linear_integral(f, &quad)?;
        let e = lin.add(&d)?.l2_norm_spectral();
        res.push(if scale == 0.0 { 0.0 } else { e / scale });
    }
    let last = *res.last().ok_or_else(|| config("linear_identity needs at least one truncation"))?;
    let decreasing = res.windows(2).all(|w| w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0));
    r.series("truncation", a_values.to_vec())
        .series("residual", res)
        .measure("residual_at_largest", last)
        .tol("residual_at_largest", tol)
        .decide(last <= tol && decreasing);
    if !decreasing {
        r.note("residual is not strictly decreasing in the truncation");
    }
    Ok(r)
}

/// `T(f) f` by the midpoint rule with `m` uniform nodes over one period and
/// the kernel `q cot(qα) - Re q cot(q(α + i δ_α f))`.
pub fn dense_t(f: &Field, m: usize) -> Result<Field> {
    let grid = *f.grid();
    let l = grid.length();
    let q = PI / l;
    let h = l / m as f64;
    let fx = derivative(f, 1);
    let n = grid.n();
    const CHUNK: usize = 64;
    let chunks: Vec<(usize, usize)> = (0..m).step_by(CHUNK).map(|s| (s, (s + CHUNK).min(m))).collect();
    let partials: Vec<Vec<f64>> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut acc = vec![0.0; n];
            for j in lo..hi {
                let alpha = -0.5 * l + (j as f64 + 0.5) * h;
                let (fs, gs) = (f.shift(alpha), fx.shift(alpha));
                let u = q * alpha;
                let cot = q * u.cos() / u.sin();
                for i in 0..n {
                    let c = f.samples()[i] - fs.samples()[i];
                    let v = q * c;
                    let re_cot = q * (2.0 * u).sin() / ((2.0 * v).cosh() - (2.0 * u).cos());
                    acc[i] += h * (fx.samples()[i] - gs.samples()[i]) * (cot - re_cot);
                }
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; n];
    for p in partials {
        total.iter_mut().zip(p).for_each(|(a, b)| *a += b);
    }
    Field::from_samples(grid, total.into_iter().map(|v| -v / PI).collect())
}

/// `apply_T` against [`dense_t`] on each field; relative `L²` error.
pub fn check_t_oracle(fields: &[Field], m: usize, tol: f64) -> Result<CheckResult> {
    let mut r = CheckResult::new("t_oracle");
    let quad = QuadratureSpec::default().with_dealias(false);
    let mut errs = Vec::new();
    for f in fields {
        let t = apply_T(f, f, &quad)?;
        let o = dense_t(f, m)?;
        let s = o.l2_norm_spectral();
        let e = t.sub(&o)?.l2_norm_spectral();
        errs.push(if s == 0.0 { e } else { e / s });
    }
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    r.series("relative_error", errs)
        .measure("worst_relative_error", worst)
        .measure("oracle_nodes", m as f64)
        .tol("worst_relative_error", tol)
        .decide(worst <= tol);
    Ok(r)
}

/// Largest relative residual of `d/dt(½‖f‖²) = -(1/π) ∬ log sqrt(1 + (Δ_α f)²)`
/// over interior reports, the derivative by centered differences.
fn l2_residual(traj: &Trajectory) -> Result<f64> {
    if traj.rows.len() < 3 {
        return Err(config("l2_dissipation needs at least three reports"));
    }
    if traj.nu != 0.0 {
        return Err(config("l2_dissipation needs an unregularized run"));
    }
    let rows = &traj.rows;
    let mut worst = 0.0f64;
    for j in 1..rows.len() - 1 {
        let (a, b) = (&rows[j - 1].report, &rows[j + 1].report);
        let d = 0.5 * (b.l2 * b.l2 - a.l2 * a.l2) / (b.t - a.t);
        let rhs = rows[j].report.log_energy / PI;
        let res = if rhs == 0.0 { (d).abs() } else { (d + rhs).abs() / rhs };
        worst = worst.max(res);
    }
    Ok(worst)
}

/// Residual on each trajectory, ordered from coarsest to finest cadence;
/// each halving must gain at least `gain`.
pub fn check_l2_dissipation(trajs: &[&Trajectory], tol: f64, gain: f64) -> Result<CheckResult> {
    let mut r = CheckResult::new("l2_dissipation");
    let res: Vec<f64> = trajs.iter().map(|t| l2_residual(t)).collect::<Result<_>>()?;
    let first = res[0];
    let gains: Vec<f64> = res.windows(2).map(|w| w[0] / w[1]).collect();
    let ok_gain = gains.iter().all(|&g| g >= gain || res.iter().all(|&v| v == 0.0));
    r.series("residual", res.clone())
        .series("gain", gains.clone())
        .measure("residual", first)
        .tol("residual", tol)
        .tol("gain", gain)
        .decide(first <= tol && ok_gain);
    if let Some(&g) = gains.first() {
        r.measure("gain", g);
    }
    Ok(r)
}

/// `f(λ ·)/λ` on `small`, built from the coefficients.
fn rescaled(f: &Field, small: Grid, lambda: f64) -> Result<Field> {
    Field::from_spectrum(small, f.spectrum().iter().map(|c| c / lambda).collect())
}

/// Runs `f0` to `λ T` and `f0_λ = f0(λ ·)/λ` on the grid of length `L/λ` to
/// `T` with the same fixed step, then compares `f_λ(t)` with `f(λt, λ·)/λ`.
/// Returns the largest relative `Ḣ^{1/2}` discrepancy over reports and the
/// relative differences of `‖·‖_{Ẇ^{1,∞}}` and `‖·‖_{Ḣ^{3/2}}` at `t = 0`.
pub fn scaling_discrepancy(
    f0: &Field,
    lambda: f64,
    t_end: f64,
    cadence: f64,
    dt: f64,
    quad: &QuadratureSpec,
    ctx: &ReportContext,
) -> Result<(f64, f64, f64)> {
    if !(lambda >= 1.0) {
        return Err(config(format!("scaling factor must be at least 1, got {lambda}")));
    }
    let grid = *f0.grid();
    let small = Grid::new(grid.length() / lambda, grid.n())?;
    let f0 = &Field::from_spectrum(grid, f0.spectrum().to_vec())?;
    let f0l = rescaled(f0, small, lambda)?;
    let lip = (lipschitz_seminorm(&f0l) / lipschitz_seminorm(f0) - 1.0).abs();
    let h32 = (hs_norm(&f0l, 1.5) / hs_norm(f0, 1.5) - 1.0).abs();
    let params = RegularizationParams::off();
    let opts = EvolveOptions {
        keep_fields: true,
        raw_data: true,
    };
    let big = StepperSpec::new(lambda * t_end, lambda * cadence).with_dt0(dt).fixed();
    let little = StepperSpec::new(t_end, cadence).with_dt0(dt).fixed();
    let a = evolve(f0, &params, quad, &big, ctx, opts)?;
    let b = evolve(&f0l, &params, quad, &little, ctx, opts)?;
    if a.fields.len() != b.fields.len() {
        return Err(config("paired scaling runs produced different report counts"));
    }
    let mut worst = 0.0f64;
    for (fa, fb) in a.fields.iter().zip(&b.fields) {
        let image = rescaled(fa, small, lambda)?;
        let n = hs_norm(fb, 0.5);
        let d = h12_distance(fb, &image)?;
        worst = worst.max(if n == 0.0 { d } else { d / n });
    }
    Ok((worst, lip, h32))
}

/// [`scaling_discrepancy`] at the given resolution and at twice the nodes
/// with half the step.
#[allow(clippy::too_many_arguments)]
pub fn check_scaling(
    f0: &Field,
    lambda: f64,
    t_end: f64,
    cadence: f64,
    dt: f64,
    ctx: &ReportContext,
    tol: f64,
    gain: f64,
    norm_tol: f64,
) -> Result<CheckResult> {
    let mut r = CheckResult::new("scaling");
    let quad = ctx.quad;
    let (d1, lip, h32) = scaling_discrepancy(f0, lambda, t_end, cadence, dt, &quad, ctx)?;
    let (d2, _, _) = scaling_discrepancy(&f0.refined(2), lambda, t_end, cadence, 0.5 * dt, &quad, ctx)?;
    let g = if d2 == 0.0 { f64::INFINITY } else { d1 / d2 };
    r.measure("discrepancy", d1)
        .measure("discrepancy_refined", d2)
        .measure("refinement_gain", g)
        .measure("lip_mismatch", lip)
        .measure("h32_mismatch", h32)
        .tol("discrepancy", tol)
        .tol("refinement_gain", gain)
        .tol("critical_norms", norm_tol);
    let ok_gain = g >= gain || (d1 == 0.0 && d2 == 0.0);
    r.decide(d1 <= tol && ok_gain && lip <= norm_tol && h32 <= norm_tol);
    Ok(r)
}
