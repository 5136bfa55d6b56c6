use rayon::prelude::*;

use super::{cumulative_trapezoid, h12_distance, signed_spread, CheckResult};
use crate::error::{config, Error, Result};
use crate::functionals::ReportContext;
use crate::rhs::{QuadratureSpec, RegularizationParams};
use crate::spectral::{hs_norm, Field};
use crate::stepper::{evolve, EvolveOptions, StepperSpec, Trajectory};

fn keep() -> EvolveOptions {
    EvolveOptions {
        keep_fields: true,
        raw_data: false,
    }
}

/// Largest `Ḣ^{1/2}` distance between two runs over their common reports.
fn sup_distance(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    let n = a.fields.len().min(b.fields.len());
    let mut d = 0.0f64;
    for j in 0..n {
        d = d.max(h12_distance(&a.fields[j], &b.fields[j])?);
    }
    Ok(d)
}

/// Runs `f0` at each `ε` of a geometric list and measures
/// `d_i = sup_t ‖f_{ε_i} - f_{ε_{i+1}}‖_{Ḣ^{1/2}}`. The distances must
/// decrease strictly with every rate `log2(d_i/d_{i+1})` at least `min_rate`.
#[allow(clippy::too_many_arguments)]
pub fn eps_convergence(
    f0: &Field,
    eps_list: &[f64],
    beta: f64,
    spec: &StepperSpec,
    quad: &QuadratureSpec,
    ctx: &ReportContext,
    min_rate: f64,
) -> Result<CheckResult> {
    if eps_list.len() < 3 {
        return Err(config("eps_convergence needs at least three values of eps"));
    }
    if eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(config("eps_convergence needs a decreasing eps list"));
    }
    let mut r = CheckResult::new("eps_convergence");
    let runs: Vec<Trajectory> = eps_list
        .par_iter()
        .map(|&eps| {
            let p = RegularizationParams::new(eps, beta)?;
            evolve(f0, &p, quad, spec, ctx, keep())
        })
        .collect::<Result<_>>()?;
    let mut d = Vec::new();
    let mut skipped = false;
    for (i, w) in runs.windows(2).enumerate() {
        if w[0].status.is_halted() || w[1].status.is_halted() {
            r.note(format!(
                "pair {i} skipped: runs stopped with {} and {}",
                w[0].status.as_str(),
                w[1].status.as_str()
            ));
            skipped = true;
            continue;
        }
        d.push(sup_distance(&w[0], &w[1])?);
    }
    let rates: Vec<f64> = d
        .windows(2)
        .map(|w| if w[1] == 0.0 { f64::INFINITY } else { (w[0] / w[1]).log2() })
        .collect();
    let all_zero = d.iter().all(|&v| v == 0.0);
    let decreasing = d.windows(2).all(|w| w[1] < w[0]);
    let worst = rates.iter().cloned().fold(f64::INFINITY, f64::min);
    r.series("eps", eps_list.to_vec())
        .series("nu", runs.iter().map(|t| t.nu).collect())
        .series("distance", d.clone())
        .series("rate", rates)
        .measure("min_rate", if all_zero { f64::INFINITY } else { worst })
        .tol("min_rate", min_rate)
        .decide(!skipped && (all_zero || (decreasing && worst >= min_rate)));
    Ok(r)
}

/// Inputs of [`check_contraction`].
#[derive(Debug, Clone)]
pub struct ContractionInput {
    pub base: Field,
    /// Perturbation shape; the runs start from `base + δ direction`.
    pub direction: Field,
    pub deltas: Vec<f64>,
    pub params: RegularizationParams,
    pub spec: StepperSpec,
    /// Bound `M` on `sup (‖f‖²_{Ḣ^{3/2}} + ‖f_x‖²_∞) + ∫ ‖f‖²_{Ḣ²}`.
    pub m_bound: f64,
}

fn m_observed(t: &Trajectory) -> f64 {
    let times = t.times();
    let h2: Vec<f64> = t.rows.iter().map(|r| r.report.h2().powi(2)).collect();
    let sup = t
        .rows
        .iter()
        .map(|r| r.report.h32().powi(2) + r.report.lip.powi(2))
        .fold(0.0, f64::max);
    sup + cumulative_trapezoid(&times, &h2).last().copied().unwrap_or(0.0)
}

/// Gronwall fit
/// `C = sup_t log(‖g(t)‖/‖g(0)‖) / ((M + 1)^5 ∫_0^t (‖f1‖²_{Ḣ²} + ‖f2‖²_{Ḣ²}))`
/// with `g = f1 - f2` in `Ḣ^{1/2}`; the sign is kept.
fn gronwall_fit(a: &Trajectory, b: &Trajectory, m: f64) -> Result<(f64, Vec<f64>)> {
    let n = a.fields.len().min(b.fields.len());
    let times = a.times();
    let s: Vec<f64> = (0..n)
        .map(|j| a.rows[j].report.h2().powi(2) + b.rows[j].report.h2().powi(2))
        .collect();
    let integral = cumulative_trapezoid(&times[..n], &s);
    let g: Vec<f64> = (0..n).map(|j| h12_distance(&a.fields[j], &b.fields[j])).collect::<Result<_>>()?;
    if g[0] == 0.0 {
        return Err(config("contraction needs distinct data"));
    }
    let scale = (m + 1.0).powi(5);
    let mut c = f64::NEG_INFINITY;
    for j in 1..n {
        if integral[j] > 0.0 {
            c = c.max((g[j] / g[0]).ln() / (scale * integral[j]));
        }
    }
    Ok((c, g))
}

/// Identical data must stay identical; perturbed data must obey a
/// Gronwall bound whose fitted constant agrees across perturbation sizes
/// within `spread_tol`. Vacuous when a run exceeds `m_bound`.
pub fn check_contraction(
    input: &ContractionInput,
    quad: &QuadratureSpec,
    ctx: &ReportContext,
    identical_tol: f64,
    spread_tol: f64,
) -> Result<CheckResult> {
    if input.deltas.is_empty() {
        return Err(config("contraction needs at least one perturbation size"));
    }
    let mut r = CheckResult::new("contraction");
    let mut starts = vec![input.base.clone(), input.base.clone()];
    for &d in &input.deltas {
        starts.push(input.base.axpy(d, &input.direction)?);
    }
    let runs: Vec<Trajectory> = starts
        .par_iter()
        .map(|f| evolve(f, &input.params, quad, &input.spec, ctx, keep()))
        .collect::<Result<_>>()?;
    if let Some(t) = runs.iter().find(|t| t.status.is_halted()) {
        r.vacuous(format!("a run stopped with {}", t.status.as_str()));
    }
    let mut identical = 0.0f64;
    for (fa, fb) in runs[0].fields.iter().zip(&runs[1].fields) {
        let n = hs_norm(fa, 0.5);
        let g = h12_distance(fa, fb)?;
        identical = identical.max(if n == 0.0 { g } else { g / n });
    }
    if identical > identical_tol {
        return Err(Error::Calibration(format!(
            "identical data separated to {identical:e}: uniqueness violated"
        )));
    }
    let m_obs = runs.iter().map(m_observed).fold(0.0, f64::max);
    if m_obs > input.m_bound {
        r.vacuous(format!("observed M = {m_obs:.4e} exceeds the bound {}", input.m_bound));
    }
    let mut fits = Vec::new();
    let mut swap_ok = true;
    for (i, t) in runs[2..].iter().enumerate() {
        let (c, g) = gronwall_fit(&runs[0], t, input.m_bound)?;
        let (_, g_swapped) = gronwall_fit(t, &runs[0], input.m_bound)?;
        swap_ok &= g == g_swapped;
        r.series(&format!("g_delta_{i}"), g);
        fits.push(c);
    }
    let s = signed_spread(&fits);
    r.series("delta", input.deltas.clone())
        .series("c_fit", fits.clone())
        .measure("identical_separation", identical)
        .measure("m_observed", m_obs)
        .measure("fit_spread", s)
        .tol("identical_separation", identical_tol)
        .tol("fit_spread", spread_tol)
        .tol("m_bound", input.m_bound)
        .fit("c", fits.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
        .decide(swap_ok && s <= spread_tol && fits.iter().all(|c| c.is_finite()));
    if !swap_ok {
        r.note("swapping the runs changed the distance series");
    }
    Ok(r)
}
