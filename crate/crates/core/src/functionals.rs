//! Norms and functionals evaluated on a single field.

use serde::Serialize;

use crate::constants::ConstantSet;
use crate::error::Result;
use crate::phi::PhiWeight;
use crate::rhs::sweep::{sweep, Reduce};
use crate::rhs::{Kernels, QuadratureRule, QuadratureSpec};
use crate::spectral::{derivative, h_norm, hs_norm, weighted_norm, Field};

/// Fourier refinement used for every supremum in `x`.
pub const SUP_REFINEMENT: usize = 4;

/// Orders of the homogeneous Sobolev norms kept in a report.
pub const HS_ORDERS: [f64; 7] = [0.5, 1.0, 1.5, 1.75, 19.0 / 12.0, 2.0, 2.5];

/// `(A_φ, B_φ, P_φ, μ_φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Energies {
    pub a: f64,
    pub b: f64,
    pub p: f64,
    pub mu: f64,
}

/// `A_φ = ‖|D|^{3/2,φ} f‖^2`, `B_φ` and `P_φ` at orders 2 and 5/2, and
/// `μ_φ = 1/φ(B_φ/A_φ)` (1 for zero data).
pub fn energies(f: &Field, phi: &PhiWeight) -> Energies {
    let sq = |s: f64| {
        let v = weighted_norm(f, s, phi, 1);
        v * v
    };
    let (a, b, p) = (sq(1.5), sq(2.0), sq(2.5));
    let mu = if a > 0.0 { 1.0 / phi.eval(b / a) } else { 1.0 };
    Energies { a, b, p, mu }
}

/// `Q(f) = (‖f‖_{Ḣ²} + ‖f‖²_{Ḣ^{7/4}}) ‖|D|^{3/2,φ}f‖ + ‖|D|^{7/4,φ}f‖ ‖f‖_{H^{7/4}}
///        + (‖f‖^{3/2}_{H^{19/12}} + ‖f‖^{1/2}_{Ḣ^{7/4}}) ‖|D|^{7/4,φ²}f‖^{1/2} ‖f‖_{Ḣ^{7/4}}`.
pub fn q_functional(f: &Field, phi: &PhiWeight) -> f64 {
    let h2 = hs_norm(f, 2.0);
    let h74 = hs_norm(f, 1.75);
    let first = (h2 + h74 * h74) * weighted_norm(f, 1.5, phi, 1);
    let second = weighted_norm(f, 1.75, phi, 1) * h_norm(f, 1.75);
    let third = (h_norm(f, 19.0 / 12.0).powf(1.5) + h74.sqrt()) * weighted_norm(f, 1.75, phi, 2).sqrt() * h74;
    first + second + third
}

/// `∫ ‖δ_α f_x‖²_∞ dα / α²`, the supremum taken on the refined grid.
pub fn besov_half_sq(f: &Field, quad: &QuadratureSpec) -> Result<f64> {
    let rule = quad.rule(f.grid())?;
    let fx = derivative(f, 1).refined(SUP_REFINEMENT);
    let grid = *fx.grid();
    let k = Kernels::new(f.grid(), quad.kernel);
    let gs = fx.samples();
    let out = sweep(&grid, &[fx.spectrum()], rule.nodes(), 1, Reduce::Sum, |alpha, w, sh, acc| {
        let m = gs.iter().zip(&sh[0]).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        acc[0] += w * m * m * k.at(alpha).inverse_square();
    });
    Ok(out[0])
}

/// Shifts at which the Hölder quotient is sampled: a quarter-octave ladder
/// from `δ0` below `L/2`, plus `L/2` itself.
pub fn holder_shifts(f: &Field, quad: &QuadratureSpec) -> Vec<f64> {
    let grid = f.grid();
    let half = 0.5 * grid.length();
    let d0 = quad.delta0(grid).min(half);
    let mut out = Vec::new();
    let mut m = 0;
    loop {
        let a = d0 * 2f64.powf(m as f64 / 4.0);
        if a >= half {
            break;
        }
        out.push(a);
        m += 1;
    }
    out.push(half);
    out
}

/// `sup_α ‖δ_α f_xx‖_∞ / |α|^β` over [`holder_shifts`], on the refined grid.
pub fn holder_c2beta(f: &Field, beta: f64, quad: &QuadratureSpec) -> f64 {
    let fxx = derivative(f, 2).refined(SUP_REFINEMENT);
    let grid = *fxx.grid();
    let nodes: Vec<(f64, f64)> = holder_shifts(f, quad).into_iter().map(|a| (a, 1.0)).collect();
    let gs = fxx.samples();
    let out = sweep(&grid, &[fxx.spectrum()], &nodes, 1, Reduce::Max, |alpha, _, sh, acc| {
        let m = gs.iter().zip(&sh[0]).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        acc[0] = acc[0].max(m / alpha.abs().powf(beta));
    });
    out[0]
}

/// `∬ log sqrt(1 + (Δ_α f)²) dx dα`.
pub fn log_energy(f: &Field, quad: &QuadratureSpec) -> Result<f64> {
    let grid = *f.grid();
    let rule = quad.rule(&grid)?;
    Ok(log_energy_with(f, &rule, quad))
}

pub(crate) fn log_energy_with(f: &Field, rule: &QuadratureRule, quad: &QuadratureSpec) -> f64 {
    let grid = *f.grid();
    let k = Kernels::new(&grid, quad.kernel);
    let fs = f.samples();
    let dx = grid.dx();
    let out = sweep(&grid, &[f.spectrum()], rule.nodes(), 1, Reduce::Sum, |alpha, w, sh, acc| {
        let a = k.at(alpha);
        let s: f64 = fs.iter().zip(&sh[0]).map(|(u, v)| a.log(u - v)).sum();
        acc[0] += w * s * dx;
    });
    out[0]
}

/// `‖f_x‖_∞`.
pub fn lipschitz_seminorm(f: &Field) -> f64 {
    lipschitz_refined(f, SUP_REFINEMENT)
}

/// `max |f_x|`: the largest refined samples are polished by Newton's method
/// on the trigonometric interpolant of `f_x`.
pub fn lipschitz_refined(f: &Field, factor: usize) -> f64 {
    let g = derivative(f, 1);
    let factor = factor.max(1);
    let samples = g.refined_samples(factor);
    let m = samples.len();
    let mut best = samples.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if best == 0.0 {
        return 0.0;
    }
    let mut peaks: Vec<usize> = (0..m)
        .filter(|&j| {
            let v = samples[j].abs();
            v >= samples[(j + m - 1) % m].abs() && v >= samples[(j + 1) % m].abs()
        })
        .collect();
    peaks.sort_by(|&a, &b| samples[b].abs().total_cmp(&samples[a].abs()).then(a.cmp(&b)));
    let h = f.grid().length() / m as f64;
    for &j in peaks.iter().take(POLISH_PEAKS) {
        let x0 = j as f64 * h;
        let mut x = x0;
        for _ in 0..POLISH_STEPS {
            let [_, d1, d2] = trig_eval(&g, x);
            if d2 == 0.0 {
                break;
            }
            let step = d1 / d2;
            if !step.is_finite() || (x - step - x0).abs() > h {
                break;
            }
            x -= step;
            if step.abs() < 1e-15 * f.grid().length() {
                break;
            }
        }
        best = best.max(trig_eval(&g, x)[0].abs());
    }
    best
}

const POLISH_PEAKS: usize = 8;
const POLISH_STEPS: usize = 30;

/// `[u, u', u'']` of the trigonometric interpolant at `x`.
fn trig_eval(u: &Field, x: f64) -> [f64; 3] {
    let grid = u.grid();
    let c = u.spectrum();
    let n = grid.n();
    let mut out = [c[0].re, 0.0, 0.0];
    for (k, ck) in c.iter().enumerate().take(n / 2).skip(1) {
        let xi = grid.wavenumber(k);
        let (sin, cos) = (xi * x).sin_cos();
        // 2 Re(c e^{i xi x}) and its derivatives.
        let re = ck.re * cos - ck.im * sin;
        let im = ck.re * sin + ck.im * cos;
        out[0] += 2.0 * re;
        out[1] -= 2.0 * xi * im;
        out[2] -= 2.0 * xi * xi * re;
    }
    let nyq = c[n / 2].re;
    if nyq != 0.0 {
        let xi = grid.wavenumber(n / 2).abs();
        let (sin, cos) = (xi * x).sin_cos();
        out[0] += nyq * cos;
        out[1] -= nyq * xi * sin;
        out[2] -= nyq * xi * xi * cos;
    }
    out
}

/// `1 - 2 (K + C0/C1)^{1/2} (2 + ‖f0_x‖_∞)² ‖f0‖_{Ḣ^{3/2}}`.
pub fn smallness_margin(f0: &Field, constants: &ConstantSet) -> f64 {
    let lip = lipschitz_seminorm(f0);
    let factor = 2.0 * (constants.k() + constants.c0 / constants.c1).sqrt();
    1.0 - factor * (2.0 + lip).powi(2) * hs_norm(f0, 1.5)
}

/// Everything needed to evaluate an [`EnergyReport`].
#[derive(Debug, Clone)]
pub struct ReportContext {
    pub phi: PhiWeight,
    pub quad: QuadratureSpec,
    pub beta: f64,
    pub constants: ConstantSet,
}

impl ReportContext {
    pub fn new(phi: PhiWeight, quad: QuadratureSpec, beta: f64, constants: ConstantSet) -> Self {
        Self {
            phi,
            quad,
            beta,
            constants,
        }
    }
}

/// All norms and functionals of one field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub t: f64,
    pub l2: f64,
    pub lip: f64,
    /// `‖f‖_{Ḣ^s}` for `s` in [`HS_ORDERS`], same order.
    pub hs: [f64; 7],
    pub a_phi: f64,
    pub b_phi: f64,
    pub p_phi: f64,
    pub mu_phi: f64,
    pub q_functional: f64,
    pub besov_half_sq: f64,
    pub holder_c2beta: f64,
    pub log_energy: f64,
    pub smallness_margin: f64,
}

impl EnergyReport {
    pub fn compute(t: f64, f: &Field, ctx: &ReportContext) -> Result<Self> {
        let rule = ctx.quad.rule(f.grid())?;
        let e = energies(f, &ctx.phi);
        let mut hs = [0.0; 7];
        for (h, s) in hs.iter_mut().zip(HS_ORDERS) {
            *h = hs_norm(f, s);
        }
        Ok(Self {
            t,
            l2: f.l2_norm_spectral(),
            lip: lipschitz_seminorm(f),
            hs,
            a_phi: e.a,
            b_phi: e.b,
            p_phi: e.p,
            mu_phi: e.mu,
            q_functional: q_functional(f, &ctx.phi),
            besov_half_sq: besov_half_sq(f, &ctx.quad)?,
            holder_c2beta: holder_c2beta(f, ctx.beta, &ctx.quad),
            log_energy: log_energy_with(f, &rule, &ctx.quad),
            smallness_margin: smallness_margin(f, &ctx.constants),
        })
    }

    /// `‖f‖_{Ḣ^s}` for an order in [`HS_ORDERS`].
    pub fn hs(&self, s: f64) -> Option<f64> {
        HS_ORDERS.iter().position(|&o| o == s).map(|i| self.hs[i])
    }

    pub fn h32(&self) -> f64 {
        self.hs[2]
    }

    pub fn h2(&self) -> f64 {
        self.hs[5]
    }

    pub fn h12(&self) -> f64 {
        self.hs[0]
    }

    pub fn is_finite(&self) -> bool {
        let scalars = [
            self.l2,
            self.lip,
            self.a_phi,
            self.b_phi,
            self.p_phi,
            self.mu_phi,
            self.q_functional,
            self.besov_half_sq,
            self.holder_c2beta,
            self.log_energy,
            self.smallness_margin,
        ];
        scalars.iter().chain(&self.hs).all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests;
