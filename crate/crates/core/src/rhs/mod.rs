//! The nonlinearity of the Muskat equation and its regularization.
//!
//! With `Δ_α f = (f(x) - f(x - α)) / α` the equation reads
//! `∂_t f = (1/π) ∫ ∂_x Δ_α f / (1 + (Δ_α f)^2) dα = -|D| f + T(f) f`, where
//! `T(f) g = -(1/π) ∫ ∂_x Δ_α g (Δ_α f)^2 / (1 + (Δ_α f)^2) dα`.
//! The linear part is always applied spectrally; only `T` and the small-shift
//! remainder `R_ε` are integrated numerically.

mod bump;
mod kernels;
mod quadrature;
pub(crate) mod sweep;

use serde::{Deserialize, Serialize};

pub use bump::{BumpSpec, SUPPORT_BOUND};
pub(crate) use kernels::Kernels;
pub use quadrature::{AlphaKernel, GaussLegendre, QuadratureRule, QuadratureSpec};

use crate::error::{config, Error, Result};
use crate::spectral::{abs_derivative, derivative, Field};
use sweep::{sweep, Reduce};

/// Parameters of the regularized problem
/// `∂_t f - ν ∂_x^2 f = N_ε(f)` with `ν = 1/|log ε|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularizationParams {
    /// `None` runs the unregularized equation.
    pub eps: Option<f64>,
    /// Hölder exponent of the Lipschitz estimate, in `(0, 1/2)`.
    pub beta: f64,
    #[serde(default)]
    pub bump: BumpSpec,
}

impl RegularizationParams {
    pub const DEFAULT_BETA: f64 = 0.25;

    pub fn new(eps: f64, beta: f64) -> Result<Self> {
        let p = Self {
            eps: Some(eps),
            beta,
            bump: BumpSpec::default(),
        };
        p.validate()?;
        Ok(p)
    }

    /// The unregularized equation.
    pub fn off() -> Self {
        Self {
            eps: None,
            beta: Self::DEFAULT_BETA,
            bump: BumpSpec::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(eps) = self.eps {
            // eps = 1 would give an infinite viscosity.
            if !(eps > 0.0 && eps < 1.0) {
                return Err(config(format!("regularization.eps must lie in (0, 1), got {eps}")));
            }
        }
        if !(self.beta > 0.0 && self.beta < 0.5) {
            return Err(config(format!(
                "regularization.beta must lie in (0, 1/2), got {}",
                self.beta
            )));
        }
        Ok(())
    }

    pub fn is_regularized(&self) -> bool {
        self.eps.is_some()
    }

    /// `1/|log ε|`, or 0 without regularization.
    pub fn nu(&self) -> f64 {
        match self.eps {
            Some(eps) => 1.0 / eps.ln().abs(),
            None => 0.0,
        }
    }
}

/// `Δ_α f = (f - f(· - α)) / α`.
pub fn slope_field(f: &Field, alpha: f64) -> Result<Field> {
    if alpha == 0.0 {
        return Err(Error::ZeroShift);
    }
    if !alpha.is_finite() {
        return Err(config(format!("shift must be finite, got {alpha}")));
    }
    let shifted = f.shift(alpha);
    Ok(f.sub(&shifted)?.scale(1.0 / alpha))
}

/// `(∂_x f)^2 / (1 + (∂_x f)^2)`, the small-shift limit of the `T` weight.
pub fn principal_weight(f: &Field) -> Field {
    let fx = derivative(f, 1);
    let samples = fx.samples().iter().map(|d| d * d / (1.0 + d * d)).collect();
    Field::from_samples(*f.grid(), samples).expect("bounded weight is finite")
}

fn finish(f: &Field, acc: Vec<f64>, scale: f64, quad: &QuadratureSpec) -> Result<Field> {
    let samples = acc.into_iter().map(|v| v * scale).collect();
    let out = Field::from_samples(*f.grid(), samples)?;
    Ok(if quad.dealias { out.dealias() } else { out })
}

/// `T(f) g`.
#[allow(non_snake_case)]
pub fn apply_T(f: &Field, g: &Field, quad: &QuadratureSpec) -> Result<Field> {
    f.check_grid(g)?;
    let grid = *f.grid();
    let rule = quad.rule(&grid)?;
    let k = Kernels::new(&grid, quad.kernel);
    let gx = derivative(g, 1);
    let (fs, gs) = (f.samples(), gx.samples());
    let acc = sweep(
        &grid,
        &[f.spectrum(), gx.spectrum()],
        rule.nodes(),
        grid.n(),
        Reduce::Sum,
        |alpha, w, sh, acc| {
            let a = k.at(alpha);
            for i in 0..acc.len() {
                let c = fs[i] - sh[0][i];
                let dg = gs[i] - sh[1][i];
                acc[i] += w * dg * a.t(c);
            }
        },
    );
    finish(f, acc, -1.0 / std::f64::consts::PI, quad)
}

/// Largest `T` weight `(Δ_α f)^2 / (1 + (Δ_α f)^2)` over all nodes and points.
pub fn max_t_weight(f: &Field, quad: &QuadratureSpec) -> Result<f64> {
    let grid = *f.grid();
    let rule = quad.rule(&grid)?;
    let k = Kernels::new(&grid, quad.kernel);
    let fs = f.samples();
    let out = sweep(&grid, &[f.spectrum()], rule.nodes(), 1, Reduce::Max, |alpha, _, sh, acc| {
        let a = k.at(alpha);
        for i in 0..fs.len() {
            acc[0] = acc[0].max(a.weight(fs[i] - sh[0][i]));
        }
    });
    Ok(out[0])
}

/// Graded rule on `0 < α <= ρε` with an edge at the plateau `ε/4`.
pub fn remainder_rule(f: &Field, eps: f64, bump: &BumpSpec, quad: &QuadratureSpec) -> Result<QuadratureRule> {
    let grid = f.grid();
    quad.validate(grid)?;
    let support = bump.rho * eps;
    Ok(QuadratureRule::graded(
        quad.delta0(grid).min(0.5 * bump.plateau * eps),
        support,
        &[bump.plateau * eps],
        quad.max_panel_dx * grid.dx(),
        quad.gauss_order,
    ))
}

/// `R_ε(f) = -(1/π) ∫ ∂_x Δ_α f / (1 + (Δ_α f)^2) χ(α/ε) dα`.
#[allow(non_snake_case)]
pub fn apply_R_eps(f: &Field, eps: f64, bump: &BumpSpec, quad: &QuadratureSpec) -> Result<Field> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(config(format!("eps must lie in (0, 1], got {eps}")));
    }
    let grid = *f.grid();
    let rule = remainder_rule(f, eps, bump, quad)?;
    let fx = derivative(f, 1);
    let (fs, gs) = (f.samples(), fx.samples());
    let acc = sweep(
        &grid,
        &[f.spectrum(), fx.spectrum()],
        rule.nodes(),
        grid.n(),
        Reduce::Sum,
        |alpha, w, sh, acc| {
            let wc = w * bump.chi(alpha / eps);
            let a2 = alpha * alpha;
            for i in 0..acc.len() {
                let c = fs[i] - sh[0][i];
                let d = gs[i] - sh[1][i];
                acc[i] += wc * d * alpha / (a2 + c * c);
            }
        },
    );
    finish(f, acc, -1.0 / std::f64::consts::PI, quad)
}

/// `f0 ⋆ χ_ε`: every mode is multiplied by `χ̂(εξ)`.
pub fn mollify_initial(f0: &Field, eps: f64, bump: &BumpSpec) -> Result<Field> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(config(format!("eps must lie in (0, 1], got {eps}")));
    }
    let grid = *f0.grid();
    let spectrum = f0
        .spectrum()
        .iter()
        .enumerate()
        .map(|(slot, c)| c * bump.chi_hat(eps * grid.wavenumber(slot)))
        .collect();
    Field::from_spectrum(grid, spectrum)
}

/// `T(f) f + R_ε(f)` with the mean removed: the part of the right-hand side
/// that is not a Fourier multiplier.
pub fn explicit_part(f: &Field, params: &RegularizationParams, quad: &QuadratureSpec) -> Result<Field> {
    let mut g = apply_T(f, f, quad)?;
    if let Some(eps) = params.eps {
        g = g.add(&apply_R_eps(f, eps, &params.bump, quad)?)?;
    }
    Ok(g.without_mean())
}

/// `-|D| f + T(f) f`.
pub fn rhs_full(f: &Field, quad: &QuadratureSpec) -> Result<Field> {
    let t = apply_T(f, f, quad)?.without_mean();
    t.sub(&abs_derivative(f, 1.0))
}

/// `ν ∂_x^2 f - |D| f + T(f) f + R_ε(f)`.
pub fn rhs_regularized(f: &Field, params: &RegularizationParams, quad: &QuadratureSpec) -> Result<Field> {
    params.validate()?;
    let g = explicit_part(f, params, quad)?;
    let lin = derivative(f, 2).scale(params.nu()).sub(&abs_derivative(f, 1.0))?;
    g.add(&lin)
}

/// `(1/π) ∫ ∂_x Δ_α f dα` over the rule of `quad`; equals `-|D| f` in the limit.
pub fn linear_integral(f: &Field, quad: &QuadratureSpec) -> Result<Field> {
    let grid = *f.grid();
    let rule = quad.rule(&grid)?;
    let k = Kernels::new(&grid, quad.kernel);
    let fx = derivative(f, 1);
    let gs = fx.samples();
    let acc = sweep(&grid, &[fx.spectrum()], rule.nodes(), grid.n(), Reduce::Sum, |alpha, w, sh, acc| {
        let kl = w * k.at(alpha).linear();
        for i in 0..acc.len() {
            acc[i] += kl * (gs[i] - sh[0][i]);
        }
    });
    finish(f, acc, 1.0 / std::f64::consts::PI, quad)
}

/// Direct quadrature of the untransformed integrand
/// `(1/π) ∫ ∂_x Δ_α f / (1 + (Δ_α f)^2) dα`.
pub fn full_integral(f: &Field, quad: &QuadratureSpec) -> Result<Field> {
    let grid = *f.grid();
    let rule = quad.rule(&grid)?;
    let k = Kernels::new(&grid, quad.kernel);
    let fx = derivative(f, 1);
    let (fs, gs) = (f.samples(), fx.samples());
    let acc = sweep(
        &grid,
        &[f.spectrum(), fx.spectrum()],
        rule.nodes(),
        grid.n(),
        Reduce::Sum,
        |alpha, w, sh, acc| {
            let a = k.at(alpha);
            for i in 0..acc.len() {
                let c = fs[i] - sh[0][i];
                acc[i] += w * (gs[i] - sh[1][i]) * a.full(c);
            }
        },
    );
    finish(f, acc, 1.0 / std::f64::consts::PI, quad)
}

#[cfg(test)]
mod tests;
