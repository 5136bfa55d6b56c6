//! Shift kernels, bare or summed over the period lattice `α + nL`.
//!
//! With `q = π/L`, `u = qα` and `s = sinh^2(qc)` for a difference `c`:
//!
//! | bare                   | lattice sum                       |
//! |------------------------|-----------------------------------|
//! | `1/α`                  | `q cot u`                         |
//! | `c^2 / (α(α^2 + c^2))` | `q cot u · s / (s + sin^2 u)`     |
//! | `α / (α^2 + c^2)`      | `q sin u cos u / (s + sin^2 u)`   |
//! | `ln(1 + c^2/α^2) / 2`  | `ln(1 + s / sin^2 u) / 2`         |
//! | `1/α^2`                | `q^2 / sin^2 u`                   |

use super::quadrature::AlphaKernel;
use crate::spectral::Grid;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Kernels {
    q: f64,
    kind: AlphaKernel,
}

/// Kernels frozen at one shift `α`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct AtShift {
    q: f64,
    alpha: f64,
    sin: f64,
    cos: f64,
    periodic: bool,
}

impl Kernels {
    pub fn new(grid: &Grid, kind: AlphaKernel) -> Self {
        Self {
            q: std::f64::consts::PI / grid.length(),
            kind,
        }
    }

    pub fn at(&self, alpha: f64) -> AtShift {
        let (sin, cos) = (self.q * alpha).sin_cos();
        AtShift {
            q: self.q,
            alpha,
            sin,
            cos,
            periodic: self.kind == AlphaKernel::Periodic,
        }
    }
}

impl AtShift {
    #[inline]
    fn s(&self, c: f64) -> f64 {
        let v = (self.q * c).sinh();
        v * v
    }

    /// Weight `(Δ_α f)^2 / (1 + (Δ_α f)^2)` in `[0, 1)`.
    #[inline]
    pub fn weight(&self, c: f64) -> f64 {
        if self.periodic {
            let s = self.s(c);
            s / (s + self.sin * self.sin)
        } else {
            c * c / (self.alpha * self.alpha + c * c)
        }
    }

    /// Kernel of `T`: multiplies `δ_α g_x`.
    #[inline]
    pub fn t(&self, c: f64) -> f64 {
        if self.periodic {
            let s = self.s(c);
            self.q * self.cos * s / (self.sin * (s + self.sin * self.sin))
        } else {
            c * c / (self.alpha * (self.alpha * self.alpha + c * c))
        }
    }

    /// Kernel of the untransformed integrand: multiplies `δ_α f_x`.
    #[inline]
    pub fn full(&self, c: f64) -> f64 {
        if self.periodic {
            let s = self.s(c);
            self.q * self.sin * self.cos / (s + self.sin * self.sin)
        } else {
            self.alpha / (self.alpha * self.alpha + c * c)
        }
    }

    /// Kernel of the linear part: multiplies `δ_α f_x`.
    #[inline]
    pub fn linear(&self) -> f64 {
        if self.periodic {
            self.q * self.cos / self.sin
        } else {
            1.0 / self.alpha
        }
    }

    /// `log sqrt(1 + (Δ_α f)^2)`.
    #[inline]
    pub fn log(&self, c: f64) -> f64 {
        if self.periodic {
            0.5 * (self.s(c) / (self.sin * self.sin)).ln_1p()
        } else {
            0.5 * (c * c / (self.alpha * self.alpha)).ln_1p()
        }
    }

    /// `1/α^2`.
    #[inline]
    pub fn inverse_square(&self) -> f64 {
        if self.periodic {
            self.q * self.q / (self.sin * self.sin)
        } else {
            1.0 / (self.alpha * self.alpha)
        }
    }
}
