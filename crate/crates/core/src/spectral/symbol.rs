use rustfft::num_complex::Complex64;

use super::field::Field;
use crate::error::{config, Error, Result};
use crate::phi::PhiWeight;

/// Fourier multipliers used throughout the solver.
#[derive(Debug, Clone)]
pub enum SymbolSpec {
    /// `|xi|^s`.
    AbsPower(f64),
    /// `|xi|^s phi(|xi|)`.
    AbsPowerPhi(f64, PhiWeight),
    /// Heat semigroup `exp(-nu t xi^2)`; the parameter is `nu * t`.
    Heat(f64),
    /// Poisson semigroup `exp(-t |xi|)`.
    Poisson(f64),
    /// `(i xi)^order`.
    Derivative(u32),
}

impl SymbolSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            SymbolSpec::AbsPower(s) | SymbolSpec::AbsPowerPhi(s, _) if !(*s >= 0.0 && s.is_finite()) => {
                Err(config(format!("symbol exponent must be >= 0, got {s}")))
            }
            SymbolSpec::Heat(nt) if !(*nt >= 0.0 && nt.is_finite()) => {
                Err(config(format!("heat parameter must be >= 0, got {nt}")))
            }
            SymbolSpec::Poisson(t) if !(*t >= 0.0 && t.is_finite()) => {
                Err(config(format!("Poisson parameter must be >= 0, got {t}")))
            }
            _ => Ok(()),
        }
    }

    /// Value of the symbol at angular wavenumber `xi`.
    pub fn value(&self, xi: f64) -> Complex64 {
        let a = xi.abs();
        match self {
            SymbolSpec::AbsPower(s) => Complex64::new(abs_power(a, *s), 0.0),
            SymbolSpec::AbsPowerPhi(s, phi) => Complex64::new(abs_power(a, *s) * phi.eval(a), 0.0),
            SymbolSpec::Heat(nt) => Complex64::new((-nt * xi * xi).exp(), 0.0),
            SymbolSpec::Poisson(t) => Complex64::new((-t * a).exp(), 0.0),
            SymbolSpec::Derivative(order) => Complex64::new(0.0, xi).powu(*order),
        }
    }

    fn is_odd(&self) -> bool {
        matches!(self, SymbolSpec::Derivative(order) if order % 2 == 1)
    }
}

fn abs_power(a: f64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else if a == 0.0 {
        0.0
    } else {
        a.powf(s)
    }
}

/// Multiplies every Fourier coefficient of `f` by the symbol.
///
/// Odd symbols zero the Nyquist coefficient, which has no real odd partner.
pub fn apply_multiplier(f: &Field, sym: &SymbolSpec) -> Result<Field> {
    sym.validate()?;
    let grid = *f.grid();
    if let Some(mode) = f
        .spectrum()
        .iter()
        .position(|c| !(c.re.is_finite() && c.im.is_finite()))
    {
        return Err(Error::NonFiniteMode { mode });
    }
    let nyq = grid.nyquist_slot();
    let odd = sym.is_odd();
    let mut out = Vec::with_capacity(grid.n());
    for (slot, c) in f.spectrum().iter().enumerate() {
        if odd && slot == nyq {
            out.push(Complex64::new(0.0, 0.0));
            continue;
        }
        let m = sym.value(grid.wavenumber(slot));
        if !(m.re.is_finite() && m.im.is_finite()) {
            return Err(Error::NonFiniteMode { mode: slot });
        }
        out.push(c * m);
    }
    Field::from_spectrum(grid, out)
}

/// `d^order f / dx^order`.
pub fn derivative(f: &Field, order: u32) -> Field {
    apply_multiplier(f, &SymbolSpec::Derivative(order)).expect("derivative of a finite field")
}

/// `|D|^s f`.
pub fn abs_derivative(f: &Field, s: f64) -> Field {
    apply_multiplier(f, &SymbolSpec::AbsPower(s)).expect("|D|^s of a finite field")
}

/// Weighted homogeneous Sobolev norm
/// `( L * sum_k |xi|^{2s} phi(|xi|)^{2p} |c_k|^2 )^{1/2}` with `p = phi_power`.
///
/// The zero mode never contributes.
pub fn weighted_norm(f: &Field, s: f64, phi: &PhiWeight, phi_power: i32) -> f64 {
    let grid = f.grid();
    let mut acc = 0.0;
    for (slot, c) in f.spectrum().iter().enumerate().skip(1) {
        let a = grid.wavenumber(slot).abs();
        let w = abs_power(a, s) * phi.eval(a).powi(phi_power);
        acc += w * w * c.norm_sqr();
    }
    (acc * grid.length()).sqrt()
}

/// `‖f‖_{Ḣ^s,φ}`: the spectral part of the weighted space norm.
pub fn sobolev_phi_norm(f: &Field, s: f64, phi: &PhiWeight) -> f64 {
    weighted_norm(f, s, phi, 1)
}

/// Homogeneous Sobolev norm `‖f‖_{Ḣ^s}`.
pub fn hs_norm(f: &Field, s: f64) -> f64 {
    let grid = f.grid();
    let mut acc = 0.0;
    for (slot, c) in f.spectrum().iter().enumerate().skip(1) {
        let w = abs_power(grid.wavenumber(slot).abs(), s);
        acc += w * w * c.norm_sqr();
    }
    (acc * grid.length()).sqrt()
}

/// Inhomogeneous Sobolev norm `( L * sum_k (1 + xi^2)^s |c_k|^2 )^{1/2}`.
pub fn h_norm(f: &Field, s: f64) -> f64 {
    let grid = f.grid();
    let mut acc = 0.0;
    for (slot, c) in f.spectrum().iter().enumerate() {
        let xi = grid.wavenumber(slot);
        acc += (1.0 + xi * xi).powf(s) * c.norm_sqr();
    }
    (acc * grid.length()).sqrt()
}
