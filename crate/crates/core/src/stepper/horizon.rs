use crate::constants::ConstantSet;
use crate::functionals::{energies, lipschitz_seminorm};
use crate::phi::PhiWeight;
use crate::spectral::Field;

const PER_DECADE: i32 = 64;
const DECADES: i32 = 6;

/// `ℰ(r, m) = sup_ρ { C2 (√r + r) ρ / φ(ρ/r) - (C1/2) ρ / m }` over the
/// geometric grid `anchor · 10^{j/64}`, `|j| <= 6·64`, together with `ρ = 0`.
///
/// Returns `+∞` when the largest value sits at the top of the grid, where
/// the supremand is still increasing.
pub fn envelope(r: f64, m: f64, phi: &PhiWeight, c: &ConstantSet, anchor: f64) -> f64 {
    let a = c.c2 * (r.sqrt() + r);
    let b = 0.5 * c.c1 / m;
    let g = |rho: f64| a * rho / phi.eval(rho / r) - b * rho;
    let top = PER_DECADE * DECADES;
    let mut best = 0.0;
    let mut at_top = false;
    for j in -top..=top {
        let rho = anchor * 10f64.powf(j as f64 / PER_DECADE as f64);
        let v = g(rho);
        if v > best {
            best = v;
            at_top = j == top;
        }
    }
    if at_top {
        f64::INFINITY
    } else {
        best
    }
}

/// `A(0) / (4 ℰ(4 A(0), m))` with `m = (2 + ‖∂_x f0‖_∞)²` and `A = A_φ`.
///
/// Returns `+∞` for zero data or a vanishing envelope, and 0 when the
/// envelope is unbounded on the grid.
pub fn local_time_horizon(f0: &Field, phi: &PhiWeight, constants: &ConstantSet) -> f64 {
    let a0 = energies(f0, phi).a;
    if a0 == 0.0 {
        return f64::INFINITY;
    }
    let m = (2.0 + lipschitz_seminorm(f0)).powi(2);
    let e = envelope(4.0 * a0, m, phi, constants, a0);
    if e == f64::INFINITY {
        0.0
    } else if e == 0.0 {
        f64::INFINITY
    } else {
        a0 / (4.0 * e)
    }
}
