use serde::{Deserialize, Serialize};

use super::quadrature::GaussLegendre;
use crate::error::{config, Result};

/// Even cutoff `chi` with `chi = 1` on `|y| <= 1/4`, a polynomial smoothstep
/// descent on `[1/4, rho]` and `chi = 0` beyond, where `rho` makes `int chi = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpSpec {
    pub plateau: f64,
    pub rho: f64,
    /// Continuity class of the smoothstep: 1 (cubic), 2 (quintic) or 3 (septic).
    pub smoothness: u8,
    /// `int chi dy` as evaluated by quadrature.
    pub mass: f64,
}

/// Support bound required of every cutoff.
pub const SUPPORT_BOUND: f64 = 2.0;

const PLATEAU: f64 = 0.25;

impl Default for BumpSpec {
    fn default() -> Self {
        Self::new(2).expect("quintic smoothstep is supported")
    }
}

impl BumpSpec {
    pub fn new(smoothness: u8) -> Result<Self> {
        if !(1..=3).contains(&smoothness) {
            return Err(config(format!("bump smoothness must be 1, 2 or 3, got {smoothness}")));
        }
        let mut lo = PLATEAU;
        let mut hi = SUPPORT_BOUND;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mass(PLATEAU, mid, smoothness) < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        let rho = 0.5 * (lo + hi);
        Ok(Self {
            plateau: PLATEAU,
            rho,
            smoothness,
            mass: mass(PLATEAU, rho, smoothness),
        })
    }

    pub fn chi(&self, y: f64) -> f64 {
        let a = y.abs();
        if a <= self.plateau {
            1.0
        } else if a >= self.rho {
            0.0
        } else {
            1.0 - smoothstep(self.smoothness, (a - self.plateau) / (self.rho - self.plateau))
        }
    }

    /// `chi_hat(eta) = int chi(y) e^{-i y eta} dy`, clipped to `[-1, 1]`.
    pub fn chi_hat(&self, eta: f64) -> f64 {
        let v = self.chi_hat_raw(eta);
        if v.abs() > 1.0 {
            log::warn!("bump transform {v} exceeds 1 in magnitude at eta = {eta}; clipped");
            v.signum()
        } else {
            v
        }
    }

    fn chi_hat_raw(&self, eta: f64) -> f64 {
        let eta = eta.abs();
        if eta < 1e-12 {
            return self.mass;
        }
        let plateau = 2.0 * (self.plateau * eta).sin() / eta;
        let transition = if eta < 50.0 {
            self.transition_gauss(eta)
        } else {
            self.transition_by_parts(eta)
        };
        plateau + transition
    }

    /// `2 int_{p}^{rho} chi(y) cos(y eta) dy` by composite Gauss quadrature.
    fn transition_gauss(&self, eta: f64) -> f64 {
        let width = self.rho - self.plateau;
        let panels = 16 + (eta * width / std::f64::consts::PI).ceil() as usize * 2;
        let gl = GaussLegendre::new(12);
        let h = width / panels as f64;
        let mut acc = 0.0;
        for p in 0..panels {
            let a = self.plateau + p as f64 * h;
            for (y, w) in gl.on(a, a + h) {
                acc += w * self.chi(y) * (y * eta).cos();
            }
        }
        2.0 * acc
    }

    /// Same integral in closed form: repeated integration by parts terminates
    /// because the smoothstep is a polynomial.
    fn transition_by_parts(&self, eta: f64) -> f64 {
        let width = self.rho - self.plateau;
        let coeffs = smoothstep_coeffs(self.smoothness);
        // g(y) = 1 - S((y - p)/w); derivatives at both ends.
        let deg = coeffs.len() - 1;
        let mut re = 0.0;
        for m in 0..=deg {
            let (ga, gb) = if m == 0 {
                (1.0, 0.0)
            } else {
                let d = poly_derivative_at(&coeffs, m, 0.0);
                let e = poly_derivative_at(&coeffs, m, 1.0);
                (-d / width.powi(m as i32), -e / width.powi(m as i32))
            };
            // int g e^{i y eta} = sum_m (-1)^m [g^(m) e^{i y eta} / (i eta)^{m+1}]
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let (pr, pi) = inv_i_power(m + 1);
            let scale = sign / eta.powi(m as i32 + 1);
            for (y, g, end_sign) in [(self.rho, gb, 1.0), (self.plateau, ga, -1.0)] {
                let (c, s) = ((y * eta).cos(), (y * eta).sin());
                // Real part of g * e^{i y eta} * (pr + i pi).
                re += end_sign * scale * g * (c * pr - s * pi);
            }
        }
        2.0 * re
    }
}

/// `1 / i^k` as `(re, im)`.
fn inv_i_power(k: usize) -> (f64, f64) {
    match k % 4 {
        0 => (1.0, 0.0),
        1 => (0.0, -1.0),
        2 => (-1.0, 0.0),
        _ => (0.0, 1.0),
    }
}

fn smoothstep_coeffs(k: u8) -> Vec<f64> {
    match k {
        1 => vec![0.0, 0.0, 3.0, -2.0],
        2 => vec![0.0, 0.0, 0.0, 10.0, -15.0, 6.0],
        _ => vec![0.0, 0.0, 0.0, 0.0, 35.0, -84.0, 70.0, -20.0],
    }
}

fn smoothstep(k: u8, t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    smoothstep_coeffs(k).iter().rev().fold(0.0, |acc, c| acc * t + c)
}

fn poly_derivative_at(coeffs: &[f64], m: usize, t: f64) -> f64 {
    let mut acc = 0.0;
    for (p, c) in coeffs.iter().enumerate().skip(m) {
        let mut fall = 1.0;
        for j in 0..m {
            fall *= (p - j) as f64;
        }
        acc += c * fall * t.powi((p - m) as i32);
    }
    acc
}

fn mass(plateau: f64, rho: f64, k: u8) -> f64 {
    let gl = GaussLegendre::new(16);
    let width = rho - plateau;
    let transition: f64 = gl
        .on(plateau, rho)
        .map(|(y, w)| w * (1.0 - smoothstep(k, (y - plateau) / width)))
        .sum();
    2.0 * (plateau + transition)
}
