use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{config, Result};

/// Uniform periodic grid on `[0, L)` with `N` collocation nodes.
///
/// Mode slots follow the FFT layout: slot `j <= N/2` carries the integer mode
/// `j`, slot `j > N/2` carries `j - N`. The Nyquist slot `N/2` is counted on
/// the positive side, so the integer modes are `-N/2+1 ..= N/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    length: f64,
    n: usize,
}

impl Grid {
    pub const MIN_NODES: usize = 8;

    pub fn new(length: f64, n: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(config(format!("grid length must be positive, got {length}")));
        }
        if n < Self::MIN_NODES || n % 2 != 0 {
            return Err(config(format!(
                "grid node count must be even and >= {}, got {n}",
                Self::MIN_NODES
            )));
        }
        Ok(Self { length, n })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.length / self.n as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    pub fn nyquist_slot(&self) -> usize {
        self.n / 2
    }

    /// Integer mode carried by FFT slot `slot`.
    pub fn mode(&self, slot: usize) -> i64 {
        if slot <= self.n / 2 {
            slot as i64
        } else {
            slot as i64 - self.n as i64
        }
    }

    /// Angular wavenumber `2*pi*k/L` of FFT slot `slot`.
    pub fn wavenumber(&self, slot: usize) -> f64 {
        2.0 * PI * self.mode(slot) as f64 / self.length
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.wavenumber(j)).collect()
    }

    pub fn wavenumber_spacing(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Largest resolved wavenumber (the Nyquist wavenumber).
    pub fn xi_max(&self) -> f64 {
        PI * self.n as f64 / self.length
    }

    /// FFT slot holding the angular wavenumber `xi`, if `xi` lies on the lattice.
    pub fn slot_of(&self, xi: f64) -> Option<usize> {
        let k = xi / self.wavenumber_spacing();
        let kr = k.round();
        if (k - kr).abs() > 1e-9 * k.abs().max(1.0) {
            return None;
        }
        let k = kr as i64;
        let half = (self.n / 2) as i64;
        if k > half || k <= -half {
            return None;
        }
        Some(if k >= 0 { k as usize } else { (k + self.n as i64) as usize })
    }

    /// Same length, `factor` times as many nodes.
    pub fn refined(&self, factor: usize) -> Grid {
        Grid {
            length: self.length,
            n: self.n * factor,
        }
    }

    /// Same node count on the domain `[0, L/lambda)`.
    pub fn rescaled(&self, lambda: f64) -> Result<Grid> {
        Grid::new(self.length / lambda, self.n)
    }
}
