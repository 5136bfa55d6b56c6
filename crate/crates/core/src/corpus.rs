//! Initial-data families.
//!
//! Random families draw from `ChaCha8Rng` seeded with a `u64`, so a seed
//! determines the field bit for bit on every platform.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

use crate::error::{config, Result};
use crate::spectral::{hs_norm, Field, Grid};

/// `a sin(2πk x / L)`.
pub fn single_mode(grid: Grid, amplitude: f64, k: u32) -> Result<Field> {
    if k as usize >= grid.n() / 2 {
        return Err(config(format!("data.wavenumber {k} is not resolved by N = {}", grid.n())));
    }
    let xi = 2.0 * PI * k as f64 / grid.length();
    Field::from_fn(grid, |x| amplitude * (xi * x).sin())
}

/// Random coefficients on modes `lo..=hi` with uniform phases and magnitudes
/// uniform in `[0, 1)` times `|k|^{-decay}`.
pub fn random_bandlimited(grid: Grid, lo: u32, hi: u32, decay: f64, seed: u64) -> Result<Field> {
    if lo == 0 || lo > hi || hi as usize >= grid.n() / 2 {
        return Err(config(format!(
            "data.band [{lo}, {hi}] must satisfy 1 <= lo <= hi < N/2 = {}",
            grid.n() / 2
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.n();
    let mut spectrum = vec![Complex64::new(0.0, 0.0); n];
    for k in lo..=hi {
        let mag: f64 = rng.gen::<f64>() * (k as f64).powf(-decay);
        let theta: f64 = rng.gen::<f64>() * 2.0 * PI;
        let c = Complex64::from_polar(mag, theta);
        spectrum[k as usize] = c;
        spectrum[n - k as usize] = c.conj();
    }
    Field::from_spectrum(grid, spectrum)
}

/// Random phases with `|c_k| = |ξ_k|^{-exponent}` on every non-zero mode
/// below Nyquist.
pub fn power_law(grid: Grid, exponent: f64, seed: u64) -> Result<Field> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.n();
    let mut spectrum = vec![Complex64::new(0.0, 0.0); n];
    for k in 1..n / 2 {
        let theta: f64 = rng.gen::<f64>() * 2.0 * PI;
        let c = Complex64::from_polar(grid.wavenumber(k).powf(-exponent), theta);
        spectrum[k] = c;
        spectrum[n - k] = c.conj();
    }
    Field::from_spectrum(grid, spectrum)
}

/// `a exp(-(x - L/2)² / (2 w²))`.
pub fn gaussian_bump(grid: Grid, amplitude: f64, width: f64) -> Result<Field> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(config(format!("data.width must be positive, got {width}")));
    }
    let c = 0.5 * grid.length();
    Field::from_fn(grid, |x| amplitude * (-(x - c).powi(2) / (2.0 * width * width)).exp())
}

/// Independent uniform samples in `[-a, a)`.
pub fn white_noise(grid: Grid, amplitude: f64, seed: u64) -> Result<Field> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..grid.n()).map(|_| amplitude * (2.0 * rng.gen::<f64>() - 1.0)).collect();
    Field::from_samples(grid, samples)
}

/// [`random_bandlimited`] with the band `1 <= lo <= hi < N/2` and the decay
/// in `[0, 3)` also drawn from `seed`.
pub fn random_family(grid: Grid, seed: u64) -> Result<Field> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let top = (grid.n() / 2 - 1) as u32;
    let lo = rng.gen_range(1..=top);
    let hi = rng.gen_range(lo..=top);
    let decay = 3.0 * rng.gen::<f64>();
    random_bandlimited(grid, lo, hi, decay, seed)
}

/// Rescales `f` so that `‖f‖_{Ḣ^{3/2}} = target`.
pub fn normalize_h32(f: &Field, target: f64) -> Result<Field> {
    let n = hs_norm(f, 1.5);
    if n == 0.0 {
        return Err(config("cannot normalize a field with zero Ḣ^{3/2} norm"));
    }
    Ok(f.scale(target / n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(2.0 * PI, 128).unwrap()
    }

    #[test]
    fn seeds_reproduce() {
        let a = random_bandlimited(grid(), 1, 20, 1.0, 7).unwrap();
        let b = random_bandlimited(grid(), 1, 20, 1.0, 7).unwrap();
        let c = random_bandlimited(grid(), 1, 20, 1.0, 8).unwrap();
        assert_eq!(a.samples(), b.samples());
        assert_ne!(a.samples(), c.samples());
    }

    #[test]
    fn band_is_respected() {
        let f = random_bandlimited(grid(), 3, 9, 0.0, 1).unwrap();
        for (slot, c) in f.spectrum().iter().enumerate() {
            let k = grid().mode(slot).unsigned_abs();
            if !(3..=9).contains(&k) {
                assert!(c.norm() < 1e-15);
            }
        }
        assert!(random_bandlimited(grid(), 0, 9, 0.0, 1).is_err());
        assert!(random_bandlimited(grid(), 1, 64, 0.0, 1).is_err());
    }

    #[test]
    fn normalization() {
        let f = normalize_h32(&power_law(grid(), 2.0, 3).unwrap(), 0.05).unwrap();
        assert!((hs_norm(&f, 1.5) - 0.05).abs() < 1e-15);
        assert!(normalize_h32(&Field::zeros(grid()), 1.0).is_err());
    }

    #[test]
    fn family_is_nonzero_and_seeded() {
        for seed in 0..50 {
            let f = random_family(grid(), seed).unwrap();
            assert!(!f.is_zero());
            assert_eq!(f.samples(), random_family(grid(), seed).unwrap().samples());
        }
    }

    #[test]
    fn single_mode_values() {
        let f = single_mode(grid(), 0.5, 3).unwrap();
        let x = grid().node(5);
        assert!((f.samples()[5] - 0.5 * (3.0 * x).sin()).abs() < 1e-15);
        assert!(single_mode(grid(), 1.0, 64).is_err());
    }
}
