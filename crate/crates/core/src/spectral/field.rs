use rustfft::num_complex::Complex64;

use super::fft;
use super::grid::Grid;
use crate::error::{Error, Result};

/// A real periodic function on a [`Grid`], held both as collocation samples
/// and as Fourier-series coefficients.
///
/// The coefficients are normalized so that `f(x) = sum_k c_k e^{i xi_k x}`.
/// Both representations are fixed at construction; a `Field` is never mutated
/// afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    samples: Vec<f64>,
    spectrum: Vec<Complex64>,
}

impl Field {
    pub fn from_samples(grid: Grid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.n() {
            return Err(Error::Config(format!(
                "expected {} samples, got {}",
                grid.n(),
                samples.len()
            )));
        }
        if let Some(node) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample { node });
        }
        let spectrum = fft::forward(&samples);
        Ok(Self {
            grid,
            samples,
            spectrum,
        })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let samples = grid.nodes().into_iter().map(f).collect();
        Self::from_samples(grid, samples)
    }

    /// Builds a field from coefficients after projecting onto real-valued
    /// fields (conjugate symmetry, real mean and Nyquist coefficients).
    pub fn from_spectrum(grid: Grid, mut spectrum: Vec<Complex64>) -> Result<Self> {
        let n = grid.n();
        if spectrum.len() != n {
            return Err(Error::Config(format!(
                "expected {n} coefficients, got {}",
                spectrum.len()
            )));
        }
        if let Some(mode) = spectrum.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFiniteMode { mode });
        }
        make_hermitian(&mut spectrum);
        let samples = fft::inverse_real(&spectrum);
        Ok(Self {
            grid,
            samples,
            spectrum,
        })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            samples: vec![0.0; grid.n()],
            spectrum: vec![Complex64::new(0.0, 0.0); grid.n()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(|&v| v == 0.0)
    }

    pub fn mean(&self) -> f64 {
        self.spectrum[0].re
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `L^2(0, L)` norm from the samples (rectangle rule, exact for trigonometric
    /// polynomials below the Nyquist mode).
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.samples.iter().map(|v| v * v).sum();
        (s * self.grid.dx()).sqrt()
    }

    /// `L^2(0, L)` norm from the coefficients (Parseval).
    pub fn l2_norm_spectral(&self) -> f64 {
        let s: f64 = self.spectrum.iter().map(|c| c.norm_sqr()).sum();
        (s * self.grid.length()).sqrt()
    }

    /// `L^2` inner product over one period.
    pub fn inner(&self, other: &Field) -> Result<f64> {
        self.check_grid(other)?;
        let s: f64 = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a * b)
            .sum();
        Ok(s * self.grid.dx())
    }

    pub fn check_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn scale(&self, a: f64) -> Field {
        Field {
            grid: self.grid,
            samples: self.samples.iter().map(|v| a * v).collect(),
            spectrum: self.spectrum.iter().map(|c| c * a).collect(),
        }
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &Field) -> Result<Field> {
        self.check_grid(other)?;
        Ok(Field {
            grid: self.grid,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(x, y)| x + a * y)
                .collect(),
            spectrum: self
                .spectrum
                .iter()
                .zip(&other.spectrum)
                .map(|(x, y)| x + y * a)
                .collect(),
        })
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.axpy(-1.0, other)
    }

    /// Returns `x -> f(x - alpha)`.
    ///
    /// Exact for band-limited fields: every coefficient is rotated by
    /// `e^{-i xi alpha}`. The Nyquist coefficient keeps only its cosine part so
    /// the result stays real.
    pub fn shift(&self, alpha: f64) -> Field {
        if alpha == 0.0 {
            return self.clone();
        }
        let nyq = self.grid.nyquist_slot();
        let spectrum: Vec<Complex64> = self
            .spectrum
            .iter()
            .enumerate()
            .map(|(slot, c)| {
                let theta = self.grid.wavenumber(slot) * alpha;
                if slot == nyq {
                    c * theta.cos()
                } else {
                    c * Complex64::new(theta.cos(), -theta.sin())
                }
            })
            .collect();
        let samples = fft::inverse_real(&spectrum);
        Field {
            grid: self.grid,
            samples,
            spectrum,
        }
    }

    /// 2/3-rule truncation: zeroes every mode with `|k| > N/3`.
    pub fn dealias(&self) -> Field {
        let cutoff = self.grid.n() as i64 / 3;
        let mut spectrum = self.spectrum.clone();
        let mut touched = false;
        for (slot, c) in spectrum.iter_mut().enumerate() {
            if self.grid.mode(slot).abs() > cutoff && *c != Complex64::new(0.0, 0.0) {
                *c = Complex64::new(0.0, 0.0);
                touched = true;
            }
        }
        if !touched {
            return self.clone();
        }
        let samples = fft::inverse_real(&spectrum);
        Field {
            grid: self.grid,
            samples,
            spectrum,
        }
    }

    /// Removes the mean (zero mode).
    pub fn without_mean(&self) -> Field {
        let mut spectrum = self.spectrum.clone();
        let m = spectrum[0].re;
        spectrum[0] = Complex64::new(0.0, 0.0);
        Field {
            grid: self.grid,
            samples: self.samples.iter().map(|v| v - m).collect(),
            spectrum,
        }
    }

    /// Samples of the trigonometric interpolant on a grid `factor` times finer.
    pub fn refined_samples(&self, factor: usize) -> Vec<f64> {
        if factor <= 1 {
            return self.samples.clone();
        }
        fft::inverse_real(&self.padded_spectrum(factor))
    }

    /// The field's coefficients embedded in a grid `factor` times finer.
    pub fn refined(&self, factor: usize) -> Field {
        let grid = self.grid.refined(factor.max(1));
        let spectrum = self.padded_spectrum(factor.max(1));
        let samples = fft::inverse_real(&spectrum);
        Field {
            grid,
            samples,
            spectrum,
        }
    }

    fn padded_spectrum(&self, factor: usize) -> Vec<Complex64> {
        let n = self.grid.n();
        if factor <= 1 {
            return self.spectrum.clone();
        }
        let m = n * factor;
        let mut out = vec![Complex64::new(0.0, 0.0); m];
        let half = n / 2;
        for slot in 0..half {
            out[slot] = self.spectrum[slot];
        }
        for slot in half + 1..n {
            out[m - (n - slot)] = self.spectrum[slot];
        }
        // Split the Nyquist coefficient evenly between +N/2 and -N/2.
        let c = self.spectrum[half] * 0.5;
        out[half] = c;
        out[m - half] = c;
        out
    }
}

pub(crate) fn make_hermitian(spectrum: &mut [Complex64]) {
    let n = spectrum.len();
    spectrum[0].im = 0.0;
    spectrum[n / 2].im = 0.0;
    for k in 1..n / 2 {
        let a = spectrum[k];
        let b = spectrum[n - k].conj();
        let avg = (a + b) * 0.5;
        spectrum[k] = avg;
        spectrum[n - k] = avg.conj();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn grid(n: usize) -> Grid {
        Grid::new(2.0 * PI, n).unwrap()
    }

    #[test]
    fn shift_sine_quarter_period() {
        let g = grid(32);
        let f = Field::from_fn(g, f64::sin).unwrap();
        let s = f.shift(PI / 2.0);
        for (x, v) in g.nodes().iter().zip(s.samples()) {
            assert!((v + x.cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn shift_zero_is_bit_identical() {
        let g = grid(32);
        let f = Field::from_fn(g, |x| (3.0 * x).sin() + 0.2 * (5.0 * x).cos()).unwrap();
        assert_eq!(f.shift(0.0), f);
    }

    #[test]
    fn shift_by_period() {
        let g = grid(64);
        let f = Field::from_fn(g, |x| (x.sin()).exp()).unwrap();
        let s = f.shift(g.length());
        for (a, b) in f.samples().iter().zip(s.samples()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn nonfinite_samples_rejected() {
        let g = grid(8);
        let mut v = vec![0.0; 8];
        v[3] = f64::NAN;
        match Field::from_samples(g, v) {
            Err(Error::NonFiniteSample { node }) => assert_eq!(node, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn refinement_interpolates() {
        let g = grid(16);
        let f = Field::from_fn(g, |x| (2.0 * x).sin() + (3.0 * x).cos()).unwrap();
        let fine = f.refined_samples(4);
        let fg = g.refined(4);
        for (x, v) in fg.nodes().iter().zip(&fine) {
            assert!((v - ((2.0 * x).sin() + (3.0 * x).cos())).abs() < 1e-13);
        }
    }

    #[test]
    fn dealias_drops_high_modes_only() {
        let g = grid(24);
        let f = Field::from_fn(g, |x| x.sin() + (10.0 * x).sin()).unwrap();
        let d = f.dealias();
        for (x, v) in g.nodes().iter().zip(d.samples()) {
            assert!((v - x.sin()).abs() < 1e-13);
        }
    }

    fn random_field(n: usize, coeffs: &[(f64, f64)]) -> Field {
        let g = grid(n);
        Field::from_fn(g, |x| {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, (a, b))| a * ((k + 1) as f64 * x).cos() + b * ((k + 1) as f64 * x).sin())
                .sum()
        })
        .unwrap()
    }

    proptest! {
        #[test]
        fn round_trip_and_parseval(coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..20)) {
            let f = random_field(64, &coeffs);
            let back = Field::from_spectrum(*f.grid(), f.spectrum().to_vec()).unwrap();
            let scale = f.max_abs().max(1e-300);
            for (a, b) in f.samples().iter().zip(back.samples()) {
                prop_assert!((a - b).abs() <= 1e-12 * scale);
            }
            let (a, b) = (f.l2_norm(), f.l2_norm_spectral());
            prop_assert!((a - b).abs() <= 1e-10 * a.max(1e-300));
        }

        #[test]
        fn shift_inverts(coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..20), alpha in -10.0f64..10.0) {
            let f = random_field(64, &coeffs);
            let back = f.shift(alpha).shift(-alpha);
            let scale = f.max_abs().max(1e-300);
            for (a, b) in f.samples().iter().zip(back.samples()) {
                prop_assert!((a - b).abs() <= 1e-12 * scale.max(1.0));
            }
        }
    }
}
