use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub(crate) struct Plans {
    pub forward: Arc<dyn Fft<f64>>,
    pub inverse: Arc<dyn Fft<f64>>,
}

impl Plans {
    pub fn scratch_len(&self) -> usize {
        self.forward
            .get_inplace_scratch_len()
            .max(self.inverse.get_inplace_scratch_len())
    }
}

static PLANS: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();

pub(crate) fn plans(n: usize) -> Arc<Plans> {
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("fft plan cache poisoned");
    map.entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

/// Fourier-series coefficients `c_k = (1/N) sum_j f_j e^{-i xi_k x_j}`.
pub(crate) fn forward(samples: &[f64]) -> Vec<Complex64> {
    let n = samples.len();
    let p = plans(n);
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    p.forward.process(&mut buf);
    let scale = 1.0 / n as f64;
    for c in buf.iter_mut() {
        *c *= scale;
    }
    buf
}

/// Evaluates `sum_k c_k e^{i xi_k x_j}` and keeps the real part.
pub(crate) fn inverse_real(spectrum: &[Complex64]) -> Vec<f64> {
    let p = plans(spectrum.len());
    let mut buf = spectrum.to_vec();
    p.inverse.process(&mut buf);
    buf.into_iter().map(|c| c.re).collect()
}
