//! Map-reduce over shift nodes.
//!
//! For a node `alpha` every source `u` is evaluated at `x - alpha` and
//! `x + alpha` with one complex inverse transform: the coefficients
//! `c_k (cos t - sin t)(1 + i)`, `t = xi_k alpha`, synthesize
//! `u(x - alpha) + i u(x + alpha)`.
//!
//! Nodes are processed in fixed chunks; each chunk accumulates `+alpha` then
//! `-alpha` for its nodes in ascending order, and chunk results are combined
//! in ascending chunk order. The result does not depend on the thread count.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use crate::spectral::{fft, Grid};

const CHUNK: usize = 8;
const BATCH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Reduce {
    Sum,
    Max,
}

impl Reduce {
    fn combine(self, into: &mut [f64], from: &[f64]) {
        match self {
            Reduce::Sum => into.iter_mut().zip(from).for_each(|(a, b)| *a += b),
            Reduce::Max => into.iter_mut().zip(from).for_each(|(a, b)| *a = a.max(*b)),
        }
    }
}

/// Calls `body(alpha, weight, shifted, acc)` for every signed node, where
/// `shifted[i]` holds the samples of `sources[i]` at `x - alpha`.
pub(crate) fn sweep<F>(
    grid: &Grid,
    sources: &[&[Complex64]],
    nodes: &[(f64, f64)],
    out_len: usize,
    reduce: Reduce,
    body: F,
) -> Vec<f64>
where
    F: Fn(f64, f64, &[Vec<f64>], &mut [f64]) + Sync,
{
    let n = grid.n();
    let wavenumbers = grid.wavenumbers();
    let nyq = grid.nyquist_slot();
    let chunks: Vec<&[(f64, f64)]> = nodes.chunks(CHUNK).collect();
    let mut total = vec![0.0; out_len];
    for batch in chunks.chunks(BATCH) {
        let partials: Vec<Vec<f64>> = batch
            .par_iter()
            .map(|chunk| {
                let plans = fft::plans(n);
                let mut scratch = vec![Complex64::new(0.0, 0.0); plans.scratch_len()];
                let mut buf = vec![Complex64::new(0.0, 0.0); n];
                let mut minus: Vec<Vec<f64>> = vec![vec![0.0; n]; sources.len()];
                let mut plus: Vec<Vec<f64>> = vec![vec![0.0; n]; sources.len()];
                let mut acc = vec![0.0; out_len];
                for &(alpha, weight) in chunk.iter() {
                    for (s, src) in sources.iter().enumerate() {
                        for (slot, c) in src.iter().enumerate() {
                            let theta = wavenumbers[slot] * alpha;
                            let (sin, cos) = theta.sin_cos();
                            let m = if slot == nyq { cos } else { cos - sin };
                            buf[slot] = Complex64::new((c.re - c.im) * m, (c.re + c.im) * m);
                        }
                        plans.inverse.process_with_scratch(&mut buf, &mut scratch);
                        for ((z, lo), hi) in buf.iter().zip(minus[s].iter_mut()).zip(plus[s].iter_mut()) {
                            *lo = z.re;
                            *hi = z.im;
                        }
                    }
                    body(alpha, weight, &minus, &mut acc);
                    body(-alpha, weight, &plus, &mut acc);
                }
                acc
            })
            .collect();
        for p in &partials {
            reduce.combine(&mut total, p);
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Field;
    use std::f64::consts::PI;

    #[test]
    fn packed_shifts_match_field_shift() {
        let g = Grid::new(2.0 * PI, 32).unwrap();
        let f = Field::from_fn(g, |x| (x.sin()).exp() + 0.1 * (16.0 * x).cos()).unwrap();
        let nodes = [(0.3, 1.0), (1.7, 1.0)];
        let got = sweep(&g, &[f.spectrum()], &nodes, 4 * 32, Reduce::Sum, |alpha, _, sh, acc| {
            let idx = [0.3, -0.3, 1.7, -1.7].iter().position(|a| *a == alpha).unwrap();
            acc[idx * 32..(idx + 1) * 32].copy_from_slice(&sh[0]);
        });
        for (i, alpha) in [0.3, -0.3, 1.7, -1.7].iter().enumerate() {
            let want = f.shift(*alpha);
            for (a, b) in got[i * 32..(i + 1) * 32].iter().zip(want.samples()) {
                assert!((a - b).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn result_is_independent_of_thread_count() {
        let g = Grid::new(2.0 * PI, 64).unwrap();
        let f = Field::from_fn(g, |x| (x.cos()).exp()).unwrap();
        let nodes: Vec<(f64, f64)> = (1..2000).map(|i| (i as f64 * 1e-3, 1e-3)).collect();
        let run = || {
            sweep(&g, &[f.spectrum()], &nodes, 64, Reduce::Sum, |_, w, sh, acc| {
                for (a, v) in acc.iter_mut().zip(&sh[0]) {
                    *a += w * v * v;
                }
            })
        };
        let a = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(run);
        let b = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(run);
        assert_eq!(a, b);
    }
}
