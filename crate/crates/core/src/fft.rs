//! Cached 2D and 1D complex FFT plans.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::exec;

type PlanKey = (usize, bool);
type PlanCache = (FftPlanner<f64>, HashMap<PlanKey, Arc<dyn Fft<f64>>>);

fn planner_cache() -> &'static Mutex<PlanCache> {
    static CACHE: OnceLock<Mutex<PlanCache>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())))
}

/// Shared 1D plan of length `n`.
pub fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut guard = planner_cache().lock().expect("fft plan cache poisoned");
    let (planner, map) = &mut *guard;
    map.entry((n, inverse))
        .or_insert_with(|| {
            if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            }
        })
        .clone()
}

/// In-place unnormalised 1D transform of a single buffer.
pub fn fft_1d(data: &mut [Complex64], inverse: bool) {
    let p = plan(data.len(), inverse);
    p.process(data);
}

const ROWS_PER_TASK: usize = 8;

fn rows(data: &mut [Complex64], len: usize, fft: &Arc<dyn Fft<f64>>) {
    exec::for_each_chunk_mut(data, len * ROWS_PER_TASK, |_, block| {
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        fft.process_with_scratch(block, &mut scratch);
    });
}

fn transpose(src: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut dst = vec![Complex64::default(); src.len()];
    const B: usize = 32;
    for r0 in (0..rows).step_by(B) {
        for c0 in (0..cols).step_by(B) {
            for r in r0..(r0 + B).min(rows) {
                for c in c0..(c0 + B).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
    dst
}

/// Unnormalised 2D transform of a row-major `nx × ny` array (`ny` contiguous).
pub fn fft_2d(data: &mut Vec<Complex64>, nx: usize, ny: usize, inverse: bool) {
    debug_assert_eq!(data.len(), nx * ny);
    let dir = if inverse {
        FftDirection::Inverse
    } else {
        FftDirection::Forward
    };
    let py = plan(ny, dir == FftDirection::Inverse);
    let px = plan(nx, dir == FftDirection::Inverse);
    rows(data, ny, &py);
    let mut t = transpose(data, nx, ny);
    rows(&mut t, nx, &px);
    *data = transpose(&t, ny, nx);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_inverse_is_scaled_identity() {
        let (nx, ny) = (16, 32);
        let orig: Vec<Complex64> = (0..nx * ny)
            .map(|i| Complex64::new((i as f64 * 0.3).sin(), (i as f64 * 0.7).cos()))
            .collect();
        let mut d = orig.clone();
        fft_2d(&mut d, nx, ny, false);
        fft_2d(&mut d, nx, ny, true);
        let scale = (nx * ny) as f64;
        for (a, b) in d.iter().zip(&orig) {
            assert!((a / scale - b).norm() < 1e-12);
        }
    }

    #[test]
    fn single_exponential_lands_in_one_bin() {
        let (nx, ny) = (16, 16);
        let mut d: Vec<Complex64> = (0..nx * ny)
            .map(|i| {
                let (jx, jy) = (i / ny, i % ny);
                let ph = 2.0 * std::f64::consts::PI * (3.0 * jx as f64 / nx as f64 - 2.0 * jy as f64 / ny as f64);
                Complex64::from_polar(1.0, ph)
            })
            .collect();
        fft_2d(&mut d, nx, ny, false);
        let peak = 3 * ny + (ny - 2);
        for (i, c) in d.iter().enumerate() {
            if i == peak {
                assert!((c.re - 256.0).abs() < 1e-9);
            } else {
                assert!(c.norm() < 1e-9);
            }
        }
    }
}
