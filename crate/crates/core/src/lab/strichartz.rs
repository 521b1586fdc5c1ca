//! Strichartz estimates `‖U(t) u0‖_{L^p_t L^q_{xy}} ≲ ‖u0‖_{L²}` on `t ∈ [0, 1]`.
//!
//! Two routes: a periodic grid for random ensembles (any admissible pair),
//! and tensor-product Gaussians for the `(5, 5)` rescaling sweep, where
//! `U(t)` factors into two one-dimensional Airy flows `e^{itξ³}` and
//! `‖U(t) g⊗g‖_{L⁵_{xy}} = ‖A_t g‖²_{L⁵_x}`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{random_atoms, EnsembleConfig, RatioReport};
use crate::error::{Result, ZkbError};
use crate::exec;
use crate::fft::fft_1d;
use crate::grid::GridSpec;
use crate::propagators::apply_u;
use crate::quadrature::simpson_weights;
use crate::spectral::{to_physical_complex, SpectralField};

/// Shell exponents sampled by the grid ensemble (resolution-limited).
pub const GRID_SHELLS: [i32; 3] = [-1, 0, 1];

/// Largest-to-smallest ratio allowed across the rescaling sweep.
pub const RESCALING_SPREAD: f64 = 1.2;

const GRID_N: usize = 128;
const GRID_BOX: f64 = 16.0 * PI;
const TIME_INTERVALS: usize = 256;

/// `p ≥ 3` and `3/p + 2/q = 1`; `p = ∞` is passed as `f64::INFINITY`.
pub fn check_admissible(p: f64, q: f64) -> Result<()> {
    let rel = if p.is_infinite() { 2.0 / q } else { 3.0 / p + 2.0 / q };
    if p >= 3.0 && q >= 2.0 && (rel - 1.0).abs() < 1e-12 {
        Ok(())
    } else {
        Err(ZkbError::param(format!(
            "(p, q) = ({p}, {q}) is not admissible: need p >= 3 and 3/p + 2/q = 1"
        )))
    }
}

fn lq_norm(values: &[Complex64], q: f64, cell: f64) -> f64 {
    if q == 2.0 {
        let v: Vec<f64> = values.iter().map(|c| c.norm_sqr()).collect();
        return (exec::pairwise_sum(&v) * cell).sqrt();
    }
    let v: Vec<f64> = values.iter().map(|c| c.norm().powf(q)).collect();
    (exec::pairwise_sum(&v) * cell).powf(1.0 / q)
}

/// `‖U(t) u0‖_{L^p_t([0,1]) L^q}` on the grid of `u0` by Simpson in time.
pub fn grid_mixed_norm(u0: &SpectralField, p: f64, q: f64, intervals: usize) -> Result<f64> {
    check_admissible(p, q)?;
    let cell = u0.grid().cell_area();
    let h = 1.0 / intervals as f64;
    let norms = exec::map_range(intervals + 1, |j| {
        let f = apply_u(u0, j as f64 * h);
        lq_norm(&to_physical_complex(&f), q, cell)
    });
    if p.is_infinite() {
        return Ok(norms.iter().copied().fold(0.0, f64::max));
    }
    let w = simpson_weights(intervals + 1, h)?;
    let terms: Vec<f64> = norms.iter().zip(&w).map(|(n, w)| w * n.powf(p)).collect();
    Ok(exec::pairwise_sum(&terms).powf(1.0 / p))
}

fn random_grid_field(cfg: &EnsembleConfig, i: usize, e: i32) -> Result<SpectralField> {
    let grid = GridSpec::new(GRID_N, GRID_N, GRID_BOX, GRID_BOX)?;
    let mut rng = cfg.rng(i);
    let atoms = random_atoms(&mut rng, e, cfg.spectrum, cfg.atoms);
    let mut f = SpectralField::zeros(grid);
    for a in atoms {
        let kx = (a.xi / grid.dxi()).round() as i64;
        let ky = (a.eta / grid.deta()).round() as i64;
        f.set(kx, ky, a.amp)?;
    }
    Ok(f)
}

/// Random grid ensemble over [`GRID_SHELLS`].
pub fn check_strichartz(cfg: &EnsembleConfig, p: f64, q: f64) -> Result<RatioReport> {
    cfg.validate()?;
    check_admissible(p, q)?;
    let samples: Vec<Result<Option<(i32, f64)>>> = (0..cfg.count)
        .map(|i| {
            let e = GRID_SHELLS[i % GRID_SHELLS.len()];
            let u0 = random_grid_field(cfg, i, e)?;
            let den = u0.l2_norm();
            if den == 0.0 {
                return Ok(None);
            }
            Ok(Some((e, grid_mixed_norm(&u0, p, q, TIME_INTERVALS)? / den)))
        })
        .collect();
    let samples = samples.into_iter().collect::<Result<Vec<_>>>()?;
    let id = if p.is_infinite() {
        "strichartz-inf-2".to_string()
    } else {
        format!("strichartz-{p}-{q}")
    };
    Ok(RatioReport::new(&id, samples))
}

/// One-dimensional periodic line for the Airy flow.
#[derive(Debug, Clone, Copy)]
pub struct AiryLine {
    pub length: f64,
    pub n: usize,
}

impl Default for AiryLine {
    fn default() -> Self {
        AiryLine {
            length: 8192.0,
            n: 1 << 18,
        }
    }
}

impl AiryLine {
    fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Transform of `e^{−x²/(2w²)}` sampled on the line (FFT order).
    fn gaussian_hat(&self, w: f64) -> Vec<Complex64> {
        let dx = self.dx();
        let mut buf: Vec<Complex64> = (0..self.n)
            .map(|j| {
                let x = GridSpec::wavenumber(j, self.n) as f64 * dx;
                Complex64::new((-0.5 * x * x / (w * w)).exp(), 0.0)
            })
            .collect();
        fft_1d(&mut buf, false);
        buf
    }

    /// `‖A_t g‖_{L⁵}` from the transform of `g`.
    fn l5_at(&self, hat: &[Complex64], t: f64) -> f64 {
        let dk = 2.0 * PI / self.length;
        let mut buf: Vec<Complex64> = hat
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let xi = GridSpec::wavenumber(k, self.n) as f64 * dk;
                c * Complex64::from_polar(1.0 / self.n as f64, t * xi * xi * xi)
            })
            .collect();
        fft_1d(&mut buf, true);
        let v: Vec<f64> = buf.iter().map(|c| c.norm().powi(5)).collect();
        (exec::pairwise_sum(&v) * self.dx()).powf(0.2)
    }
}

/// `(∫₀¹ ‖U(t) g⊗g‖⁵_{L⁵} dt)^{1/5} / ‖g⊗g‖_{L²}` for a Gaussian of width `w`.
///
/// Time is split into geometric subintervals starting at `w³/64` (the
/// dispersive time of the data), each integrated by Simpson's rule.
pub fn airy_ratio(line: AiryLine, w: f64) -> Result<f64> {
    let hat = line.gaussian_hat(w);
    let mut edges = vec![0.0];
    let mut t = w * w * w / 64.0;
    while t < 1.0 {
        edges.push(t);
        t *= 2.0;
    }
    edges.push(1.0);
    let per = 8;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for win in edges.windows(2) {
        let h = (win[1] - win[0]) / per as f64;
        for (j, wj) in simpson_weights(per + 1, h)?.into_iter().enumerate() {
            nodes.push(win[0] + j as f64 * h);
            weights.push(wj);
        }
    }
    let vals = exec::map_slice(&nodes, |&t| line.l5_at(&hat, t).powi(10));
    let terms: Vec<f64> = vals.iter().zip(&weights).map(|(v, w)| v * w).collect();
    let num = exec::pairwise_sum(&terms).powf(0.2);
    // ‖g⊗g‖_{L²} = ‖g‖² = w √π
    Ok(num / (w * PI.sqrt()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RescalingSweep {
    pub widths: Vec<f64>,
    pub ratios: Vec<f64>,
    /// `max / min` of the ratios.
    pub spread: f64,
}

impl RescalingSweep {
    pub fn passes(&self) -> bool {
        self.ratios.iter().all(|r| r.is_finite() && *r > 0.0) && self.spread <= RESCALING_SPREAD
    }
}

/// `(5, 5)` ratios of tensor Gaussians over a sweep of widths.
pub fn airy_rescaling_sweep(widths: &[f64]) -> Result<RescalingSweep> {
    if widths.is_empty() {
        return Err(ZkbError::param("rescaling sweep needs at least one width"));
    }
    let line = AiryLine::default();
    let ratios = widths
        .iter()
        .map(|&w| airy_ratio(line, w))
        .collect::<Result<Vec<_>>>()?;
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(RescalingSweep {
        widths: widths.to_vec(),
        ratios,
        spread: max / min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissibility() {
        assert!(check_admissible(5.0, 5.0).is_ok());
        assert!(check_admissible(f64::INFINITY, 2.0).is_ok());
        assert!(check_admissible(6.0, 4.0).is_ok());
        assert!(check_admissible(2.0, 2.0).is_err());
        assert!(check_admissible(5.0, 4.0).is_err());
        let cfg = EnsembleConfig::default();
        assert!(check_strichartz(&cfg, 4.0, 4.0).is_err());
    }

    #[test]
    fn energy_endpoint_is_an_isometry() {
        let cfg = EnsembleConfig {
            count: 6,
            ..EnsembleConfig::default()
        };
        let r = check_strichartz(&cfg, f64::INFINITY, 2.0).unwrap();
        assert_eq!(r.ratios.len(), 6);
        for x in &r.ratios {
            assert!((x - 1.0).abs() < 1e-10, "{x}");
        }
    }

    #[test]
    fn zero_field_is_skipped() {
        let g = GridSpec::new(16, 16, GRID_BOX, GRID_BOX).unwrap();
        let z = SpectralField::zeros(g);
        assert_eq!(grid_mixed_norm(&z, 5.0, 5.0, 8).unwrap(), 0.0);
    }

    #[test]
    fn grid_route_agrees_with_separable_route() {
        // tensor Gaussian of width 1 on the periodic box
        let w: f64 = 1.0;
        let g = GridSpec::new(GRID_N, GRID_N, GRID_BOX, GRID_BOX).unwrap();
        let u0 = SpectralField::from_fn(g, |xi, eta| {
            Complex64::new(2.0 * PI * w * w * (-0.5 * w * w * (xi * xi + eta * eta)).exp(), 0.0)
        });
        let grid = grid_mixed_norm(&u0, 5.0, 5.0, TIME_INTERVALS).unwrap() / u0.l2_norm();
        let line = AiryLine {
            length: 1024.0,
            n: 1 << 14,
        };
        let sep = airy_ratio(line, w).unwrap();
        assert!((grid / sep - 1.0).abs() < 0.01, "{grid} vs {sep}");
    }
}
