//! Uniformly sampled space-time fields and their time-Fourier transform.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Result, ZkbError};
use crate::exec;
use crate::fft;
use crate::grid::GridSpec;
use crate::propagators::omega;
use crate::spectral::SpectralField;

/// Frames `F(t_j)` at `t_j = t0 + j (t1 − t0)/nt`, `j = 0..nt`, treated as a
/// function on the window that vanishes outside it.
///
/// The time transform is cached in the co-moving variable `τ' = τ − Ω(ξ, η)`:
/// for spatial mode `k` and time index `k_t`,
/// `tau[k][k_t] = Δt Σ_j e^{−i τ_{k_t} t_j} e^{−i t_j Ω(k)} F_j(k)` with
/// `τ_{k_t} = 2π k_t/(t1 − t0)`. The modulation `|τ − Ω|` of the original
/// variables is then simply `|τ_{k_t}|`, so `Q_L` becomes `φ_L(τ_{k_t})`.
#[derive(Debug, Clone)]
pub struct SpaceTimeField {
    grid: GridSpec,
    t0: f64,
    t1: f64,
    frames: Vec<SpectralField>,
    tau: OnceLock<Vec<Vec<Complex64>>>,
}

impl SpaceTimeField {
    pub fn new(frames: Vec<SpectralField>, t0: f64, t1: f64) -> Result<Self> {
        let first = frames
            .first()
            .ok_or_else(|| ZkbError::param("space-time field needs at least one frame"))?;
        let grid = *first.grid();
        for f in &frames {
            first.check_same_grid(f)?;
        }
        if !(t1 > t0) {
            return Err(ZkbError::param(format!("empty window [{t0}, {t1}]")));
        }
        Ok(SpaceTimeField {
            grid,
            t0,
            t1,
            frames,
            tau: OnceLock::new(),
        })
    }

    /// Samples `f(t_j)` on the window.
    pub fn from_fn<F>(grid: GridSpec, t0: f64, t1: f64, nt: usize, f: F) -> Result<Self>
    where
        F: Fn(f64) -> SpectralField + Sync + Send,
    {
        if nt == 0 {
            return Err(ZkbError::param("nt must be positive"));
        }
        let dt = (t1 - t0) / nt as f64;
        let frames = exec::map_range(nt, |j| f(t0 + j as f64 * dt));
        let out = Self::new(frames, t0, t1)?;
        if !out.grid.same_box(&grid) || out.grid.nx != grid.nx || out.grid.ny != grid.ny {
            return Err(ZkbError::InvalidGrid("frames do not live on the requested grid".into()));
        }
        Ok(out)
    }

    /// Rebuilds a field from co-moving time-Fourier coefficients laid out
    /// as `tau[mode][k_t]` (the inverse of [`SpaceTimeField::tau_coeffs`]).
    pub fn from_tau(grid: GridSpec, t0: f64, t1: f64, nt: usize, tau: Vec<Vec<Complex64>>) -> Result<Self> {
        if tau.len() != grid.len() {
            return Err(ZkbError::DimensionMismatch {
                expected: (grid.nx, grid.ny),
                got: (tau.len(), 1),
            });
        }
        let dt = (t1 - t0) / nt as f64;
        let spacing = 2.0 * PI / (t1 - t0);
        let norm = 1.0 / (dt * nt as f64);
        let series = exec::map_range(tau.len(), |i| {
            let row = &tau[i];
            if row.is_empty() {
                return Vec::new();
            }
            let (xi, eta) = grid.freq(i / grid.ny, i % grid.ny);
            let om = omega(xi, eta);
            let mut g: Vec<Complex64> = row
                .iter()
                .enumerate()
                .map(|(kt, c)| {
                    let tau_k = GridSpec::wavenumber(kt, nt) as f64 * spacing;
                    c * Complex64::from_polar(norm, tau_k * t0)
                })
                .collect();
            fft::fft_1d(&mut g, true);
            for (j, c) in g.iter_mut().enumerate() {
                *c *= Complex64::from_polar(1.0, (t0 + j as f64 * dt) * om);
            }
            g
        });
        let frames = (0..nt)
            .map(|j| {
                let mut f = SpectralField::zeros(grid);
                for (i, c) in f.coeffs_mut().iter_mut().enumerate() {
                    if let Some(v) = series[i].get(j) {
                        *c = *v;
                    }
                }
                f
            })
            .collect();
        Self::new(frames, t0, t1)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn nt(&self) -> usize {
        self.frames.len()
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn dt(&self) -> f64 {
        (self.t1 - self.t0) / self.nt() as f64
    }

    pub fn time(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.nt()).map(|j| self.time(j)).collect()
    }

    pub fn frame(&self, j: usize) -> &SpectralField {
        &self.frames[j]
    }

    pub fn frames(&self) -> &[SpectralField] {
        &self.frames
    }

    /// Spacing of the τ grid, `2π/(t1 − t0)`.
    pub fn tau_spacing(&self) -> f64 {
        2.0 * PI / (self.t1 - self.t0)
    }

    /// τ value of time-frequency slot `kt` (FFT order).
    pub fn tau_value(&self, kt: usize) -> f64 {
        GridSpec::wavenumber(kt, self.nt()) as f64 * self.tau_spacing()
    }

    /// Co-moving time-Fourier coefficients, computed once on first use.
    /// Spatial modes that vanish at every instant have an empty row.
    pub fn tau_coeffs(&self) -> &[Vec<Complex64>] {
        self.tau.get_or_init(|| self.compute_tau())
    }

    fn compute_tau(&self) -> Vec<Vec<Complex64>> {
        let g = self.grid;
        let nt = self.nt();
        let dt = self.dt();
        exec::map_range(g.len(), |i| {
            if self.frames.iter().all(|f| f.coeffs()[i] == Complex64::default()) {
                return Vec::new();
            }
            let (xi, eta) = g.freq(i / g.ny, i % g.ny);
            let om = omega(xi, eta);
            let mut row: Vec<Complex64> = (0..nt)
                .map(|j| {
                    let tj = self.time(j);
                    self.frames[j].coeffs()[i] * Complex64::from_polar(dt, -tj * om)
                })
                .collect();
            fft::fft_1d(&mut row, false);
            for (kt, c) in row.iter_mut().enumerate() {
                *c *= Complex64::from_polar(1.0, -self.tau_value(kt) * self.t0);
            }
            row
        })
    }

    /// Squared `L²(t, x, y)` norm by the rectangle rule on the window.
    pub fn norm_sq(&self) -> f64 {
        let parts: Vec<f64> = self.frames.iter().map(|f| f.norm_sq()).collect();
        exec::pairwise_sum(&parts) * self.dt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// The same squared norm computed from the τ coefficients.
    pub fn norm_sq_from_tau(&self) -> f64 {
        let parts: Vec<f64> = self
            .tau_coeffs()
            .iter()
            .map(|row| row.iter().map(|c| c.norm_sqr()).sum())
            .collect();
        exec::pairwise_sum(&parts) * self.grid.spectral_weight() / (self.t1 - self.t0)
    }

    /// Applies a multiplier `m(τ', ξ, η)` in the co-moving variables and
    /// returns the resulting field.
    pub fn map_tau<F>(&self, m: F) -> Result<SpaceTimeField>
    where
        F: Fn(f64, f64, f64) -> f64 + Sync + Send,
    {
        let g = self.grid;
        let tau = self.tau_coeffs();
        let rows = exec::map_range(g.len(), |i| {
            if tau[i].is_empty() {
                return Vec::new();
            }
            let (xi, eta) = g.freq(i / g.ny, i % g.ny);
            tau[i]
                .iter()
                .enumerate()
                .map(|(kt, c)| c * m(self.tau_value(kt), xi, eta))
                .collect()
        });
        SpaceTimeField::from_tau(g, self.t0, self.t1, self.nt(), rows)
    }

    /// Applies a spatial operation to every frame.
    pub fn map_frames<F>(&self, f: F) -> Result<SpaceTimeField>
    where
        F: Fn(&SpectralField) -> SpectralField + Sync + Send,
    {
        SpaceTimeField::new(exec::map_slice(&self.frames, f), self.t0, self.t1)
    }

    /// Multiplies frame `j` by `c(t_j)`.
    pub fn scale_in_time<F>(&self, c: F) -> Result<SpaceTimeField>
    where
        F: Fn(f64) -> f64 + Sync + Send,
    {
        let frames = exec::map_range(self.nt(), |j| self.frames[j].scale(c(self.time(j))));
        SpaceTimeField::new(frames, self.t0, self.t1)
    }

    pub fn sub(&self, other: &SpaceTimeField) -> Result<SpaceTimeField> {
        if self.nt() != other.nt() {
            return Err(ZkbError::param("time sample counts differ"));
        }
        let frames = self
            .frames
            .iter()
            .zip(&other.frames)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        SpaceTimeField::new(frames, self.t0, self.t1)
    }
}
