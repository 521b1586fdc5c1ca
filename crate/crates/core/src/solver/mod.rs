//! Time integration of the symmetric ZKB equation and its degenerate relatives.
//!
//! Every mode is written as `∂t v̂ = λ(ξ, η) v̂ + p(ξ, η) F[v²] + f̂(t)` with a
//! diagonal linear symbol `λ`, a derivative prefactor `p` and an optional
//! external forcing. The linear part is integrated exactly.

mod etd;
mod manufactured;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

pub use etd::{phi123, EtdCoeffs};
pub use manufactured::Manufactured;

use crate::dyadic::hs_norm;
use crate::error::{Result, ZkbError};
use crate::exec;
use crate::grid::GridSpec;
use crate::propagators::{dissipation, omega};
use crate::spectral::{forward_complex, to_physical_complex, SpectralField};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// `v_t + (∂x³ + ∂y³)v − (∂x + ∂y)²v = (∂x + ∂y)(v²)`
    ZkbSymmetric,
    /// `u_t + ∂x(∂x² + ∂y²)u − ∂x²u = ∂x(u²)`
    ZkbOriginal,
    /// Symmetric ZK: the dissipation switched off.
    ZkSymmetric,
    /// Heat flow `v_t = Δv` with the `∂x(v²)` nonlinearity.
    Parabolic,
}

impl Mode {
    /// Linear symbol `λ(ξ, η)`.
    pub fn symbol(&self, xi: f64, eta: f64) -> Complex64 {
        match self {
            Mode::ZkbSymmetric => Complex64::new(-dissipation(xi, eta), omega(xi, eta)),
            Mode::ZkSymmetric => Complex64::new(0.0, omega(xi, eta)),
            Mode::Parabolic => Complex64::new(-(xi * xi + eta * eta), 0.0),
            Mode::ZkbOriginal => Complex64::new(-xi * xi, xi * xi * xi + xi * eta * eta),
        }
    }

    /// Derivative prefactor of the quadratic term.
    pub fn prefactor(&self, xi: f64, eta: f64) -> Complex64 {
        match self {
            Mode::ZkbSymmetric | Mode::ZkSymmetric => I * (xi + eta),
            Mode::ZkbOriginal | Mode::Parabolic => I * xi,
        }
    }

    /// Dissipation rate entering `d/dt ‖v‖² = −2 Σ rate |v̂|²` for the linear part.
    pub fn dissipation_rate(&self, xi: f64, eta: f64) -> f64 {
        -self.symbol(xi, eta).re
    }

    pub fn name(&self) -> &'static str {
        match self {
            Mode::ZkbSymmetric => "zkb_symmetric",
            Mode::ZkbOriginal => "zkb_original",
            Mode::ZkSymmetric => "zk_symmetric",
            Mode::Parabolic => "parabolic",
        }
    }
}

impl FromStr for Mode {
    type Err = ZkbError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "zkb_symmetric" => Mode::ZkbSymmetric,
            "zkb_original" => Mode::ZkbOriginal,
            "zk_symmetric" => Mode::ZkSymmetric,
            "parabolic" => Mode::Parabolic,
            _ => return Err(ZkbError::param(format!("unknown solver mode `{s}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Etdrk4,
    Ifrk4,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Etdrk4 => "etdrk4",
            Scheme::Ifrk4 => "ifrk4",
        }
    }
}

impl FromStr for Scheme {
    type Err = ZkbError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "etdrk4" => Ok(Scheme::Etdrk4),
            "ifrk4" => Ok(Scheme::Ifrk4),
            _ => Err(ZkbError::param(format!("unknown scheme `{s}`"))),
        }
    }
}

/// External source term added to the right-hand side.
pub trait Forcing: Send + Sync {
    fn at(&self, t: f64, grid: &GridSpec) -> SpectralField;
}

#[derive(Clone)]
pub struct SolverConfig {
    pub grid: GridSpec,
    pub dt: f64,
    pub t_end: f64,
    pub mode: Mode,
    pub scheme: Scheme,
    pub snapshot_stride: usize,
    /// Switch for the quadratic term.
    pub nonlinear: bool,
    /// Sobolev exponents recorded in the per-step series.
    pub sobolev_s: Vec<f64>,
    pub forcing: Option<Arc<dyn Forcing>>,
}

impl fmt::Debug for SolverConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SolverConfig")
            .field("grid", &self.grid)
            .field("dt", &self.dt)
            .field("t_end", &self.t_end)
            .field("mode", &self.mode)
            .field("scheme", &self.scheme)
            .field("snapshot_stride", &self.snapshot_stride)
            .field("nonlinear", &self.nonlinear)
            .field("sobolev_s", &self.sobolev_s)
            .field("forcing", &self.forcing.is_some())
            .finish()
    }
}

impl SolverConfig {
    pub fn new(grid: GridSpec, dt: f64, t_end: f64, mode: Mode) -> Self {
        SolverConfig {
            grid,
            dt,
            t_end,
            mode,
            scheme: Scheme::Etdrk4,
            snapshot_stride: 1,
            nonlinear: true,
            sobolev_s: Vec::new(),
            forcing: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(ZkbError::param(format!("solver.dt = {} must be > 0", self.dt)));
        }
        if !(self.t_end >= self.dt) {
            return Err(ZkbError::param(format!(
                "solver.t_end = {} must be >= solver.dt = {}",
                self.t_end, self.dt
            )));
        }
        if self.snapshot_stride == 0 {
            return Err(ZkbError::param("solver.snapshot_stride must be >= 1"));
        }
        Ok(())
    }

    /// Number of steps; `t_end` is rounded to a whole number of steps.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round().max(1.0) as usize
    }
}

/// The dealiased quadratic term `p(ξ, η) · F[v²]` of `mode`.
pub fn nonlinearity(v: &SpectralField, mode: Mode) -> SpectralField {
    let g = *v.grid();
    let phys = to_physical_complex(v);
    let mut sq: Vec<Complex64> = phys.iter().map(|c| Complex64::new(c.re * c.re, 0.0)).collect();
    let mut out = forward_complex(&g, &mut sq);
    let ny = g.ny;
    exec::for_each_chunk_mut(out.coeffs_mut(), ny, |ix, row| {
        for (iy, c) in row.iter_mut().enumerate() {
            if g.in_band(ix, iy) {
                let (xi, eta) = g.freq(ix, iy);
                *c *= mode.prefactor(xi, eta);
            } else {
                *c = Complex64::default();
            }
        }
    });
    out
}

/// Precomputed single-step integrator for a fixed configuration.
pub struct Stepper {
    cfg: SolverConfig,
    coeffs: Vec<EtdCoeffs>,
}

impl Stepper {
    pub fn new(cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let g = cfg.grid;
        let coeffs = exec::map_range(g.len(), |i| {
            let (xi, eta) = g.freq(i / g.ny, i % g.ny);
            EtdCoeffs::new(cfg.mode.symbol(xi, eta), cfg.dt)
        });
        Ok(Stepper { cfg, coeffs })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    fn rhs(&self, v: &SpectralField, t: f64) -> SpectralField {
        let mut n = if self.cfg.nonlinear {
            nonlinearity(v, self.cfg.mode)
        } else {
            SpectralField::zeros(*v.grid())
        };
        if let Some(f) = &self.cfg.forcing {
            let src = f.at(t, v.grid()).dealias();
            for (a, b) in n.coeffs_mut().iter_mut().zip(src.coeffs()) {
                *a += b;
            }
        }
        n
    }

    fn zip_map<F>(&self, fields: &[&SpectralField], f: F) -> SpectralField
    where
        F: Fn(&EtdCoeffs, &[Complex64]) -> Complex64 + Sync + Send,
    {
        let g = *fields[0].grid();
        let k = fields.len();
        let coeffs = exec::map_range(g.len(), |i| {
            let mut vals = [Complex64::default(); 6];
            for (j, fl) in fields.iter().enumerate() {
                vals[j] = fl.coeffs()[i];
            }
            f(&self.coeffs[i], &vals[..k])
        });
        SpectralField::from_coeffs(g, coeffs).expect("grid length")
    }

    /// Advances `v` from time `t` by one step.
    pub fn step(&self, v: &SpectralField, t: f64) -> SpectralField {
        let h = self.cfg.dt;
        match self.cfg.scheme {
            Scheme::Etdrk4 => {
                let nv = self.rhs(v, t);
                let a = self.zip_map(&[v, &nv], |c, x| c.e2 * x[0] + c.q * x[1]);
                let na = self.rhs(&a, t + 0.5 * h);
                let b = self.zip_map(&[v, &na], |c, x| c.e2 * x[0] + c.q * x[1]);
                let nb = self.rhs(&b, t + 0.5 * h);
                let cc = self.zip_map(&[&a, &nb, &nv], |c, x| c.e2 * x[0] + c.q * (2.0 * x[1] - x[2]));
                let nc = self.rhs(&cc, t + h);
                self.zip_map(&[v, &nv, &na, &nb, &nc], |c, x| {
                    c.e * x[0] + c.f1 * x[1] + 2.0 * c.f2 * (x[2] + x[3]) + c.f3 * x[4]
                })
            }
            Scheme::Ifrk4 => {
                let k1 = self.rhs(v, t);
                let a = self.zip_map(&[v, &k1], |c, x| c.e2 * (x[0] + 0.5 * h * x[1]));
                let k2 = self.rhs(&a, t + 0.5 * h);
                let b = self.zip_map(&[v, &k2], |c, x| c.e2 * x[0] + 0.5 * h * x[1]);
                let k3 = self.rhs(&b, t + 0.5 * h);
                let cc = self.zip_map(&[v, &k3], |c, x| c.e * x[0] + h * c.e2 * x[1]);
                let k4 = self.rhs(&cc, t + h);
                self.zip_map(&[v, &k1, &k2, &k3, &k4], |c, x| {
                    c.e * x[0] + h / 6.0 * (c.e * x[1] + 2.0 * c.e2 * (x[2] + x[3]) + x[4])
                })
            }
        }
    }
}

/// One-step convenience wrapper.
pub fn step(v: &SpectralField, cfg: &SolverConfig) -> Result<SpectralField> {
    let out = Stepper::new(cfg.clone())?.step(v, 0.0);
    check_finite(&out, 1, cfg.dt)?;
    Ok(out)
}

fn check_finite(v: &SpectralField, step: usize, t: f64) -> Result<()> {
    if v.coeffs().iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(ZkbError::BlowUp {
            step,
            t,
            last_frame: Box::new(v.clone()),
        })
    }
}

/// Per-step scalars; index `n` refers to time `n · dt`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Series {
    pub t: Vec<f64>,
    pub l2: Vec<f64>,
    /// `‖(∂x + ∂y)v‖²`-type rate `Σ rate(ξ, η)|v̂|² · weight`.
    pub dissipation_rate: Vec<f64>,
    /// One column per configured Sobolev exponent.
    pub hs: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub config: SolverConfig,
    pub times: Vec<f64>,
    pub frames: Vec<SpectralField>,
    pub series: Series,
}

fn record(series: &mut Series, cfg: &SolverConfig, t: f64, v: &SpectralField) {
    series.t.push(t);
    series.l2.push(v.l2_norm());
    let g = *v.grid();
    let parts = exec::map_range(g.len(), |i| {
        let (xi, eta) = g.freq(i / g.ny, i % g.ny);
        cfg.mode.dissipation_rate(xi, eta) * v.coeffs()[i].norm_sqr()
    });
    series
        .dissipation_rate
        .push(exec::pairwise_sum(&parts) * g.spectral_weight());
    if series.hs.len() != cfg.sobolev_s.len() {
        series.hs = vec![Vec::new(); cfg.sobolev_s.len()];
    }
    for (col, &s) in series.hs.iter_mut().zip(&cfg.sobolev_s) {
        col.push(hs_norm(v, s));
    }
}

/// Integrates from `v0`; `observe(step, t, v)` sees every snapshot frame.
pub fn solve_with<O>(v0: &SpectralField, cfg: &SolverConfig, mut observe: O) -> Result<Trajectory>
where
    O: FnMut(usize, f64, &SpectralField),
{
    cfg.validate()?;
    if v0.grid().nx != cfg.grid.nx || v0.grid().ny != cfg.grid.ny || !v0.grid().same_box(&cfg.grid) {
        return Err(ZkbError::InvalidGrid(
            "initial data does not live on solver.grid".into(),
        ));
    }
    let defect = v0.hermitian_defect();
    if defect > crate::spectral::HERMITIAN_TOL {
        return Err(ZkbError::NotHermitian {
            defect,
            tol: crate::spectral::HERMITIAN_TOL,
        });
    }
    let stepper = Stepper::new(cfg.clone())?;
    let mut v = SpectralField::from_coeffs(cfg.grid, v0.coeffs().to_vec())?.dealias();
    let mut traj = Trajectory {
        config: cfg.clone(),
        times: vec![0.0],
        frames: vec![v.clone()],
        series: Series::default(),
    };
    record(&mut traj.series, cfg, 0.0, &v);
    observe(0, 0.0, &v);
    let steps = cfg.steps();
    for n in 1..=steps {
        let t_prev = (n - 1) as f64 * cfg.dt;
        v = stepper.step(&v, t_prev);
        let t = n as f64 * cfg.dt;
        check_finite(&v, n, t)?;
        record(&mut traj.series, cfg, t, &v);
        if n % cfg.snapshot_stride == 0 || n == steps {
            traj.times.push(t);
            traj.frames.push(v.clone());
            observe(n, t, &v);
        }
    }
    Ok(traj)
}

pub fn solve(v0: &SpectralField, cfg: &SolverConfig) -> Result<Trajectory> {
    solve_with(v0, cfg, |_, _, _| {})
}

impl Trajectory {
    pub fn last(&self) -> &SpectralField {
        self.frames.last().expect("trajectory has a first frame")
    }

    /// Largest per-step increase of `‖v‖²`, relative to `‖v‖²`.
    pub fn max_l2_increase(&self) -> f64 {
        self.series
            .l2
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0] * w[0], w[1] * w[1]);
                if a == 0.0 {
                    0.0
                } else {
                    (b - a) / a
                }
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `|d/dt ‖v‖² + 2‖(∂x + ∂y)v‖²|` per recorded step: centred differences in
/// the interior and second-order one-sided differences at the ends.
pub fn dissipation_residual(traj: &Trajectory) -> Vec<f64> {
    let s = &traj.series;
    let n = s.l2.len();
    let e: Vec<f64> = s.l2.iter().map(|x| x * x).collect();
    if n < 3 {
        return vec![0.0; n];
    }
    let h = traj.config.dt;
    (0..n)
        .map(|i| {
            let de = if i == 0 {
                (-3.0 * e[0] + 4.0 * e[1] - e[2]) / (2.0 * h)
            } else if i == n - 1 {
                (3.0 * e[n - 1] - 4.0 * e[n - 2] + e[n - 3]) / (2.0 * h)
            } else {
                (e[i + 1] - e[i - 1]) / (2.0 * h)
            };
            (de + 2.0 * s.dissipation_rate[i]).abs()
        })
        .collect()
}
