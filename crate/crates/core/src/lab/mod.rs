//! Randomized bounded-ratio experiments for the linear, Duhamel, bilinear,
//! Strichartz and bilinear Strichartz estimates.
//!
//! Fields are finite sums of lattice "atoms": a spatial frequency `ζ_k`
//! on the lattice of an `8π` box, a coefficient `a_k` and a time profile
//! `p_k`, representing `Σ_k a_k e^{i x·ζ_k} e^{i t Ω(ζ_k)} p_k(t)`.
//! Written in the co-moving variable the modulation `|τ − Ω|` of an atom is
//! just the frequency of its profile, so every `P_{N,M} Q_L` block energy is
//! a one-dimensional band integral of `|p̂_k|²`. These are evaluated in
//! closed form, by Gauss–Legendre quadrature or by FFT, which makes the
//! high shells `N ≤ 2⁶` reachable where `Ω` is of order `10⁶`.

mod bilinear;
mod bilinear_strichartz;
mod linear;
mod profiles;
mod strichartz;

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub use bilinear::check_bilinear_estimate;
pub use bilinear_strichartz::{check_bilinear_strichartz, k_sweep, BilinearStrichartzReport, KSweep};
pub use linear::{check_duhamel_estimate, check_linear_estimate};
pub use profiles::{band_energies_gl, duhamel_profile_bands, gaussian_bands, linear_profile, linear_profile_bands};
pub use strichartz::{airy_rescaling_sweep, check_strichartz, RescalingSweep};

use crate::dyadic::{bracket, restriction_norm, NormFamily, NormSpec, ShellAccumulator, ShellFloors};
use crate::error::{Result, ZkbError};
use crate::quadrature::ls_slope;

/// Side of the periodic box whose lattice carries the atoms.
pub const LAB_BOX: f64 = 8.0 * std::f64::consts::PI;

/// Lattice spacing `2π / LAB_BOX`.
pub const LAB_SPACING: f64 = 0.25;

/// Largest admissible max-ratio slope in `log₂`–`log₂` coordinates.
pub const SLOPE_LIMIT: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Spectrum {
    /// Gaussian coefficients with a Gaussian envelope in `|ζ|/N`.
    GaussianDecay,
    /// Every atom in the block `|ζ| ~ 2^n`, `|ξ + η| ~ 2^m`.
    ShellConcentrated { n: i32, m: i32 },
    /// Half of the atoms within one lattice step of the antidiagonal.
    AntidiagonalHeavy,
}

impl std::str::FromStr for Spectrum {
    type Err = ZkbError;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "gaussian_decay" {
            return Ok(Spectrum::GaussianDecay);
        }
        if s == "antidiagonal_heavy" {
            return Ok(Spectrum::AntidiagonalHeavy);
        }
        if let Some(inner) = s.strip_prefix("shell_concentrated(").and_then(|r| r.strip_suffix(')')) {
            let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
            if parts.len() == 2 {
                let p = |x: &str| {
                    x.parse::<i32>()
                        .map_err(|_| ZkbError::param(format!("bad shell exponent `{x}`")))
                };
                return Ok(Spectrum::ShellConcentrated {
                    n: p(parts[0])?,
                    m: p(parts[1])?,
                });
            }
        }
        Err(ZkbError::param(format!("unknown spectrum `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub count: usize,
    pub seed: u64,
    pub spectrum: Spectrum,
    pub s: f64,
    pub b: f64,
    pub delta: f64,
    pub epsilon: f64,
    /// Dyadic exponents `e` (shell `N = 2^e`) cycled through by the samples.
    pub shells: Vec<i32>,
    /// Atoms per random field.
    pub atoms: usize,
    /// Lowest modulation shell exponent.
    pub l_floor: i32,
    /// Sign of the dissipation in the propagator; `-1` is a deliberately
    /// wrong model used to check that the lab raises a flag.
    pub dissipation_sign: f64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            count: 100,
            seed: 0,
            spectrum: Spectrum::GaussianDecay,
            s: 0.0,
            b: 0.5,
            delta: 0.05,
            epsilon: 0.05,
            shells: (0..=6).collect(),
            atoms: 12,
            l_floor: -2,
            dissipation_sign: 1.0,
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(ZkbError::param("lab.count must be >= 1"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(ZkbError::param(format!(
                "lab.delta = {} must lie in (0, 1)",
                self.delta
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0 - self.delta) {
            return Err(ZkbError::param(format!(
                "lab.epsilon = {} must lie in (0, 1 - delta)",
                self.epsilon
            )));
        }
        if self.shells.is_empty() {
            return Err(ZkbError::param("lab.shells must not be empty"));
        }
        if self.atoms == 0 {
            return Err(ZkbError::param("lab.atoms must be >= 1"));
        }
        Ok(())
    }

    pub fn floors(&self) -> ShellFloors {
        ShellFloors {
            n: -2,
            m: -2,
            l: self.l_floor,
        }
    }

    /// Independent generator for sample `i`.
    pub fn rng(&self, i: usize) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(i as u64 + 1);
        r
    }

    pub fn shell_of(&self, i: usize) -> i32 {
        self.shells[i % self.shells.len()]
    }
}

/// One lattice mode with coefficient and a modulation parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub xi: f64,
    pub eta: f64,
    pub amp: Complex64,
    pub lambda: f64,
}

fn snap(x: f64) -> f64 {
    (x / LAB_SPACING).round() * LAB_SPACING
}

fn complex_normal<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

/// Draws `count` distinct lattice atoms in the shell `N = 2^e`.
pub fn random_atoms<R: Rng>(rng: &mut R, e: i32, spectrum: Spectrum, count: usize) -> Vec<Atom> {
    let n = 2f64.powi(e);
    let mut out: Vec<Atom> = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count && tries < 50 * count {
        tries += 1;
        let (xi, eta) = match spectrum {
            Spectrum::ShellConcentrated { n: ne, m: me } => {
                let nn = 2f64.powi(ne) * 2f64.powf(rng.random_range(-0.5..0.5));
                let mm = 2f64.powi(me) * 2f64.powf(rng.random_range(-0.5..0.5));
                let sum = if rng.random_bool(0.5) { mm } else { -mm };
                let d2 = 2.0 * nn * nn - sum * sum;
                if d2 <= 0.0 {
                    continue;
                }
                let diff = if rng.random_bool(0.5) { d2.sqrt() } else { -d2.sqrt() };
                (snap(0.5 * (sum + diff)), snap(0.5 * (sum - diff)))
            }
            Spectrum::AntidiagonalHeavy if rng.random_bool(0.5) => {
                let r = n * 2f64.powf(rng.random_range(-1.0..1.0));
                let x = snap(r / 2f64.sqrt() * if rng.random_bool(0.5) { 1.0 } else { -1.0 });
                let off = LAB_SPACING * rng.random_range(-1i32..=1) as f64;
                (x, -x + off)
            }
            _ => {
                let r = n * 2f64.powf(rng.random_range(-1.0..1.0));
                let th = rng.random_range(0.0..std::f64::consts::TAU);
                (snap(r * th.cos()), snap(r * th.sin()))
            }
        };
        let r = xi.hypot(eta);
        if r == 0.0 || out.iter().any(|a| a.xi == xi && a.eta == eta) {
            continue;
        }
        let envelope = match spectrum {
            Spectrum::GaussianDecay | Spectrum::AntidiagonalHeavy => (-0.5 * (r / n).powi(2)).exp(),
            Spectrum::ShellConcentrated { .. } => 1.0,
        };
        out.push(Atom {
            xi,
            eta,
            amp: complex_normal(rng) * envelope,
            lambda: 0.0,
        });
    }
    out
}

/// Squared `L²` weight of one lattice coefficient, `1/|box|`.
pub fn lab_weight() -> f64 {
    1.0 / (LAB_BOX * LAB_BOX)
}

/// `‖Σ a_k e^{ix·ζ_k}‖_{H^s}` for distinct lattice atoms.
pub fn atoms_hs(atoms: &[Atom], s: f64) -> f64 {
    let e: f64 = atoms
        .iter()
        .map(|a| bracket(a.xi.hypot(a.eta)).powf(2.0 * s) * a.amp.norm_sqr())
        .sum();
    (e * lab_weight()).sqrt()
}

/// Restriction norm of a sum of distinct-mode atoms from per-atom band
/// energies `|a|²·bands`.
pub fn modal_norm<I>(items: I, floors: ShellFloors, spec: NormSpec) -> f64
where
    I: IntoIterator<Item = (f64, f64, f64, Vec<(i32, f64)>)>,
{
    let mut acc = ShellAccumulator::new();
    for (xi, eta, amp2, bands) in items {
        acc.add_mode(xi, eta, floors, |emit| {
            for &(l, e) in &bands {
                emit(l, amp2 * e * lab_weight());
            }
        });
    }
    restriction_norm(&acc, spec)
}

pub(crate) fn xsb(s: f64, b: f64) -> NormSpec {
    NormSpec::new(NormFamily::Xsb1, s).with_b(b)
}

/// Outcome of one estimate experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport {
    pub estimate: String,
    pub ratios: Vec<f64>,
    /// Shell exponent of each sample.
    pub shells: Vec<i32>,
    pub skipped: usize,
    pub max: f64,
    pub median: f64,
    /// Largest ratio per shell exponent.
    pub per_shell: BTreeMap<i32, f64>,
    /// Least-squares slope of `log₂ max` against the shell exponent.
    pub slope: f64,
}

impl RatioReport {
    pub fn new(estimate: &str, samples: Vec<Option<(i32, f64)>>) -> Self {
        let skipped = samples.iter().filter(|s| s.is_none()).count();
        let kept: Vec<(i32, f64)> = samples.into_iter().flatten().collect();
        let ratios: Vec<f64> = kept.iter().map(|k| k.1).collect();
        let shells: Vec<i32> = kept.iter().map(|k| k.0).collect();
        let mut per_shell: BTreeMap<i32, f64> = BTreeMap::new();
        for &(e, r) in &kept {
            let m = per_shell.entry(e).or_insert(f64::NEG_INFINITY);
            if !(r <= *m) {
                *m = r;
            }
        }
        let max = ratios
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, |a, b| if b > a || b.is_nan() { b } else { a });
        let mut sorted = ratios.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let median = if sorted.is_empty() {
            f64::NAN
        } else if sorted.len() % 2 == 1 {
            sorted[sorted.len() / 2]
        } else {
            0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
        };
        let slope = if per_shell.len() >= 2 {
            let xs: Vec<f64> = per_shell.keys().map(|&e| e as f64).collect();
            let ys: Vec<f64> = per_shell.values().map(|v| v.log2()).collect();
            ls_slope(&xs, &ys)
        } else {
            0.0
        };
        RatioReport {
            estimate: estimate.to_string(),
            ratios,
            shells,
            skipped,
            max,
            median,
            per_shell,
            slope,
        }
    }

    /// Finite ratios and a slope within [`SLOPE_LIMIT`].
    pub fn passes(&self) -> bool {
        self.ratios.iter().all(|r| r.is_finite() && *r >= 0.0) && self.slope.is_finite() && self.slope <= SLOPE_LIMIT
    }

    pub fn summary_line(&self) -> String {
        format!(
            "ESTIMATE {} max_ratio={:.6e} slope={:.4} {}",
            self.estimate,
            self.max,
            self.slope,
            if self.passes() { "PASS" } else { "FLAG" }
        )
    }
}
