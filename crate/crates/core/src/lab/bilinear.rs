//! The bilinear estimate for `(∂x + ∂y)(uv)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use super::profiles::gaussian_bands;
use super::{modal_norm, random_atoms, xsb, Atom, EnsembleConfig, RatioReport, LAB_BOX, LAB_SPACING};
use crate::dyadic::closed_weights;
use crate::error::{Result, ZkbError};
use crate::exec;
use crate::propagators::omega;

/// Gaussian product profiles whose centres differ by more than this are
/// treated as non-interfering (overlap below `e^{−18}`).
const CLUSTER_GAP: f64 = 12.0;

/// Half-width of the τ range integrated around a cluster.
const CLUSTER_PAD: f64 = 9.0;

/// Which pairs of shells a sample draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairKind {
    /// Both factors in the same shell.
    HighHigh,
    /// The second factor in the lowest shell of the ensemble.
    HighLow,
}

/// `X^{s,b,1}` norm of Gaussian-profile atoms.
pub fn atoms_xsb(atoms: &[Atom], cfg: &EnsembleConfig, b: f64) -> f64 {
    modal_norm(
        atoms
            .iter()
            .map(|a| (a.xi, a.eta, a.amp.norm_sqr(), gaussian_bands(a.lambda, cfg.l_floor))),
        cfg.floors(),
        xsb(cfg.s, b),
    )
}

fn lattice(x: f64) -> i64 {
    (x / LAB_SPACING).round() as i64
}

/// Band energies of `|Σ_p c_p √π e^{−(τ−θ_p)²/4}|²` (terms sorted by `θ`).
fn product_bands(terms: &[(f64, Complex64)], floor: i32) -> Vec<(i32, f64)> {
    let mut bands: BTreeMap<i32, f64> = BTreeMap::new();
    let step = (0.05f64).min(2f64.powi(floor) / 16.0);
    let mut start = 0;
    while start < terms.len() {
        let mut end = start + 1;
        while end < terms.len() && terms[end].0 - terms[end - 1].0 <= CLUSTER_GAP {
            end += 1;
        }
        let cluster = &terms[start..end];
        let lo = cluster[0].0 - CLUSTER_PAD;
        let hi = cluster[cluster.len() - 1].0 + CLUSTER_PAD;
        let n = ((hi - lo) / step).ceil() as usize;
        let h = (hi - lo) / n as f64;
        for k in 0..=n {
            let tau = lo + k as f64 * h;
            let mut sum = Complex64::default();
            for &(theta, c) in cluster {
                sum += c * (-(tau - theta).powi(2) / 4.0).exp();
            }
            let e = PI * sum.norm_sqr();
            if e == 0.0 {
                continue;
            }
            let wt = if k == 0 || k == n { 0.5 * h } else { h };
            let (ws, nw) = closed_weights(tau, floor);
            for &(l, w) in &ws[..nw] {
                *bands.entry(l).or_insert(0.0) += w * w * e * wt / (2.0 * PI);
            }
        }
        start = end;
    }
    bands.into_iter().collect()
}

/// `‖(∂x + ∂y)(uv)‖_{X^{s,−1/2,1}}` for Gaussian-profile atoms.
pub fn bilinear_numerator(u: &[Atom], v: &[Atom], cfg: &EnsembleConfig) -> f64 {
    let area = LAB_BOX * LAB_BOX;
    let mut modes: BTreeMap<(i64, i64), Vec<(f64, Complex64)>> = BTreeMap::new();
    for a in u {
        for b in v {
            let (xi, eta) = (a.xi + b.xi, a.eta + b.eta);
            let pre = Complex64::new(0.0, xi + eta);
            if pre.im == 0.0 {
                continue;
            }
            let theta = omega(a.xi, a.eta) + omega(b.xi, b.eta) - omega(xi, eta) + a.lambda + b.lambda;
            let c = pre * a.amp * b.amp / area;
            if c.norm_sqr() == 0.0 {
                continue;
            }
            modes.entry((lattice(xi), lattice(eta))).or_default().push((theta, c));
        }
    }
    let keys: Vec<(i64, i64)> = modes.keys().copied().collect();
    let items = exec::map_slice(&keys, |k| {
        let mut terms = modes[k].clone();
        terms.sort_by(|x, y| x.0.total_cmp(&y.0));
        let bands = product_bands(&terms, cfg.l_floor);
        (k.0 as f64 * LAB_SPACING, k.1 as f64 * LAB_SPACING, 1.0, bands)
    });
    modal_norm(items, cfg.floors(), xsb(cfg.s, -0.5))
}

/// Ratio against `‖u‖_{X^{s,(1−δ)/2,1}} ‖v‖_{X^{s,(1−δ)/2,1}}`; `None` if a factor vanishes.
pub fn bilinear_ratio(u: &[Atom], v: &[Atom], cfg: &EnsembleConfig) -> Option<f64> {
    let b = 0.5 * (1.0 - cfg.delta);
    let den = atoms_xsb(u, cfg, b) * atoms_xsb(v, cfg, b);
    if den == 0.0 {
        return None;
    }
    Some(bilinear_numerator(u, v, cfg) / den)
}

fn with_modulations<R: Rng>(rng: &mut R, mut atoms: Vec<Atom>) -> Vec<Atom> {
    for a in &mut atoms {
        let mag = 2f64.powf(rng.random_range(-2.0..3.0));
        a.lambda = if rng.random_bool(0.5) { mag } else { -mag };
    }
    atoms
}

/// Pair drawn for sample `i`: even samples are high-high, odd high-low.
pub fn sample_pair(cfg: &EnsembleConfig, i: usize) -> (i32, PairKind, Vec<Atom>, Vec<Atom>) {
    let mut rng = cfg.rng(i);
    let e = cfg.shell_of(i / 2);
    let kind = if i.is_multiple_of(2) {
        PairKind::HighHigh
    } else {
        PairKind::HighLow
    };
    let low = *cfg.shells.iter().min().expect("validated");
    let u = random_atoms(&mut rng, e, cfg.spectrum, cfg.atoms);
    let u = with_modulations(&mut rng, u);
    let ev = if kind == PairKind::HighHigh { e } else { low };
    let v = random_atoms(&mut rng, ev, cfg.spectrum, cfg.atoms);
    let v = with_modulations(&mut rng, v);
    (e, kind, u, v)
}

pub fn check_bilinear_estimate(cfg: &EnsembleConfig) -> Result<RatioReport> {
    cfg.validate()?;
    if cfg.s <= -0.5 {
        return Err(ZkbError::param(format!(
            "bilinear estimate needs s > -1/2, got {}",
            cfg.s
        )));
    }
    let samples = exec::map_range(cfg.count, |i| {
        let (e, _, u, v) = sample_pair(cfg, i);
        bilinear_ratio(&u, &v, cfg).map(|r| (e, r))
    });
    Ok(RatioReport::new("bilinear", samples))
}
