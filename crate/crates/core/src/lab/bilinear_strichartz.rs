//! Bilinear Strichartz estimate with the restriction `|ξ₁² − ξ₂²| ~ K`.
//!
//! Inputs are `P_{N_i} Q_{L_i} u_i` built from lattice atoms with the time
//! profile `p_L` whose transform is `φ_L(τ)` for `τ > 0`. For a pair of
//! atoms the product oscillates like `e^{it(Ω₁ + Ω₂)} p_{L₁} p_{L₂}`, so with
//! `Q = |p_{L₁} p_{L₂}|²`
//! `‖R_K(u₁, u₂)‖² = |box| Σ_ζ Σ_{p,p'→ζ} A_p Ā_{p'} Q̂(θ_{p'} − θ_p)`,
//! where `Q̂` is tabulated once and supported in `|ω| ≤ 1.5 (L₁ + L₂)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::profiles::band_profile;
use super::{random_atoms, Atom, EnsembleConfig, RatioReport, LAB_BOX, LAB_SPACING};
use crate::dyadic::{dyad, phi_dyad};
use crate::error::{Result, ZkbError};
use crate::exec;
use crate::fft::fft_1d;
use crate::grid::GridSpec;
use crate::propagators::omega;

/// Allowed factor between measured and predicted change per `K` doubling.
pub const TRACKING_FACTOR: f64 = 4.0;

/// Tabulated `Q̂(ω)` with `‖p_{L_i}‖²_{L²}`.
struct ProfileTable {
    qhat: Vec<Complex64>,
    domega: f64,
    support: f64,
    norm1: f64,
    norm2: f64,
}

impl ProfileTable {
    fn new(l1: i32, l2: i32) -> Self {
        let top = dyad(l1.max(l2));
        // Nyquist well above the support of P̂ and a window resolving 1/L
        let dt = (0.1 / top).min(0.05);
        let nt = ((400.0 / dyad(l1.min(l2)).min(1.0)) / dt).ceil() as usize;
        let nt = nt.next_power_of_two().max(1 << 12);
        let p1 = band_profile(l1, dt, nt);
        let p2 = band_profile(l2, dt, nt);
        let norm = |p: &[Complex64]| p.iter().map(|c| c.norm_sqr()).sum::<f64>() * dt;
        let mut q: Vec<Complex64> = p1
            .iter()
            .zip(&p2)
            .map(|(a, b)| Complex64::new((a * b).norm_sqr() * dt, 0.0))
            .collect();
        fft_1d(&mut q, false);
        ProfileTable {
            qhat: q,
            domega: 2.0 * PI / (dt * nt as f64),
            support: 1.5 * (dyad(l1) + dyad(l2)),
            norm1: norm(&p1),
            norm2: norm(&p2),
        }
    }

    fn at(&self, omega: f64) -> Complex64 {
        if omega.abs() > self.support {
            return Complex64::default();
        }
        let n = self.qhat.len();
        let x = omega / self.domega;
        let k = x.floor();
        let f = x - k;
        let get = |k: i64| self.qhat[GridSpec::slot(k, n).unwrap_or(0)];
        get(k as i64) * (1.0 - f) + get(k as i64 + 1) * f
    }
}

fn lattice(x: f64) -> i64 {
    (x / LAB_SPACING).round() as i64
}

/// `‖R_K(u₁, u₂)‖_{L²}` and `‖u₁‖_{L²} ‖u₂‖_{L²}` for atoms already carrying
/// their `P_N` weights.
fn restricted_norms(u1: &[Atom], u2: &[Atom], k: i32, table: &ProfileTable) -> (f64, f64) {
    let area = LAB_BOX * LAB_BOX;
    let mut modes: BTreeMap<(i64, i64), Vec<(f64, Complex64)>> = BTreeMap::new();
    for a in u1 {
        for b in u2 {
            let w = phi_dyad(a.xi * a.xi - b.xi * b.xi, k);
            if w == 0.0 {
                continue;
            }
            let amp = a.amp * b.amp * w / (area * area);
            let theta = omega(a.xi, a.eta) + omega(b.xi, b.eta);
            modes
                .entry((lattice(a.xi + b.xi), lattice(a.eta + b.eta)))
                .or_default()
                .push((theta, amp));
        }
    }
    let parts: Vec<f64> = modes
        .values()
        .map(|terms| {
            let mut s = Complex64::default();
            for &(tp, ap) in terms {
                for &(tq, aq) in terms {
                    s += ap * aq.conj() * table.at(tq - tp);
                }
            }
            s.re
        })
        .collect();
    let num = (area * exec::pairwise_sum(&parts)).max(0.0).sqrt();
    let mass = |u: &[Atom]| u.iter().map(|a| a.amp.norm_sqr()).sum::<f64>() / area;
    let den = (mass(u1) * table.norm1 * mass(u2) * table.norm2).sqrt();
    (num, den)
}

fn shell_atoms(cfg: &EnsembleConfig, i: usize, n1: i32, n2: i32) -> (Vec<Atom>, Vec<Atom>) {
    let mut rng = cfg.rng(i);
    let mut pn = |e: i32| {
        let mut a = random_atoms(&mut rng, e, cfg.spectrum, cfg.atoms);
        for x in &mut a {
            x.amp *= phi_dyad(x.xi.hypot(x.eta), e);
        }
        a
    };
    let u1 = pn(n1);
    let u2 = pn(n2);
    (u1, u2)
}

fn check_shells(n1: i32, n2: i32, l1: i32, l2: i32) -> Result<()> {
    if n1 < n2 {
        return Err(ZkbError::param(format!("need N1 >= N2, got 2^{n1} < 2^{n2}")));
    }
    if n2 < -1 {
        return Err(ZkbError::OutOfBand(format!(
            "shell 2^{n2} is below the lattice spacing"
        )));
    }
    if l1.min(l2) < -4 || l1.max(l2) > 12 {
        return Err(ZkbError::param(format!(
            "modulation shells 2^{l1}, 2^{l2} out of range [-4, 12]"
        )));
    }
    Ok(())
}

/// `K^{−1/2} N₂^{1/2} L₁^{1/2} L₂^{1/2}`.
pub fn bound_factor(k: i32, n2: i32, l1: i32, l2: i32) -> f64 {
    (dyad(n2) * dyad(l1) * dyad(l2) / dyad(k)).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BilinearStrichartzReport {
    pub report: RatioReport,
    /// Largest observed constant.
    pub constant: f64,
    /// Ratios of the high-low corollary with `K = N₁²`.
    pub high_low: RatioReport,
}

/// Ratios `‖R_K(u₁, u₂)‖ / (K^{−1/2} N₂^{1/2} L₁^{1/2} L₂^{1/2} ‖u₁‖ ‖u₂‖)`
/// over random pairs; shells are exponents.
pub fn check_bilinear_strichartz(
    cfg: &EnsembleConfig,
    k: i32,
    n1: i32,
    n2: i32,
    l1: i32,
    l2: i32,
) -> Result<BilinearStrichartzReport> {
    cfg.validate()?;
    check_shells(n1, n2, l1, l2)?;
    let table = ProfileTable::new(l1, l2);
    let run = |k: i32| {
        exec::map_range(cfg.count, |i| {
            let (u1, u2) = shell_atoms(cfg, i, n1, n2);
            let (num, den) = restricted_norms(&u1, &u2, k, &table);
            if den == 0.0 {
                return None;
            }
            Some((k, num / (den * bound_factor(k, n2, l1, l2))))
        })
    };
    let report = RatioReport::new("bilinear-strichartz", run(k));
    let high_low = RatioReport::new("bilinear-strichartz-high-low", run(2 * n1));
    Ok(BilinearStrichartzReport {
        constant: report.max,
        report,
        high_low,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KSweep {
    pub ks: Vec<i32>,
    /// Ensemble RMS of `‖R_K‖ / (‖u₁‖ ‖u₂‖)`.
    pub measured: Vec<f64>,
    /// `(measured(2K)/measured(K)) / 2^{−1/2}` per doubling.
    pub steps: Vec<f64>,
}

impl KSweep {
    pub fn passes(&self) -> bool {
        !self.steps.is_empty()
            && self
                .steps
                .iter()
                .all(|s| s.is_finite() && *s >= 1.0 / TRACKING_FACTOR && *s <= TRACKING_FACTOR)
    }
}

/// Measured norms across consecutive dyadic `K` at fixed shells.
pub fn k_sweep(cfg: &EnsembleConfig, ks: &[i32], n1: i32, n2: i32, l1: i32, l2: i32) -> Result<KSweep> {
    cfg.validate()?;
    check_shells(n1, n2, l1, l2)?;
    if ks.len() < 2 || ks.windows(2).any(|w| w[1] != w[0] + 1) {
        return Err(ZkbError::param("K sweep needs at least two consecutive dyads"));
    }
    let table = ProfileTable::new(l1, l2);
    let pairs = exec::map_range(cfg.count, |i| shell_atoms(cfg, i, n1, n2));
    let measured: Vec<f64> = ks
        .iter()
        .map(|&k| {
            let sq: Vec<f64> = exec::map_slice(&pairs, |(u1, u2)| {
                let (num, den) = restricted_norms(u1, u2, k, &table);
                if den == 0.0 {
                    0.0
                } else {
                    (num / den).powi(2)
                }
            });
            (exec::pairwise_sum(&sq) / sq.len() as f64).sqrt()
        })
        .collect();
    let steps = measured
        .windows(2)
        .map(|w| (w[1] / w[0]) / std::f64::consts::FRAC_1_SQRT_2)
        .collect();
    Ok(KSweep {
        ks: ks.to_vec(),
        measured,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_table_matches_plancherel() {
        // Q̂(0) = ∫ |p₁ p₂|² dt, and ‖p_L‖² = (1/2π) ∫_{τ>0} φ_L²
        let t = ProfileTable::new(3, 3);
        let want =
            super::super::band_energies_gl(|x| if x > 0.0 { 1.0 } else { 0.0 }, 2, 3, 0.0, f64::INFINITY, false)[1].1;
        assert!((t.norm1 / want - 1.0).abs() < 1e-6);
        assert!(t.at(0.0).re > 0.0 && t.at(0.0).im.abs() < 1e-12 * t.at(0.0).re);
        assert_eq!(t.at(30.0), Complex64::default());
    }

    #[test]
    fn single_pair_norm_is_closed_form() {
        let t = ProfileTable::new(1, 2);
        let a = Atom {
            xi: 5.0,
            eta: 1.0,
            amp: Complex64::new(2.0, 0.0),
            lambda: 0.0,
        };
        let b = Atom {
            xi: 1.0,
            eta: -0.5,
            amp: Complex64::new(0.0, 1.0),
            lambda: 0.0,
        };
        let k = 4; // 25 − 1 = 24 lies in the K = 16 shell
        let w = phi_dyad(24.0, k);
        let (num, den) = restricted_norms(&[a], &[b], k, &t);
        let area = LAB_BOX * LAB_BOX;
        // ‖(c c'/|box|²) w e^{ix·ζ} p₁p₂‖² = |box| |c c' w|²/|box|⁴ Q̂(0)
        let want = (area * (2.0 * w / (area * area)).powi(2) * t.at(0.0).re).sqrt();
        assert!((num / want - 1.0).abs() < 1e-12);
        let mass = (4.0 / area * t.norm1 * 1.0 / area * t.norm2).sqrt();
        assert!((den / mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_interaction_is_zero_and_bad_shells_are_rejected() {
        let cfg = EnsembleConfig {
            count: 4,
            ..EnsembleConfig::default()
        };
        // |ξ₁² − ξ₂²| ≤ 2·(2^6)² can never reach K = 2^20
        let r = check_bilinear_strichartz(&cfg, 20, 5, 2, 3, 3).unwrap();
        assert!(r.report.ratios.iter().all(|x| *x == 0.0));
        assert!(check_bilinear_strichartz(&cfg, 8, 2, 5, 3, 3).is_err());
        assert!(check_bilinear_strichartz(&cfg, 8, 5, -4, 3, 3).is_err());
    }
}
