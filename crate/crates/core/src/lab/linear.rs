//! Linear and Duhamel estimates for the dissipative-dispersive semigroup.

use rand::Rng;

use super::profiles::{duhamel_profile_bands, gaussian_bands, linear_profile_bands};
use super::{atoms_hs, modal_norm, random_atoms, xsb, Atom, EnsembleConfig, RatioReport};
use crate::error::Result;
use crate::exec;
use crate::propagators::dissipation;

/// `‖ψ(t) W(t) u0‖_{X^{s,1/2,1}}` for `u0 = Σ a_k e^{ix·ζ_k}`.
pub fn linear_numerator(atoms: &[Atom], cfg: &EnsembleConfig) -> f64 {
    let items = atoms.iter().map(|a| {
        let bands = linear_profile_bands(dissipation(a.xi, a.eta), cfg.dissipation_sign, cfg.l_floor);
        (a.xi, a.eta, a.amp.norm_sqr(), bands.as_ref().clone())
    });
    modal_norm(items, cfg.floors(), xsb(cfg.s, 0.5))
}

/// Ratio `‖ψ W u0‖_{X^{s,1/2,1}} / ‖u0‖_{H^s}`, `None` for zero data.
pub fn linear_ratio(atoms: &[Atom], cfg: &EnsembleConfig) -> Option<f64> {
    let den = atoms_hs(atoms, cfg.s);
    if den == 0.0 {
        return None;
    }
    Some(linear_numerator(atoms, cfg) / den)
}

pub fn check_linear_estimate(cfg: &EnsembleConfig) -> Result<RatioReport> {
    cfg.validate()?;
    let samples = exec::map_range(cfg.count, |i| {
        let mut rng = cfg.rng(i);
        let e = cfg.shell_of(i);
        let atoms = random_atoms(&mut rng, e, cfg.spectrum, cfg.atoms);
        linear_ratio(&atoms, cfg).map(|r| (e, r))
    });
    Ok(RatioReport::new("linear", samples))
}

/// Atoms of a forcing `Σ a_k e^{ix·ζ_k} e^{itΩ_k} e^{−t²/2} e^{iλ_k t}`.
pub fn random_forcing<R: Rng>(rng: &mut R, e: i32, cfg: &EnsembleConfig) -> Vec<Atom> {
    let mut atoms = random_atoms(rng, e, cfg.spectrum, cfg.atoms);
    for a in &mut atoms {
        let mag = 2f64.powf(rng.random_range(-2.0..6.0));
        a.lambda = if rng.random_bool(0.5) { mag } else { -mag };
    }
    atoms
}

/// Ratio `‖ψ ℒF‖_{X^{s,1/2,1}} / ‖F‖_{X^{s,−1/2,1}}`, `None` for zero data.
pub fn duhamel_ratio(atoms: &[Atom], cfg: &EnsembleConfig) -> Option<f64> {
    if atoms.iter().all(|a| a.amp.norm_sqr() == 0.0) {
        return None;
    }
    let floors = cfg.floors();
    let den = modal_norm(
        atoms
            .iter()
            .map(|a| (a.xi, a.eta, a.amp.norm_sqr(), gaussian_bands(a.lambda, cfg.l_floor))),
        floors,
        xsb(cfg.s, -0.5),
    );
    if den == 0.0 {
        return None;
    }
    let num = modal_norm(
        atoms.iter().map(|a| {
            let d = dissipation(a.xi, a.eta);
            (
                a.xi,
                a.eta,
                a.amp.norm_sqr(),
                duhamel_profile_bands(d, a.lambda, cfg.dissipation_sign, cfg.l_floor),
            )
        }),
        floors,
        xsb(cfg.s, 0.5),
    );
    Some(num / den)
}

pub fn check_duhamel_estimate(cfg: &EnsembleConfig) -> Result<RatioReport> {
    cfg.validate()?;
    let samples = exec::map_range(cfg.count, |i| {
        let mut rng = cfg.rng(i);
        let e = cfg.shell_of(i);
        let atoms = random_forcing(&mut rng, e, cfg);
        duhamel_ratio(&atoms, cfg).map(|r| (e, r))
    });
    Ok(RatioReport::new("duhamel", samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{block_energies, chi, restriction_norm};
    use crate::grid::GridSpec;
    use crate::lab::{LAB_BOX, LAB_SPACING};
    use crate::propagators::omega;
    use crate::spacetime::SpaceTimeField;
    use crate::spectral::SpectralField;
    use num_complex::Complex64;

    fn dense_grid() -> GridSpec {
        GridSpec::new(16, 16, LAB_BOX, LAB_BOX).unwrap()
    }

    fn mode_atom(kx: i64, ky: i64, lambda: f64) -> Atom {
        Atom {
            xi: kx as f64 * LAB_SPACING,
            eta: ky as f64 * LAB_SPACING,
            amp: Complex64::new(0.7, -0.4),
            lambda,
        }
    }

    /// Space-time field of one mode with time profile `p(t)` (co-moving).
    fn dense_field(a: &Atom, p: impl Fn(f64) -> Complex64 + Sync + Send) -> SpaceTimeField {
        let g = dense_grid();
        let kx = (a.xi / LAB_SPACING).round() as i64;
        let ky = (a.eta / LAB_SPACING).round() as i64;
        let om = omega(a.xi, a.eta);
        SpaceTimeField::from_fn(g, -128.0, 128.0, 1 << 14, |t| {
            let mut f = SpectralField::zeros(g);
            f.set(kx, ky, a.amp * Complex64::from_polar(1.0, t * om) * p(t))
                .unwrap();
            f
        })
        .unwrap()
    }

    #[test]
    fn zero_data_is_skipped() {
        let cfg = EnsembleConfig::default();
        let mut a = mode_atom(1, 2, 0.0);
        a.amp = Complex64::default();
        assert!(linear_ratio(&[a], &cfg).is_none());
        assert!(duhamel_ratio(&[a], &cfg).is_none());
    }

    #[test]
    fn linear_single_mode_matches_dense_quadrature() {
        let cfg = EnsembleConfig::default();
        for (kx, ky) in [(1, 2), (3, -1), (2, 2)] {
            let a = mode_atom(kx, ky, 0.0);
            let d = dissipation(a.xi, a.eta);
            let f = dense_field(&a, |t| Complex64::new(chi(t) * (-t.abs() * d).exp(), 0.0));
            let dense = restriction_norm(&block_energies(&f, cfg.floors()), xsb(cfg.s, 0.5));
            let r = dense / atoms_hs(&[a], cfg.s);
            let lab = linear_ratio(&[a], &cfg).unwrap();
            assert!((lab / r - 1.0).abs() < 0.02, "({kx},{ky}): {lab} vs {r}");
        }
    }

    #[test]
    fn duhamel_single_mode_matches_dense_quadrature() {
        let cfg = EnsembleConfig::default();
        for (kx, ky, lambda) in [(1, 2, 1.5), (3, -1, -3.0), (2, 2, 0.5)] {
            let a = mode_atom(kx, ky, lambda);
            let d = dissipation(a.xi, a.eta);
            // z(t) = ∫_{−8}^t e^{−(t−s)D} g(s) ds by cumulative trapezoid on a fine grid
            let h = 2e-5;
            let n = (10.0 / h) as usize;
            let g = |s: f64| Complex64::from_polar((-0.5 * s * s).exp(), lambda * s);
            let decay = (-h * d).exp();
            let mut z = vec![Complex64::default(); n + 1];
            for j in 0..n {
                let s = -8.0 + j as f64 * h;
                z[j + 1] = decay * z[j] + 0.5 * h * (decay * g(s) + g(s + h));
            }
            let z0 = z[(8.0 / h).round() as usize];
            let zat = |t: f64| {
                let x = (t + 8.0) / h;
                let j = (x.floor() as usize).min(n - 1);
                let f = x - j as f64;
                z[j] * (1.0 - f) + z[j + 1] * f
            };
            let y = dense_field(&a, |t| {
                if t.abs() >= 2.0 {
                    return Complex64::default();
                }
                chi(t) * (zat(t) - z0 * (-t.abs() * d).exp())
            });
            let f = dense_field(&a, g);
            let num = restriction_norm(&block_energies(&y, cfg.floors()), xsb(cfg.s, 0.5));
            let den = restriction_norm(&block_energies(&f, cfg.floors()), xsb(cfg.s, -0.5));
            let lab = duhamel_ratio(&[a], &cfg).unwrap();
            assert!(
                (lab / (num / den) - 1.0).abs() < 0.02,
                "({kx},{ky}): {lab} vs {}",
                num / den
            );
        }
    }

    #[test]
    fn wrong_dissipation_sign_grows_with_the_shell() {
        let cfg = EnsembleConfig {
            dissipation_sign: -1.0,
            ..EnsembleConfig::default()
        };
        let low = linear_ratio(&[mode_atom(2, 2, 0.0)], &cfg).unwrap();
        let high = linear_ratio(&[mode_atom(6, 6, 0.0)], &cfg).unwrap();
        assert!(high > 100.0 * low);
    }
}
