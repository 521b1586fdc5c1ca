//! The free group `U(t)`, the dissipative semigroup `W(t)` and the Duhamel
//! operator, all as exact Fourier multipliers.

use num_complex::Complex64;

use crate::error::{Result, ZkbError};
use crate::exec;
use crate::quadrature::simpson_weights;
use crate::spacetime::SpaceTimeField;
use crate::spectral::SpectralField;

/// Dispersion `Ω(ξ, η) = ξ³ + η³`.
#[inline]
pub fn omega(xi: f64, eta: f64) -> f64 {
    xi * xi * xi + eta * eta * eta
}

/// Dissipation `D(ξ, η) = (ξ + η)²`.
#[inline]
pub fn dissipation(xi: f64, eta: f64) -> f64 {
    (xi + eta) * (xi + eta)
}

/// The symbol pair of the symmetric equation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SymbolSet;

impl SymbolSet {
    pub fn omega(&self, xi: f64, eta: f64) -> f64 {
        omega(xi, eta)
    }

    pub fn dissipation(&self, xi: f64, eta: f64) -> f64 {
        dissipation(xi, eta)
    }

    /// `e^{itΩ}`.
    pub fn u_multiplier(&self, xi: f64, eta: f64, t: f64) -> Complex64 {
        Complex64::from_polar(1.0, t * omega(xi, eta))
    }

    /// `e^{−|t|D} e^{itΩ}`.
    pub fn w_multiplier(&self, xi: f64, eta: f64, t: f64) -> Complex64 {
        Complex64::from_polar((-t.abs() * dissipation(xi, eta)).exp(), t * omega(xi, eta))
    }
}

pub fn apply_u(f: &SpectralField, t: f64) -> SpectralField {
    f.map_modes(|xi, eta, c| c * SymbolSet.u_multiplier(xi, eta, t))
}

pub fn apply_w(f: &SpectralField, t: f64) -> SpectralField {
    f.map_modes(|xi, eta, c| c * SymbolSet.w_multiplier(xi, eta, t))
}

/// `∫₀ᵗ W(t − t') F(t') dt'` by composite Simpson quadrature on the sample
/// instants of `f`. Both `0` and `t` must be sample instants; with an odd
/// number of intervals the last three use the 3/8 rule.
pub fn duhamel(f: &SpaceTimeField, t: f64) -> Result<SpectralField> {
    let (t0, t1) = (f.t0(), f.t1());
    if t < 0.0 || t < t0 || t > t1 || 0.0 < t0 {
        return Err(ZkbError::OutsideWindow { t, t0, t1 });
    }
    let dt = f.dt();
    let node = |s: f64| -> Result<usize> {
        let j = (s - t0) / dt;
        let r = j.round();
        if (j - r).abs() > 1e-9 || r as usize >= f.nt() {
            return Err(ZkbError::InvalidParameter(format!(
                "time {s} is not a sample instant of the window"
            )));
        }
        Ok(r as usize)
    };
    let (ja, jb) = (node(0.0)?, node(t)?);
    if ja == jb {
        return Ok(SpectralField::zeros(*f.grid()));
    }
    let count = jb - ja + 1;
    let weights = if count == 2 {
        vec![0.5 * dt, 0.5 * dt]
    } else {
        simpson_weights(count, dt)?
    };
    let terms = exec::map_range(count, |i| {
        let j = ja + i;
        let tj = f.time(j);
        let w = weights[i];
        f.frame(j)
            .map_modes(|xi, eta, c| c * w * SymbolSet.w_multiplier(xi, eta, t - tj))
    });
    let sum = exec::pairwise_reduce(terms, &|a: SpectralField, b: SpectralField| {
        a.add(&b).expect("same grid")
    });
    Ok(sum.expect("at least two nodes"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_field(seed: u64) -> SpectralField {
        let g = GridSpec::new(32, 32, 4.0 * PI, 4.0 * PI).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = SpectralField::zeros(g);
        for c in f.coeffs_mut() {
            *c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
        f.symmetrize_hermitian();
        f
    }

    fn max_rel(a: &SpectralField, b: &SpectralField) -> f64 {
        a.sub(b).unwrap().max_abs() / b.max_abs()
    }

    #[test]
    fn symbols() {
        assert_eq!(dissipation(1.5, -1.5), 0.0);
        assert_eq!(omega(-1.0, -2.0), -omega(1.0, 2.0));
    }

    #[test]
    fn u_is_isometric_group() {
        let f = random_field(1);
        assert_eq!(apply_u(&f, 0.0), f);
        assert!((apply_u(&f, 0.7).l2_norm() / f.l2_norm() - 1.0).abs() < 1e-12);
        assert!(max_rel(&apply_u(&apply_u(&f, 0.7), -0.7), &f) < 1e-12);
    }

    #[test]
    fn w_semigroup_and_antidiagonal() {
        let f = random_field(2);
        assert_eq!(apply_w(&f, 0.0), f);
        let ab = apply_w(&apply_w(&f, 0.3), 0.45);
        assert!(max_rel(&ab, &apply_w(&f, 0.75)) < 1e-12);
        let w = apply_w(&f, 2.0);
        let g = f.grid();
        for ix in 0..g.nx {
            for iy in 0..g.ny {
                if g.kx(ix) + g.ky(iy) == 0 {
                    let i = g.index(ix, iy);
                    assert!((w.coeffs()[i].norm() - f.coeffs()[i].norm()).abs() < 1e-14);
                }
            }
        }
        assert!(w.l2_norm() <= f.l2_norm());
    }

    fn closed_form_error(nt: usize) -> f64 {
        let g = random_field(3);
        let f = SpaceTimeField::from_fn(*g.grid(), 0.0, 2.0, nt, |t| apply_w(&g, t)).unwrap();
        let got = duhamel(&f, 1.0).unwrap();
        max_rel(&got, &apply_w(&g, 1.0))
    }

    #[test]
    fn duhamel_of_free_evolution_is_exact() {
        // the integrand W(1 − t')W(t')g is constant in t'
        assert!(closed_form_error(64) < 1e-12);
    }

    #[test]
    fn duhamel_constant_forcing_is_fourth_order() {
        // ∫₀¹ e^{(1−t')(iΩ−D)} dt' = (e^{iΩ−D} − 1)/(iΩ − D); on the antidiagonal Ω = D = 0
        let grid = GridSpec::new(16, 16, 2.0 * PI, 2.0 * PI).unwrap();
        let mut g = SpectralField::zeros(grid);
        g.set_real_mode(2, 1, Complex64::new(0.6, 0.2)).unwrap();
        g.set_real_mode(1, 0, Complex64::new(-0.3, 0.4)).unwrap();
        g.set_real_mode(1, -1, Complex64::new(0.5, 0.0)).unwrap();
        let exact = g.map_modes(|xi, eta, c| {
            let z = Complex64::new(-dissipation(xi, eta), omega(xi, eta));
            if z.norm() == 0.0 {
                c
            } else {
                c * (z.exp() - 1.0) / z
            }
        });
        let mut errs = Vec::new();
        for nt in [64usize, 128, 256] {
            let f = SpaceTimeField::from_fn(grid, 0.0, 2.0, nt, |_| g.clone()).unwrap();
            errs.push(duhamel(&f, 1.0).unwrap().sub(&exact).unwrap().max_abs());
        }
        for w in errs.windows(2) {
            let slope = (w[0] / w[1]).log2();
            assert!((slope - 4.0).abs() < 0.3, "slope {slope}, errs {errs:?}");
        }
    }

    #[test]
    fn duhamel_rejects_outside_window() {
        let g = random_field(4);
        let f = SpaceTimeField::from_fn(*g.grid(), 0.0, 1.0, 64, |_| g.clone()).unwrap();
        assert!(matches!(duhamel(&f, 1.5), Err(ZkbError::OutsideWindow { .. })));
        assert!(matches!(duhamel(&f, -0.1), Err(ZkbError::OutsideWindow { .. })));
        let zero = SpaceTimeField::from_fn(*g.grid(), 0.0, 1.0, 64, |_| SpectralField::zeros(*g.grid())).unwrap();
        assert_eq!(duhamel(&zero, 0.5).unwrap().max_abs(), 0.0);
    }
}
