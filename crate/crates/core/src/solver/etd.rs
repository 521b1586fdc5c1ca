//! φ-functions and per-mode coefficient tables for the exponential integrators.

use num_complex::Complex64;

const SERIES_RADIUS: f64 = 0.5;

/// `φ_k(z) = Σ_{j≥0} z^j/(j+k)!` for `k = 1, 2, 3`.
///
/// A truncated series is used for `|z| < 1/2` and the closed forms otherwise,
/// avoiding cancellation near the origin.
pub fn phi123(z: Complex64) -> [Complex64; 3] {
    if z.norm() < SERIES_RADIUS {
        phi_series(z)
    } else {
        phi_closed(z)
    }
}

fn phi_series(z: Complex64) -> [Complex64; 3] {
    let mut out = [Complex64::default(); 3];
    for (k, o) in out.iter_mut().enumerate() {
        // Horner on Σ z^j/(j+k+1)!
        let mut acc = Complex64::new(0.0, 0.0);
        for j in (0..20).rev() {
            acc = acc * z + 1.0 / factorial(j + k + 1);
        }
        *o = acc;
    }
    out
}

fn phi_closed(z: Complex64) -> [Complex64; 3] {
    let e = z.exp();
    let p1 = (e - 1.0) / z;
    let p2 = (e - 1.0 - z) / (z * z);
    let p3 = (e - 1.0 - z - 0.5 * z * z) / (z * z * z);
    [p1, p2, p3]
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, b| a * b as f64)
}

/// Coefficients of one ETDRK4 step for a single mode with `z = h·λ`.
#[derive(Debug, Clone, Copy, Default)]
pub struct EtdCoeffs {
    pub e: Complex64,
    pub e2: Complex64,
    /// `h/2 · φ1(z/2)`
    pub q: Complex64,
    /// `h (φ1 − 3φ2 + 4φ3)`
    pub f1: Complex64,
    /// `h (φ2 − 2φ3)`
    pub f2: Complex64,
    /// `h (4φ3 − φ2)`
    pub f3: Complex64,
}

impl EtdCoeffs {
    pub fn new(lambda: Complex64, h: f64) -> Self {
        let z = lambda * h;
        let [p1, p2, p3] = phi123(z);
        let [h1, _, _] = phi123(0.5 * z);
        EtdCoeffs {
            e: z.exp(),
            e2: (0.5 * z).exp(),
            q: 0.5 * h * h1,
            f1: h * (p1 - 3.0 * p2 + 4.0 * p3),
            f2: h * (p2 - 2.0 * p3),
            f3: h * (4.0 * p3 - p2),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_and_closed_form_agree_at_the_switch() {
        for arg in [0.0, 0.7, 1.6, 3.0] {
            let z = Complex64::from_polar(SERIES_RADIUS, arg);
            let (a, b) = (phi_series(z), phi_closed(z));
            for k in 0..3 {
                assert!((a[k] - b[k]).norm() < 1e-12, "k={k} arg={arg}");
            }
        }
    }

    #[test]
    fn values_at_zero() {
        let [a, b, c] = phi123(Complex64::default());
        assert_eq!((a.re, b.re, c.re), (1.0, 0.5, 1.0 / 6.0));
    }

    #[test]
    fn constant_forcing_weights_sum_to_phi1() {
        let lam = Complex64::new(-3.0, 40.0);
        let c = EtdCoeffs::new(lam, 0.01);
        let [p1, _, _] = phi123(lam * 0.01);
        assert!((c.f1 + 4.0 * c.f2 + c.f3 - 0.01 * p1).norm() < 1e-15);
    }
}
