//! Time profiles of lab atoms and their modulation-band energies.
//!
//! Every function returns `B_L = (1/2π) ∫ w_L(τ)² |p̂(τ)|² dτ` for the closed
//! shell set `L = 2^floor, 2^{floor+1}, …`, where `w_L` is the low-pass
//! `χ(τ/L)` on the floor shell and `φ_L(τ)` above it.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::dyadic::{chi, closed_weights, dyad, phi_dyad};
use crate::fft::fft_1d;
use crate::quadrature::gauss_legendre;
use crate::solver::phi123;

const GL_NODES: usize = 32;

/// Above this dissipation `e^{−|t|D}` is below `e^{−38}` wherever the cutoff
/// differs from one, and the profile transform is a Lorentzian.
const LORENTZ_D: f64 = 38.0;

/// Beyond this modulation the linear profile is replaced by its Lorentzian tail.
const TAIL_TAU: f64 = 200.0;

fn weight(tau: f64, l: i32, floor: i32) -> f64 {
    if l == floor {
        chi(tau / dyad(floor))
    } else {
        phi_dyad(tau, l)
    }
}

/// Integration pieces (on `τ ≥ 0`) where the shell weight is smooth.
fn pieces(l: i32, floor: i32) -> [(f64, f64); 2] {
    let v = dyad(l);
    if l == floor {
        [(0.0, v), (v, 2.0 * v)]
    } else {
        [(0.5 * v, v), (v, 2.0 * v)]
    }
}

/// Band energies of `f = |p̂|²` by Gauss–Legendre quadrature on every
/// shell from `floor` to `top`, restricted to `τ ∈ [lo, hi]`. With `even`
/// only `τ ≥ 0` is integrated and doubled.
pub fn band_energies_gl<F>(f: F, floor: i32, top: i32, lo: f64, hi: f64, even: bool) -> Vec<(i32, f64)>
where
    F: Fn(f64) -> f64,
{
    let (x, w) = gauss_legendre(GL_NODES);
    let mut out = Vec::with_capacity((top - floor + 1).max(0) as usize);
    for l in floor..=top {
        let mut acc = 0.0;
        for sign in [1.0, -1.0] {
            if even && sign < 0.0 {
                continue;
            }
            for (a, b) in pieces(l, floor) {
                // the piece in τ is sign·[a, b]
                let (pa, pb) = if sign > 0.0 { (a, b) } else { (-b, -a) };
                let (ca, cb) = (pa.max(lo), pb.min(hi));
                if cb <= ca {
                    continue;
                }
                let (c, h) = (0.5 * (ca + cb), 0.5 * (cb - ca));
                for (xi, wi) in x.iter().zip(&w) {
                    let t = c + h * xi;
                    let wl = weight(t, l, floor);
                    if wl > 0.0 {
                        acc += h * wi * wl * wl * f(t);
                    }
                }
            }
        }
        if even {
            acc *= 2.0;
        }
        out.push((l, acc / (2.0 * PI)));
    }
    out
}

/// `p̂(τ) = ∫ ψ(t) e^{−s|t|D} e^{−iτt} dt` for the cutoff `ψ = χ`, `s = ±1`.
pub fn linear_profile(tau: f64, d: f64, sign: f64) -> f64 {
    let lorentz = 2.0 * sign * d / (d * d + tau * tau);
    if sign > 0.0 && d >= LORENTZ_D {
        return lorentz;
    }
    if sign < 0.0 && 2.0 * d > 700.0 {
        return f64::INFINITY;
    }
    if tau.abs() > TAIL_TAU {
        // the kink of e^{−s|t|D} at t = 0 dominates
        return lorentz;
    }
    // 2 ∫₀² ψ(t) e^{−s t D} cos(τ t) dt
    let panels = (((tau.abs() + d) * 2.0 / PI).ceil() as usize + 24).min(20_000);
    let (x, w) = gauss_legendre(8);
    let h = 2.0 / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let c = (p as f64 + 0.5) * h;
        for (xi, wi) in x.iter().zip(&w) {
            let t = c + 0.5 * h * xi;
            acc += 0.5 * h * wi * chi(t) * (-sign * t * d).exp() * (tau * t).cos();
        }
    }
    2.0 * acc
}

type BandCache = Mutex<HashMap<(u64, i64, i32), Arc<Vec<(i32, f64)>>>>;

fn linear_cache() -> &'static BandCache {
    static C: OnceLock<BandCache> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Band energies of `ψ(t) e^{−|t|D}` (cached by `D`).
pub fn linear_profile_bands(d: f64, sign: f64, floor: i32) -> Arc<Vec<(i32, f64)>> {
    let key = (d.to_bits(), sign.signum() as i64, floor);
    if let Some(v) = linear_cache().lock().expect("cache").get(&key) {
        return v.clone();
    }
    let top = (d.max(1.0).log2().ceil() as i32).max(4) + 14;
    let bands = Arc::new(band_energies_gl(
        |t| linear_profile(t, d, sign).powi(2),
        floor,
        top,
        f64::NEG_INFINITY,
        f64::INFINITY,
        true,
    ));
    linear_cache().lock().expect("cache").insert(key, bands.clone());
    bands
}

/// Band energies of the Gaussian-envelope profile `e^{−t²/2} e^{iλt}`,
/// `|p̂|² = 2π e^{−(τ−λ)²}`.
pub fn gaussian_bands(lambda: f64, floor: i32) -> Vec<(i32, f64)> {
    let top = ((lambda.abs() + 9.0).log2().ceil() as i32 + 1).max(floor);
    band_energies_gl(
        |t| 2.0 * PI * (-(t - lambda).powi(2)).exp(),
        floor,
        top,
        lambda - 9.0,
        lambda + 9.0,
        false,
    )
}

/// `z(t) = ∫_{−∞}^t e^{−(t−t')D} g(t') dt'` for `g(t) = e^{−t²/2} e^{iλt}`
/// on `t_j = t_start + j h`, by an exponential integrator that is exact for
/// piecewise-linear `g`.
pub fn causal_response(d: f64, lambda: f64, t_start: f64, h: f64, steps: usize) -> Vec<Complex64> {
    let g = |t: f64| Complex64::from_polar((-0.5 * t * t).exp(), lambda * t);
    let z = Complex64::new(-h * d, 0.0);
    let [p1, p2, _] = phi123(z);
    let e = z.exp();
    let mut out = Vec::with_capacity(steps + 1);
    let mut cur = Complex64::default();
    out.push(cur);
    let mut gn = g(t_start);
    for j in 0..steps {
        let gn1 = g(t_start + (j + 1) as f64 * h);
        cur = e * cur + h * (p1 * gn + p2 * (gn1 - gn));
        out.push(cur);
        gn = gn1;
    }
    out
}

/// Band energies of the windowed Duhamel profile
/// `ψ(t) [z(t) − e^{−|t|D} z(0)]` of a Gaussian-envelope source.
pub fn duhamel_profile_bands(d: f64, lambda: f64, sign: f64, floor: i32) -> Vec<(i32, f64)> {
    let h = (1e-3f64).min(0.5 / lambda.abs().max(1.0));
    let window = 64.0;
    let nt = ((window / h).round() as usize).next_power_of_two();
    let h = window / nt as f64;
    let t_start = -8.0;
    let steps = ((10.0 / h).round()) as usize; // up to t = 2
    let dd = sign * d;
    let z = causal_response(dd, lambda, t_start, h, steps);
    let j0 = ((0.0 - t_start) / h).round() as usize;
    let z0 = z[j0];
    let analytic_kink = sign > 0.0 && d >= LORENTZ_D;
    // samples on t ∈ [−W/2, W/2); FFT order puts t = 0 at index 0
    let mut buf = vec![Complex64::default(); nt];
    for (j, zj) in z.iter().enumerate() {
        let t = t_start + j as f64 * h;
        if t.abs() >= 2.0 {
            continue;
        }
        let psi = chi(t);
        let mut q = psi * zj;
        if !analytic_kink {
            q -= z0 * psi * (-t.abs() * dd).exp();
        }
        let k = ((t / h).round() as i64).rem_euclid(nt as i64) as usize;
        buf[k] = q * h;
    }
    fft_1d(&mut buf, false);
    let dtau = 2.0 * PI / window;
    let tau_cut = 0.8 * PI / h;
    let lorentz = |t: f64| 2.0 * d / (d * d + t * t);
    let top = ((d.max(lambda.abs()).max(1.0)).log2().ceil() as i32).max(4) + 14;
    let mut bands: Vec<(i32, f64)> = (floor..=top).map(|l| (l, 0.0)).collect();
    for (k, c) in buf.iter().enumerate() {
        let kt = crate::grid::GridSpec::wavenumber(k, nt);
        let tau = kt as f64 * dtau;
        if tau.abs() > tau_cut {
            continue;
        }
        let mut v = *c;
        if analytic_kink {
            v -= z0 * lorentz(tau);
        }
        let (ws, n) = closed_weights(tau, floor);
        for &(l, w) in &ws[..n] {
            if let Some(b) = bands.get_mut((l - floor) as usize) {
                b.1 += w * w * v.norm_sqr() * dtau / (2.0 * PI);
            }
        }
    }
    let z02 = z0.norm_sqr();
    let tail_lo = [f64::NEG_INFINITY, tau_cut];
    let tails = band_energies_gl(
        |t| z02 * lorentz(t).powi(2),
        floor,
        top,
        tail_lo[1],
        f64::INFINITY,
        true,
    );
    for (b, t) in bands.iter_mut().zip(tails) {
        // `even` doubled the τ > cut half to cover τ < −cut as well
        b.1 += t.1;
    }
    bands
}

/// Samples of the profile whose transform is `φ_L(τ)` on `τ > 0`, at
/// `t_j = j·dt` in FFT order.
pub fn band_profile(l: i32, dt: f64, nt: usize) -> Vec<Complex64> {
    let dtau = 2.0 * PI / (dt * nt as f64);
    let mut buf: Vec<Complex64> = (0..nt)
        .map(|k| {
            let tau = crate::grid::GridSpec::wavenumber(k, nt) as f64 * dtau;
            Complex64::new(if tau > 0.0 { phi_dyad(tau, l) } else { 0.0 }, 0.0)
        })
        .collect();
    fft_1d(&mut buf, true);
    let scale = dtau / (2.0 * PI);
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}
