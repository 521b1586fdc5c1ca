//! The second Picard iterate of the symmetric ZK equation on slab data.
//!
//! The data is `û0 = N^{−s+5/4} (χ_A + χ_B)` (plus the mirrored slabs
//! `−A`, `−B` so that `u0` is real) on `ℝ²`, with Fourier normalisation
//! `‖u‖² = (2π)^{−2} ∫ |û|²`. Both slabs are rectangles centred at `N·a`
//! and `N·b`, long half-width `N^{−1/2}` along `v` and short half-width
//! `N^{−2}` across it. For `ζ₁ ∈ A`, `ζ₂ ∈ B` the resonance function
//! `Φ = Ω(ζ₁) + Ω(ζ₂) − Ω(ζ₁ + ζ₂)` vanishes at the centres and is stationary
//! along `v`, so the time factor `(e^{itΦ} − 1)/(iΦ)` stays of size `t` over
//! the whole interaction and the iterate has size `N^{−s−1/4}`.
//!
//! The iterate is evaluated in frequency space by tensor Gauss–Legendre
//! quadrature over the output rectangle `A + B` (split at its kinks) and,
//! for every output node, over the interaction rectangle
//! `{ζ₁ ∈ A : ζ − ζ₁ ∈ B}`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dyadic::bracket;
use crate::error::{Result, ZkbError};
use crate::exec;
use crate::quadrature::{gauss_legendre_on, ls_slope};

/// Instants `t_k = k T / TIME_POINTS`, `k = 1..=TIME_POINTS`.
pub const TIME_POINTS: usize = 64;

/// Largest relative change allowed when the quadrature is halved.
pub const QUAD_TOLERANCE: f64 = 0.05;

pub fn center_a() -> [f64; 2] {
    [2f64.cbrt(), 75f64.cbrt()]
}

pub fn center_b() -> [f64; 2] {
    [-3.0 * 2f64.cbrt(), -75f64.cbrt() / 5.0]
}

pub fn long_axis() -> [f64; 2] {
    [3.0 * 9f64.cbrt(), 100f64.cbrt()]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CounterexampleParams {
    /// Dyadic size `N`.
    pub n: f64,
    pub s: f64,
    /// Horizon `T` of the supremum over `0 < t ≤ T`.
    pub t: f64,
    /// Gauss–Legendre nodes per slab dimension.
    pub quad: usize,
}

impl CounterexampleParams {
    pub fn new(n: f64, s: f64) -> Self {
        CounterexampleParams { n, s, t: 1.0, quad: 64 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n >= 16.0) || self.n.log2().fract() != 0.0 {
            return Err(ZkbError::param(format!("N = {} must be a power of two >= 16", self.n)));
        }
        if self.quad < 32 {
            return Err(ZkbError::param(format!("quad = {} must be >= 32", self.quad)));
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(ZkbError::param(format!("T = {} must be positive", self.t)));
        }
        if !self.s.is_finite() {
            return Err(ZkbError::param("s must be finite"));
        }
        Ok(())
    }
}

/// One rectangle of the data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabSpec {
    pub center: [f64; 2],
    /// Unit vector along `v`.
    pub long: [f64; 2],
    /// Unit vector along `v^⊥`.
    pub short: [f64; 2],
    pub half_long: f64,
    pub half_short: f64,
    pub amplitude: f64,
}

impl SlabSpec {
    fn new(center: [f64; 2], n: f64, s: f64) -> Self {
        let v = long_axis();
        let len = v[0].hypot(v[1]);
        let long = [v[0] / len, v[1] / len];
        SlabSpec {
            center,
            long,
            short: [-long[1], long[0]],
            half_long: n.powf(-0.5),
            half_short: n.powi(-2),
            amplitude: n.powf(-s + 1.25),
        }
    }

    pub fn area(&self) -> f64 {
        4.0 * self.half_long * self.half_short
    }

    /// `center + p·long + q·short`.
    pub fn point(&self, p: f64, q: f64) -> [f64; 2] {
        [
            self.center[0] + p * self.long[0] + q * self.short[0],
            self.center[1] + p * self.long[1] + q * self.short[1],
        ]
    }

    pub fn corners(&self) -> [[f64; 2]; 4] {
        let (w, h) = (self.half_long, self.half_short);
        [
            self.point(-w, -h),
            self.point(w, -h),
            self.point(w, h),
            self.point(-w, h),
        ]
    }

    pub fn mirrored(&self) -> Self {
        SlabSpec {
            center: [-self.center[0], -self.center[1]],
            ..*self
        }
    }

    /// Coordinates of `ζ − center` in the slab frame.
    fn local(&self, z: [f64; 2]) -> (f64, f64) {
        let d = [z[0] - self.center[0], z[1] - self.center[1]];
        (
            d[0] * self.long[0] + d[1] * self.long[1],
            d[0] * self.short[0] + d[1] * self.short[1],
        )
    }

    /// Rectangles with common axes overlap iff both projections overlap.
    fn overlaps(&self, other: &SlabSpec) -> bool {
        let (p, q) = self.local(other.center);
        p.abs() < self.half_long + other.half_long && q.abs() < self.half_short + other.half_short
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleData {
    pub params: CounterexampleParams,
    pub a: SlabSpec,
    pub b: SlabSpec,
    /// `‖u0‖_{H^s}` including the mirrored slabs.
    pub norm_u0: f64,
}

impl CounterexampleData {
    /// `A`, `B`, `−A`, `−B`.
    pub fn slabs(&self) -> [SlabSpec; 4] {
        [self.a, self.b, self.a.mirrored(), self.b.mirrored()]
    }
}

/// Gauss–Legendre nodes on `[a, b]` as `(node, weight)` pairs.
fn nodes(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre_on(n, a, b);
    x.into_iter().zip(w).collect()
}

fn weighted_area(slab: &SlabSpec, s: f64, quad: usize) -> f64 {
    let mut acc = 0.0;
    for (p, wp) in nodes(quad, -slab.half_long, slab.half_long) {
        for (q, wq) in nodes(quad, -slab.half_short, slab.half_short) {
            let z = slab.point(p, q);
            acc += wp * wq * bracket(z[0].hypot(z[1])).powf(2.0 * s);
        }
    }
    acc
}

pub fn build_data(p: CounterexampleParams) -> Result<CounterexampleData> {
    p.validate()?;
    let scale = |c: [f64; 2]| [p.n * c[0], p.n * c[1]];
    let a = SlabSpec::new(scale(center_a()), p.n, p.s);
    let b = SlabSpec::new(scale(center_b()), p.n, p.s);
    let all = [a, b, a.mirrored(), b.mirrored()];
    for i in 0..4 {
        for j in i + 1..4 {
            if all[i].overlaps(&all[j]) {
                return Err(ZkbError::param(format!("slabs overlap at N = {}", p.n)));
            }
        }
    }
    let energy: f64 = all.iter().map(|sl| weighted_area(sl, p.s, p.quad)).sum::<f64>() * a.amplitude.powi(2);
    Ok(CounterexampleData {
        params: p,
        a,
        b,
        norm_u0: (energy / (4.0 * PI * PI)).sqrt(),
    })
}

/// Propagator used between the Picard steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Propagation {
    /// `U(t) = e^{itΩ}`, as in the ill-posedness argument.
    Free,
    /// `W(t) = e^{−|t|D} e^{itΩ}`.
    Dissipative,
}

/// Which slab pair generates the output region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interaction {
    /// `A × B` and `B × A`, output `A + B`.
    Mixed,
    /// Data on `A` alone: `A × A`, output `A + A`.
    SelfA,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterateNorm {
    /// `sup_{0<t≤T} ‖·‖_{H^s}` over the time grid.
    pub value: f64,
    /// Maximizing instant.
    pub t_max: f64,
    /// `‖·‖_{H^s}` at every `t_k`.
    pub series: Vec<f64>,
    /// Relative change against the run with half the nodes.
    pub quad_change: f64,
}

/// `‖v(t_k)‖²_{H^s}` at `t_k = k T/TIME_POINTS` for one quadrature size.
fn iterate_sq(data: &CounterexampleData, inter: Interaction, prop: Propagation, quad: usize) -> Vec<f64> {
    let p = data.params;
    let (s1, s2) = match inter {
        Interaction::Mixed => (data.a, data.b),
        Interaction::SelfA => (data.a, data.a),
    };
    let (w, h) = (s1.half_long, s1.half_short);
    let center = [s1.center[0] + s2.center[0], s1.center[1] + s2.center[1]];
    let amp2 = s1.amplitude * s2.amplitude;
    // ordered pairs (ζ₁, ζ₂) ∈ A×B and B×A give the same integrand
    let orderings = if inter == Interaction::Mixed { 2.0 } else { 1.0 };
    let dt = p.t / TIME_POINTS as f64;

    let mut outer = Vec::new();
    for (pa, pb) in [(-2.0 * w, 0.0), (0.0, 2.0 * w)] {
        for (qa, qb) in [(-2.0 * h, 0.0), (0.0, 2.0 * h)] {
            for (pp, wp) in nodes(quad, pa, pb) {
                for (qq, wq) in nodes(quad, qa, qb) {
                    outer.push((pp, qq, wp * wq));
                }
            }
        }
    }
    let diss = |z: [f64; 2]| (z[0] + z[1]).powi(2);
    let contributions = exec::map_slice(&outer, |&(pp, qq, wo)| {
        let zeta = [
            center[0] + pp * s1.long[0] + qq * s1.short[0],
            center[1] + pp * s1.long[1] + qq * s1.short[1],
        ];
        let (xi, eta) = (zeta[0], zeta[1]);
        let d = diss(zeta);
        // ζ₁ = s1.center + p₁ long + q₁ short with ζ − ζ₁ ∈ s2
        let p_nodes = nodes(quad, (-w).max(pp - w), w.min(pp + w));
        let q_nodes = nodes(quad, (-h).max(qq - h), h.min(qq + h));
        let mut acc = vec![Complex64::default(); TIME_POINTS];
        for &(p1, wp1) in &p_nodes {
            for &(q1, wq1) in &q_nodes {
                let z1 = s1.point(p1, q1);
                let z2 = [zeta[0] - z1[0], zeta[1] - z1[1]];
                let phi = -3.0 * (xi * z1[0] * z2[0] + eta * z1[1] * z2[1]);
                let wgt = wp1 * wq1;
                // time factor f(t) = ∫₀ᵗ e^{t'γ} dt', γ = iΦ (+ D − D₁ − D₂)
                let gamma = match prop {
                    Propagation::Free => Complex64::new(0.0, phi),
                    Propagation::Dissipative => Complex64::new(d - diss(z1) - diss(z2), phi),
                };
                if (gamma * p.t).norm() < 1e-8 {
                    for (k, a) in acc.iter_mut().enumerate() {
                        let t = (k + 1) as f64 * dt;
                        *a += wgt * (t + 0.5 * gamma * t * t);
                    }
                    continue;
                }
                let step = (gamma * dt).exp();
                let c = wgt / gamma;
                let mut e = step;
                for a in acc.iter_mut() {
                    *a += c * (e - 1.0);
                    e *= step;
                }
            }
        }
        let weight = wo * bracket(xi.hypot(eta)).powf(2.0 * p.s) * (xi + eta).powi(2);
        acc.iter()
            .enumerate()
            .map(|(k, a)| {
                let damp = match prop {
                    Propagation::Free => 1.0,
                    Propagation::Dissipative => (-((k + 1) as f64 * dt) * d).exp(),
                };
                weight * (a * damp).norm_sqr()
            })
            .collect::<Vec<f64>>()
    });
    // v̂ = i(ξ+η) (2π)^{−2} A_1 A_2 · orderings · ∫…, ‖v‖² = (2π)^{−2} ∫ ⟨ζ⟩^{2s} |v̂|²,
    // doubled for the mirrored output region
    let pref = 2.0 * (orderings * amp2).powi(2) / (2.0 * PI).powi(6);
    (0..TIME_POINTS)
        .map(|k| {
            let col: Vec<f64> = contributions.iter().map(|c| c[k]).collect();
            pref * exec::pairwise_sum(&col)
        })
        .collect()
}

fn sup_norm(sq: &[f64], t: f64) -> (f64, f64, Vec<f64>) {
    let series: Vec<f64> = sq.iter().map(|v| v.max(0.0).sqrt()).collect();
    let (k, v) = series.iter().enumerate().fold(
        (0, f64::NEG_INFINITY),
        |acc, (k, &v)| if v > acc.1 { (k, v) } else { acc },
    );
    (v, (k + 1) as f64 * t / TIME_POINTS as f64, series)
}

/// Iterate norm for a chosen interaction and propagator, with the
/// quadrature-halving check.
pub fn iterate_norm(p: CounterexampleParams, inter: Interaction, prop: Propagation) -> Result<IterateNorm> {
    let data = build_data(p)?;
    let fine = iterate_sq(&data, inter, prop, p.quad);
    let coarse = iterate_sq(&data, inter, prop, p.quad / 2);
    let (value, t_max, series) = sup_norm(&fine, p.t);
    let (coarse_value, _, _) = sup_norm(&coarse, p.t);
    let quad_change = if value == 0.0 {
        0.0
    } else {
        (value - coarse_value).abs() / value
    };
    if !value.is_finite() || quad_change > QUAD_TOLERANCE {
        return Err(ZkbError::Quadrature(format!(
            "second iterate at N = {} changed by {:.2}% when halving quad = {}",
            p.n,
            100.0 * quad_change,
            p.quad
        )));
    }
    Ok(IterateNorm {
        value,
        t_max,
        series,
        quad_change,
    })
}

/// `sup_{0<t≤T} ‖∫₀ᵗ U(t − t') (∂x + ∂y)(U(t') u0)² dt'‖_{H^s}`.
pub fn second_iterate_norm(p: CounterexampleParams) -> Result<IterateNorm> {
    iterate_norm(p, Interaction::Mixed, Propagation::Free)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopePoint {
    pub n: f64,
    pub norm_u0: f64,
    pub iterate: IterateNorm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub s: f64,
    pub points: Vec<SlopePoint>,
    /// Least-squares slope of `log₂ iterate` against `log₂ N`.
    pub slope: f64,
}

impl SlopeFit {
    /// The exponent `−s − 1/4` of the lower bound.
    pub fn expected(&self) -> f64 {
        -self.s - 0.25
    }
}

pub fn slope_fit(s: f64, ns: &[f64], quad: usize, t: f64) -> Result<SlopeFit> {
    if ns.len() < 4 {
        return Err(ZkbError::param(format!(
            "slope fit needs >= 4 values of N, got {}",
            ns.len()
        )));
    }
    let points = ns
        .iter()
        .map(|&n| {
            let p = CounterexampleParams { n, s, t, quad };
            let data = build_data(p)?;
            Ok(SlopePoint {
                n,
                norm_u0: data.norm_u0,
                iterate: second_iterate_norm(p)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = points.iter().map(|p| p.n.log2()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.iterate.value.log2()).collect();
    Ok(SlopeFit {
        s,
        slope: ls_slope(&x, &y),
        points,
    })
}
