//! Littlewood–Paley cutoffs, dyadic projections and the Sobolev / Besov-type
//! Fourier restriction norms.
//!
//! Dyads are stored by their base-2 exponent. On a finite grid the lowest
//! shell of every sum is closed off with the low-pass `χ(·/floor)` so that
//! zero frequencies, the antidiagonal `ξ + η = 0` and zero modulation are
//! all counted; see [`ShellFloors`].

use std::collections::BTreeMap;

use crate::error::{Result, ZkbError};
use crate::exec;
use crate::grid::GridSpec;
use crate::spacetime::SpaceTimeField;
use crate::spectral::SpectralField;

/// Japanese bracket `⟨x⟩ = (1 + x²)^{1/2}`.
#[inline]
pub fn bracket(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

#[inline]
fn g(r: f64) -> f64 {
    if r > 0.0 {
        (-1.0 / r).exp()
    } else {
        0.0
    }
}

/// Smooth transition: 0 for `r ≤ 0`, 1 for `r ≥ 1`.
#[inline]
fn rho(r: f64) -> f64 {
    if r <= 0.0 {
        0.0
    } else if r >= 1.0 {
        1.0
    } else {
        let a = g(r);
        a / (a + g(1.0 - r))
    }
}

/// Even plateau cutoff: 1 on `|t| ≤ 1`, 0 on `|t| ≥ 2`.
#[inline]
pub fn chi(t: f64) -> f64 {
    rho(2.0 - t.abs())
}

/// Annulus bump `φ(t) = χ(t) − χ(2t)`, supported in `1/2 ≤ |t| ≤ 2`.
#[inline]
pub fn phi(t: f64) -> f64 {
    chi(t) - chi(2.0 * t)
}

/// `φ_N(t) = φ(t/N)` for `N = 2^e`.
#[inline]
pub fn phi_dyad(t: f64, e: i32) -> f64 {
    phi(t / dyad(e))
}

#[inline]
pub fn dyad(e: i32) -> f64 {
    2f64.powi(e)
}

/// Dyad exponents whose bump `φ_{2^e}` can be nonzero at `t ≠ 0`.
#[inline]
pub fn candidate_dyads(t: f64) -> [i32; 2] {
    let e = t.abs().log2().floor() as i32;
    [e, e + 1]
}

/// Shell weights of `t` in the closed shell set with lowest exponent `floor`:
/// the floor shell carries `χ(t/2^floor)`, higher shells `φ_{2^e}(t)`.
/// Returns at most two `(exponent, weight)` pairs with nonzero weight.
pub fn closed_weights(t: f64, floor: i32) -> ([(i32, f64); 2], usize) {
    let mut out = [(0, 0.0); 2];
    let mut n = 0;
    let at = t.abs();
    let base = chi(at / dyad(floor));
    if base > 0.0 {
        out[n] = (floor, base);
        n += 1;
    }
    if at > dyad(floor) {
        for e in candidate_dyads(at) {
            if e > floor {
                let w = phi_dyad(at, e);
                if w > 0.0 && n < 2 {
                    out[n] = (e, w);
                    n += 1;
                }
            }
        }
    }
    (out, n)
}

/// A `(N, M, L)` triple of dyad exponents addressing `P_{N,M} Q_L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyadicShell {
    pub n: i32,
    pub m: i32,
    pub l: i32,
}

impl DyadicShell {
    pub fn new(n: i32, m: i32, l: i32) -> Self {
        DyadicShell { n, m, l }
    }

    pub fn n_val(&self) -> f64 {
        dyad(self.n)
    }

    pub fn m_val(&self) -> f64 {
        dyad(self.m)
    }

    pub fn l_val(&self) -> f64 {
        dyad(self.l)
    }

    /// `|ξ + η| ≤ √2 |(ξ, η)|`, so with bump supports `M ≤ 4N` is required.
    pub fn is_admissible(&self) -> bool {
        self.m <= self.n + 2
    }
}

/// Lowest exponents of the closed shell sums in `N`, `M` and `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellFloors {
    pub n: i32,
    pub m: i32,
    pub l: i32,
}

impl ShellFloors {
    /// Largest dyads not exceeding the smallest positive grid value of
    /// `|(ξ, η)|`, `|ξ + η|` and the τ spacing.
    pub fn for_grid(grid: &GridSpec, tau_spacing: f64) -> Self {
        let mut min_m = f64::INFINITY;
        for ix in 0..grid.nx {
            for iy in 0..grid.ny {
                let (xi, eta) = grid.freq(ix, iy);
                let s = (xi + eta).abs();
                if s > 1e-12 * grid.dxi() {
                    min_m = min_m.min(s);
                }
            }
        }
        let fl = |x: f64| x.log2().floor() as i32;
        ShellFloors {
            n: fl(grid.dxi().min(grid.deta())),
            m: fl(min_m),
            l: fl(tau_spacing),
        }
    }
}

/// Pure projection `P_{N,M}`: multiplier `φ_N(|(ξ, η)|) φ_M(ξ + η)`.
pub fn project_pnm(f: &SpectralField, n: i32, m: i32) -> SpectralField {
    f.map_modes(|xi, eta, c| c * phi_dyad(xi.hypot(eta), n) * phi_dyad(xi + eta, m))
}

/// Pure projection `P_N`.
pub fn project_pn(f: &SpectralField, n: i32) -> SpectralField {
    f.map_modes(|xi, eta, c| c * phi_dyad(xi.hypot(eta), n))
}

fn check_resolved(f: &SpaceTimeField, l: f64) -> Result<()> {
    let spacing = f.tau_spacing();
    if spacing > l / 4.0 {
        return Err(ZkbError::UnresolvedModulation { l, spacing });
    }
    Ok(())
}

/// Pure projection `Q_L`: multiplier `φ_L(τ − Ω(ξ, η))`.
pub fn project_ql(f: &SpaceTimeField, l: i32) -> Result<SpaceTimeField> {
    check_resolved(f, dyad(l))?;
    f.map_tau(|tau, _, _| phi_dyad(tau, l))
}

/// Low-pass `χ((τ − Ω)/L)` closing the `Q_L` sum from below.
pub fn project_ql_low(f: &SpaceTimeField, l: i32) -> Result<SpaceTimeField> {
    check_resolved(f, dyad(l))?;
    f.map_tau(|tau, _, _| chi(tau / dyad(l)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormFamily {
    /// `‖⟨|(ξ, η)|⟩^s û‖`
    Hs,
    /// `‖⟨ξ⟩^s û‖`
    Hs0Anisotropic,
    /// `‖⟨ξ + η⟩^s û‖`
    HtsAntidiagonal,
    /// Besov-type restriction norm with weight `⟨N⟩^s ⟨M² + L⟩^b`.
    Xsb1,
    /// As [`NormFamily::Xsb1`] with `⟨M⟩^s` in place of `⟨N⟩^s`.
    Xtsb1,
}

impl std::str::FromStr for NormFamily {
    type Err = ZkbError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "Hs" | "hs" => NormFamily::Hs,
            "Hs0" | "Hs0_anisotropic" | "hs0" => NormFamily::Hs0Anisotropic,
            "Hts" | "Hts_antidiagonal" | "hts" => NormFamily::HtsAntidiagonal,
            "Xsb1" | "xsb1" => NormFamily::Xsb1,
            "Xtsb1" | "xtsb1" => NormFamily::Xtsb1,
            other => return Err(ZkbError::UnsupportedNorm(format!("unknown norm family `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSpec {
    pub family: NormFamily,
    pub s: f64,
    pub b: f64,
}

impl NormSpec {
    pub fn new(family: NormFamily, s: f64) -> Self {
        NormSpec { family, s, b: 0.5 }
    }

    pub fn with_b(mut self, b: f64) -> Self {
        self.b = b;
        self
    }
}

/// What a norm is evaluated on.
#[derive(Debug, Clone, Copy)]
pub enum NormInput<'a> {
    Field(&'a SpectralField),
    SpaceTime(&'a SpaceTimeField),
}

/// Sobolev-type norm with spatial weight `w(ξ, η)`.
pub fn weighted_l2<F>(f: &SpectralField, w: F) -> f64
where
    F: Fn(f64, f64) -> f64 + Sync + Send,
{
    let g = f.grid();
    let parts = exec::map_range(g.len(), |i| {
        let (xi, eta) = g.freq(i / g.ny, i % g.ny);
        let c = f.coeffs()[i];
        if c.norm_sqr() == 0.0 {
            0.0
        } else {
            w(xi, eta).powi(2) * c.norm_sqr()
        }
    });
    (exec::pairwise_sum(&parts) * g.spectral_weight()).sqrt()
}

pub fn hs_norm(f: &SpectralField, s: f64) -> f64 {
    weighted_l2(f, |xi, eta| bracket(xi.hypot(eta)).powf(s))
}

pub fn hts_norm(f: &SpectralField, s: f64) -> f64 {
    weighted_l2(f, |xi, eta| bracket(xi + eta).powf(s))
}

pub fn norm(input: NormInput<'_>, spec: NormSpec) -> Result<f64> {
    match (input, spec.family) {
        (NormInput::Field(f), NormFamily::Hs) => Ok(hs_norm(f, spec.s)),
        (NormInput::Field(f), NormFamily::Hs0Anisotropic) => Ok(weighted_l2(f, |xi, _| bracket(xi).powf(spec.s))),
        (NormInput::Field(f), NormFamily::HtsAntidiagonal) => Ok(hts_norm(f, spec.s)),
        (NormInput::SpaceTime(f), NormFamily::Xsb1 | NormFamily::Xtsb1) => {
            let floors = ShellFloors::for_grid(f.grid(), f.tau_spacing());
            Ok(restriction_norm(&block_energies(f, floors), spec))
        }
        (NormInput::Field(_), fam) => Err(ZkbError::UnsupportedNorm(format!("{fam:?} needs a space-time field"))),
        (NormInput::SpaceTime(_), fam) => Err(ZkbError::UnsupportedNorm(format!(
            "{fam:?} is a spatial norm; evaluate it per frame"
        ))),
    }
}

/// Accumulates squared block norms `‖P_{N,M} Q_L u‖²` keyed by shell.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ShellAccumulator {
    pub blocks: BTreeMap<DyadicShell, f64>,
}

impl ShellAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, shell: DyadicShell, energy: f64) {
        *self.blocks.entry(shell).or_insert(0.0) += energy;
    }

    /// Spreads `energy_of(L-exponent)` over the closed `(N, M)` weights of a
    /// spatial frequency; `energy_of` receives the squared `N, M` weight
    /// product and must return per-`L` energies.
    pub fn add_mode<F>(&mut self, xi: f64, eta: f64, floors: ShellFloors, mut per_l: F)
    where
        F: FnMut(&mut dyn FnMut(i32, f64)),
    {
        let (wn, nn) = closed_weights(xi.hypot(eta), floors.n);
        let (wm, nm) = closed_weights(xi + eta, floors.m);
        let mut ls: Vec<(i32, f64)> = Vec::with_capacity(4);
        per_l(&mut |l, e| ls.push((l, e)));
        for &(n, a) in &wn[..nn] {
            for &(m, b) in &wm[..nm] {
                let w2 = (a * b).powi(2);
                for &(l, e) in &ls {
                    self.add(DyadicShell::new(n, m, l), w2 * e);
                }
            }
        }
    }

    pub fn merge(&mut self, other: &ShellAccumulator) {
        for (k, v) in &other.blocks {
            self.add(*k, *v);
        }
    }

    pub fn total(&self) -> f64 {
        let v: Vec<f64> = self.blocks.values().copied().collect();
        exec::pairwise_sum(&v)
    }
}

/// Squared block norms of a space-time field over the closed shell set.
pub fn block_energies(f: &SpaceTimeField, floors: ShellFloors) -> ShellAccumulator {
    let g = *f.grid();
    let tau = f.tau_coeffs();
    let scale = g.spectral_weight() / (f.t1() - f.t0());
    let parts = exec::map_range(g.len(), |i| {
        let mut acc = ShellAccumulator::new();
        if tau[i].is_empty() {
            return acc;
        }
        let (xi, eta) = g.freq(i / g.ny, i % g.ny);
        acc.add_mode(xi, eta, floors, |emit| {
            for (kt, c) in tau[i].iter().enumerate() {
                let e = c.norm_sqr();
                if e == 0.0 {
                    continue;
                }
                let (wl, nl) = closed_weights(f.tau_value(kt), floors.l);
                for &(l, w) in &wl[..nl] {
                    emit(l, w * w * e * scale);
                }
            }
        });
        acc
    });
    let mut total = ShellAccumulator::new();
    for p in &parts {
        total.merge(p);
    }
    total
}

/// `{Σ_{N,M} (Σ_L ⟨·⟩^s ⟨M² + L⟩^b ‖P_{N,M} Q_L u‖)²}^{1/2}` from block energies.
pub fn restriction_norm(acc: &ShellAccumulator, spec: NormSpec) -> f64 {
    let mut inner: BTreeMap<(i32, i32), f64> = BTreeMap::new();
    for (sh, &e) in &acc.blocks {
        let reg = match spec.family {
            NormFamily::Xtsb1 => bracket(sh.m_val()),
            _ => bracket(sh.n_val()),
        };
        let m = sh.m_val();
        let w = reg.powf(spec.s) * (1.0 + (m * m + sh.l_val()).powi(2)).sqrt().powf(spec.b);
        *inner.entry((sh.n, sh.m)).or_insert(0.0) += w * e.max(0.0).sqrt();
    }
    let sq: Vec<f64> = inner.values().map(|v| v * v).collect();
    exec::pairwise_sum(&sq).sqrt()
}

/// Per-shell block norms `‖P_{N,M} Q_L u‖` (dyad values, not exponents).
pub fn breakdown(f: &SpaceTimeField) -> Vec<(f64, f64, f64, f64)> {
    let floors = ShellFloors::for_grid(f.grid(), f.tau_spacing());
    block_energies(f, floors)
        .blocks
        .iter()
        .map(|(sh, e)| (sh.n_val(), sh.m_val(), sh.l_val(), e.sqrt()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagators::{apply_u, apply_w};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn field() -> SpectralField {
        let g = GridSpec::new(32, 32, 4.0 * PI, 4.0 * PI).unwrap();
        let mut f = SpectralField::zeros(g);
        for (kx, ky, a) in [
            (0, 0, 0.3),
            (1, 2, 0.5),
            (3, -3, 0.7),
            (-5, 2, 0.2),
            (7, 6, 0.4),
            (2, -2, 0.1),
        ] {
            f.set_real_mode(kx, ky, Complex64::new(a, -0.5 * a)).unwrap();
        }
        f
    }

    #[test]
    fn bump_shape() {
        assert_eq!(chi(0.0), 1.0);
        assert_eq!(chi(1.0), 1.0);
        assert_eq!(chi(-2.0), 0.0);
        assert!(chi(1.5) > 0.0 && chi(1.5) < 1.0);
        assert!((chi(1.5) - 0.5).abs() < 1e-15);
        assert_eq!(phi(0.5), 0.0);
        assert_eq!(phi(1.0), 1.0);
        assert_eq!(phi(2.0), 0.0);
        for i in 0..400 {
            let t = -4.0 + 0.02 * i as f64;
            assert!((0.0..=1.0).contains(&chi(t)));
            assert!(phi(t) >= 0.0);
        }
    }

    #[test]
    fn partition_of_unity_on_grid_values() {
        let g = GridSpec::new(256, 256, 64.0 * PI, 64.0 * PI).unwrap();
        for ix in 1..g.nx {
            let t = g.freq(ix, 0).0;
            let sum: f64 = (-12..14).map(|e| phi_dyad(t, e)).sum();
            assert!((sum - 1.0).abs() < 1e-12, "t = {t}: {sum}");
            let [a, b] = candidate_dyads(t);
            assert!((phi_dyad(t, a) + phi_dyad(t, b) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_weights_sum_to_one() {
        for floor in [-5, -2, 0, 3] {
            for i in 0..2000 {
                let t = i as f64 * 0.013;
                let (w, n) = closed_weights(t, floor);
                let s: f64 = w[..n].iter().map(|p| p.1).sum();
                assert!((s - 1.0).abs() < 1e-12, "t={t} floor={floor}");
            }
        }
    }

    #[test]
    fn pnm_reconstructs_off_antidiagonal() {
        let f = field();
        let mut sum = SpectralField::zeros(*f.grid());
        for n in -3..8 {
            for m in -3..9 {
                sum = sum.add(&project_pnm(&f, n, m)).unwrap();
            }
        }
        let expected = f.map_modes(|xi, eta, c| {
            if (xi + eta).abs() < 1e-12 {
                Complex64::default()
            } else {
                c
            }
        });
        assert!(sum.sub(&expected).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn pnm_single_mode_support() {
        let g = GridSpec::new(16, 16, 2.0 * PI, 2.0 * PI).unwrap();
        let mut f = SpectralField::zeros(g);
        f.set(1, 1, Complex64::new(1.0, 0.0)).unwrap();
        for n in -3..6 {
            for m in -3..6 {
                let p = project_pnm(&f, n, m).get(1, 1).norm();
                let expected = phi(2f64.sqrt() / dyad(n)) * phi(2.0 / dyad(m));
                assert!((p - expected).abs() < 1e-15);
                if p > 0.0 {
                    assert!(n == 0 || n == 1, "N = 2^{n}");
                    assert_eq!(m, 1);
                }
            }
        }
    }

    #[test]
    fn pnm_kills_antidiagonal_data() {
        let g = GridSpec::new(16, 16, 2.0 * PI, 2.0 * PI).unwrap();
        let mut f = SpectralField::zeros(g);
        f.set_real_mode(3, -3, Complex64::new(1.0, 0.0)).unwrap();
        for n in -2..6 {
            for m in 2..6 {
                assert_eq!(project_pnm(&f, n, m).max_abs(), 0.0);
            }
        }
    }

    #[test]
    fn sobolev_norms() {
        let f = field();
        assert!((hs_norm(&f, 0.0) / f.l2_norm() - 1.0).abs() < 1e-12);
        let g = GridSpec::new(16, 16, 2.0 * PI, 2.0 * PI).unwrap();
        let mut one = SpectralField::zeros(g);
        one.set(1, 1, Complex64::new(0.8, 0.0)).unwrap();
        let expected = bracket(2f64.sqrt()) * 0.8 * g.spectral_weight().sqrt();
        assert!((hs_norm(&one, 1.0) - expected).abs() < 1e-14);
        assert!(matches!(
            norm(NormInput::Field(&one), NormSpec::new(NormFamily::Xsb1, 0.0)),
            Err(ZkbError::UnsupportedNorm(_))
        ));
    }

    #[test]
    fn ql_reconstruction_and_resolution() {
        let f0 = field();
        let g = *f0.grid();
        let st = SpaceTimeField::from_fn(g, 0.0, 2.0, 64, |t| apply_w(&f0, t).scale((PI * t).sin())).unwrap();
        let floor = (st.tau_spacing() * 4.0).log2().ceil() as i32;
        let mut acc = project_ql_low(&st, floor).unwrap();
        for l in floor + 1..floor + 12 {
            acc = SpaceTimeField::new(
                acc.frames()
                    .iter()
                    .zip(project_ql(&st, l).unwrap().frames())
                    .map(|(a, b)| a.add(b).unwrap())
                    .collect(),
                0.0,
                2.0,
            )
            .unwrap();
        }
        assert!(acc.sub(&st).unwrap().l2_norm() / st.l2_norm() < 1e-10);
        assert!(matches!(project_ql(&st, 0), Err(ZkbError::UnresolvedModulation { .. })));
    }

    #[test]
    fn modulated_free_solution_concentrates_at_lambda() {
        let f0 = field();
        let g = *f0.grid();
        let lambda = 40.0 * PI; // a τ grid point for the window [0, 1]
        let st = SpaceTimeField::from_fn(g, 0.0, 1.0, 256, |t| {
            apply_u(&f0, t).scale_complex(Complex64::from_polar(1.0, lambda * t))
        })
        .unwrap();
        let e = |l: i32| project_ql(&st, l).unwrap().norm_sq();
        let total = st.norm_sq();
        let near = e(6) + e(7);
        assert!(near / total > 0.999, "{}", near / total);
    }

    #[test]
    fn restriction_norm_of_zero_and_block_total() {
        let g = GridSpec::new(16, 16, 2.0 * PI, 2.0 * PI).unwrap();
        let z = SpaceTimeField::from_fn(g, 0.0, 1.0, 16, |_| SpectralField::zeros(g)).unwrap();
        assert_eq!(
            norm(NormInput::SpaceTime(&z), NormSpec::new(NormFamily::Xsb1, 0.3)).unwrap(),
            0.0
        );
        let f0 = field();
        let st = SpaceTimeField::from_fn(*f0.grid(), 0.0, 2.0, 32, |t| apply_w(&f0, t)).unwrap();
        let floors = ShellFloors::for_grid(st.grid(), st.tau_spacing());
        // block energies overcount by at most the overlap factor and at least 1/2^3
        let total = block_energies(&st, floors).total();
        assert!(total <= st.norm_sq() * (1.0 + 1e-12) && total >= st.norm_sq() / 8.0);
    }
}
