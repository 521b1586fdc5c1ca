//! Change of variables between the original ZKB frame and the symmetric frame,
//! `v(t, x, y) = 4 u(16 t, 2(x + y), 2(x − y)/√3)`.
//!
//! The map is realised on Fourier coefficients. Writing `A` for the spatial
//! matrix, a `v`-frequency `k` corresponds to the `u`-frequency `A^{−T} k`,
//! and for box-periodic fields
//! `c_v(k) = 4 · |B_v| / |B_u| · c_u(A^{−T} k)`,
//! where `|B|` is the area of the periodic box.
//!
//! A square `v`-box of side `L` pairs with the `u`-box `(2L, 2L/√3)`: the
//! `u`-mode `(m, n)` lands on the `v`-mode `(m + n, m − n)`. Because `A`
//! maps the square onto two copies of that rectangle, a bump in the `u`-box
//! appears twice in the `v`-box and only even-parity `v`-modes are populated.
//! Fields with odd-parity content go back to the doubled box `(4L, 4L/√3)`.

use num_complex::Complex64;

use crate::error::{Result, ZkbError};
use crate::grid::{rel_eq, GridSpec};
use crate::spectral::SpectralField;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Coefficients below this fraction of the field maximum may be dropped.
const NEGLIGIBLE: f64 = 1e-13;

/// The fixed linear map between the two frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameMap {
    pub matrix: [[f64; 2]; 2],
    pub amplitude: f64,
    pub time_factor: f64,
}

impl Default for FrameMap {
    fn default() -> Self {
        FrameMap {
            matrix: [[2.0, 2.0], [2.0 / SQRT3, -2.0 / SQRT3]],
            amplitude: 4.0,
            time_factor: 16.0,
        }
    }
}

impl FrameMap {
    pub fn det(&self) -> f64 {
        let a = self.matrix;
        a[0][0] * a[1][1] - a[0][1] * a[1][0]
    }

    /// `(x, y) ↦ A (x, y)`.
    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        let a = self.matrix;
        (a[0][0] * x + a[0][1] * y, a[1][0] * x + a[1][1] * y)
    }

    /// Symmetric-frame frequency to original-frame frequency, `A^{−T} k`.
    pub fn to_original_freq(&self, xi: f64, eta: f64) -> (f64, f64) {
        let a = self.matrix;
        let d = self.det();
        // A^{-T} = (1/det) [[a11, -a10], [-a01, a00]]
        ((a[1][1] * xi - a[1][0] * eta) / d, (-a[0][1] * xi + a[0][0] * eta) / d)
    }

    /// Original-frame frequency to symmetric-frame frequency, `Aᵀ k`.
    pub fn to_symmetric_freq(&self, xi: f64, eta: f64) -> (f64, f64) {
        let a = self.matrix;
        (a[0][0] * xi + a[1][0] * eta, a[0][1] * xi + a[1][1] * eta)
    }
}

/// The time factor `16`: the symmetric-frame solution at time `t` equals
/// (up to the spatial map) the original-frame solution at time `16 t`, so
/// this sends a symmetric-frame duration to the matching original-frame one.
pub fn map_time(t: f64) -> f64 {
    FrameMap::default().time_factor * t
}

/// Inverse of [`map_time`]: original-frame time to symmetric-frame time.
pub fn unmap_time(t_original: f64) -> f64 {
    t_original / FrameMap::default().time_factor
}

fn lattice_index(freq: f64, spacing: f64) -> Option<i64> {
    let k = freq / spacing;
    let r = k.round();
    ((k - r).abs() < 1e-8).then_some(r as i64)
}

/// Moves every coefficient of `src` to the `target` slot at `map(ξ, η)`.
fn remap<F>(src: &SpectralField, target: GridSpec, factor: f64, map: F) -> Result<SpectralField>
where
    F: Fn(f64, f64) -> (f64, f64),
{
    let g = *src.grid();
    let floor = NEGLIGIBLE * src.max_abs();
    let mut out = SpectralField::zeros(target);
    for ix in 0..g.nx {
        for iy in 0..g.ny {
            let c = src.coeffs()[g.index(ix, iy)];
            if c == Complex64::default() {
                continue;
            }
            let (xi, eta) = g.freq(ix, iy);
            let (txi, teta) = map(xi, eta);
            let slot = match (lattice_index(txi, target.dxi()), lattice_index(teta, target.deta())) {
                (Some(kx), Some(ky)) => GridSpec::slot(kx, target.nx).zip(GridSpec::slot(ky, target.ny)),
                _ => None,
            };
            match slot {
                Some((jx, jy)) => out.coeffs_mut()[target.index(jx, jy)] = factor * c,
                None if c.norm() <= floor => {}
                None => {
                    return Err(ZkbError::OutOfBand(format!(
                        "mode ({}, {}) maps outside the target grid",
                        g.kx(ix),
                        g.ky(iy)
                    )))
                }
            }
        }
    }
    Ok(out)
}

fn box_area(g: &GridSpec) -> f64 {
    g.lx * g.ly
}

/// Symmetric-frame grid paired with an original-frame grid `(2L, 2L/√3)`.
pub fn symmetric_grid_for(u_grid: &GridSpec) -> Result<GridSpec> {
    if !rel_eq(u_grid.ly * SQRT3, u_grid.lx) {
        return Err(ZkbError::InvalidGrid(format!(
            "original-frame box must satisfy ly = lx/√3, got ({}, {})",
            u_grid.lx, u_grid.ly
        )));
    }
    let l = 0.5 * u_grid.lx;
    let n = (u_grid.nx + u_grid.ny).next_power_of_two();
    GridSpec::with_dealias(n, n, l, l, u_grid.dealias_fraction)
}

/// `v0(x, y) = 4 u0(2(x + y), 2(x − y)/√3)` on the paired square box.
pub fn symmetrize_data(u0: &SpectralField) -> Result<SpectralField> {
    let target = symmetric_grid_for(u0.grid())?;
    symmetrize_onto(u0, target)
}

/// As [`symmetrize_data`] with an explicit target grid.
pub fn symmetrize_onto(u0: &SpectralField, target: GridSpec) -> Result<SpectralField> {
    let m = FrameMap::default();
    let factor = m.amplitude * box_area(&target) / box_area(u0.grid());
    remap(u0, target, factor, |xi, eta| m.to_symmetric_freq(xi, eta))
}

/// Inverse of [`symmetrize_data`]. The output box is `(2L, 2L/√3)` when only
/// even-parity modes are present and `(4L, 4L/√3)` otherwise.
pub fn desymmetrize_data(v0: &SpectralField) -> Result<SpectralField> {
    let g = *v0.grid();
    if !rel_eq(g.lx, g.ly) {
        return Err(ZkbError::InvalidGrid("symmetric-frame box must be square".into()));
    }
    let floor = NEGLIGIBLE * v0.max_abs();
    let mut odd = false;
    for ix in 0..g.nx {
        for iy in 0..g.ny {
            if (g.kx(ix) + g.ky(iy)).rem_euclid(2) == 1 && v0.coeffs()[g.index(ix, iy)].norm() > floor {
                odd = true;
            }
        }
    }
    let (scale, n) = if odd { (4.0, 2 * g.nx) } else { (2.0, g.nx) };
    let target = GridSpec::with_dealias(n, n, scale * g.lx, scale * g.lx / SQRT3, g.dealias_fraction)?;
    desymmetrize_onto(v0, target)
}

/// As [`desymmetrize_data`] with an explicit target grid.
pub fn desymmetrize_onto(v0: &SpectralField, target: GridSpec) -> Result<SpectralField> {
    let m = FrameMap::default();
    let factor = box_area(&target) / (m.amplitude * box_area(v0.grid()));
    remap(v0, target, factor, |xi, eta| m.to_original_freq(xi, eta))
}

/// Applies [`symmetrize_onto`] frame by frame; original-frame times map
/// through [`unmap_time`].
pub fn symmetrize_trajectory(
    times: &[f64],
    frames: &[SpectralField],
    target: GridSpec,
) -> Result<(Vec<f64>, Vec<SpectralField>)> {
    let fs = frames
        .iter()
        .map(|f| symmetrize_onto(f, target))
        .collect::<Result<Vec<_>>>()?;
    Ok((times.iter().map(|&t| unmap_time(t)).collect(), fs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{sample_physical, to_physical, to_spectral};
    use std::f64::consts::PI;

    fn u_grid(n: usize) -> GridSpec {
        let l = 16.0 * PI;
        GridSpec::new(n, n, 2.0 * l, 2.0 * l / SQRT3).unwrap()
    }

    fn gaussian(g: &GridSpec, amp: f64, s: f64) -> SpectralField {
        let v = sample_physical(g, |x, y| amp * (-(x * x + 2.0 * y * y) / (2.0 * s * s)).exp());
        to_spectral(g, (g.nx, g.ny), &v).unwrap()
    }

    #[test]
    fn matrix_facts() {
        let m = FrameMap::default();
        assert!((m.det() + 8.0 / SQRT3).abs() < 1e-14);
        assert_eq!(m.apply(1.0, 1.0), (4.0, 0.0));
        let (a, b) = m.to_original_freq(1.0, 0.0);
        assert!((a - 0.25).abs() < 1e-15 && (b - SQRT3 / 4.0).abs() < 1e-15);
        let (x, y) = m.to_symmetric_freq(a, b);
        assert!((x - 1.0).abs() < 1e-15 && y.abs() < 1e-15);
    }

    #[test]
    fn times() {
        assert_eq!(map_time(0.0), 0.0);
        assert_eq!(map_time(1.0), 16.0);
        assert_eq!(map_time(0.25), 4.0);
        assert_eq!(unmap_time(4.0), 0.25);
    }

    #[test]
    fn constants_scale_by_four() {
        let g = u_grid(16);
        let u = to_spectral(&g, (16, 16), &vec![0.7; g.len()]).unwrap();
        let v = symmetrize_data(&u).unwrap();
        let vals = to_physical(&v).unwrap();
        assert!(vals.iter().all(|x| (x - 2.8).abs() < 1e-12));
        let back = desymmetrize_data(&v).unwrap();
        assert!(to_physical(&back).unwrap().iter().all(|x| (x - 0.7).abs() < 1e-12));
    }

    #[test]
    fn pointwise_agreement_and_peak() {
        let g = u_grid(64);
        let u = gaussian(&g, 1.3, 4.0);
        let v = symmetrize_data(&u).unwrap();
        let vg = *v.grid();
        let vals = to_physical(&v).unwrap();
        let m = FrameMap::default();
        let mut worst = 0.0f64;
        let mut peak = 0.0f64;
        for jx in 0..vg.nx {
            for jy in 0..vg.ny {
                let (x, y) = vg.point(jx, jy);
                let (a, b) = m.apply(x, y);
                // periodic images of the bump in the original box
                let mut exact = 0.0;
                for px in -2..=2 {
                    for py in -2..=2 {
                        let (aa, bb) = (a + px as f64 * g.lx, b + py as f64 * g.ly);
                        exact += 4.0 * 1.3 * (-(aa * aa + 2.0 * bb * bb) / 32.0).exp();
                    }
                }
                let got = vals[vg.index(jx, jy)];
                worst = worst.max((got - exact).abs());
                peak = peak.max(got);
            }
        }
        assert!(worst < 1e-10, "worst {worst}");
        assert!((peak / 1.3 - 4.0).abs() < 1e-10);
    }

    #[test]
    fn l2_substitution_rule_per_copy() {
        let g = u_grid(64);
        let u = gaussian(&g, 1.0, 4.0);
        let v = symmetrize_data(&u).unwrap();
        // the square box holds two copies of the image cell
        let per_copy = (v.norm_sq() / 2.0).sqrt();
        let det = 8.0 / SQRT3;
        assert!((per_copy / (4.0 * det.powf(-0.5) * u.l2_norm()) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn round_trips() {
        let g = u_grid(32);
        let u = gaussian(&g, 1.0, 3.0);
        let back = desymmetrize_data(&symmetrize_data(&u).unwrap())
            .unwrap()
            .resample(&g)
            .unwrap();
        assert!(back.relative_l2_distance(&u).unwrap() < 1e-10);

        let vg = GridSpec::new(32, 32, 8.0 * PI, 8.0 * PI).unwrap();
        let mut v = SpectralField::zeros(vg);
        for (kx, ky, c) in [(1, 0, 0.3), (2, 3, -0.5), (0, 5, 0.1), (-4, 1, 0.8)] {
            v.set_real_mode(kx, ky, Complex64::new(c, 0.5 * c)).unwrap();
        }
        let u = desymmetrize_data(&v).unwrap();
        assert!(rel_eq(u.grid().lx, 4.0 * vg.lx));
        let again = symmetrize_onto(&u, vg).unwrap();
        assert!(again.relative_l2_distance(&v).unwrap() < 1e-10);
    }

    #[test]
    fn rejects_mismatched_boxes_and_overflow() {
        let g = GridSpec::new(16, 16, 1.0, 1.0).unwrap();
        assert!(symmetrize_data(&SpectralField::zeros(g)).is_err());
        let u = gaussian(&u_grid(32), 1.0, 1.0);
        let small = symmetric_grid_for(&u_grid(32)).unwrap().resized(16, 16).unwrap();
        assert!(matches!(symmetrize_onto(&u, small), Err(ZkbError::OutOfBand(_))));
    }
}
