//! Spectral representation of real fields on the periodic grid.
//!
//! Coefficients approximate the continuous Fourier transform on the plane,
//! `c(k) = (lx·ly)/(nx·ny) · Σ_j v(x_j) e^{−i k·x_j}`, so that
//! `‖v‖²_{L²} = (1/(lx·ly)) Σ_k |c(k)|²` holds exactly for the grid quadrature.

use num_complex::Complex64;

use crate::error::{Result, ZkbError};
use crate::exec;
use crate::fft;
use crate::grid::GridSpec;

/// Tolerance on the relative Hermitian defect accepted by [`to_physical`].
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

#[inline]
fn checkerboard(ix: usize, iy: usize) -> f64 {
    if (ix + iy).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        SpectralField {
            grid,
            coeffs: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn from_coeffs(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(ZkbError::DimensionMismatch {
                expected: (grid.nx, grid.ny),
                got: (coeffs.len(), 1),
            });
        }
        Ok(SpectralField { grid, coeffs })
    }

    /// Builds coefficients directly from a function of the frequency `(ξ, η)`.
    pub fn from_fn<F>(grid: GridSpec, f: F) -> Self
    where
        F: Fn(f64, f64) -> Complex64 + Sync + Send,
    {
        let coeffs = exec::map_range(grid.len(), |i| {
            let (xi, eta) = grid.freq(i / grid.ny, i % grid.ny);
            f(xi, eta)
        });
        SpectralField { grid, coeffs }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of signed wavenumber `(kx, ky)`; zero if not on the grid.
    pub fn get(&self, kx: i64, ky: i64) -> Complex64 {
        match (GridSpec::slot(kx, self.grid.nx), GridSpec::slot(ky, self.grid.ny)) {
            (Some(ix), Some(iy)) => self.coeffs[self.grid.index(ix, iy)],
            _ => Complex64::default(),
        }
    }

    pub fn set(&mut self, kx: i64, ky: i64, value: Complex64) -> Result<()> {
        match (GridSpec::slot(kx, self.grid.nx), GridSpec::slot(ky, self.grid.ny)) {
            (Some(ix), Some(iy)) => {
                let i = self.grid.index(ix, iy);
                self.coeffs[i] = value;
                Ok(())
            }
            _ => Err(ZkbError::OutOfBand(format!("mode ({kx}, {ky}) not on grid"))),
        }
    }

    /// Sets `(kx, ky)` and its mirror so the field stays real.
    pub fn set_real_mode(&mut self, kx: i64, ky: i64, value: Complex64) -> Result<()> {
        self.set(kx, ky, value)?;
        if kx == 0 && ky == 0 {
            self.set(0, 0, Complex64::new(value.re, 0.0))
        } else {
            self.set(-kx, -ky, value.conj())
        }
    }

    #[inline]
    pub fn partner(&self, i: usize) -> usize {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let (ix, iy) = (i / ny, i % ny);
        ((nx - ix) % nx) * ny + (ny - iy) % ny
    }

    pub fn norm_sq(&self) -> f64 {
        let parts: Vec<f64> = self.coeffs.iter().map(|c| c.norm_sqr()).collect();
        exec::pairwise_sum(&parts) * self.grid.spectral_weight()
    }

    /// Discrete L² norm.
    pub fn l2_norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()))
    }

    /// `max_k |c(k) − conj c(−k)|`, relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for i in 0..self.coeffs.len() {
            let j = self.partner(i);
            worst = worst.max((self.coeffs[i] - self.coeffs[j].conj()).norm());
        }
        worst / scale
    }

    /// Projects onto Hermitian-symmetric coefficients.
    pub fn symmetrize_hermitian(&mut self) {
        let old = self.coeffs.clone();
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            let j = {
                let (nx, ny) = (self.grid.nx, self.grid.ny);
                let (ix, iy) = (i / ny, i % ny);
                ((nx - ix) % nx) * ny + (ny - iy) % ny
            };
            *c = 0.5 * (old[i] + old[j].conj());
        }
    }

    /// Applies `f(ξ, η, c)` to every coefficient without validation.
    pub fn map_modes<F>(&self, f: F) -> SpectralField
    where
        F: Fn(f64, f64, Complex64) -> Complex64 + Sync + Send,
    {
        let g = self.grid;
        let coeffs = exec::map_range(g.len(), |i| {
            let (xi, eta) = g.freq(i / g.ny, i % g.ny);
            f(xi, eta, self.coeffs[i])
        });
        SpectralField { grid: g, coeffs }
    }

    /// Multiplies every coefficient by `m(ξ, η)`.
    ///
    /// Fails if `m` is not finite at a mode carrying a nonzero coefficient.
    pub fn apply_multiplier<F>(&self, m: F) -> Result<SpectralField>
    where
        F: Fn(f64, f64) -> Complex64 + Sync + Send,
    {
        let g = self.grid;
        let out: Vec<std::result::Result<Complex64, usize>> = exec::map_range(g.len(), |i| {
            let c = self.coeffs[i];
            if c == Complex64::default() {
                return Ok(c);
            }
            let (xi, eta) = g.freq(i / g.ny, i % g.ny);
            let v = m(xi, eta);
            if v.re.is_finite() && v.im.is_finite() {
                Ok(c * v)
            } else {
                Err(i)
            }
        });
        let mut coeffs = Vec::with_capacity(out.len());
        for r in out {
            match r {
                Ok(c) => coeffs.push(c),
                Err(i) => {
                    return Err(ZkbError::NonFiniteMultiplier {
                        kx: g.kx(i / g.ny),
                        ky: g.ky(i % g.ny),
                    })
                }
            }
        }
        Ok(SpectralField { grid: g, coeffs })
    }

    /// Zeroes every mode outside the dealiasing band.
    pub fn dealias(&self) -> SpectralField {
        let mut out = self.clone();
        out.dealias_in_place();
        out
    }

    pub fn dealias_in_place(&mut self) {
        let g = self.grid;
        for ix in 0..g.nx {
            for iy in 0..g.ny {
                if !g.in_band(ix, iy) {
                    self.coeffs[g.index(ix, iy)] = Complex64::default();
                }
            }
        }
    }

    pub fn scale(&self, a: f64) -> SpectralField {
        SpectralField {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
        }
    }

    pub fn scale_complex(&self, a: Complex64) -> SpectralField {
        SpectralField {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
        }
    }

    /// `self + a·other`.
    pub fn axpy(&self, a: Complex64, other: &SpectralField) -> Result<SpectralField> {
        self.check_same_grid(other)?;
        Ok(SpectralField {
            grid: self.grid,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| x + a * y).collect(),
        })
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    /// Relative L² distance `‖self − other‖ / ‖other‖`.
    pub fn relative_l2_distance(&self, other: &SpectralField) -> Result<f64> {
        let d = self.sub(other)?.l2_norm();
        let r = other.l2_norm();
        Ok(if r == 0.0 { d } else { d / r })
    }

    pub fn check_same_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid.nx != other.grid.nx || self.grid.ny != other.grid.ny {
            return Err(ZkbError::DimensionMismatch {
                expected: (self.grid.nx, self.grid.ny),
                got: (other.grid.nx, other.grid.ny),
            });
        }
        if !self.grid.same_box(&other.grid) {
            return Err(ZkbError::InvalidGrid("fields live on different boxes".into()));
        }
        Ok(())
    }

    /// Copies coefficients onto another resolution of the same box.
    /// Modes not representable on the target are dropped.
    pub fn resample(&self, target: &GridSpec) -> Result<SpectralField> {
        if !self.grid.same_box(target) {
            return Err(ZkbError::InvalidGrid("resample requires the same box".into()));
        }
        let mut out = SpectralField::zeros(*target);
        for ix in 0..self.grid.nx {
            for iy in 0..self.grid.ny {
                let (kx, ky) = (self.grid.kx(ix), self.grid.ky(iy));
                if let (Some(jx), Some(jy)) = (GridSpec::slot(kx, target.nx), GridSpec::slot(ky, target.ny)) {
                    out.coeffs[target.index(jx, jy)] = self.coeffs[self.grid.index(ix, iy)];
                }
            }
        }
        Ok(out)
    }
}

/// Samples `f(x, y)` on the physical grid (row-major).
pub fn sample_physical<F>(grid: &GridSpec, f: F) -> Vec<f64>
where
    F: Fn(f64, f64) -> f64 + Sync + Send,
{
    exec::map_range(grid.len(), |i| {
        let (x, y) = grid.point(i / grid.ny, i % grid.ny);
        f(x, y)
    })
}

/// Forward transform of real samples with shape `(nx, ny)`.
pub fn to_spectral(grid: &GridSpec, shape: (usize, usize), values: &[f64]) -> Result<SpectralField> {
    if shape != (grid.nx, grid.ny) || values.len() != grid.len() {
        return Err(ZkbError::DimensionMismatch {
            expected: (grid.nx, grid.ny),
            got: shape,
        });
    }
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Ok(forward_complex(grid, &mut data))
}

/// Forward transform of complex samples (consumes the buffer).
pub(crate) fn forward_complex(grid: &GridSpec, data: &mut Vec<Complex64>) -> SpectralField {
    fft::fft_2d(data, grid.nx, grid.ny, false);
    let q = grid.cell_area();
    let ny = grid.ny;
    exec::for_each_chunk_mut(data, ny, |ix, row| {
        for (iy, c) in row.iter_mut().enumerate() {
            *c *= q * checkerboard(ix, iy);
        }
    });
    SpectralField {
        grid: *grid,
        coeffs: std::mem::take(data),
    }
}

/// Inverse transform without the symmetry check; returns complex samples.
pub fn to_physical_complex(f: &SpectralField) -> Vec<Complex64> {
    let g = f.grid;
    let mut data = f.coeffs.clone();
    let w = g.spectral_weight();
    exec::for_each_chunk_mut(&mut data, g.ny, |ix, row| {
        for (iy, c) in row.iter_mut().enumerate() {
            *c *= w * checkerboard(ix, iy);
        }
    });
    fft::fft_2d(&mut data, g.nx, g.ny, true);
    data
}

/// Inverse transform of a Hermitian field to real samples.
pub fn to_physical(f: &SpectralField) -> Result<Vec<f64>> {
    let defect = f.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(ZkbError::NotHermitian {
            defect,
            tol: HERMITIAN_TOL,
        });
    }
    Ok(to_physical_complex(f).into_iter().map(|c| c.re).collect())
}

/// Pointwise product on the grid followed by dealiasing (the production path).
pub fn product_dealiased(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    f.check_same_grid(g)?;
    let a = to_physical_complex(f);
    let b = to_physical_complex(g);
    let mut p: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    let mut out = forward_complex(&f.grid, &mut p);
    out.dealias_in_place();
    Ok(out)
}

/// Product evaluated on a grid of twice the resolution, so no aliasing occurs
/// for inputs supported in `|k| < n/2`; the result is truncated back.
pub fn product_padded(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    f.check_same_grid(g)?;
    let fine = f.grid.resized(2 * f.grid.nx, 2 * f.grid.ny)?;
    let a = to_physical_complex(&f.resample(&fine)?);
    let b = to_physical_complex(&g.resample(&fine)?);
    let mut p: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    forward_complex(&fine, &mut p).resample(&f.grid)
}
