//! Periodic-torus discretisation of the plane.

use std::f64::consts::PI;

use crate::error::{Result, ZkbError};

/// Default box length, 64π in each direction.
pub const DEFAULT_BOX: f64 = 64.0 * PI;

/// Default dealiasing fraction (the 2/3 rule).
pub const DEFAULT_DEALIAS: f64 = 2.0 / 3.0;

/// Sizes and physical periods of a doubly periodic grid.
///
/// Mode `(kx, ky)` with `kx ∈ [−nx/2, nx/2)` has frequency
/// `(ξ, η) = (2π kx / lx, 2π ky / ly)`. Arrays are row-major in `(ix, iy)`
/// with `iy` contiguous and indices in FFT order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub dealias_fraction: f64,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        Self::with_dealias(nx, ny, lx, ly, DEFAULT_DEALIAS)
    }

    pub fn with_dealias(nx: usize, ny: usize, lx: f64, ly: f64, dealias_fraction: f64) -> Result<Self> {
        for (name, n) in [("nx", nx), ("ny", ny)] {
            if n < 16 || !n.is_power_of_two() {
                return Err(ZkbError::InvalidGrid(format!(
                    "{name} = {n} must be a power of two >= 16"
                )));
            }
        }
        if !(lx > 0.0 && lx.is_finite() && ly > 0.0 && ly.is_finite()) {
            return Err(ZkbError::InvalidGrid(format!(
                "box lengths must be positive, got lx = {lx}, ly = {ly}"
            )));
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(ZkbError::InvalidGrid(format!(
                "dealias fraction {dealias_fraction} not in (0, 1]"
            )));
        }
        Ok(GridSpec {
            nx,
            ny,
            lx,
            ly,
            dealias_fraction,
        })
    }

    /// Square grid on the default 64π box.
    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n, DEFAULT_BOX, DEFAULT_BOX)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        ix * self.ny + iy
    }

    /// Signed wavenumber of FFT index `i` on an axis of `n` points.
    #[inline]
    pub fn wavenumber(i: usize, n: usize) -> i64 {
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// FFT index of signed wavenumber `k`, if representable.
    #[inline]
    pub fn slot(k: i64, n: usize) -> Option<usize> {
        let half = (n / 2) as i64;
        if k < -half || k >= half {
            None
        } else if k >= 0 {
            Some(k as usize)
        } else {
            Some((k + n as i64) as usize)
        }
    }

    #[inline]
    pub fn kx(&self, ix: usize) -> i64 {
        Self::wavenumber(ix, self.nx)
    }

    #[inline]
    pub fn ky(&self, iy: usize) -> i64 {
        Self::wavenumber(iy, self.ny)
    }

    #[inline]
    pub fn dxi(&self) -> f64 {
        2.0 * PI / self.lx
    }

    #[inline]
    pub fn deta(&self) -> f64 {
        2.0 * PI / self.ly
    }

    /// Physical frequency `(ξ, η)` of array slot `(ix, iy)`.
    #[inline]
    pub fn freq(&self, ix: usize, iy: usize) -> (f64, f64) {
        (self.kx(ix) as f64 * self.dxi(), self.ky(iy) as f64 * self.deta())
    }

    /// Frequencies for every slot, row-major.
    pub fn frequencies(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.len());
        for ix in 0..self.nx {
            for iy in 0..self.ny {
                out.push(self.freq(ix, iy));
            }
        }
        out
    }

    /// Physical coordinate of grid point `(jx, jy)`; the box is centred on the origin.
    #[inline]
    pub fn point(&self, jx: usize, jy: usize) -> (f64, f64) {
        (
            -0.5 * self.lx + jx as f64 * self.lx / self.nx as f64,
            -0.5 * self.ly + jy as f64 * self.ly / self.ny as f64,
        )
    }

    /// Quadrature weight of one physical grid point, `lx·ly/(nx·ny)`.
    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.lx * self.ly / (self.nx * self.ny) as f64
    }

    /// Weight turning `Σ|coeff|²` into the squared L² norm, `1/(lx·ly)`.
    #[inline]
    pub fn spectral_weight(&self) -> f64 {
        1.0 / (self.lx * self.ly)
    }

    /// Whether slot `(ix, iy)` survives dealiasing.
    #[inline]
    pub fn in_band(&self, ix: usize, iy: usize) -> bool {
        let cx = self.dealias_fraction * (self.nx / 2) as f64;
        let cy = self.dealias_fraction * (self.ny / 2) as f64;
        (self.kx(ix).abs() as f64) <= cx && (self.ky(iy).abs() as f64) <= cy
    }

    /// Whether slot `(ix, iy)` lies on a Nyquist row or column.
    #[inline]
    pub fn is_nyquist(&self, ix: usize, iy: usize) -> bool {
        ix == self.nx / 2 || iy == self.ny / 2
    }

    /// Same box, different resolution.
    pub fn resized(&self, nx: usize, ny: usize) -> Result<Self> {
        Self::with_dealias(nx, ny, self.lx, self.ly, self.dealias_fraction)
    }

    /// Whether two grids share the box (and hence the frequency lattice).
    pub fn same_box(&self, other: &GridSpec) -> bool {
        rel_eq(self.lx, other.lx) && rel_eq(self.ly, other.ly)
    }
}

pub(crate) fn rel_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}
