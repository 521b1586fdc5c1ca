//! Manufactured solutions `v*(t) = e^{−t} g(x, y)` for the forced equation.
//!
//! The default profile is `g = cos(x + y) cos(x − y)`, a trigonometric
//! polynomial that every admissible grid resolves exactly; it isolates the
//! temporal error. [`Manufactured::with_profile`] takes any `2π`-periodic
//! profile and computes the forcing on a fine reference grid, so runs on
//! coarser grids also see the spatial truncation error.

use num_complex::Complex64;

use super::{nonlinearity, Forcing, Mode};
use crate::grid::GridSpec;
use crate::spectral::{sample_physical, to_spectral, SpectralField};

pub struct Manufactured {
    grid: GridSpec,
    mode: Mode,
    profile: SpectralField,
    quad: SpectralField,
}

impl Manufactured {
    /// The grid should be `2π`-periodic in both directions.
    pub fn new(grid: GridSpec, mode: Mode) -> crate::Result<Self> {
        Self::with_profile(grid, mode, |x, y| (x + y).cos() * (x - y).cos())
    }

    /// `reference` should resolve `g` and `g²` to round-off.
    pub fn with_profile<F>(reference: GridSpec, mode: Mode, g: F) -> crate::Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Sync + Send,
    {
        let v = sample_physical(&reference, g);
        let profile = to_spectral(&reference, (reference.nx, reference.ny), &v)?;
        let quad = nonlinearity(&profile, mode);
        Ok(Manufactured {
            grid: reference,
            mode,
            profile,
            quad,
        })
    }

    pub fn reference_grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Exact solution on the reference grid.
    pub fn exact(&self, t: f64) -> SpectralField {
        self.profile.scale((-t).exp())
    }

    /// Exact solution restricted to `grid` (same box).
    pub fn exact_on(&self, t: f64, grid: &GridSpec) -> crate::Result<SpectralField> {
        self.exact(t).resample(grid)
    }
}

impl Forcing for Manufactured {
    /// `∂t v* − λ v* − p F[v*²]`, truncated to `grid`.
    fn at(&self, t: f64, grid: &GridSpec) -> SpectralField {
        let (e1, e2) = ((-t).exp(), (-2.0 * t).exp());
        let mode = self.mode;
        let lin = self
            .profile
            .map_modes(|xi, eta, c| c * e1 * (Complex64::new(-1.0, 0.0) - mode.symbol(xi, eta)));
        let f = lin.axpy(Complex64::new(-e2, 0.0), &self.quad).expect("same grid");
        if (grid.nx, grid.ny) == (self.grid.nx, self.grid.ny) {
            f
        } else {
            f.resample(grid).expect("forcing grid must share the reference box")
        }
    }
}
