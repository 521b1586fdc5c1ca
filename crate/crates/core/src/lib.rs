//! Pseudo-spectral simulation and Fourier-restriction-norm toolkit for the
//! two dimensional Zakharov–Kuznetsov–Burgers equation
//!
//! ```text
//! ∂t u + ∂x(∂x² + ∂y²)u − ∂x² u = ∂x(u²)
//! ```
//!
//! and its symmetric form
//!
//! ```text
//! ∂t v + (∂x³ + ∂y³)v − (∂x + ∂y)² v = (∂x + ∂y)(v²).
//! ```
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`], [`spectral`], [`snapshot`]: periodic discretisation, transforms, file format.
//! * [`symmetry`]: the exact linear change of variables between the two frames.
//! * [`propagators`]: the free group `U(t)`, the dissipative semigroup `W(t)` and the Duhamel operator.
//! * [`solver`]: ETDRK4 / IFRK4 time stepping with dissipation diagnostics.
//! * [`spacetime`], [`dyadic`]: Littlewood–Paley projections and Besov-type Bourgain norms.
//! * [`lab`]: randomized bounded-ratio experiments for the linear, Duhamel, bilinear and Strichartz estimates.
//! * [`counterexample`]: the second Picard iterate on slab data and its growth exponent.
//! * [`config`], [`runner`]: the `zkb` command line.
//!
//! Data-parallel loops go through [`exec`], which uses rayon when the
//! `parallel` feature is enabled and runs sequentially otherwise.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod counterexample;
pub mod dyadic;
pub mod error;
pub mod exec;
pub mod fft;
pub mod grid;
pub mod lab;
pub mod propagators;
pub mod quadrature;
pub mod runner;
pub mod snapshot;
pub mod solver;
pub mod spacetime;
pub mod spectral;
pub mod symmetry;

pub use error::{Result, ZkbError};
pub use grid::GridSpec;
pub use num_complex::Complex64;
pub use spacetime::SpaceTimeField;
pub use spectral::SpectralField;
