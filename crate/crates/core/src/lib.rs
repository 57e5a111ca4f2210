//! Numerical spectral geometry on balls and disks.
//!
//! The crate computes the explicitly solvable spectra that control the
//! normalized eigenvalue bounds for Euclidean domains:
//!
//! * weighted Neumann spectra of the unit ball `λ_k(𝔹ᵈ, f(|x|) dx)` by
//!   spherical-harmonic separation and a 1-D finite-element solve per
//!   sector ([`radial`]);
//! * weighted Steklov spectra of the unit disk `σ_k(𝔻², ρ dθ)` through the
//!   Fourier-diagonal Dirichlet-to-Neumann operator ([`disk`]);
//! * the trial-map constructions (equator map, reflections and folds,
//!   measure centering) that turn those model spectra into bounds for
//!   arbitrary domains ([`trial`]);
//! * the sharp constants and margin reports tying it together ([`bounds`]).

pub mod bounds;
pub mod disk;
pub mod eigen;
pub mod error;
pub mod geometry;
pub mod quadrature;
pub mod radial;
pub mod trial;

pub use error::{Error, Result};
pub use geometry::{Dimension, PointMeasure, RadialWeight};
