//! Cut-tail points of Hurwitz matrices.
//!
//! The cut-tail point `T_cut(A)` is the moment after which the trajectory of
//! `ẋ = Ax` stays in the interior of the symmetrized convex hull of its
//! initial arc. It is computed here by solving, for each trial `T`, the
//! minimax problem
//!
//! ```text
//! minimize ‖p‖_{C[0,T]}  subject to  p(T) = 1,  p ∈ P_A
//! ```
//!
//! over the quasipolynomials spanned by the coordinates of `e^{tA}x`. Its
//! value equals one exactly when `T ≤ T_cut`, so `T_cut` is located by
//! bisection on that predicate.

pub mod catalog;
pub mod chebexchange;
pub mod cuttail;
pub mod error;
pub mod geometry2d;
pub mod matrix;
pub mod quasipoly;
mod roots;
pub mod spectra;
pub mod switchsim;

pub use error::{Error, Result};
pub use matrix::RealMatrix;
pub use spectra::{SpectralComponent, Spectrum};
