//! Null holomorphic discs in ℂⁿ, conformal minimal discs in ℝⁿ, approximate
//! Riemann–Hilbert deformations and the boundary pushes built on them.

pub mod error;
pub mod fft;
pub mod series;
pub mod nullquad;
pub mod weierstrass;
pub mod rhsolver;
pub mod boost;
pub mod convexshell;
pub mod geometry;
pub mod presets;
pub mod pipeline;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
