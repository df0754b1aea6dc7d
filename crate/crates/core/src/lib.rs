//! Doubly periodic Fourier spectral solver for the Kadomtsev–Petviashvili
//! equations
//!
//! ```text
//! u_t + u u_x + u_xxx + lambda d_x^{-1} u_yy = 0,   lambda = -1 (KP-I), +1 (KP-II)
//! ```
//!
//! with cnoidal-wave initial data. Time stepping is ETDRK4 on the diagonal
//! Fourier-space linear part.

pub mod diagnostics;
pub mod elliptic;
pub mod error;
pub mod etd;
pub mod kp;
pub mod spectral;
pub mod waves;

pub use error::{Error, Result};

/// `kappa_c = 3^{-1/4}`, the KP-I transverse stability threshold for the
/// solitary wave.
pub fn kappa_critical() -> f64 {
    3f64.powf(-0.25)
}
