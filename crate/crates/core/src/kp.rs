//! Fourier-space right-hand side of
//! `u_t + u u_x + u_xxx + lambda d_x^{-1} u_yy = 0`.
//!
//! The semi-discrete system is `d/dt U = L U + N(U)` with the diagonal symbol
//! `L = i (xi_x^3 - lambda xi_y^2 / xi_x)` and `N(U) = -(i xi_x / 2) F[u^2]`.
//! The singular multiplier is set to zero on the `xi_x = 0` column.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Error;
use crate::etd::Nonlinear;
use crate::spectral::{dealias_in_place, Fft2d, FftWorkspace, Grid, SpectralField};

/// KP-I (`lambda = -1`) or KP-II (`lambda = +1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Equation {
    Kp1,
    Kp2,
}

impl Equation {
    pub fn lambda(self) -> f64 {
        match self {
            Equation::Kp1 => -1.0,
            Equation::Kp2 => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Equation::Kp1 => "kp1",
            Equation::Kp2 => "kp2",
        }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Equation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "kp1" | "kp-i" | "kpi" => Ok(Equation::Kp1),
            "kp2" | "kp-ii" | "kpii" => Ok(Equation::Kp2),
            other => Err(Error::InvalidParameter(format!(
                "unknown equation '{other}' (expected kp1 or kp2)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KpParams {
    pub equation: Equation,
}

impl KpParams {
    pub fn lambda(&self) -> f64 {
        self.equation.lambda()
    }
}

/// The linear multiplier on the half-spectrum storage layout.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSymbol {
    grid: Grid,
    values: Vec<Complex64>,
}

impl LinearSymbol {
    pub fn new(grid: Grid, p: KpParams) -> Self {
        let lambda = p.lambda();
        let mut values = vec![Complex64::new(0.0, 0.0); grid.spectral_len()];
        values
            .par_chunks_mut(grid.ny())
            .enumerate()
            .for_each(|(px, col)| {
                // xi_x = 0 and the unpaired Nyquist column carry no dynamics.
                if px == 0 || grid.is_x_nyquist(px) {
                    return;
                }
                let xi = grid.xi_x(px);
                for (q, v) in col.iter_mut().enumerate() {
                    let eta = grid.xi_y(q);
                    *v = Complex64::new(0.0, xi * xi * xi - lambda * eta * eta / xi);
                }
            });
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn at(&self, p: usize, q: usize) -> Complex64 {
        self.values[p * self.grid.ny() + q]
    }
}

pub fn linear_symbol(grid: Grid, p: KpParams) -> LinearSymbol {
    LinearSymbol::new(grid, p)
}

/// Pseudospectral `-(1/2) d_x (u^2)`, with optional 2/3-rule dealiasing of
/// the product.
#[derive(Debug, Clone)]
pub struct KpNonlinear {
    fft: Fft2d,
    workspace: FftWorkspace,
    physical: Vec<f64>,
    factor: Vec<f64>,
    dealias: bool,
}

impl KpNonlinear {
    pub fn new(fft: Fft2d, dealias: bool) -> Self {
        let grid = *fft.grid();
        let factor = (0..grid.nx_half())
            .map(|p| {
                if grid.is_x_nyquist(p) {
                    0.0
                } else {
                    -0.5 * grid.xi_x(p)
                }
            })
            .collect();
        Self {
            workspace: fft.workspace(),
            physical: vec![0.0; grid.len()],
            factor,
            dealias,
            fft,
        }
    }

    pub fn grid(&self) -> &Grid {
        self.fft.grid()
    }

    pub fn fft(&self) -> &Fft2d {
        &self.fft
    }

    /// `N(U)` as a new spectral field.
    pub fn evaluate(&mut self, u: &SpectralField) -> SpectralField {
        let mut out = SpectralField::zeros(*self.grid());
        self.apply(u.coeffs(), out.coeffs_mut());
        out
    }
}

impl Nonlinear for KpNonlinear {
    fn apply(&mut self, u: &[Complex64], out: &mut [Complex64]) {
        let ny = self.fft.grid().ny();
        self.fft
            .inverse_into(u, &mut self.physical, &mut self.workspace);
        self.physical.par_iter_mut().for_each(|v| *v *= *v);
        self.fft
            .forward_into(&self.physical, out, &mut self.workspace);
        if self.dealias {
            dealias_in_place(self.fft.grid(), out);
        }
        let factor = &self.factor;
        out.par_chunks_mut(ny).enumerate().for_each(|(p, col)| {
            let f = factor[p];
            for c in col.iter_mut() {
                // c * (i f)
                *c = Complex64::new(-f * c.im, f * c.re);
            }
        });
    }
}

/// `L U + N(U)`.
pub fn rhs(u: &SpectralField, symbol: &LinearSymbol, nonlinear: &mut KpNonlinear) -> SpectralField {
    let mut out = nonlinear.evaluate(u);
    out.coeffs_mut()
        .par_iter_mut()
        .zip(u.coeffs().par_iter().zip(symbol.values().par_iter()))
        .for_each(|(o, (c, l))| *o += l * c);
    out
}
