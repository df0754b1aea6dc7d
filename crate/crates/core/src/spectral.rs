//! Periodic 2D grid, real/spectral fields and the Fourier transform pair.
//!
//! Conventions:
//!
//! * Physical nodes are `x_i = -pi Lx + i dx` with `dx = 2 pi Lx / Nx`, stored
//!   row-major with `x` fastest (`values[j * Nx + i]`).
//! * Wavenumbers are `xi_x = jx / Lx`, `jx` in `[-Nx/2, Nx/2)`, likewise in `y`.
//! * The forward transform is the plain DFT sum; the inverse carries the
//!   `1 / (Nx Ny)` factor.
//! * A real field is represented by its half spectrum `jx = 0..=Nx/2` (the last
//!   column is the Nyquist mode `jx = -Nx/2`). Coefficients are stored with `y`
//!   contiguous, `coeffs[p * Ny + q]`, and `q` in FFT order.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftPlanner};

use crate::elliptic::{complete_elliptic_k, EllipticModulus};
use crate::error::{Error, Result};

const TRANSPOSE_BLOCK: usize = 32;

/// Uniform doubly periodic grid on `[-pi Lx, pi Lx) x [-pi Ly, pi Ly)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
}

impl Grid {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        for (name, n) in [("Nx", nx), ("Ny", ny)] {
            if n < 4 || n % 2 != 0 {
                return Err(Error::InvalidGrid(format!(
                    "{name} = {n} must be even and at least 4"
                )));
            }
        }
        if !(lx.is_finite() && lx > 0.0 && ly.is_finite() && ly > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "scale factors must be positive, got Lx = {lx}, Ly = {ly}"
            )));
        }
        Ok(Self { nx, ny, lx, ly })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn ly(&self) -> f64 {
        self.ly
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of stored `x` modes in the half spectrum.
    pub fn nx_half(&self) -> usize {
        self.nx / 2 + 1
    }

    pub fn spectral_len(&self) -> usize {
        self.nx_half() * self.ny
    }

    pub fn dx(&self) -> f64 {
        2.0 * PI * self.lx / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        2.0 * PI * self.ly / self.ny as f64
    }

    /// Domain length in `x`, `2 pi Lx`.
    pub fn length_x(&self) -> f64 {
        2.0 * PI * self.lx
    }

    pub fn length_y(&self) -> f64 {
        2.0 * PI * self.ly
    }

    pub fn area(&self) -> f64 {
        self.length_x() * self.length_y()
    }

    /// `x_i`, written as `(i - Nx/2) dx` so that the node set is exactly
    /// symmetric about the origin (apart from the unpaired `-pi Lx`).
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - (self.nx / 2) as f64) * self.dx()
    }

    pub fn y(&self, j: usize) -> f64 {
        (j as f64 - (self.ny / 2) as f64) * self.dy()
    }

    pub fn x_nodes(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn y_nodes(&self) -> Vec<f64> {
        (0..self.ny).map(|j| self.y(j)).collect()
    }

    /// Signed `x` mode number of half-spectrum column `p`.
    pub fn x_mode(&self, p: usize) -> i64 {
        if p == self.nx / 2 {
            -((self.nx / 2) as i64)
        } else {
            p as i64
        }
    }

    /// Signed `y` mode number of FFT-ordered index `q`.
    pub fn y_mode(&self, q: usize) -> i64 {
        if q >= self.ny / 2 {
            q as i64 - self.ny as i64
        } else {
            q as i64
        }
    }

    /// FFT-ordered index of signed `y` mode `jy`.
    pub fn y_index(&self, jy: i64) -> usize {
        jy.rem_euclid(self.ny as i64) as usize
    }

    /// `xi_x` for half-spectrum column `p`.
    pub fn xi_x(&self, p: usize) -> f64 {
        self.x_mode(p) as f64 / self.lx
    }

    /// `xi_y` for FFT-ordered index `q`.
    pub fn xi_y(&self, q: usize) -> f64 {
        self.y_mode(q) as f64 / self.ly
    }

    /// The full `xi_x` lattice, ascending: `jx / Lx` for `jx` in `[-Nx/2, Nx/2)`.
    pub fn xi_x_lattice(&self) -> Vec<f64> {
        let h = (self.nx / 2) as i64;
        (-h..h).map(|j| j as f64 / self.lx).collect()
    }

    pub fn xi_y_lattice(&self) -> Vec<f64> {
        let h = (self.ny / 2) as i64;
        (-h..h).map(|j| j as f64 / self.ly).collect()
    }

    pub fn is_x_nyquist(&self, p: usize) -> bool {
        p == self.nx / 2
    }

    pub fn is_y_nyquist(&self, q: usize) -> bool {
        q == self.ny / 2
    }
}

/// Builds the grid whose `x` extent holds exactly `periods` cnoidal periods
/// `2 K(k) / kappa`, i.e. `Lx = periods K(k) / (pi kappa)`.
pub fn make_grid(
    nx: usize,
    ny: usize,
    kappa: f64,
    k: EllipticModulus,
    periods: u32,
    ly: f64,
) -> Result<Grid> {
    if periods == 0 {
        return Err(Error::InvalidGrid("periods must be at least 1".into()));
    }
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "kappa must be positive, got {kappa}"
        )));
    }
    let lx = periods as f64 * complete_elliptic_k(k) / (PI * kappa);
    Grid::new(nx, ny, lx, ly)
}

/// Samples of a real field on the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid,
    values: Vec<f64>,
}

impl RealField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, values })
    }

    /// Samples `f(x, y)` at every node.
    pub fn from_fn<F>(grid: Grid, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        let mut values = vec![0.0; grid.len()];
        values
            .par_chunks_mut(grid.nx)
            .enumerate()
            .for_each(|(j, row)| {
                let y = grid.y(j);
                for (i, v) in row.iter_mut().enumerate() {
                    *v = f(grid.x(i), y);
                }
            });
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.nx + i]
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j * self.grid.nx..(j + 1) * self.grid.nx]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn add(&self, other: &RealField) -> Result<RealField> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &RealField) -> Result<RealField> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &RealField, f: impl Fn(f64, f64) -> f64) -> Result<RealField> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(RealField {
            grid: self.grid,
            values,
        })
    }
}

/// Half-spectrum Fourier coefficients of a real field.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.spectral_len()],
        }
    }

    pub fn from_coeffs(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.spectral_len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> &Grid {
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

    /// Coefficient at storage position `(p, q)`.
    pub fn at(&self, p: usize, q: usize) -> Complex64 {
        self.coeffs[p * self.grid.ny + q]
    }

    /// Coefficient at any lattice point `(jx, jy)`, using conjugate symmetry
    /// for the modes that are not stored.
    pub fn mode(&self, jx: i64, jy: i64) -> Complex64 {
        let g = &self.grid;
        let hx = (g.nx / 2) as i64;
        assert!((-hx..hx).contains(&jx), "x mode {jx} outside lattice");
        if jx == -hx {
            self.at(g.nx / 2, g.y_index(jy))
        } else if jx >= 0 {
            self.at(jx as usize, g.y_index(jy))
        } else {
            self.at((-jx) as usize, g.y_index(-jy)).conj()
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest violation of `u(-xi) = conj(u(xi))` on the self-conjugate
    /// columns (`jx = 0` and the Nyquist column), relative to the largest
    /// coefficient. The other columns are symmetric by storage.
    pub fn hermitian_defect(&self) -> f64 {
        let g = &self.grid;
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0_f64;
        for p in [0, g.nx / 2] {
            for q in 0..g.ny {
                let partner = g.y_index(-g.y_mode(q));
                let d = (self.at(p, q) - self.at(p, partner).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst / scale
    }

    /// Discrete `x` sums per transverse mode: `u(0, xi_y)` in FFT order.
    pub fn x_mean_profile(&self) -> Vec<Complex64> {
        self.coeffs[..self.grid.ny].to_vec()
    }

    /// Multiplies by `(i xi_x)^order_x (i xi_y)^order_y`. Odd orders zero the
    /// corresponding Nyquist modes.
    pub fn derivative(&self, order_x: u32, order_y: u32) -> SpectralField {
        let g = self.grid;
        let mut out = self.clone();
        out.coeffs
            .par_chunks_mut(g.ny)
            .enumerate()
            .for_each(|(p, col)| {
                if order_x % 2 == 1 && g.is_x_nyquist(p) {
                    col.fill(Complex64::new(0.0, 0.0));
                    return;
                }
                let sx = Complex64::new(0.0, g.xi_x(p)).powu(order_x);
                for (q, c) in col.iter_mut().enumerate() {
                    if order_y % 2 == 1 && g.is_y_nyquist(q) {
                        *c = Complex64::new(0.0, 0.0);
                    } else {
                        *c *= sx * Complex64::new(0.0, g.xi_y(q)).powu(order_y);
                    }
                }
            });
        out
    }

    /// Zeroes every mode with `|jx| > Nx/3` or `|jy| > Ny/3` (2/3 rule).
    pub fn dealias(&mut self) {
        dealias_in_place(&self.grid, &mut self.coeffs);
    }
}

pub(crate) fn dealias_in_place(g: &Grid, coeffs: &mut [Complex64]) {
    let cut_x = (g.nx / 3) as i64;
    let cut_y = (g.ny / 3) as i64;
    coeffs
        .par_chunks_mut(g.ny)
        .enumerate()
        .for_each(|(p, col)| {
            let x_cut = g.x_mode(p).abs() > cut_x;
            for (q, c) in col.iter_mut().enumerate() {
                if x_cut || g.y_mode(q).abs() > cut_y {
                    *c = Complex64::new(0.0, 0.0);
                }
            }
        });
}

/// Planned 2D real-to-half-complex transform pair for one grid.
///
/// Plans are immutable and shareable between threads; scratch space lives in
/// [`FftWorkspace`], one per caller.
#[derive(Clone)]
pub struct Fft2d {
    grid: Grid,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    y_forward: Arc<dyn Fft<f64>>,
    y_inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2d {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2d").field("grid", &self.grid).finish()
    }
}

/// Reusable buffers for [`Fft2d`].
#[derive(Debug, Clone)]
pub struct FftWorkspace {
    rows: Vec<Complex64>,
    cols: Vec<Complex64>,
}

impl FftWorkspace {
    pub fn new(grid: &Grid) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self {
            rows: vec![zero; grid.spectral_len()],
            cols: vec![zero; grid.spectral_len()],
        }
    }
}

impl Fft2d {
    pub fn new(grid: Grid) -> Self {
        let mut real = RealFftPlanner::<f64>::new();
        let mut complex = FftPlanner::<f64>::new();
        Self {
            grid,
            r2c: real.plan_fft_forward(grid.nx),
            c2r: real.plan_fft_inverse(grid.nx),
            y_forward: complex.plan_fft_forward(grid.ny),
            y_inverse: complex.plan_fft_inverse(grid.ny),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn workspace(&self) -> FftWorkspace {
        FftWorkspace::new(&self.grid)
    }

    pub fn forward(&self, f: &RealField) -> Result<SpectralField> {
        if f.grid != self.grid {
            return Err(Error::GridMismatch);
        }
        let mut out = SpectralField::zeros(self.grid);
        self.forward_into(&f.values, &mut out.coeffs, &mut self.workspace());
        Ok(out)
    }

    pub fn inverse(&self, u: &SpectralField) -> Result<RealField> {
        if u.grid != self.grid {
            return Err(Error::GridMismatch);
        }
        let mut out = RealField::zeros(self.grid);
        self.inverse_into(&u.coeffs, &mut out.values, &mut self.workspace());
        Ok(out)
    }

    /// Forward transform of raw row-major samples into half-spectrum storage.
    pub fn forward_into(&self, input: &[f64], out: &mut [Complex64], ws: &mut FftWorkspace) {
        let g = &self.grid;
        let (nx, ny, nh) = (g.nx, g.ny, g.nx_half());
        assert_eq!(input.len(), g.len());
        assert_eq!(out.len(), g.spectral_len());

        let rows = block_len(ny);
        let r2c = &self.r2c;
        ws.rows
            .par_chunks_mut(nh * rows)
            .zip(input.par_chunks(nx * rows))
            .for_each(|(dst, src)| {
                let mut buf = r2c.make_input_vec();
                let mut scratch = r2c.make_scratch_vec();
                for (d, s) in dst.chunks_mut(nh).zip(src.chunks(nx)) {
                    buf.copy_from_slice(s);
                    r2c.process_with_scratch(&mut buf, d, &mut scratch)
                        .expect("r2c buffer lengths are fixed by the plan");
                }
            });

        transpose(&ws.rows, out, ny, nh);

        let fft = &self.y_forward;
        out.par_chunks_mut(ny * block_len(nh)).for_each(|cols| {
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            fft.process_with_scratch(cols, &mut scratch);
        });
    }

    /// Inverse transform (including the `1/(Nx Ny)` factor) into raw
    /// row-major samples.
    pub fn inverse_into(&self, input: &[Complex64], out: &mut [f64], ws: &mut FftWorkspace) {
        let g = &self.grid;
        let (nx, ny, nh) = (g.nx, g.ny, g.nx_half());
        assert_eq!(input.len(), g.spectral_len());
        assert_eq!(out.len(), g.len());

        ws.cols.copy_from_slice(input);
        let fft = &self.y_inverse;
        ws.cols.par_chunks_mut(ny * block_len(nh)).for_each(|cols| {
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            fft.process_with_scratch(cols, &mut scratch);
        });

        transpose(&ws.cols, &mut ws.rows, nh, ny);

        let scale = 1.0 / g.len() as f64;
        let rows = block_len(ny);
        let c2r = &self.c2r;
        ws.rows
            .par_chunks_mut(nh * rows)
            .zip(out.par_chunks_mut(nx * rows))
            .for_each(|(src, dst)| {
                let mut scratch = c2r.make_scratch_vec();
                for (s, d) in src.chunks_mut(nh).zip(dst.chunks_mut(nx)) {
                    // The DC and Nyquist entries of a Hermitian row are real.
                    s[0].im = 0.0;
                    s[nh - 1].im = 0.0;
                    c2r.process_with_scratch(s, d, &mut scratch)
                        .expect("c2r buffer lengths are fixed by the plan");
                    for v in d.iter_mut() {
                        *v *= scale;
                    }
                }
            });
    }
}

/// Rows per parallel task: one contiguous block per worker thread.
fn block_len(n: usize) -> usize {
    n.div_ceil(rayon::current_num_threads()).max(1)
}

/// `dst[c * rows + r] = src[r * cols + c]`, blocked for cache reuse.
fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    debug_assert_eq!(src.len(), rows * cols);
    for r0 in (0..rows).step_by(TRANSPOSE_BLOCK) {
        let r1 = (r0 + TRANSPOSE_BLOCK).min(rows);
        for c0 in (0..cols).step_by(TRANSPOSE_BLOCK) {
            let c1 = (c0 + TRANSPOSE_BLOCK).min(cols);
            for r in r0..r1 {
                for c in c0..c1 {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_grid() -> Grid {
        Grid::new(16, 8, 1.5, 0.75).unwrap()
    }

    #[test]
    fn grid_rejects_bad_counts() {
        assert!(Grid::new(3, 8, 1.0, 1.0).is_err());
        assert!(Grid::new(2, 8, 1.0, 1.0).is_err());
        assert!(Grid::new(8, 7, 1.0, 1.0).is_err());
        assert!(Grid::new(8, 8, 0.0, 1.0).is_err());
        assert!(Grid::new(8, 8, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn lattices_contain_zero_once_and_extremes() {
        let g = small_grid();
        let xs = g.xi_x_lattice();
        assert_eq!(xs.iter().filter(|&&v| v == 0.0).count(), 1);
        assert_eq!(xs[0], -8.0 / 1.5);
        assert_eq!(*xs.last().unwrap(), 7.0 / 1.5);
        let ys = g.xi_y_lattice();
        assert_eq!(ys.iter().filter(|&&v| v == 0.0).count(), 1);
    }

    #[test]
    fn default_transverse_extent() {
        let g = Grid::new(16, 8, 1.0, 2.0).unwrap();
        assert!((g.y(0) + 2.0 * PI).abs() < 1e-15);
        assert!((g.y(7) + g.dy() - 2.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn nodes_are_symmetric() {
        let g = small_grid();
        for i in 1..g.nx() {
            assert_eq!(g.x(i), -g.x(g.nx() - i));
        }
        assert!((g.x(0) + PI * g.lx()).abs() < 1e-15);
    }

    #[test]
    fn mode_index_maps() {
        let g = small_grid();
        assert_eq!(g.x_mode(8), -8);
        assert_eq!(g.x_mode(3), 3);
        assert_eq!(g.y_mode(4), -4);
        assert_eq!(g.y_mode(5), -3);
        assert_eq!(g.y_index(-3), 5);
        assert_eq!(g.y_index(2), 2);
    }

    #[test]
    fn constant_field_has_single_mode() {
        let g = small_grid();
        let fft = Fft2d::new(g);
        let u = fft.forward(&RealField::from_fn(g, |_, _| 2.5)).unwrap();
        let n = g.len() as f64;
        for p in 0..g.nx_half() {
            for q in 0..g.ny() {
                let c = u.at(p, q);
                if p == 0 && q == 0 {
                    assert!((c.re - 2.5 * n).abs() < 1e-12 && c.im.abs() < 1e-12);
                } else {
                    assert!(c.norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn cosine_hits_conjugate_pair() {
        let g = small_grid();
        let fft = Fft2d::new(g);
        let u = fft
            .forward(&RealField::from_fn(g, |x, _| (x / g.lx()).cos()))
            .unwrap();
        let half = g.len() as f64 / 2.0;
        // x_0 = -pi Lx, so the sampled phase carries (-1)^jx.
        assert!((u.mode(1, 0) + half).norm() < 1e-12);
        assert!((u.mode(-1, 0) + half).norm() < 1e-12);
        let total: f64 = u.coeffs().iter().map(|c| c.norm()).sum();
        assert!((total - half).abs() < 1e-11);
    }

    #[test]
    fn derivative_of_sine() {
        let g = Grid::new(32, 8, 2.0, 1.0).unwrap();
        let fft = Fft2d::new(g);
        let xi1 = 1.0 / g.lx();
        let u = fft
            .forward(&RealField::from_fn(g, |x, _| (xi1 * x).sin()))
            .unwrap();
        let du = fft.inverse(&u.derivative(1, 0)).unwrap();
        let exact = RealField::from_fn(g, |x, _| xi1 * (xi1 * x).cos());
        assert!(du.sub(&exact).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn third_derivative_symbol() {
        // d^3/dx^3 e^{i xi x} = -i xi^3 e^{i xi x}: check the multiplier on a
        // single stored mode.
        let g = Grid::new(16, 8, 0.5, 1.0).unwrap();
        let mut u = SpectralField::zeros(g);
        u.coeffs_mut()[g.ny()] = Complex64::new(1.0, 0.0);
        let d = u.derivative(3, 0);
        let xi = 1.0 / g.lx();
        assert!((d.at(1, 0) - Complex64::new(0.0, -xi.powi(3))).norm() < 1e-12);
    }

    #[test]
    fn odd_derivatives_zero_nyquist() {
        let g = small_grid();
        let mut u = SpectralField::zeros(g);
        for c in u.coeffs_mut() {
            *c = Complex64::new(1.0, 0.0);
        }
        let dx = u.derivative(1, 0);
        assert!((0..g.ny()).all(|q| dx.at(g.nx() / 2, q).norm() == 0.0));
        let dy = u.derivative(0, 1);
        assert!((0..g.nx_half()).all(|p| dy.at(p, g.ny() / 2).norm() == 0.0));
        let dxx = u.derivative(2, 0);
        assert!(dxx.at(g.nx() / 2, 0).norm() > 0.0);
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let g = small_grid();
        let other = Grid::new(16, 8, 1.0, 0.75).unwrap();
        let fft = Fft2d::new(g);
        assert_eq!(
            fft.forward(&RealField::zeros(other)),
            Err(Error::GridMismatch)
        );
        assert_eq!(
            fft.inverse(&SpectralField::zeros(other)),
            Err(Error::GridMismatch)
        );
    }

    #[test]
    fn dealias_keeps_low_modes() {
        let g = Grid::new(12, 12, 1.0, 1.0).unwrap();
        let mut u = SpectralField::zeros(g);
        for c in u.coeffs_mut() {
            *c = Complex64::new(1.0, 0.0);
        }
        u.dealias();
        assert_eq!(u.mode(4, -4), Complex64::new(1.0, 0.0));
        assert_eq!(u.mode(5, 0), Complex64::new(0.0, 0.0));
        assert_eq!(u.mode(0, -5), Complex64::new(0.0, 0.0));
    }
}
