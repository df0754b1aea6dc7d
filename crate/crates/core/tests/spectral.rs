//! Transform pair, Parseval, symmetry and differentiation accuracy.

use kp_core::diagnostics::{l2_norm, l2_norm_spectral};
use kp_core::elliptic::{complete_elliptic_k, EllipticModulus};
use kp_core::spectral::{make_grid, Fft2d, Grid, RealField};
use kp_core::waves::{CnoidalParams, CnoidalWave};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_field(grid: Grid, seed: u64) -> RealField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    RealField::from_values(grid, values).unwrap()
}

fn sizes() -> impl Strategy<Value = (usize, usize)> {
    let n = prop::sample::select(vec![4usize, 8, 16, 32, 64, 128]);
    (n.clone(), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip_recovers_field((nx, ny) in sizes(), lx in 0.1..10.0f64, seed: u64) {
        let grid = Grid::new(nx, ny, lx, 2.0).unwrap();
        let fft = Fft2d::new(grid);
        let f = random_field(grid, seed);
        let back = fft.inverse(&fft.forward(&f).unwrap()).unwrap();
        let err = back.sub(&f).unwrap().max_abs();
        prop_assert!(err <= 1e-13 * f.max_abs(), "{}", err);
    }

    #[test]
    fn parseval_holds((nx, ny) in sizes(), seed: u64) {
        let grid = Grid::new(nx, ny, 1.5, 0.7).unwrap();
        let f = random_field(grid, seed);
        let spec = Fft2d::new(grid).forward(&f).unwrap();
        let phys = l2_norm(&f);
        prop_assert!((l2_norm_spectral(&spec) - phys).abs() <= 1e-12 * phys);
    }

    #[test]
    fn spectra_of_real_fields_are_hermitian((nx, ny) in sizes(), seed: u64) {
        let grid = Grid::new(nx, ny, 1.0, 1.0).unwrap();
        let spec = Fft2d::new(grid).forward(&random_field(grid, seed)).unwrap();
        prop_assert!(spec.hermitian_defect() <= 1e-13);
        for (ox, oy) in [(1, 0), (0, 1), (3, 0), (1, 2), (2, 1)] {
            prop_assert!(spec.derivative(ox, oy).hermitian_defect() <= 1e-13);
        }
        let mut cut = spec.clone();
        cut.dealias();
        prop_assert!(cut.hermitian_defect() <= 1e-13);
    }
}

#[test]
fn period_fitted_extent() {
    let k = EllipticModulus::new(0.5).unwrap();
    let grid = make_grid(1024, 256, 0.5, k, 8, 2.0).unwrap();
    let want = 32.0 * complete_elliptic_k(k);
    assert!((grid.length_x() - want).abs() <= 1e-12 * want);
    assert!((grid.xi_x(grid.nx() / 2).abs() - 512.0 / grid.lx()).abs() < 1e-12);
    assert!((grid.length_y() - 4.0 * std::f64::consts::PI).abs() < 1e-15);
}

#[test]
fn cnoidal_data_is_resolved_to_the_nyquist_mode() {
    let k = EllipticModulus::new(0.5).unwrap();
    for kappa in [0.5, 1.0, 2.0] {
        let grid = make_grid(1024, 256, kappa, k, 8, 2.0).unwrap();
        let p = CnoidalParams::centered(kappa, 0.5).unwrap();
        let spec = Fft2d::new(grid)
            .forward(&CnoidalWave::new(p).field(grid, 0.0))
            .unwrap();
        let nyq = (0..grid.ny())
            .map(|q| spec.at(grid.nx() / 2, q).norm())
            .fold(0.0, f64::max);
        assert!(nyq < 1e-10 * spec.max_abs(), "kappa={kappa}: {nyq}");
    }
}

/// Fourth-order centered stencil for the third derivative.
fn fd_third(values: &[f64], i: usize, h: f64) -> f64 {
    let n = values.len();
    let f = |s: isize| values[(i as isize + s).rem_euclid(n as isize) as usize];
    (-f(3) + 8.0 * f(2) - 13.0 * f(1) + 13.0 * f(-1) - 8.0 * f(-2) + f(-3)) / (8.0 * h.powi(3))
}

fn third_derivative_gap(nx: usize) -> f64 {
    let k = EllipticModulus::new(0.5).unwrap();
    let grid = make_grid(nx, 4, 0.5, k, 2, 2.0).unwrap();
    let fft = Fft2d::new(grid);
    let p = CnoidalParams::centered(0.5, 0.5).unwrap();
    let f = CnoidalWave::new(p).field(grid, 0.0);
    let d3 = fft
        .inverse(&fft.forward(&f).unwrap().derivative(3, 0))
        .unwrap();
    let row = f.row(0);
    (0..nx)
        .map(|i| (d3.at(i, 0) - fd_third(row, i, grid.dx())).abs())
        .fold(0.0, f64::max)
}

#[test]
fn third_derivative_agrees_with_finite_differences_at_fourth_order() {
    let coarse = third_derivative_gap(64);
    let fine = third_derivative_gap(128);
    let ratio = coarse / fine;
    assert!(fine < 1e-4, "{fine}");
    assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn transforms_run_identically_with_any_thread_count() {
    let grid = Grid::new(64, 32, 1.0, 1.0).unwrap();
    let fft = Fft2d::new(grid);
    let f = random_field(grid, 7);
    let serial = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let wide = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap();
    let a = serial.install(|| fft.forward(&f).unwrap());
    let b = wide.install(|| fft.forward(&f).unwrap());
    assert_eq!(a.coeffs(), b.coeffs());
}
