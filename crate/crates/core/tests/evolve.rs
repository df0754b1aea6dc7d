//! Whole-run properties of the time integrator on small grids.

use kp_core::diagnostics::energy;
use kp_core::elliptic::EllipticModulus;
use kp_core::etd::{evolve, EtdCoeffs, Etdrk4, EvolveSpec, Nonlinear, Observation};
use kp_core::kp::{Equation, KpNonlinear, KpParams, LinearSymbol};
use kp_core::spectral::{make_grid, Fft2d, Grid, SpectralField};
use kp_core::waves::{assemble_initial_data, CnoidalParams, GaussianPerturbation, Perturbation};
use kp_core::Error;
use num_complex::Complex64;

struct Case {
    grid: Grid,
    fft: Fft2d,
    u0: SpectralField,
}

/// Cnoidal wave (kappa = 1) plus a Gaussian bump on a coarse grid.
fn perturbed_case(ny: usize) -> Case {
    let k = EllipticModulus::new(0.5).unwrap();
    let grid = make_grid(128, ny, 1.0, k, 4, 1.0).unwrap();
    let fft = Fft2d::new(grid);
    let p = CnoidalParams::centered(1.0, 0.5).unwrap();
    let data = assemble_initial_data(
        grid,
        &p,
        &Perturbation::Gaussian(GaussianPerturbation { scale: 0.5 }),
    )
    .unwrap();
    let u0 = fft.forward(&data.field).unwrap();
    Case { grid, fft, u0 }
}

fn run(case: &Case, equation: Equation, t_end: f64, nt: usize) -> SpectralField {
    let l = LinearSymbol::new(case.grid, KpParams { equation });
    let mut n = KpNonlinear::new(case.fft.clone(), false);
    let spec = EvolveSpec::new(t_end, nt);
    evolve(
        case.u0.clone(),
        l.values(),
        &spec,
        &mut n,
        &mut |_: Observation<'_>| Ok(()),
    )
    .unwrap()
}

fn max_gap(a: &SpectralField, b: &SpectralField) -> f64 {
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[test]
fn mean_column_and_symmetry_are_preserved() {
    let case = perturbed_case(32);
    let profile0 = case.u0.x_mean_profile();
    let l = LinearSymbol::new(
        case.grid,
        KpParams {
            equation: Equation::Kp1,
        },
    );
    let mut n = KpNonlinear::new(case.fft.clone(), false);
    let spec = EvolveSpec {
        observe_every: 10,
        ..EvolveSpec::new(0.2, 200)
    };
    let mut seen = 0;
    let mut check = |obs: Observation<'_>| {
        seen += 1;
        let drift = obs
            .field
            .x_mean_profile()
            .iter()
            .zip(&profile0)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(drift <= 1e-13, "t={} drift {drift}", obs.t);
        assert!(obs.field.hermitian_defect() <= 1e-12);
        Ok(())
    };
    evolve(case.u0.clone(), l.values(), &spec, &mut n, &mut check).unwrap();
    assert_eq!(seen, 21);
}

#[test]
fn runs_are_bit_reproducible() {
    let case = perturbed_case(16);
    let a = run(&case, Equation::Kp2, 0.05, 50);
    let b = run(&case, Equation::Kp2, 0.05, 50);
    assert_eq!(a.coeffs(), b.coeffs());
}

#[test]
fn single_step_run_is_one_step() {
    let case = perturbed_case(16);
    let l = LinearSymbol::new(
        case.grid,
        KpParams {
            equation: Equation::Kp1,
        },
    );
    let mut n = KpNonlinear::new(case.fft.clone(), false);
    let mut stepper = Etdrk4::new(EtdCoeffs::new(l.values(), 0.01).unwrap());
    let mut u = case.u0.clone();
    stepper.step(u.coeffs_mut(), &mut n);
    assert_eq!(run(&case, Equation::Kp1, 0.01, 1).coeffs(), u.coeffs());
}

#[test]
fn halving_the_step_gains_four_orders() {
    let case = perturbed_case(16);
    for equation in [Equation::Kp1, Equation::Kp2] {
        let reference = run(&case, equation, 0.1, 1600);
        let errors: Vec<f64> = [25, 50, 100]
            .iter()
            .map(|&nt| max_gap(&run(&case, equation, 0.1, nt), &reference))
            .collect();
        for w in errors.windows(2) {
            let slope = (w[0] / w[1]).log2();
            assert!((3.6..=4.4).contains(&slope), "{equation}: {errors:?}");
        }
    }
}

#[test]
fn energy_is_conserved_with_transverse_dynamics() {
    let case = perturbed_case(32);
    for equation in [Equation::Kp1, Equation::Kp2] {
        let e0 = energy(&case.u0, &case.fft, equation).unwrap();
        let e1 = energy(&run(&case, equation, 0.2, 400), &case.fft, equation).unwrap();
        assert!(((e1 - e0) / e0).abs() <= 1e-7, "{equation}: {e0} -> {e1}");
        // The transverse term with the opposite sign is not conserved.
        let other = match equation {
            Equation::Kp1 => Equation::Kp2,
            Equation::Kp2 => Equation::Kp1,
        };
        let f0 = energy(&case.u0, &case.fft, other).unwrap();
        let f1 = energy(&run(&case, equation, 0.2, 400), &case.fft, other).unwrap();
        assert!(((f1 - f0) / f0).abs() > 1e-4, "{equation}: {f0} -> {f1}");
    }
}

struct Poison;

impl Nonlinear for Poison {
    fn apply(&mut self, _u: &[Complex64], out: &mut [Complex64]) {
        out.fill(Complex64::new(f64::NAN, 0.0));
    }
}

#[test]
fn blow_up_reports_the_first_bad_time() {
    let grid = Grid::new(8, 4, 1.0, 1.0).unwrap();
    let linear = vec![Complex64::new(0.0, 0.0); grid.spectral_len()];
    let spec = EvolveSpec::new(1.0, 4);
    let err = evolve(
        SpectralField::zeros(grid),
        &linear,
        &spec,
        &mut Poison,
        &mut |_: Observation<'_>| Ok(()),
    )
    .unwrap_err();
    assert!(matches!(err, Error::NonFinite { t } if t == 0.25));
}
