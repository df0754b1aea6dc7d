//! Rough per-operation timings on the default 1024 x 256 grid.

use std::time::Instant;

use kp_core::elliptic::EllipticModulus;
use kp_core::etd::{EtdCoeffs, Etdrk4, Nonlinear};
use kp_core::kp::{Equation, KpNonlinear, KpParams, LinearSymbol};
use kp_core::spectral::{make_grid, Fft2d};
use kp_core::waves::{CnoidalParams, CnoidalWave};

fn main() {
    let k = EllipticModulus::new(0.5).unwrap();
    let grid = make_grid(1024, 256, 2.0, k, 8, 2.0).unwrap();
    let fft = Fft2d::new(grid);
    let field = CnoidalWave::new(CnoidalParams::centered(2.0, 0.5).unwrap()).field(grid, 0.0);
    let mut ws = fft.workspace();
    let mut spec = vec![Default::default(); grid.spectral_len()];
    let mut phys = vec![0.0; grid.len()];

    let reps = 50;
    let t = Instant::now();
    for _ in 0..reps {
        fft.forward_into(field.values(), &mut spec, &mut ws);
    }
    println!(
        "forward: {:.3} ms",
        t.elapsed().as_secs_f64() * 1e3 / reps as f64
    );
    let t = Instant::now();
    for _ in 0..reps {
        fft.inverse_into(&spec, &mut phys, &mut ws);
    }
    println!(
        "inverse: {:.3} ms",
        t.elapsed().as_secs_f64() * 1e3 / reps as f64
    );

    let mut n = KpNonlinear::new(fft.clone(), false);
    let mut out = spec.clone();
    let t = Instant::now();
    for _ in 0..reps {
        n.apply(&spec, &mut out);
    }
    println!(
        "nonlinear: {:.3} ms",
        t.elapsed().as_secs_f64() * 1e3 / reps as f64
    );

    let symbol = LinearSymbol::new(
        grid,
        KpParams {
            equation: Equation::Kp1,
        },
    );
    let t = Instant::now();
    let coeffs = EtdCoeffs::new(symbol.values(), 2e-4).unwrap();
    println!("coeffs: {:.3} ms", t.elapsed().as_secs_f64() * 1e3);
    let mut stepper = Etdrk4::new(coeffs);
    let t = Instant::now();
    for _ in 0..reps {
        stepper.step(&mut spec, &mut n);
    }
    println!(
        "step: {:.3} ms",
        t.elapsed().as_secs_f64() * 1e3 / reps as f64
    );
}
