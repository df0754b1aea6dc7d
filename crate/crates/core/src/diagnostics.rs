//! Mass, energy, the mass-error indicator and deviation norms.
//!
//! All integrals are uniform-grid sums, which on a periodic grid coincide with
//! the trapezoid rule. Sums run in a fixed serial order so that repeated runs
//! reproduce every digit.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::etd::{Observation, Observer};
use crate::kp::Equation;
use crate::spectral::{Fft2d, Grid, RealField, SpectralField};
use crate::waves::{
    constraint_defect, deformed_cnoidal_field_at, CnoidalParams, CnoidalWave, DeformationParams,
};

/// One row of the diagnostics time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub l2: f64,
    pub delta: f64,
    pub linf: f64,
    pub energy: f64,
    pub dev_linf: Option<f64>,
    pub dev_l2: Option<f64>,
}

/// `sqrt(sum u^2 dx dy)`.
pub fn l2_norm(f: &RealField) -> f64 {
    let g = f.grid();
    let sum: f64 = f.values().iter().map(|v| v * v).sum();
    (sum * g.dx() * g.dy()).sqrt()
}

/// The same norm from the half spectrum, via Parseval.
pub fn l2_norm_spectral(u: &SpectralField) -> f64 {
    let g = u.grid();
    let ny = g.ny();
    let mut sum = 0.0;
    for (p, col) in u.coeffs().chunks(ny).enumerate() {
        let weight = if p == 0 || g.is_x_nyquist(p) {
            1.0
        } else {
            2.0
        };
        sum += weight * col.iter().map(|c| c.norm_sqr()).sum::<f64>();
    }
    (sum / g.len() as f64 * g.dx() * g.dy()).sqrt()
}

/// `1 - L2(t) / L2(0)`.
pub fn mass_error(rec0: &DiagnosticsRecord, rec: &DiagnosticsRecord) -> f64 {
    1.0 - rec.l2 / rec0.l2
}

/// Discrete `E = sum (u_x)^2 - u^3/3 - lambda (d_x^{-1} u_y)^2 dx dy`.
///
/// The sign of the transverse term is the one conserved by
/// `u_t + u u_x + u_xxx + lambda d_x^{-1} u_yy = 0`. `d_x^{-1}` is zero on the
/// `xi_x = 0` column.
pub fn energy(u: &SpectralField, fft: &Fft2d, equation: Equation) -> Result<f64> {
    let g = *u.grid();
    if &g != fft.grid() {
        return Err(Error::GridMismatch);
    }
    let field = fft.inverse(u)?;
    let ux = fft.inverse(&u.derivative(1, 0))?;

    let mut w = u.clone();
    let ny = g.ny();
    for (p, col) in w.coeffs_mut().chunks_mut(ny).enumerate() {
        for (q, c) in col.iter_mut().enumerate() {
            *c = if p == 0 || g.is_x_nyquist(p) || g.is_y_nyquist(q) {
                Complex64::new(0.0, 0.0)
            } else {
                // (i xi_y) / (i xi_x)
                *c * (g.xi_y(q) / g.xi_x(p))
            };
        }
    }
    let w = fft.inverse(&w)?;

    let lambda = equation.lambda();
    let sum: f64 = field
        .values()
        .iter()
        .zip(ux.values())
        .zip(w.values())
        .map(|((&u, &ux), &w)| ux * ux - u * u * u / 3.0 - lambda * w * w)
        .sum();
    Ok(sum * g.dx() * g.dy())
}

/// `(max |f - r|, L2 norm of f - r)`.
pub fn deviation(f: &RealField, reference: &RealField) -> Result<(f64, f64)> {
    let d = f.sub(reference)?;
    Ok((d.max_abs(), l2_norm(&d)))
}

/// Exact solution against which a run is compared.
#[derive(Debug, Clone, PartialEq)]
pub enum Reference {
    None,
    /// The cnoidal wave translated to time `t`.
    Cnoidal(CnoidalParams),
    /// The deformed initial data translated with the cnoidal speed.
    DeformedCnoidal(CnoidalParams, DeformationParams),
}

impl Reference {
    pub fn field_at(&self, grid: Grid, t: f64) -> Result<Option<RealField>> {
        Ok(match self {
            Reference::None => None,
            Reference::Cnoidal(p) => Some(CnoidalWave::new(*p).field(grid, t)),
            Reference::DeformedCnoidal(p, d) => Some(deformed_cnoidal_field_at(grid, p, d, t)?),
        })
    }
}

/// Observer that evaluates a [`DiagnosticsRecord`] at every observation and
/// tracks the transverse x-mean content of the spectrum.
#[derive(Debug)]
pub struct Recorder {
    fft: Fft2d,
    equation: Equation,
    reference: Reference,
    records: Vec<DiagnosticsRecord>,
    initial_profile: Option<Vec<Complex64>>,
    max_constraint_defect: f64,
    max_profile_drift: f64,
}

impl Recorder {
    pub fn new(fft: Fft2d, equation: Equation, reference: Reference) -> Self {
        Self {
            fft,
            equation,
            reference,
            records: Vec::new(),
            initial_profile: None,
            max_constraint_defect: 0.0,
            max_profile_drift: 0.0,
        }
    }

    pub fn records(&self) -> &[DiagnosticsRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<DiagnosticsRecord> {
        self.records
    }

    /// Largest `|u(0, xi_y)|`, `xi_y != 0`, relative to the largest
    /// coefficient, over all observations.
    pub fn max_constraint_defect(&self) -> f64 {
        self.max_constraint_defect
    }

    /// Largest absolute change of the `xi_x = 0` column since the first
    /// observation.
    pub fn max_profile_drift(&self) -> f64 {
        self.max_profile_drift
    }

    /// Computes the record for `u` at time `t` without storing it.
    pub fn record(&self, u: &SpectralField, t: f64) -> Result<DiagnosticsRecord> {
        let field = self.fft.inverse(u)?;
        let l2 = l2_norm(&field);
        let delta = match self.records.first() {
            Some(r0) => 1.0 - l2 / r0.l2,
            None => 0.0,
        };
        let (dev_linf, dev_l2) = match self.reference.field_at(*u.grid(), t)? {
            Some(r) => {
                let (a, b) = deviation(&field, &r)?;
                (Some(a), Some(b))
            }
            None => (None, None),
        };
        Ok(DiagnosticsRecord {
            t,
            l2,
            delta,
            linf: field.max_abs(),
            energy: energy(u, &self.fft, self.equation)?,
            dev_linf,
            dev_l2,
        })
    }
}

impl Observer for Recorder {
    fn observe(&mut self, obs: Observation<'_>) -> Result<()> {
        let profile = obs.field.x_mean_profile();
        let (_, defect) = constraint_defect(&profile, obs.field.max_abs());
        self.max_constraint_defect = self.max_constraint_defect.max(defect);
        match &self.initial_profile {
            None => self.initial_profile = Some(profile),
            Some(p0) => {
                let drift = p0
                    .iter()
                    .zip(&profile)
                    .fold(0.0_f64, |m, (a, b)| m.max((a - b).norm()));
                self.max_profile_drift = self.max_profile_drift.max(drift);
            }
        }
        let rec = self.record(obs.field, obs.t)?;
        self.records.push(rec);
        Ok(())
    }
}
