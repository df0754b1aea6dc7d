//! Fourth-order exponential time differencing (Cox–Matthews ETDRK4) for
//! `d/dt u = L u + N(u)` with diagonal `L`.
//!
//! The coefficient fields use `phi_k(z) = (e^z - sum_{j<k} z^j / j!) / z^k`.
//! Near `z = 0` the closed forms cancel catastrophically, so for `|z| < 0.5`
//! they are replaced by the mean over a circle of radius one around `z`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectral::SpectralField;

/// Below this `|z|` the phi functions are evaluated by contour averaging.
pub const CONTOUR_THRESHOLD: f64 = 0.5;
pub const CONTOUR_POINTS: usize = 64;
pub const CONTOUR_RADIUS: f64 = 1.0;

/// A nonlinear operator acting on coefficient vectors.
pub trait Nonlinear {
    fn apply(&mut self, u: &[Complex64], out: &mut [Complex64]);
}

/// `phi_1`, `phi_2`, `phi_3` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phi {
    pub phi1: Complex64,
    pub phi2: Complex64,
    pub phi3: Complex64,
}

/// Closed-form phi functions; inaccurate for small `|z|`.
pub fn phi_direct(z: Complex64) -> Phi {
    let ez = z.exp();
    let one = Complex64::new(1.0, 0.0);
    let z2 = z * z;
    Phi {
        phi1: (ez - one) / z,
        phi2: (ez - one - z) / z2,
        phi3: (ez - one - z - 0.5 * z2) / (z2 * z),
    }
}

/// Phi functions as the mean of [`phi_direct`] over a circle around `z`.
pub fn phi_contour(z: Complex64, radius: f64, points: usize) -> Phi {
    let mut acc = Phi {
        phi1: Complex64::new(0.0, 0.0),
        phi2: Complex64::new(0.0, 0.0),
        phi3: Complex64::new(0.0, 0.0),
    };
    for m in 0..points {
        let theta = 2.0 * PI * (m as f64 + 0.5) / points as f64;
        let p = phi_direct(z + Complex64::from_polar(radius, theta));
        acc.phi1 += p.phi1;
        acc.phi2 += p.phi2;
        acc.phi3 += p.phi3;
    }
    let inv = 1.0 / points as f64;
    Phi {
        phi1: acc.phi1 * inv,
        phi2: acc.phi2 * inv,
        phi3: acc.phi3 * inv,
    }
}

pub fn phi(z: Complex64) -> Phi {
    if z.norm() < CONTOUR_THRESHOLD {
        phi_contour(z, CONTOUR_RADIUS, CONTOUR_POINTS)
    } else {
        phi_direct(z)
    }
}

/// Precomputed ETDRK4 coefficient fields for one step size.
#[derive(Debug, Clone, PartialEq)]
pub struct EtdCoeffs {
    pub h: f64,
    /// `exp(hL)`
    pub e: Vec<Complex64>,
    /// `exp(hL/2)`
    pub e2: Vec<Complex64>,
    /// `(h/2) phi_1(hL/2)`
    pub q: Vec<Complex64>,
    /// `h (phi_1 - 3 phi_2 + 4 phi_3)(hL)`
    pub f1: Vec<Complex64>,
    /// `h (phi_2 - 2 phi_3)(hL)`
    pub f2: Vec<Complex64>,
    /// `h (4 phi_3 - phi_2)(hL)`
    pub f3: Vec<Complex64>,
}

impl EtdCoeffs {
    pub fn new(linear: &[Complex64], h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "step size must be positive, got {h}"
            )));
        }
        let per_point: Vec<[Complex64; 6]> = linear
            .par_iter()
            .map(|&l| {
                let z = l * h;
                let full = phi(z);
                let half = phi(0.5 * z);
                [
                    z.exp(),
                    (0.5 * z).exp(),
                    0.5 * h * half.phi1,
                    h * (full.phi1 - 3.0 * full.phi2 + 4.0 * full.phi3),
                    h * (full.phi2 - 2.0 * full.phi3),
                    h * (4.0 * full.phi3 - full.phi2),
                ]
            })
            .collect();
        let column = |i: usize| per_point.iter().map(|c| c[i]).collect::<Vec<_>>();
        Ok(Self {
            h,
            e: column(0),
            e2: column(1),
            q: column(2),
            f1: column(3),
            f2: column(4),
            f3: column(5),
        })
    }

    pub fn len(&self) -> usize {
        self.e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        [&self.e, &self.e2, &self.q, &self.f1, &self.f2, &self.f3]
            .iter()
            .all(|v| v.iter().all(|c| c.re.is_finite() && c.im.is_finite()))
    }
}

pub fn make_coeffs(linear: &[Complex64], h: f64) -> Result<EtdCoeffs> {
    EtdCoeffs::new(linear, h)
}

/// ETDRK4 stepper with its stage buffers.
#[derive(Debug, Clone)]
pub struct Etdrk4 {
    coeffs: EtdCoeffs,
    nu: Vec<Complex64>,
    na: Vec<Complex64>,
    nb: Vec<Complex64>,
    nc: Vec<Complex64>,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
}

impl Etdrk4 {
    pub fn new(coeffs: EtdCoeffs) -> Self {
        let zero = vec![Complex64::new(0.0, 0.0); coeffs.len()];
        Self {
            nu: zero.clone(),
            na: zero.clone(),
            nb: zero.clone(),
            nc: zero.clone(),
            a: zero.clone(),
            b: zero,
            coeffs,
        }
    }

    pub fn coeffs(&self) -> &EtdCoeffs {
        &self.coeffs
    }

    /// Advances `u` by one step of size `h` in place.
    pub fn step<N: Nonlinear + ?Sized>(&mut self, u: &mut [Complex64], n: &mut N) {
        assert_eq!(u.len(), self.coeffs.len());
        let c = &self.coeffs;

        n.apply(u, &mut self.nu);
        self.a
            .par_iter_mut()
            .enumerate()
            .for_each(|(i, a)| *a = c.e2[i] * u[i] + c.q[i] * self.nu[i]);

        n.apply(&self.a, &mut self.na);
        self.b
            .par_iter_mut()
            .enumerate()
            .for_each(|(i, b)| *b = c.e2[i] * u[i] + c.q[i] * self.na[i]);

        n.apply(&self.b, &mut self.nb);
        // Third stage reuses `b` as the `c` stage buffer.
        {
            let (a, nb, nu) = (&self.a, &self.nb, &self.nu);
            self.b.par_iter_mut().enumerate().for_each(|(i, s)| {
                *s = c.e2[i] * a[i] + c.q[i] * (2.0 * nb[i] - nu[i]);
            });
        }

        n.apply(&self.b, &mut self.nc);
        let (nu, na, nb, nc) = (&self.nu, &self.na, &self.nb, &self.nc);
        u.par_iter_mut().enumerate().for_each(|(i, v)| {
            *v = c.e[i] * *v + c.f1[i] * nu[i] + 2.0 * c.f2[i] * (na[i] + nb[i]) + c.f3[i] * nc[i];
        });
    }
}

/// Time span, step count and observation schedule of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolveSpec {
    pub t_end: f64,
    pub nt: usize,
    /// Sorted times in `[0, t_end]`, each a multiple of the step.
    pub snapshot_times: Vec<f64>,
    /// Additional observation every this many steps; 0 disables.
    pub observe_every: usize,
}

impl EvolveSpec {
    pub fn new(t_end: f64, nt: usize) -> Self {
        Self {
            t_end,
            nt,
            snapshot_times: Vec::new(),
            observe_every: 0,
        }
    }

    pub fn step(&self) -> f64 {
        self.t_end / self.nt as f64
    }

    /// Time at step `n`; exact at `n = nt`.
    pub fn time_at(&self, n: usize) -> f64 {
        n as f64 * self.t_end / self.nt as f64
    }

    /// Validates the spec and maps snapshot times to step indices.
    pub fn snapshot_steps(&self) -> Result<Vec<usize>> {
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "t_end must be positive, got {}",
                self.t_end
            )));
        }
        if self.nt == 0 {
            return Err(Error::InvalidParameter("Nt must be at least 1".into()));
        }
        let h = self.step();
        let tol = 1e-12 * self.t_end.max(1.0);
        let mut steps = Vec::with_capacity(self.snapshot_times.len());
        let mut last = f64::NEG_INFINITY;
        for &t in &self.snapshot_times {
            if !(t >= 0.0 && t <= self.t_end + tol) || t < last {
                return Err(Error::InvalidParameter(format!(
                    "snapshot times must be sorted within [0, t_end], got {t}"
                )));
            }
            last = t;
            let n = (t / h).round();
            if (t - n * h).abs() > tol {
                return Err(Error::InvalidParameter(format!(
                    "snapshot time {t} is not a multiple of the step {h}"
                )));
            }
            steps.push(n as usize);
        }
        Ok(steps)
    }
}

/// State handed to observers.
#[derive(Debug, Clone, Copy)]
pub struct Observation<'a> {
    pub step: usize,
    pub t: f64,
    pub field: &'a SpectralField,
    pub snapshot: bool,
}

pub trait Observer {
    fn observe(&mut self, obs: Observation<'_>) -> Result<()>;
}

impl<F> Observer for F
where
    F: FnMut(Observation<'_>) -> Result<()>,
{
    fn observe(&mut self, obs: Observation<'_>) -> Result<()> {
        self(obs)
    }
}

/// Advances `u0` through `spec.nt` uniform steps.
///
/// Observers are called at step 0, at every snapshot step, every
/// `observe_every` steps and at the final step. The first step producing a
/// non-finite coefficient aborts the run with [`Error::NonFinite`].
pub fn evolve<N, O>(
    u0: SpectralField,
    linear: &[Complex64],
    spec: &EvolveSpec,
    nonlinear: &mut N,
    observer: &mut O,
) -> Result<SpectralField>
where
    N: Nonlinear + ?Sized,
    O: Observer + ?Sized,
{
    let snapshots = spec.snapshot_steps()?;
    if linear.len() != u0.coeffs().len() {
        return Err(Error::GridMismatch);
    }
    let mut stepper = Etdrk4::new(EtdCoeffs::new(linear, spec.step())?);
    let mut u = u0;
    let mut next_snapshot = 0;

    let mut notify = |n: usize, u: &SpectralField, next: &mut usize| -> Result<()> {
        let mut snapshot = false;
        while *next < snapshots.len() && snapshots[*next] == n {
            snapshot = true;
            *next += 1;
        }
        let periodic = spec.observe_every > 0 && n.is_multiple_of(spec.observe_every);
        if snapshot || periodic || n == 0 || n == spec.nt {
            observer.observe(Observation {
                step: n,
                t: spec.time_at(n),
                field: u,
                snapshot,
            })?;
        }
        Ok(())
    };

    notify(0, &u, &mut next_snapshot)?;
    for n in 1..=spec.nt {
        stepper.step(u.coeffs_mut(), nonlinear);
        if !u.is_finite() {
            return Err(Error::NonFinite { t: spec.time_at(n) });
        }
        notify(n, &u, &mut next_snapshot)?;
    }
    Ok(u)
}
