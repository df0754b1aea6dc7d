//! KdV traveling waves and the initial-data families built on them.

use crate::elliptic::{complete_elliptic_k, EllipticModulus, Jacobi};
use crate::error::{Error, Result};
use crate::spectral::{Fft2d, Grid, RealField};

/// Cnoidal wave `u0 + 12 kappa^2 k^2 cn^2(kappa (x - x0 - (V + u0) t); k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CnoidalParams {
    pub kappa: f64,
    pub k: EllipticModulus,
    pub u0: f64,
    pub x0: f64,
}

impl CnoidalParams {
    pub fn new(kappa: f64, k: f64, u0: f64, x0: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "kappa must be positive, got {kappa}"
            )));
        }
        if !(u0.is_finite() && x0.is_finite()) {
            return Err(Error::InvalidParameter("u0 and x0 must be finite".into()));
        }
        Ok(Self {
            kappa,
            k: EllipticModulus::new(k)?,
            u0,
            x0,
        })
    }

    /// Centered wave with `u0 = x0 = 0`.
    pub fn centered(kappa: f64, k: f64) -> Result<Self> {
        Self::new(kappa, k, 0.0, 0.0)
    }

    /// `V = 4 kappa^2 (2 k^2 - 1)`.
    pub fn speed(&self) -> f64 {
        let k = self.k.value();
        4.0 * self.kappa * self.kappa * (2.0 * k * k - 1.0)
    }

    /// Spatial period `omega(k) = 2 K(k) / kappa`.
    pub fn period(&self) -> f64 {
        2.0 * complete_elliptic_k(self.k) / self.kappa
    }

    /// Crest height above the background, `12 kappa^2 k^2`.
    pub fn amplitude(&self) -> f64 {
        let k = self.k.value();
        12.0 * self.kappa * self.kappa * k * k
    }

    /// Phase shift `x0 + (V + u0) t`, reduced into `[0, omega)`.
    pub fn shift_at(&self, t: f64) -> f64 {
        (self.x0 + (self.speed() + self.u0) * t).rem_euclid(self.period())
    }
}

/// Sampler for a fixed cnoidal wave; caches the elliptic data.
#[derive(Debug, Clone)]
pub struct CnoidalWave {
    params: CnoidalParams,
    jacobi: Jacobi,
}

impl CnoidalWave {
    pub fn new(params: CnoidalParams) -> Self {
        Self {
            params,
            jacobi: Jacobi::new(params.k),
        }
    }

    pub fn params(&self) -> &CnoidalParams {
        &self.params
    }

    pub fn value(&self, x: f64, t: f64) -> f64 {
        self.value_shifted(x - self.params.shift_at(t))
    }

    /// `u0 + A cn^2(kappa xi)` at the co-moving coordinate `xi`.
    fn value_shifted(&self, xi: f64) -> f64 {
        let cn = self.jacobi.cn(self.params.kappa * xi);
        self.params.u0 + self.params.amplitude() * cn * cn
    }

    /// The wave at time `t`, replicated along `y`.
    pub fn field(&self, grid: Grid, t: f64) -> RealField {
        let shift = self.params.shift_at(t);
        let row: Vec<f64> = (0..grid.nx())
            .map(|i| self.value_shifted(grid.x(i) - shift))
            .collect();
        let mut f = RealField::zeros(grid);
        for r in f.values_mut().chunks_mut(grid.nx()) {
            r.copy_from_slice(&row);
        }
        f
    }
}

pub fn cnoidal_value(x: f64, t: f64, p: &CnoidalParams) -> f64 {
    CnoidalWave::new(*p).value(x, t)
}

/// KdV soliton, the `k -> 1` limit of the cnoidal wave:
/// `u0 + 12 kappa^2 sech^2(kappa (x - x0 - (4 kappa^2 + u0) t))`.
pub fn soliton_value(x: f64, t: f64, p: &CnoidalParams) -> f64 {
    let kappa = p.kappa;
    let arg = kappa * (x - p.x0 - (4.0 * kappa * kappa + p.u0) * t);
    let sech = 1.0 / arg.cosh();
    p.u0 + 12.0 * kappa * kappa * sech * sech
}

/// `scale * x * exp(-(x^2 + y^2))`, an x-derivative of a Gaussian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPerturbation {
    pub scale: f64,
}

impl GaussianPerturbation {
    pub fn value(&self, x: f64, y: f64) -> f64 {
        self.scale * x * (-(x * x + y * y)).exp()
    }
}

pub fn gaussian_perturbation_value(x: f64, y: f64, g: &GaussianPerturbation) -> f64 {
    g.value(x, y)
}

/// Transverse deformation `x -> x + delta cos(4 y / Ly)` of the cnoidal phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformationParams {
    pub delta: f64,
    pub ly: f64,
}

impl DeformationParams {
    pub fn new(delta: f64, ly: f64) -> Result<Self> {
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "deformation amplitude must be nonnegative, got {delta}"
            )));
        }
        if !(ly.is_finite() && ly > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Ly must be positive, got {ly}"
            )));
        }
        Ok(Self { delta, ly })
    }

    pub fn offset(&self, y: f64) -> f64 {
        self.delta * (4.0 * y / self.ly).cos()
    }
}

/// The deformed cnoidal profile translated with the undeformed wave speed;
/// `t = 0` gives the initial data.
pub fn deformed_cnoidal_field_at(
    grid: Grid,
    p: &CnoidalParams,
    d: &DeformationParams,
    t: f64,
) -> Result<RealField> {
    if p.u0 != 0.0 || p.x0 != 0.0 {
        return Err(Error::InvalidParameter(
            "deformed cnoidal data requires u0 = x0 = 0".into(),
        ));
    }
    let wave = CnoidalWave::new(*p);
    let shift = p.shift_at(t);
    Ok(RealField::from_fn(grid, |x, y| {
        wave.value_shifted(x + d.offset(y) - shift)
    }))
}

pub fn deformed_cnoidal_field(
    grid: Grid,
    p: &CnoidalParams,
    d: &DeformationParams,
) -> Result<RealField> {
    deformed_cnoidal_field_at(grid, p, d, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Perturbation {
    None,
    Gaussian(GaussianPerturbation),
    Deformation(DeformationParams),
}

/// Initial field plus its discrete `x` sums per transverse mode.
#[derive(Debug, Clone)]
pub struct InitialData {
    pub field: RealField,
    /// `u(0, xi_y)` in FFT order of the `y` modes.
    pub x_mean_profile: Vec<num_complex::Complex64>,
}

/// Relative tolerance on transverse `x`-mean content of admissible data.
pub const CONSTRAINT_TOLERANCE: f64 = 1e-10;

/// Largest `|u(0, xi_y)|` over `xi_y != 0`, relative to the largest coefficient.
pub fn constraint_defect(profile: &[num_complex::Complex64], peak: f64) -> (usize, f64) {
    if peak == 0.0 {
        return (0, 0.0);
    }
    profile
        .iter()
        .enumerate()
        .skip(1)
        .map(|(q, c)| (q, c.norm() / peak))
        .fold(
            (0, 0.0),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        )
}

/// Cnoidal row at `t = 0` plus the chosen perturbation, checked against the
/// `x`-mean constraint.
pub fn assemble_initial_data(
    grid: Grid,
    p: &CnoidalParams,
    perturbation: &Perturbation,
) -> Result<InitialData> {
    let periods = grid.length_x() / p.period();
    if (periods - periods.round()).abs() > 1e-9 * periods.max(1.0) || periods.round() < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "x extent holds {periods} cnoidal periods; an integer is required"
        )));
    }

    let field = match perturbation {
        Perturbation::None => CnoidalWave::new(*p).field(grid, 0.0),
        Perturbation::Gaussian(g) => {
            let base = CnoidalWave::new(*p).field(grid, 0.0);
            base.add(&RealField::from_fn(grid, |x, y| g.value(x, y)))?
        }
        Perturbation::Deformation(d) => deformed_cnoidal_field(grid, p, d)?,
    };

    let spectrum = Fft2d::new(grid).forward(&field)?;
    let profile = spectrum.x_mean_profile();
    let (q, relative) = constraint_defect(&profile, spectrum.max_abs());
    if relative > CONSTRAINT_TOLERANCE {
        return Err(Error::ConstraintViolation {
            mode: grid.y_mode(q),
            relative,
        });
    }
    Ok(InitialData {
        field,
        x_mean_profile: profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;

    #[test]
    fn crest_and_speed() {
        let p = CnoidalParams::centered(2.0, 0.5).unwrap();
        assert_eq!(cnoidal_value(0.0, 0.0, &p), 12.0);
        assert_eq!(p.speed(), -8.0);
        assert_eq!(p.amplitude(), 12.0);
    }

    #[test]
    fn one_period_later_is_the_same() {
        let p = CnoidalParams::centered(2.0, 0.5).unwrap();
        let w = CnoidalWave::new(p);
        for x in [0.0, 0.3, -1.1] {
            assert!((w.value(x + p.period(), 0.0) - w.value(x, 0.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn background_and_phase_shift() {
        let p = CnoidalParams::new(1.0, 0.5, 0.25, 0.7).unwrap();
        let crest = p.u0 + p.amplitude();
        assert!((cnoidal_value(0.7, 0.0, &p) - crest).abs() < 1e-14);
        let t = 0.3;
        let x = 0.7 + (p.speed() + p.u0) * t;
        assert!((cnoidal_value(x, t, &p) - crest).abs() < 1e-12);
    }

    #[test]
    fn soliton_crest_and_decay() {
        let p = CnoidalParams::centered(0.5, 0.5).unwrap();
        assert_eq!(soliton_value(0.0, 0.0, &p), 3.0);
        assert!(soliton_value(100.0, 0.0, &p) < 1e-20);
    }

    #[test]
    fn soliton_limit_of_cnoidal() {
        let p = CnoidalParams::centered(0.5, 1.0 - 1e-10).unwrap();
        for x in [-2.0, -0.5, 0.0, 0.4, 1.5] {
            let diff = (cnoidal_value(x, 0.0, &p) - soliton_value(x, 0.0, &p)).abs();
            assert!(diff < 1e-6, "x = {x}: {diff}");
        }
    }

    #[test]
    fn gaussian_values() {
        let g = GaussianPerturbation { scale: 1.0 };
        assert_eq!(g.value(0.0, 0.3), 0.0);
        let g16 = GaussianPerturbation { scale: 1.0 / 16.0 };
        assert!((g16.value(1.0, 0.0) - (-1.0f64).exp() / 16.0).abs() < 1e-17);
    }

    #[test]
    fn gaussian_maximum_on_axis() {
        // Dense scan oracle for the maximiser of x exp(-x^2).
        let g = GaussianPerturbation { scale: 1.0 };
        let (mut best_x, mut best) = (0.0, f64::MIN);
        for i in 0..=200_000 {
            let x = i as f64 * 1e-5;
            let v = g.value(x, 0.0);
            if v > best {
                best = v;
                best_x = x;
            }
        }
        assert!((best_x - 0.5f64.sqrt()).abs() < 2e-5);
        assert!((best - 0.5f64.sqrt() * (-0.5f64).exp()).abs() < 1e-9);
        assert!((best - 0.42888).abs() < 1e-5);
    }

    fn small_grid(kappa: f64) -> Grid {
        make_grid(128, 16, kappa, EllipticModulus::new(0.5).unwrap(), 4, 2.0).unwrap()
    }

    #[test]
    fn zero_deformation_is_plain_cnoidal() {
        let p = CnoidalParams::centered(0.5, 0.5).unwrap();
        let g = small_grid(0.5);
        let d = DeformationParams::new(0.0, 2.0).unwrap();
        let f = deformed_cnoidal_field(g, &p, &d).unwrap();
        let plain = CnoidalWave::new(p).field(g, 0.0);
        assert!(f.sub(&plain).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn deformation_vanishes_where_cosine_does() {
        let p = CnoidalParams::centered(0.5, 0.5).unwrap();
        let d = DeformationParams::new(0.4, 2.0).unwrap();
        let w = CnoidalWave::new(p);
        let y = std::f64::consts::PI * 2.0 / 8.0;
        assert!(d.offset(y).abs() < 1e-15);
        for x in [-3.0, 0.0, 2.2] {
            let v = w.value_shifted(x + d.offset(y));
            assert!((v - w.value(x, 0.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn deformed_peak_is_unchanged() {
        let p = CnoidalParams::centered(0.5, 0.5).unwrap();
        let g = small_grid(0.5);
        let d = DeformationParams::new(0.4, 2.0).unwrap();
        let f = deformed_cnoidal_field(g, &p, &d).unwrap();
        assert!(f.max_abs() <= 0.75 + 1e-15);
        assert!(f.max_abs() > 0.74);
    }

    #[test]
    fn deformation_requires_centered_wave() {
        let p = CnoidalParams::new(0.5, 0.5, 0.1, 0.0).unwrap();
        let d = DeformationParams::new(0.4, 2.0).unwrap();
        assert!(deformed_cnoidal_field(small_grid(0.5), &p, &d).is_err());
        assert!(DeformationParams::new(-0.1, 2.0).is_err());
    }

    #[test]
    fn unperturbed_data_is_replicated() {
        let p = CnoidalParams::centered(2.0, 0.5).unwrap();
        let g = small_grid(2.0);
        let data = assemble_initial_data(g, &p, &Perturbation::None).unwrap();
        for j in 1..g.ny() {
            assert_eq!(data.field.row(j), data.field.row(0));
        }
        assert!(data.x_mean_profile[0].norm() > 0.0);
    }

    #[test]
    fn non_integer_period_count_is_rejected() {
        let p = CnoidalParams::centered(2.0, 0.5).unwrap();
        let g = Grid::new(64, 8, 1.0, 2.0).unwrap();
        assert!(matches!(
            assemble_initial_data(g, &p, &Perturbation::None),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn constraint_violation_is_detected() {
        // A y-dependent x-mean excites xi_x = 0, xi_y != 0.
        let p = CnoidalParams::centered(2.0, 0.5).unwrap();
        let g = small_grid(2.0);
        let d = DeformationParams::new(0.0, 2.0).unwrap();
        let ok = deformed_cnoidal_field(g, &p, &d).unwrap();
        let bad = ok
            .add(&RealField::from_fn(g, |_, y| 0.1 * (y / g.ly()).cos()))
            .unwrap();
        let spectrum = Fft2d::new(g).forward(&bad).unwrap();
        let (q, rel) = constraint_defect(&spectrum.x_mean_profile(), spectrum.max_abs());
        assert!(rel > CONSTRAINT_TOLERANCE);
        assert_eq!(g.y_mode(q).abs(), 1);
    }
}
