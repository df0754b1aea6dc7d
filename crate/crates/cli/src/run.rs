//! Running experiments and the built-in propagation check.

use std::fs;
use std::path::{Path, PathBuf};

use kp_core::diagnostics::{DiagnosticsRecord, Recorder, Reference};
use kp_core::elliptic::EllipticModulus;
use kp_core::etd::{evolve, EvolveSpec, Observation, Observer};
use kp_core::kp::{Equation, KpNonlinear, KpParams, LinearSymbol};
use kp_core::spectral::{make_grid, Fft2d, Grid, SpectralField};
use kp_core::waves::{
    assemble_initial_data, CnoidalParams, DeformationParams, GaussianPerturbation, Perturbation,
};
use serde::Serialize;
use serde_json::json;

use crate::config::{to_config_text, ConfigError, ExperimentConfig, PerturbationSpec};
use crate::output::{
    self, snapshot_stem, write_diagnostics_csv, FormatError, SnapshotMeta, DIAGNOSTICS_FILE,
    FORMAT_VERSION, MANIFEST_FILE,
};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("initial data rejected: {0}")]
    Constraint(kp_core::Error),

    #[error("solution blew up: non-finite coefficient at t = {t}")]
    NonFinite { t: f64 },

    #[error(transparent)]
    Solver(kp_core::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Format(#[from] FormatError),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Constraint(_) => 3,
            RunError::NonFinite { .. } => 4,
            _ => 1,
        }
    }
}

impl From<kp_core::Error> for RunError {
    fn from(e: kp_core::Error) -> Self {
        match e {
            kp_core::Error::ConstraintViolation { .. } => RunError::Constraint(e),
            kp_core::Error::NonFinite { t } => RunError::NonFinite { t },
            kp_core::Error::InvalidGrid(_)
            | kp_core::Error::InvalidParameter(_)
            | kp_core::Error::ModulusDomain(_) => {
                RunError::Config(ConfigError::Invalid(e.to_string()))
            }
            other => RunError::Solver(other),
        }
    }
}

/// Quantities derived from a configuration.
#[derive(Debug, Clone, Serialize)]
pub struct Derived {
    pub lx: f64,
    pub ly: f64,
    pub speed: f64,
    pub period: f64,
    pub amplitude: f64,
    pub h: f64,
    pub kappa_c: f64,
    pub regime: &'static str,
    pub snapshot_times: Vec<f64>,
    pub diag_every: usize,
    pub threads: usize,
}

/// A configuration turned into solver objects.
pub struct Setup {
    pub grid: Grid,
    pub fft: Fft2d,
    pub params: CnoidalParams,
    pub u0: SpectralField,
    pub reference: Reference,
    pub derived: Derived,
}

impl Setup {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self, RunError> {
        cfg.validate()?;
        let k = EllipticModulus::new(cfg.k)?;
        let params = CnoidalParams::new(cfg.kappa, cfg.k, cfg.u0, cfg.x0)?;
        let grid = make_grid(cfg.nx, cfg.ny, cfg.kappa, k, cfg.periods, cfg.ly)?;
        let (perturbation, reference) = match cfg.perturbation {
            PerturbationSpec::None => (Perturbation::None, Reference::Cnoidal(params)),
            PerturbationSpec::Gaussian { scale } => (
                Perturbation::Gaussian(GaussianPerturbation { scale }),
                Reference::Cnoidal(params),
            ),
            PerturbationSpec::Deformation { delta } => {
                let d = DeformationParams::new(delta, cfg.ly)?;
                (
                    Perturbation::Deformation(d),
                    Reference::DeformedCnoidal(params, d),
                )
            }
        };
        let initial = assemble_initial_data(grid, &params, &perturbation)?;
        let fft = Fft2d::new(grid);
        let u0 = fft.forward(&initial.field)?;
        let derived = Derived {
            lx: grid.lx(),
            ly: grid.ly(),
            speed: params.speed(),
            period: params.period(),
            amplitude: params.amplitude(),
            h: cfg.t_end / cfg.nt as f64,
            kappa_c: cfg.kappa_critical(),
            regime: cfg.regime(),
            snapshot_times: cfg.resolved_snapshot_times(),
            diag_every: cfg.resolved_diag_every(),
            threads: rayon::current_num_threads(),
        };
        Ok(Self {
            grid,
            fft,
            params,
            u0,
            reference,
            derived,
        })
    }

    pub fn evolve_spec(&self, cfg: &ExperimentConfig) -> EvolveSpec {
        EvolveSpec {
            t_end: cfg.t_end,
            nt: cfg.nt,
            snapshot_times: self.derived.snapshot_times.clone(),
            observe_every: self.derived.diag_every,
        }
    }
}

/// Result of a completed (or aborted) run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub records: Vec<DiagnosticsRecord>,
    /// Records taken at the snapshot times, in order.
    pub snapshot_records: Vec<DiagnosticsRecord>,
    pub snapshot_paths: Vec<PathBuf>,
    pub max_constraint_defect: f64,
    pub max_profile_drift: f64,
    pub failure_time: Option<f64>,
    pub final_field: Option<SpectralField>,
}

struct RunObserver<'a> {
    recorder: Recorder,
    fft: &'a Fft2d,
    out_dir: Option<&'a Path>,
    meta: SnapshotMeta,
    snapshot_records: Vec<DiagnosticsRecord>,
    snapshot_paths: Vec<PathBuf>,
}

impl Observer for RunObserver<'_> {
    fn observe(&mut self, obs: Observation<'_>) -> kp_core::Result<()> {
        self.recorder.observe(obs)?;
        if obs.snapshot {
            let rec = *self.recorder.records().last().expect("just recorded");
            self.snapshot_records.push(rec);
            if let Some(dir) = self.out_dir {
                let field = self.fft.inverse(obs.field)?;
                let meta = SnapshotMeta {
                    t: obs.t,
                    ..self.meta.clone()
                };
                let stem = snapshot_stem(self.snapshot_paths.len());
                // Write failures surface after the run through the path count.
                if let Ok(p) = output::write_snapshot(dir, &stem, &meta, field.values()) {
                    self.snapshot_paths.push(p);
                }
            }
        }
        Ok(())
    }
}

fn snapshot_meta(cfg: &ExperimentConfig, grid: &Grid) -> SnapshotMeta {
    let (delta, scale) = match cfg.perturbation {
        PerturbationSpec::None => (None, None),
        PerturbationSpec::Gaussian { scale } => (None, Some(scale)),
        PerturbationSpec::Deformation { delta } => (Some(delta), None),
    };
    SnapshotMeta {
        t: 0.0,
        nx: grid.nx(),
        ny: grid.ny(),
        lx: grid.lx(),
        ly: grid.ly(),
        equation: cfg.equation.name().into(),
        kappa: cfg.kappa,
        k: cfg.k,
        delta,
        scale,
        format_version: FORMAT_VERSION,
    }
}

/// Runs the solver for `cfg`; writes files when `out_dir` is given.
pub fn simulate(
    cfg: &ExperimentConfig,
    out_dir: Option<&Path>,
) -> Result<(Setup, RunSummary), RunError> {
    let setup = Setup::new(cfg)?;
    let spec = setup.evolve_spec(cfg);
    spec.snapshot_steps()?;
    let symbol = LinearSymbol::new(
        setup.grid,
        KpParams {
            equation: cfg.equation,
        },
    );
    let mut nonlinear = KpNonlinear::new(setup.fft.clone(), cfg.dealias);
    let mut observer = RunObserver {
        recorder: Recorder::new(setup.fft.clone(), cfg.equation, setup.reference.clone()),
        fft: &setup.fft,
        out_dir,
        meta: snapshot_meta(cfg, &setup.grid),
        snapshot_records: Vec::new(),
        snapshot_paths: Vec::new(),
    };
    let result = evolve(
        setup.u0.clone(),
        symbol.values(),
        &spec,
        &mut nonlinear,
        &mut observer,
    );
    let (final_field, failure_time) = match result {
        Ok(u) => (Some(u), None),
        Err(kp_core::Error::NonFinite { t }) => (None, Some(t)),
        Err(e) => return Err(e.into()),
    };
    let summary = RunSummary {
        max_constraint_defect: observer.recorder.max_constraint_defect(),
        max_profile_drift: observer.recorder.max_profile_drift(),
        snapshot_records: observer.snapshot_records,
        snapshot_paths: observer.snapshot_paths,
        records: observer.recorder.into_records(),
        failure_time,
        final_field,
    };
    if let Some(dir) = out_dir {
        let expected = summary.snapshot_records.len();
        if summary.snapshot_paths.len() != expected {
            return Err(RunError::Io(std::io::Error::other(format!(
                "wrote {} of {expected} snapshots to {}",
                summary.snapshot_paths.len(),
                dir.display()
            ))));
        }
    }
    Ok((setup, summary))
}

pub fn manifest_json(
    cfg: &ExperimentConfig,
    setup: &Setup,
    summary: &RunSummary,
) -> serde_json::Value {
    let last = summary.records.last();
    json!({
        "format_version": FORMAT_VERSION,
        "config": cfg,
        "derived": setup.derived,
        "rerun_config": to_config_text(cfg),
        "status": if summary.failure_time.is_some() { "non-finite" } else { "completed" },
        "failure_time": summary.failure_time,
        "files": {
            "diagnostics": DIAGNOSTICS_FILE,
            "snapshots": summary.snapshot_paths.iter()
                .map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
                .collect::<Vec<_>>(),
        },
        "summary": {
            "rows": summary.records.len(),
            "final_t": last.map(|r| r.t),
            "final_delta": last.map(|r| r.delta),
            "final_dev_linf": last.and_then(|r| r.dev_linf),
            "max_abs_delta": summary.records.iter().fold(0.0_f64, |m, r| m.max(r.delta.abs())),
            "max_constraint_defect": summary.max_constraint_defect,
            "max_profile_drift": summary.max_profile_drift,
        },
    })
}

/// Runs `cfg` and writes snapshots, the diagnostics CSV and the manifest into
/// `cfg.output_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunSummary, RunError> {
    // Setup errors must not leave an output directory behind.
    Setup::new(cfg)?;
    fs::create_dir_all(&cfg.output_dir)?;
    let (setup, summary) = simulate(cfg, Some(&cfg.output_dir))?;
    write_diagnostics_csv(&cfg.output_dir.join(DIAGNOSTICS_FILE), &summary.records)?;
    let manifest = manifest_json(cfg, &setup, &summary);
    fs::write(
        cfg.output_dir.join(MANIFEST_FILE),
        serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n",
    )?;
    match summary.failure_time {
        Some(t) => Err(RunError::NonFinite { t }),
        None => Ok(summary),
    }
}

/// Pass thresholds for the propagation check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub dev_linf: f64,
    pub delta: f64,
}

/// `kappa <= 0.5` is held to near machine precision, larger amplitudes to the
/// looser bound.
pub fn thresholds_for(kappa: f64) -> Thresholds {
    if kappa <= 0.5 {
        Thresholds {
            dev_linf: 1e-11,
            delta: 1e-10,
        }
    } else {
        Thresholds {
            dev_linf: 1e-6,
            delta: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    #[serde(serialize_with = "serialize_equation")]
    pub equation: Equation,
    pub kappa: f64,
    pub nt: usize,
    pub t_end: f64,
    /// Max-norm deviation from the translated exact wave at `t_end`.
    pub dev_linf: f64,
    /// Mass error at `t_end`.
    pub delta: f64,
    /// Largest `|delta|` over the observations.
    pub max_abs_delta: f64,
    pub energy_drift: f64,
    /// Largest transverse x-mean content relative to the peak coefficient.
    pub max_constraint_defect: f64,
    pub thresholds: Thresholds,
    pub passed: bool,
}

fn serialize_equation<S: serde::Serializer>(e: &Equation, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(e.name())
}

impl ValidationReport {
    pub fn render(&self) -> String {
        format!(
            "equation={} kappa={} nt={} t_end={}\n\
             dev_linf = {:.3e} (limit {:.0e})\n\
             delta    = {:.3e} (limit {:.0e}, max |delta| {:.3e})\n\
             energy drift = {:.3e}\n\
             constraint defect = {:.3e}\n\
             {}\n",
            self.equation,
            self.kappa,
            self.nt,
            self.t_end,
            self.dev_linf,
            self.thresholds.dev_linf,
            self.delta,
            self.thresholds.delta,
            self.max_abs_delta,
            self.energy_drift,
            self.max_constraint_defect,
            if self.passed { "PASS" } else { "FAIL" }
        )
    }
}

/// Propagates the unperturbed cnoidal wave and compares with the exact
/// translation.
pub fn validate(cfg: &ExperimentConfig) -> Result<ValidationReport, RunError> {
    let cfg = ExperimentConfig {
        perturbation: PerturbationSpec::None,
        snapshot_times: Some(vec![]),
        ..cfg.clone()
    };
    let (_, summary) = simulate(&cfg, None)?;
    if let Some(t) = summary.failure_time {
        return Err(RunError::NonFinite { t });
    }
    let first = summary.records.first().expect("initial observation");
    let last = summary.records.last().expect("final observation");
    let thresholds = thresholds_for(cfg.kappa);
    let dev_linf = last.dev_linf.expect("cnoidal reference configured");
    let max_abs_delta = summary
        .records
        .iter()
        .fold(0.0_f64, |m, r| m.max(r.delta.abs()));
    let passed = dev_linf <= thresholds.dev_linf && max_abs_delta <= thresholds.delta;
    Ok(ValidationReport {
        equation: cfg.equation,
        kappa: cfg.kappa,
        nt: cfg.nt,
        t_end: cfg.t_end,
        dev_linf,
        delta: last.delta,
        max_abs_delta,
        energy_drift: (last.energy - first.energy).abs() / first.energy.abs(),
        max_constraint_defect: summary.max_constraint_defect,
        thresholds,
        passed,
    })
}
