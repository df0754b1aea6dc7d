//! Named experiment definitions.

use kp_core::kp::Equation;
use serde::Serialize;

use crate::config::{ExperimentConfig, PerturbationSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    #[serde(serialize_with = "serialize_equation")]
    pub equation: Equation,
    pub kappa: f64,
    pub perturbation: PerturbationSpec,
    pub t_end: f64,
    pub nt: usize,
}

fn serialize_equation<S: serde::Serializer>(e: &Equation, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(e.name())
}

/// Deformation amplitude used by the `cos` presets.
pub const DEFORMATION_DELTA: f64 = 0.4;

/// The small-amplitude runs use a 16x longer horizon and a 16x weaker
/// Gaussian so the perturbation has the same size relative to the wave.
const SMALL_KAPPA_SCALE: f64 = 16.0;

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "kp1-gauss-k2",
        description: "KP-I, kappa=2, cnoidal + Gaussian bump: wave breaks up into an array of humps",
        equation: Equation::Kp1,
        kappa: 2.0,
        perturbation: PerturbationSpec::Gaussian { scale: 1.0 },
        t_end: 2.0,
        nt: 10_000,
    },
    Preset {
        name: "kp2-gauss-k2",
        description: "KP-II, kappa=2, cnoidal + Gaussian bump: difference to the cnoidal wave spreads out",
        equation: Equation::Kp2,
        kappa: 2.0,
        perturbation: PerturbationSpec::Gaussian { scale: 1.0 },
        t_end: 2.0,
        nt: 10_000,
    },
    Preset {
        name: "kp1-gauss-k05",
        description: "KP-I, kappa=0.5, cnoidal + Gaussian/16: stable, difference to the cnoidal wave",
        equation: Equation::Kp1,
        kappa: 0.5,
        perturbation: PerturbationSpec::Gaussian {
            scale: 1.0 / SMALL_KAPPA_SCALE,
        },
        t_end: 2.0 * SMALL_KAPPA_SCALE,
        nt: 10_000,
    },
    Preset {
        name: "kp2-gauss-k05",
        description: "KP-II, kappa=0.5, cnoidal + Gaussian/16: stable, difference to the cnoidal wave",
        equation: Equation::Kp2,
        kappa: 0.5,
        perturbation: PerturbationSpec::Gaussian {
            scale: 1.0 / SMALL_KAPPA_SCALE,
        },
        t_end: 2.0 * SMALL_KAPPA_SCALE,
        nt: 10_000,
    },
    Preset {
        name: "kp2-cos-k05",
        description: "KP-II, kappa=0.5, y-periodically deformed cnoidal wave: solution snapshots, L-infinity trace",
        equation: Equation::Kp2,
        kappa: 0.5,
        perturbation: PerturbationSpec::Deformation {
            delta: DEFORMATION_DELTA,
        },
        t_end: 2.0 * SMALL_KAPPA_SCALE,
        nt: 10_000,
    },
    Preset {
        name: "kp1-cos-k05",
        description: "KP-I, kappa=0.5, y-periodically deformed cnoidal wave: solution snapshots, L-infinity trace",
        equation: Equation::Kp1,
        kappa: 0.5,
        perturbation: PerturbationSpec::Deformation {
            delta: DEFORMATION_DELTA,
        },
        t_end: 2.0 * SMALL_KAPPA_SCALE,
        nt: 10_000,
    },
    Preset {
        name: "kp1-cos-k2",
        description: "KP-I, kappa=2, y-periodically deformed cnoidal wave: breathing doubly periodic pattern",
        equation: Equation::Kp1,
        kappa: 2.0,
        perturbation: PerturbationSpec::Deformation {
            delta: DEFORMATION_DELTA,
        },
        t_end: 2.0,
        nt: 10_000,
    },
    Preset {
        name: "kp2-cos-k2",
        description: "KP-II, kappa=2, y-periodically deformed cnoidal wave: initial state recurs",
        equation: Equation::Kp2,
        kappa: 2.0,
        perturbation: PerturbationSpec::Deformation {
            delta: DEFORMATION_DELTA,
        },
        t_end: 2.0,
        nt: 10_000,
    },
    Preset {
        name: "validate",
        description: "KP-I, kappa=2, unperturbed cnoidal wave: propagation accuracy check",
        equation: Equation::Kp1,
        kappa: 2.0,
        perturbation: PerturbationSpec::None,
        t_end: 2.0,
        nt: 10_000,
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

impl Preset {
    pub fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            preset: Some(self.name.to_string()),
            equation: self.equation,
            kappa: self.kappa,
            perturbation: self.perturbation,
            t_end: self.t_end,
            nt: self.nt,
            ..ExperimentConfig::default()
        }
    }

    pub fn perturbation_label(&self) -> String {
        match self.perturbation {
            PerturbationSpec::None => "none".into(),
            PerturbationSpec::Gaussian { scale } => format!("gaussian({scale})"),
            PerturbationSpec::Deformation { delta } => format!("deformation({delta})"),
        }
    }
}

/// Human-readable preset table.
pub fn table() -> String {
    let mut out = format!(
        "{:<14} {:<4} {:>6} {:<18} {:>6} {:>6}  {}\n",
        "name", "eq", "kappa", "perturbation", "t_end", "nt", "description"
    );
    for p in PRESETS {
        out.push_str(&format!(
            "{:<14} {:<4} {:>6} {:<18} {:>6} {:>6}  {}\n",
            p.name,
            p.equation.name(),
            p.kappa,
            p.perturbation_label(),
            p.t_end,
            p.nt,
            p.description
        ));
    }
    out
}

pub fn table_json() -> String {
    serde_json::to_string_pretty(PRESETS).expect("preset table serializes")
}
