//! Experiment configuration: defaults, presets, `key = value` files and
//! command-line overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use kp_core::kp::Equation;
use serde::Serialize;
use thiserror::Error;

use crate::presets;

#[derive(Error, Debug)]
pub enum ConfigError {
    #[error("{path}:{line}: {msg}")]
    Syntax {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("unknown configuration key '{0}'")]
    UnknownKey(String),

    #[error("invalid value '{value}' for '{key}': {msg}")]
    Value {
        key: String,
        value: String,
        msg: String,
    },

    #[error("unknown preset '{0}' (see `presets`)")]
    UnknownPreset(String),

    #[error("{0}")]
    Invalid(String),

    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PerturbationSpec {
    None,
    Gaussian { scale: f64 },
    Deformation { delta: f64 },
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub preset: Option<String>,
    #[serde(serialize_with = "serialize_equation")]
    pub equation: Equation,
    pub kappa: f64,
    pub k: f64,
    pub u0: f64,
    pub x0: f64,
    pub perturbation: PerturbationSpec,
    pub nx: usize,
    pub ny: usize,
    pub periods: u32,
    pub ly: f64,
    pub t_end: f64,
    pub nt: usize,
    /// Explicit snapshot schedule; `None` means quarters of `t_end`.
    pub snapshot_times: Option<Vec<f64>>,
    /// Diagnostics cadence in steps; `None` means about 200 rows per run.
    pub diag_every: Option<usize>,
    pub output_dir: PathBuf,
    pub dealias: bool,
    pub threads: Option<usize>,
}

fn serialize_equation<S: serde::Serializer>(e: &Equation, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(e.name())
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            preset: None,
            equation: Equation::Kp1,
            kappa: 2.0,
            k: 0.5,
            u0: 0.0,
            x0: 0.0,
            perturbation: PerturbationSpec::None,
            nx: 1 << 10,
            ny: 1 << 8,
            periods: 8,
            ly: 2.0,
            t_end: 2.0,
            nt: 10_000,
            snapshot_times: None,
            diag_every: None,
            output_dir: PathBuf::from("out"),
            dealias: false,
            threads: None,
        }
    }
}

/// Target number of diagnostics rows when no cadence is given.
pub const DEFAULT_DIAG_ROWS: usize = 200;

impl ExperimentConfig {
    pub fn from_preset(name: &str) -> Result<Self, ConfigError> {
        let p = presets::find(name).ok_or_else(|| ConfigError::UnknownPreset(name.into()))?;
        Ok(p.config())
    }

    pub fn resolved_snapshot_times(&self) -> Vec<f64> {
        match &self.snapshot_times {
            Some(t) => t.clone(),
            None => (0..=4).map(|i| self.t_end * i as f64 / 4.0).collect(),
        }
    }

    pub fn resolved_diag_every(&self) -> usize {
        self.diag_every
            .unwrap_or_else(|| (self.nt / DEFAULT_DIAG_ROWS).max(1))
    }

    /// `kappa_c = 3^{-1/4}`.
    pub fn kappa_critical(&self) -> f64 {
        kp_core::kappa_critical()
    }

    /// Which side of `kappa_c` the run is on.
    pub fn regime(&self) -> &'static str {
        if self.kappa > self.kappa_critical() {
            "above-critical"
        } else {
            "below-critical"
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let finite = [self.kappa, self.k, self.u0, self.x0, self.ly, self.t_end]
            .iter()
            .all(|v| v.is_finite());
        let pert_finite = match self.perturbation {
            PerturbationSpec::None => true,
            PerturbationSpec::Gaussian { scale } => scale.is_finite(),
            PerturbationSpec::Deformation { delta } => delta.is_finite(),
        };
        if !(finite && pert_finite) {
            return Err(ConfigError::Invalid(
                "all numeric parameters must be finite".into(),
            ));
        }
        if self.t_end <= 0.0 {
            return Err(ConfigError::Invalid(format!(
                "t-end must be positive, got {}",
                self.t_end
            )));
        }
        if self.nt == 0 {
            return Err(ConfigError::Invalid("nt must be at least 1".into()));
        }
        if let Some(ts) = &self.snapshot_times {
            if ts.iter().any(|t| !t.is_finite()) {
                return Err(ConfigError::Invalid("snapshot times must be finite".into()));
            }
        }
        if self.diag_every == Some(0) {
            return Err(ConfigError::Invalid("diag-every must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(ConfigError::Invalid("threads must be at least 1".into()));
        }
        Ok(())
    }

    /// Applies one `key = value` setting. Keys are the long flag names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        match key.trim() {
            "preset" => {
                let preset = Self::from_preset(v)?;
                *self = Self {
                    output_dir: self.output_dir.clone(),
                    threads: self.threads,
                    ..preset
                };
            }
            "equation" => self.equation = v.parse().map_err(|e: kp_core::Error| bad(key, v, e))?,
            "kappa" => self.kappa = parse(key, v)?,
            "k" => self.k = parse(key, v)?,
            "u0" => self.u0 = parse(key, v)?,
            "x0" => self.x0 = parse(key, v)?,
            "perturbation" => match v {
                "none" => self.perturbation = PerturbationSpec::None,
                other => {
                    return Err(bad(
                        key,
                        other,
                        "only 'none' is accepted; use delta or gauss-scale",
                    ))
                }
            },
            "delta" => {
                self.perturbation = PerturbationSpec::Deformation {
                    delta: parse(key, v)?,
                }
            }
            "gauss-scale" => {
                self.perturbation = PerturbationSpec::Gaussian {
                    scale: parse(key, v)?,
                }
            }
            "nx" => self.nx = parse(key, v)?,
            "ny" => self.ny = parse(key, v)?,
            "periods" => self.periods = parse(key, v)?,
            "ly" => self.ly = parse(key, v)?,
            "t-end" => self.t_end = parse(key, v)?,
            "nt" => self.nt = parse(key, v)?,
            "snapshots" => self.snapshot_times = Some(parse_list(key, v)?),
            "diag-every" => self.diag_every = Some(parse(key, v)?),
            "out" => self.output_dir = PathBuf::from(v),
            "dealias" => self.dealias = parse_bool(key, v)?,
            "threads" => self.threads = Some(parse(key, v)?),
            other => return Err(ConfigError::UnknownKey(other.into())),
        }
        Ok(())
    }

    /// Applies settings in order; a `preset` entry is applied first so the
    /// remaining keys override it.
    pub fn apply_all(&mut self, settings: &[(String, String)]) -> Result<(), ConfigError> {
        if let Some((_, name)) = settings.iter().rev().find(|(k, _)| k == "preset") {
            self.set("preset", name)?;
        }
        for (k, v) in settings.iter().filter(|(k, _)| k != "preset") {
            self.set(k, v)?;
        }
        Ok(())
    }
}

fn bad(key: &str, value: &str, msg: impl ToString) -> ConfigError {
    ConfigError::Value {
        key: key.into(),
        value: value.into(),
        msg: msg.to_string(),
    }
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    v.parse().map_err(|e: T::Err| bad(key, v, e))
}

fn parse_bool(key: &str, v: &str) -> Result<bool, ConfigError> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(bad(key, v, "expected a boolean")),
    }
}

pub fn parse_list(key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect()
}

/// Parses flat `key = value` text. `#` starts a comment; blank lines are
/// ignored. Later duplicates win when applied.
pub fn parse_config_text(text: &str, origin: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            path: origin.into(),
            line: n + 1,
            msg: format!("expected `key = value`, got `{line}`"),
        })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(ConfigError::Syntax {
                path: origin.into(),
                line: n + 1,
                msg: "empty key".into(),
            });
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config_text(&text, &path.display().to_string())
}

/// Renders the settings that reproduce `cfg` in the config-file syntax.
pub fn to_config_text(cfg: &ExperimentConfig) -> String {
    let mut m = BTreeMap::new();
    m.insert("equation", cfg.equation.name().to_string());
    m.insert("kappa", format!("{:?}", cfg.kappa));
    m.insert("k", format!("{:?}", cfg.k));
    m.insert("u0", format!("{:?}", cfg.u0));
    m.insert("x0", format!("{:?}", cfg.x0));
    match cfg.perturbation {
        PerturbationSpec::None => {
            m.insert("perturbation", "none".into());
        }
        PerturbationSpec::Gaussian { scale } => {
            m.insert("gauss-scale", format!("{scale:?}"));
        }
        PerturbationSpec::Deformation { delta } => {
            m.insert("delta", format!("{delta:?}"));
        }
    }
    m.insert("nx", cfg.nx.to_string());
    m.insert("ny", cfg.ny.to_string());
    m.insert("periods", cfg.periods.to_string());
    m.insert("ly", format!("{:?}", cfg.ly));
    m.insert("t-end", format!("{:?}", cfg.t_end));
    m.insert("nt", cfg.nt.to_string());
    let snaps: Vec<String> = cfg
        .resolved_snapshot_times()
        .iter()
        .map(|t| format!("{t:?}"))
        .collect();
    m.insert("snapshots", snaps.join(","));
    m.insert("diag-every", cfg.resolved_diag_every().to_string());
    m.insert("dealias", cfg.dealias.to_string());
    m.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let text = "# header\nkappa = 0.5\n\n  nt=400   # steps\nsnapshots = 0, 1.5,3\n";
        let pairs = parse_config_text(text, "test").unwrap();
        assert_eq!(pairs.len(), 3);
        let mut cfg = ExperimentConfig::default();
        cfg.apply_all(&pairs).unwrap();
        assert_eq!(cfg.kappa, 0.5);
        assert_eq!(cfg.nt, 400);
        assert_eq!(cfg.snapshot_times, Some(vec![0.0, 1.5, 3.0]));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = parse_config_text("kappa = 1\nbogus line\n", "f.cfg").unwrap_err();
        assert!(err.to_string().starts_with("f.cfg:2:"), "{err}");
    }

    #[test]
    fn unknown_keys_and_bad_values() {
        let mut cfg = ExperimentConfig::default();
        assert!(matches!(
            cfg.set("colour", "red"),
            Err(ConfigError::UnknownKey(_))
        ));
        assert!(matches!(
            cfg.set("kappa", "two"),
            Err(ConfigError::Value { .. })
        ));
        assert!(matches!(
            cfg.set("equation", "kp3"),
            Err(ConfigError::Value { .. })
        ));
        assert!(matches!(
            cfg.set("preset", "nope"),
            Err(ConfigError::UnknownPreset(_))
        ));
    }

    #[test]
    fn preset_is_applied_before_overrides() {
        let pairs = vec![
            ("nt".to_string(), "40".to_string()),
            ("preset".to_string(), "kp2-cos-k05".to_string()),
        ];
        let mut cfg = ExperimentConfig::default();
        cfg.apply_all(&pairs).unwrap();
        assert_eq!(cfg.equation, Equation::Kp2);
        assert_eq!(cfg.kappa, 0.5);
        assert_eq!(cfg.nt, 40);
        assert_eq!(cfg.preset.as_deref(), Some("kp2-cos-k05"));
    }

    #[test]
    fn default_schedule_is_quarters() {
        let cfg = ExperimentConfig {
            t_end: 32.0,
            ..Default::default()
        };
        assert_eq!(
            cfg.resolved_snapshot_times(),
            vec![0.0, 8.0, 16.0, 24.0, 32.0]
        );
        assert_eq!(cfg.resolved_diag_every(), 50);
    }

    #[test]
    fn config_text_round_trips() {
        let mut cfg = ExperimentConfig::from_preset("kp1-gauss-k05").unwrap();
        cfg.dealias = true;
        let text = to_config_text(&cfg);
        let mut back = ExperimentConfig::default();
        back.apply_all(&parse_config_text(&text, "rt").unwrap())
            .unwrap();
        assert_eq!(back.equation, cfg.equation);
        assert_eq!(back.kappa, cfg.kappa);
        assert_eq!(back.perturbation, cfg.perturbation);
        assert_eq!(back.t_end, cfg.t_end);
        assert_eq!(back.nt, cfg.nt);
        assert!(back.dealias);
    }

    #[test]
    fn validation_rejects_nonsense() {
        let bad = [
            ExperimentConfig {
                t_end: 0.0,
                ..ExperimentConfig::default()
            },
            ExperimentConfig {
                kappa: f64::NAN,
                ..ExperimentConfig::default()
            },
            ExperimentConfig {
                nt: 0,
                ..ExperimentConfig::default()
            },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err());
        }
        assert!(ExperimentConfig::default().validate().is_ok());
    }

    #[test]
    fn regime_uses_critical_kappa() {
        let mut cfg = ExperimentConfig::default();
        assert_eq!(cfg.regime(), "above-critical");
        cfg.kappa = 0.5;
        assert_eq!(cfg.regime(), "below-critical");
        assert!((cfg.kappa_critical() - 0.7598356856515925).abs() < 1e-15);
    }
}
