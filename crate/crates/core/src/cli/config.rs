//! Run configuration and the named presets for the figure panels.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::branches::SweepConfig;
use crate::bulk::{gap_components, HalfSpaceParams};
use crate::error::{FlowError, Result};
use crate::fiber::{Grid1D, SpuriousFilter, DOUBLER_LIMIT};
use crate::oracle2d::{Grid2D, PerturbationKind, PerturbationSpec};
use crate::profiles::{DensityProfile, ProfileSet, Shape, SwitchProfile};

/// One stability experiment of the oracle stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityConfig {
    pub name: String,
    pub perturbation: PerturbationSpec,
    pub couplings: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default)]
    pub grid: Grid2D,
    #[serde(default = "default_projection")]
    pub projection: SwitchProfile,
    /// A second projection whose trace must agree with the first.
    #[serde(default = "default_shifted_projection")]
    pub shifted_projection: Option<SwitchProfile>,
    #[serde(default = "default_oracle_density")]
    pub density: DensityProfile,
    #[serde(default = "default_experiments")]
    pub experiments: Vec<StabilityConfig>,
}

fn default_projection() -> SwitchProfile {
    SwitchProfile {
        lower: 0.0,
        upper: 1.0,
        t_lo: -5.0,
        t_hi: 5.0,
        shape: Shape::SmoothBump,
    }
}

fn default_shifted_projection() -> Option<SwitchProfile> {
    Some(SwitchProfile {
        lower: 0.0,
        upper: 1.0,
        t_lo: -5.5,
        t_hi: 4.0,
        shape: Shape::SmoothBump,
    })
}

fn default_oracle_density() -> DensityProfile {
    DensityProfile {
        e1: -1.5,
        e2: 0.6,
        shape: Shape::SmoothBump,
    }
}

fn default_experiments() -> Vec<StabilityConfig> {
    vec![
        StabilityConfig {
            name: "mult_x".into(),
            perturbation: PerturbationSpec::new(PerturbationKind::MultX, 0.5),
            couplings: vec![0.0, 0.5, 1.0],
        },
        StabilityConfig {
            name: "decay_xy".into(),
            perturbation: PerturbationSpec::new(PerturbationKind::DecayXy, 0.3),
            couplings: vec![0.0, 1.0],
        },
        StabilityConfig {
            name: "decay_y".into(),
            perturbation: PerturbationSpec::new(PerturbationKind::DecayY, 1.0),
            couplings: vec![0.0, 0.05],
        },
    ]
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            grid: Grid2D::default(),
            projection: default_projection(),
            shifted_projection: default_shifted_projection(),
            density: default_oracle_density(),
            experiments: default_experiments(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: String,
    pub profiles: ProfileSet,
    #[serde(default)]
    pub grid: Grid1D,
    #[serde(default = "default_sweep")]
    pub sweep: SweepConfig,
    /// Defaults to margin `L/8`, threshold 0.3.
    #[serde(default)]
    pub filter: Option<SpuriousFilter>,
    /// Empty means the midpoint of every gap component inside the window.
    #[serde(default)]
    pub alphas: Vec<f64>,
    /// Fixed density profile; when absent one is centred on each `α`.
    #[serde(default)]
    pub density: Option<DensityProfile>,
    #[serde(default = "default_match_tol")]
    pub match_tol: f64,
    #[serde(default)]
    pub oracle: Option<OracleConfig>,
    #[serde(default = "default_out")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

fn default_sweep() -> SweepConfig {
    SweepConfig {
        window: (-3.8, 3.8),
        ..SweepConfig::default()
    }
}

fn default_match_tol() -> f64 {
    5e-2
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    pub fn new(scenario: &str, profiles: ProfileSet, alphas: Vec<f64>) -> Self {
        RunConfig {
            scenario: scenario.to_string(),
            profiles,
            grid: Grid1D::default(),
            sweep: default_sweep(),
            filter: None,
            alphas,
            density: None,
            match_tol: default_match_tol(),
            oracle: None,
            out_dir: default_out(),
            seed: 0,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.resolve()
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn minus(&self) -> HalfSpaceParams {
        self.profiles.minus()
    }

    pub fn plus(&self) -> HalfSpaceParams {
        self.profiles.plus()
    }

    pub fn filter(&self) -> SpuriousFilter {
        self.filter
            .unwrap_or_else(|| SpuriousFilter::for_grid(&self.grid))
    }

    /// Validate and fill every defaulted field so the config replays as written.
    pub fn resolve(mut self) -> Result<Self> {
        self.profiles.validate()?;
        self.grid.validate()?;
        self.sweep.validate()?;
        let filter = self.filter();
        filter.validate(&self.grid)?;
        self.filter = Some(filter);
        if self.alphas.is_empty() {
            self.alphas = auto_alphas(self.minus(), self.plus(), self.sweep.window);
        }
        if let Some(d) = &self.density {
            d.profile().validate()?;
        }
        if !(self.match_tol > 0.0) {
            return Err(FlowError::Config(format!(
                "match_tol must be positive, got {}",
                self.match_tol
            )));
        }
        if let Some(o) = &self.oracle {
            o.grid.validate()?;
        }
        Ok(self)
    }
}

/// Midpoints of gap components of width at least 0.1 lying 0.5 inside the window.
pub fn auto_alphas(minus: HalfSpaceParams, plus: HalfSpaceParams, window: (f64, f64)) -> Vec<f64> {
    gap_components(minus, plus, window.0 + 0.5, window.1 - 0.5)
        .into_iter()
        .filter(|(a, b)| b - a >= 0.1)
        .map(|(a, b)| 0.5 * (a + b))
        .collect()
}

pub const PRESETS: [&str; 8] = [
    "fig1-top-left",
    "fig1-top-right",
    "fig1-bottom-left",
    "fig1-bottom-right",
    "fig2-top-left",
    "fig2-top-right",
    "fig2-bottom-left",
    "fig2-bottom-right",
];

fn hp(b: f64, m: f64, v: f64) -> HalfSpaceParams {
    HalfSpaceParams { b, m, v }
}

/// Named scenario for one of the eight figure panels.
pub fn preset(name: &str) -> Result<RunConfig> {
    let (minus, plus, alphas) = match name {
        "fig1-top-left" => (hp(2.0, 2.0, 0.0), hp(2.0, 2.0, 0.0), vec![0.1]),
        "fig1-top-right" => (hp(2.0, -2.0, 0.0), hp(2.0, 2.0, 0.0), vec![0.1]),
        "fig1-bottom-left" => (hp(-2.0, 0.0, 0.0), hp(2.0, 0.0, 0.0), vec![0.1, 1.0]),
        "fig1-bottom-right" => (hp(-2.0, 2.0, 0.0), hp(2.0, 2.0, 0.0), vec![0.1]),
        "fig2-top-left" => (hp(-2.0, -2.0, 0.0), hp(2.0, 2.0, 0.0), vec![]),
        "fig2-top-right" => (hp(-2.0, -2.0, -0.1), hp(2.0, 2.0, 0.1), vec![0.0, 2.5]),
        "fig2-bottom-left" => (hp(-2.0, -2.0, -0.5), hp(2.0, 2.0, 0.5), vec![]),
        "fig2-bottom-right" => (hp(-2.0, -2.0, -2.0), hp(2.0, 2.0, 2.0), vec![]),
        other => return Err(FlowError::UnknownPreset(other.to_string())),
    };
    let mut cfg = RunConfig::new(name, ProfileSet::from_half_spaces(minus, plus), alphas);
    // same-sign fields need a finer grid: A2 reaches -|B| L at the far wall
    cfg.grid = cfg
        .grid
        .refined_for(&cfg.profiles, cfg.sweep.zeta_max, DOUBLER_LIMIT);
    if name == "fig2-top-right" {
        cfg.oracle = Some(OracleConfig::default());
    }
    cfg.out_dir = PathBuf::from("out").join(name);
    cfg.resolve()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_resolves() {
        for name in PRESETS {
            let cfg = preset(name).unwrap();
            assert!(!cfg.alphas.is_empty(), "{name}");
            assert!(cfg.filter.is_some());
            assert!(
                cfg.grid.doubler_ratio(&cfg.profiles, cfg.sweep.zeta_max) <= DOUBLER_LIMIT,
                "{name}"
            );
        }
        assert!(matches!(preset("fig3"), Err(FlowError::UnknownPreset(_))));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let cfg = preset("fig2-top-right").unwrap();
        let mut v = serde_json::to_value(&cfg).unwrap();
        v["colour"] = serde_json::json!("blue");
        assert!(RunConfig::from_json(&v.to_string()).is_err());
    }

    #[test]
    fn resolved_config_round_trips() {
        let cfg = preset("fig1-bottom-left").unwrap();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back = RunConfig::from_json(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(serde_json::to_string_pretty(&back).unwrap(), text);
    }

    #[test]
    fn minimal_json_gets_defaults() {
        let text = r#"{
            "scenario": "mini",
            "profiles": {
                "B": {"lower": 2.0, "upper": 2.0, "t_lo": -1.0, "t_hi": 1.0},
                "m": {"lower": -2.0, "upper": 2.0, "t_lo": -1.0, "t_hi": 1.0},
                "V": {"lower": 0.0, "upper": 0.0, "t_lo": -1.0, "t_hi": 1.0}
            }
        }"#;
        let cfg = RunConfig::from_json(text).unwrap();
        assert_eq!(cfg.grid, Grid1D::default());
        assert!(cfg.alphas.iter().any(|a| a.abs() < 2.0));
        assert_eq!(cfg.filter.unwrap().threshold, 0.3);
    }
}
