//! Scenario configuration: a JSON document whose fields can each be
//! overridden from the command line.

use isolator_core::tla::critical_point;
use isolator_core::{DriveParams3, ModelParams, Side};
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ModelKind {
    #[default]
    TwoLevel,
    ThreeLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ScenarioKind {
    #[default]
    SingleBeam,
    TwoBeam,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// How grid endpoints are read: as absolute values, in multiples of the
/// two-level critical intensity, or in multiples of `Γ_t` (spectra).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Units {
    #[default]
    Absolute,
    Critical,
    Linewidth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum SideConfig {
    #[default]
    Left,
    Right,
}

impl From<SideConfig> for Side {
    fn from(s: SideConfig) -> Self {
        match s {
            SideConfig::Left => Side::Left,
            SideConfig::Right => Side::Right,
        }
    }
}

/// Observables a sweep can report, in their fixed column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Observable {
    TLr,
    TRl,
    DeltaT,
    DeltaTNorm,
    TCoh,
    TInc,
}

impl Observable {
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Observable::TLr => &["t_lr"],
            Observable::TRl => &["t_rl"],
            Observable::DeltaT => &["delta_t"],
            Observable::DeltaTNorm => &["delta_t_norm"],
            Observable::TCoh => &["t_lr_coh", "t_rl_coh"],
            Observable::TInc => &["t_lr_inc", "t_rl_inc"],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub gamma_l: f64,
    pub gamma_r: f64,
    #[serde(default)]
    pub gamma_nonrad: f64,
    #[serde(default)]
    pub gamma_dephase: f64,
    #[serde(default)]
    pub detuning_p: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        Self { gamma_l: 0.03, gamma_r: 0.1, gamma_nonrad: 0.003, gamma_dephase: 0.003, detuning_p: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Drive3Config {
    pub rabi_c: f64,
    pub detuning_c: f64,
    #[serde(default)]
    pub gamma_dephase_s: f64,
}

impl Default for Drive3Config {
    fn default() -> Self {
        Self { rabi_c: 0.01, detuning_c: 0.02, gamma_dephase_s: 0.001 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
    #[serde(default)]
    pub units: Units,
}

impl GridSpec {
    pub fn validate(&self, field: &str) -> Result<(), ConfigError> {
        if self.count == 0 {
            return Err(ConfigError::new(format!("{field}.count"), "grid must contain at least one point"));
        }
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(ConfigError::new(field, "grid bounds must be finite"));
        }
        if self.min > self.max {
            return Err(ConfigError::new(field, format!("min {} exceeds max {}", self.min, self.max)));
        }
        if self.count == 1 && self.min != self.max {
            return Err(ConfigError::new(format!("{field}.count"), "a single-point grid needs min = max"));
        }
        if self.spacing == Spacing::Log && !(self.min > 0.0) {
            return Err(ConfigError::new(format!("{field}.min"), "log spacing needs a positive minimum"));
        }
        Ok(())
    }

    /// Grid values in the configured units.
    pub fn points(&self) -> Vec<f64> {
        let n = self.count;
        if n == 1 {
            return vec![self.min];
        }
        (0..n)
            .map(|k| {
                let f = k as f64 / (n - 1) as f64;
                if k == n - 1 {
                    return self.max;
                }
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * f,
                    Spacing::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * f).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct BackwardConfig {
    /// Absolute backward intensity; exclusive with `zeta`.
    #[serde(default)]
    pub intensity: Option<f64>,
    /// Backward intensity in units of the critical intensity.
    #[serde(default)]
    pub zeta: Option<f64>,
    #[serde(default)]
    pub phase: f64,
}

/// A single operating point used by `steady2`, `steady3` and `spectrum`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub intensity: f64,
    #[serde(default)]
    pub units: Units,
    #[serde(default)]
    pub side: SideConfig,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self { intensity: 1.0, units: Units::Critical, side: SideConfig::Left }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub model: ModelKind,
    #[serde(default)]
    pub params: ParamsConfig,
    #[serde(default)]
    pub drive3: Option<Drive3Config>,
    #[serde(default)]
    pub scenario: ScenarioKind,
    #[serde(default = "default_intensity_grid")]
    pub intensity_grid: GridSpec,
    #[serde(default)]
    pub spectrum_grid: Option<GridSpec>,
    #[serde(default)]
    pub backward: Option<BackwardConfig>,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<Observable>,
    #[serde(default)]
    pub probe: ProbeConfig,
}

fn default_intensity_grid() -> GridSpec {
    GridSpec { min: 0.01, max: 20.0, count: 200, spacing: Spacing::Log, units: Units::Critical }
}

fn default_outputs() -> Vec<Observable> {
    vec![Observable::TLr, Observable::TRl, Observable::DeltaT, Observable::DeltaTNorm]
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::TwoLevel,
            params: ParamsConfig::default(),
            drive3: None,
            scenario: ScenarioKind::SingleBeam,
            intensity_grid: default_intensity_grid(),
            spectrum_grid: None,
            backward: None,
            outputs: default_outputs(),
            probe: ProbeConfig::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::new("config", e.to_string()))
    }

    pub fn model_params(&self) -> Result<ModelParams<f64>, ConfigError> {
        let p = &self.params;
        ModelParams::new(p.gamma_l, p.gamma_r, p.gamma_nonrad, p.gamma_dephase, p.detuning_p)
            .map_err(|e| ConfigError::from_core("params", e))
    }

    pub fn drive_params(&self) -> Result<Option<DriveParams3<f64>>, ConfigError> {
        self.drive3
            .map(|d| DriveParams3::new(d.rabi_c, d.detuning_c, d.gamma_dephase_s).map_err(|e| ConfigError::from_core("drive3", e)))
            .transpose()
    }

    /// Two-level critical intensity of `params`, the scale of `critical` units.
    pub fn critical_intensity(&self) -> Result<f64, ConfigError> {
        let p = self.model_params()?;
        let cp = critical_point(&p).map_err(|e| ConfigError::from_core("params", e))?;
        Ok(cp.intensity)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.model_params()?;
        self.drive_params()?;
        match (self.model, self.drive3.is_some()) {
            (ModelKind::ThreeLevel, false) => return Err(ConfigError::new("drive3", "required for model three_level")),
            (ModelKind::TwoLevel, true) => return Err(ConfigError::new("drive3", "only allowed for model three_level")),
            _ => {}
        }
        match (self.scenario, self.backward) {
            (ScenarioKind::TwoBeam, None) => return Err(ConfigError::new("backward", "required for scenario two_beam")),
            (ScenarioKind::SingleBeam, Some(_)) => {
                return Err(ConfigError::new("backward", "only allowed for scenario two_beam"))
            }
            (ScenarioKind::TwoBeam, Some(b)) => {
                if self.model == ModelKind::ThreeLevel {
                    return Err(ConfigError::new("scenario", "two_beam is only modeled for the two-level atom"));
                }
                match (b.intensity, b.zeta) {
                    (Some(_), Some(_)) | (None, None) => {
                        return Err(ConfigError::new("backward", "give exactly one of intensity or zeta"))
                    }
                    (Some(v), None) | (None, Some(v)) if !(v >= 0.0 && v.is_finite()) => {
                        return Err(ConfigError::new("backward", "backward intensity must be finite and non-negative"))
                    }
                    _ => {}
                }
                if !b.phase.is_finite() {
                    return Err(ConfigError::new("backward.phase", "must be finite"));
                }
                if self.outputs.iter().any(|o| matches!(o, Observable::TCoh | Observable::TInc)) {
                    return Err(ConfigError::new("outputs", "t_coh/t_inc are not defined for two_beam"));
                }
            }
            _ => {}
        }
        self.intensity_grid.validate("intensity_grid")?;
        if self.intensity_grid.units == Units::Linewidth {
            return Err(ConfigError::new("intensity_grid.units", "linewidth units apply to spectrum grids only"));
        }
        if self.intensity_grid.min < 0.0 {
            return Err(ConfigError::new("intensity_grid.min", "intensities must be non-negative"));
        }
        if let Some(g) = &self.spectrum_grid {
            g.validate("spectrum_grid")?;
            if g.units == Units::Critical {
                return Err(ConfigError::new("spectrum_grid.units", "use absolute or linewidth"));
            }
        }
        if self.outputs.is_empty() {
            return Err(ConfigError::new("outputs", "request at least one observable"));
        }
        if !(self.probe.intensity >= 0.0 && self.probe.intensity.is_finite()) {
            return Err(ConfigError::new("probe.intensity", "must be finite and non-negative"));
        }
        if self.probe.units == Units::Linewidth {
            return Err(ConfigError::new("probe.units", "use absolute or critical"));
        }
        Ok(())
    }

    /// Intensity grid in absolute units.
    pub fn intensities(&self) -> Result<Vec<f64>, ConfigError> {
        let scale = match self.intensity_grid.units {
            Units::Critical => self.critical_intensity()?,
            _ => 1.0,
        };
        Ok(self.intensity_grid.points().into_iter().map(|x| x * scale).collect())
    }

    pub fn probe_intensity(&self) -> Result<f64, ConfigError> {
        Ok(match self.probe.units {
            Units::Critical => self.probe.intensity * self.critical_intensity()?,
            _ => self.probe.intensity,
        })
    }

    pub fn backward_intensity(&self) -> Result<f64, ConfigError> {
        let b = self.backward.ok_or_else(|| ConfigError::new("backward", "not configured"))?;
        match (b.intensity, b.zeta) {
            (Some(i), _) => Ok(i),
            (None, Some(z)) => Ok(z * self.critical_intensity()?),
            (None, None) => Err(ConfigError::new("backward", "give exactly one of intensity or zeta")),
        }
    }

    /// Requested observables, deduplicated, in canonical column order.
    pub fn ordered_outputs(&self) -> Vec<Observable> {
        let mut v = self.outputs.clone();
        v.sort();
        v.dedup();
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        let c = ScenarioConfig::default();
        c.validate().unwrap();
        assert_eq!(c.intensities().unwrap().len(), 200);
    }

    #[test]
    fn empty_grid_rejected() {
        let mut c = ScenarioConfig::default();
        c.intensity_grid.count = 0;
        let e = c.validate().unwrap_err();
        assert_eq!(e.field, "intensity_grid.count");
    }

    #[test]
    fn drive3_presence_tied_to_model() {
        let mut c = ScenarioConfig { model: ModelKind::ThreeLevel, ..Default::default() };
        assert_eq!(c.validate().unwrap_err().field, "drive3");
        c.drive3 = Some(Drive3Config::default());
        c.validate().unwrap();
        c.model = ModelKind::TwoLevel;
        assert_eq!(c.validate().unwrap_err().field, "drive3");
    }

    #[test]
    fn backward_presence_tied_to_scenario() {
        let mut c = ScenarioConfig { scenario: ScenarioKind::TwoBeam, ..Default::default() };
        assert_eq!(c.validate().unwrap_err().field, "backward");
        c.backward = Some(BackwardConfig { zeta: Some(0.018), ..Default::default() });
        c.validate().unwrap();
        c.backward = Some(BackwardConfig { zeta: Some(0.018), intensity: Some(1.0), phase: 0.0 });
        assert!(c.validate().is_err());
    }

    #[test]
    fn invalid_rate_reports_field() {
        let c = ScenarioConfig { params: ParamsConfig { gamma_l: -1.0, ..Default::default() }, ..Default::default() };
        let e = c.validate().unwrap_err();
        assert!(e.field.starts_with("params"), "{e}");
    }

    #[test]
    fn json_roundtrip_and_unknown_fields() {
        let c = ScenarioConfig::default();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(ScenarioConfig::from_json(&text).unwrap(), c);
        assert!(ScenarioConfig::from_json(r#"{"bogus": 1}"#).is_err());
        let minimal = ScenarioConfig::from_json(r#"{"params": {"gamma_l": 0.03, "gamma_r": 0.1}}"#).unwrap();
        assert_eq!(minimal.params.gamma_nonrad, 0.0);
    }

    #[test]
    fn grid_points() {
        let g = GridSpec { min: 1.0, max: 100.0, count: 3, spacing: Spacing::Log, units: Units::Absolute };
        let p = g.points();
        assert_eq!(p[0], 1.0);
        assert!((p[1] - 10.0).abs() < 1e-12);
        assert_eq!(p[2], 100.0);
        let lin = GridSpec { spacing: Spacing::Linear, ..g }.points();
        assert_eq!(lin, vec![1.0, 50.5, 100.0]);
    }

    #[test]
    fn outputs_are_canonically_ordered() {
        let c = ScenarioConfig {
            outputs: vec![Observable::DeltaT, Observable::TLr, Observable::DeltaT],
            ..Default::default()
        };
        assert_eq!(c.ordered_outputs(), vec![Observable::TLr, Observable::DeltaT]);
    }
}
