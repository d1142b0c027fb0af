//! Scenario documents: a JSON tree, optionally layered over a named preset,
//! validated into ready-to-run model, controller, policy and certificates.

use std::path::Path;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::certificates::{Comparison, FtcsCertificate, FtcsWindow, FtsCertificate};
use crate::control::{ControllerSpec, Family, GammaFn, Mode, Weight};
use crate::error::{Error, Result};
use crate::model::{build_system, DecoherenceChannel, OpenSystemSpec, SystemModel};
use crate::pauli::{density_to_bloch, DensityMatrix, Mat2, C64};
use crate::switching::{
    AffineThreshold, PolicyKind, SimulationSettings, SwitchingPolicy, Thresholds,
};

use super::presets;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Complex {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Row-major 2x2 complex matrix.
pub type ComplexMatrix = [[Complex; 2]; 2];

pub fn to_mat2(m: &ComplexMatrix) -> Mat2 {
    let c = |z: Complex| C64::new(z.re, z.im);
    Mat2::new(c(m[0][0]), c(m[0][1]), c(m[1][0]), c(m[1][1]))
}

pub fn from_mat2(m: &Mat2) -> ComplexMatrix {
    let c = |z: C64| Complex { re: z.re, im: z.im };
    [
        [c(m[(0, 0)]), c(m[(0, 1)])],
        [c(m[(1, 0)]), c(m[(1, 1)])],
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub operator: ComplexMatrix,
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub drift: ComplexMatrix,
    pub controls: Vec<ComplexMatrix>,
    pub channels: Vec<ChannelConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatesConfig {
    pub initial: ComplexMatrix,
    pub target: ComplexMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerConfig {
    pub weight: [[f64; 3]; 3],
    pub xi: f64,
    pub family: Family,
    #[serde(default)]
    pub gamma: GammaFn,
    #[serde(default)]
    pub theta_hat: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedConfig {
    pub kappa: [f64; 2],
    pub iota: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShrinkConfig {
    pub vartheta: [AffineThreshold; 2],
    pub varsigma: [AffineThreshold; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyConfig {
    pub kind: PolicyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed: Option<FixedConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shrink: Option<ShrinkConfig>,
    pub initial_mode: u8,
    pub terminal_vartheta: f64,
    #[serde(default)]
    pub min_dwell: f64,
}

fn default_dt() -> f64 {
    1e-4
}

fn default_event_tol() -> f64 {
    1e-9
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub t_final: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_event_tol")]
    pub event_tol: f64,
}

fn identity3() -> [[f64; 3]; 3] {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FtsConfig {
    #[serde(default = "identity3")]
    pub w: [[f64; 3]; 3],
    pub alpha: f64,
    pub c1: f64,
    pub c2: f64,
    pub zeta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FtcsConfig {
    pub alpha1: Comparison,
    pub alpha2: Comparison,
    /// Defaults to `|e(0)|`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b1: Option<f64>,
    pub eta: f64,
    pub varrho: f64,
    #[serde(default)]
    pub window: FtcsWindow,
    /// Reference value of the error radius, echoed next to the computed one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_eta: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificatesConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fts: Option<FtsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ftcs: Option<FtcsConfig>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFile {
    Trajectory,
    Switches,
    Summary,
    Certificates,
}

fn all_outputs() -> Vec<OutputFile> {
    vec![
        OutputFile::Trajectory,
        OutputFile::Switches,
        OutputFile::Summary,
        OutputFile::Certificates,
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<String>,
    #[serde(default = "all_outputs")]
    pub formats: Vec<OutputFile>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: None,
            formats: all_outputs(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub name: String,
    /// Free-form remarks, e.g. which parameters are assumed rather than given.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub system: SystemConfig,
    pub states: StatesConfig,
    pub controller: ControllerConfig,
    pub policy: PolicyConfig,
    pub simulation: SimulationConfig,
    #[serde(default)]
    pub certificates: CertificatesConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Command-line style overrides applied after loading.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub policy: Option<PolicyKind>,
    pub dt: Option<f64>,
    pub xi: Option<f64>,
    pub t_final: Option<f64>,
}

/// Everything a run needs, checked and converted.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub system: OpenSystemSpec,
    pub model: SystemModel,
    pub initial: DensityMatrix,
    pub target: DensityMatrix,
    pub s0: Vector3<f64>,
    pub sd: Vector3<f64>,
    pub controller: ControllerSpec,
    pub policy: SwitchingPolicy,
    pub settings: SimulationSettings,
    pub fts: Option<FtsCertificate>,
    pub ftcs: Option<FtcsCertificate>,
    pub reference_eta: Option<f64>,
    pub outputs: Vec<OutputFile>,
    pub warnings: Vec<String>,
}

/// Recursively overlays `patch` onto `base`; objects merge key by key, any
/// other value replaces what was there.
fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let mut value: Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if let Some(name) = value.get("preset").cloned() {
        let name = name
            .as_str()
            .ok_or_else(|| Error::validation("preset", "expected a preset name"))?;
        let base = presets::preset(name).ok_or_else(|| {
            Error::validation(
                "preset",
                format!(
                    "unknown preset `{name}` (available: {})",
                    presets::NAMES.join(", ")
                ),
            )
        })?;
        let mut tree = serde_json::to_value(base).map_err(|e| Error::Parse(e.to_string()))?;
        merge(&mut tree, value);
        value = tree;
    }
    let cfg: ScenarioConfig = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        Error::validation(path, e.into_inner().to_string())
    })?;
    cfg.build()?;
    Ok(cfg)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

pub fn to_json(cfg: &ScenarioConfig) -> String {
    serde_json::to_string_pretty(cfg).expect("configs always serialize")
}

fn matrix3(rows: &[[f64; 3]; 3]) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| rows[i][j])
}

fn positive(path: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(path, format!("must be positive, got {x}")))
    }
}

fn at(path: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Validation { .. } => e,
        other => Error::validation(path, other.to_string()),
    }
}

impl ScenarioConfig {
    pub fn apply(&mut self, overrides: &Overrides) {
        if let Some(kind) = overrides.policy {
            self.policy.kind = kind;
        }
        if let Some(dt) = overrides.dt {
            self.simulation.dt = dt;
        }
        if let Some(xi) = overrides.xi {
            self.controller.xi = xi;
        }
        if let Some(t) = overrides.t_final {
            self.simulation.t_final = t;
        }
    }

    fn build_system(&self) -> Result<(OpenSystemSpec, SystemModel)> {
        let spec = OpenSystemSpec {
            drift: to_mat2(&self.system.drift),
            controls: self.system.controls.iter().map(to_mat2).collect(),
            channels: self
                .system
                .channels
                .iter()
                .map(|c| DecoherenceChannel {
                    operator: to_mat2(&c.operator),
                    rate: c.rate,
                })
                .collect(),
        };
        let model = build_system(&spec).map_err(|e| {
            let path = match &e {
                Error::NonHermitianInput { name, .. } if name == "H0" => "system.drift".to_string(),
                Error::NonHermitianInput { name, .. } => {
                    let r: usize = name[1..].parse().unwrap_or(1);
                    format!("system.controls[{}]", r - 1)
                }
                Error::ControlCount(_) => "system.controls".to_string(),
                Error::NonPositiveRate { index, .. } => format!("system.channels[{index}].rate"),
                _ => "system".to_string(),
            };
            Error::validation(path, e.to_string())
        })?;
        Ok((spec, model))
    }

    fn build_policy(&self) -> Result<SwitchingPolicy> {
        let p = &self.policy;
        let thresholds = match p.kind {
            PolicyKind::None => Thresholds::None,
            PolicyKind::Fixed => {
                let f = p.fixed.as_ref().ok_or_else(|| {
                    Error::validation("policy.fixed", "fixed thresholds are required for this policy")
                })?;
                Thresholds::Fixed {
                    singular: f.kappa,
                    invariant: f.iota,
                }
            }
            PolicyKind::Shrink => {
                let s = p.shrink.as_ref().ok_or_else(|| {
                    Error::validation("policy.shrink", "shrink thresholds are required for this policy")
                })?;
                Thresholds::Shrink {
                    singular: s.vartheta,
                    invariant: s.varsigma,
                }
            }
        };
        let initial_mode = Mode::from_number(p.initial_mode)
            .ok_or_else(|| Error::validation("policy.initial_mode", "must be 1 or 2"))?;
        let policy = SwitchingPolicy {
            thresholds,
            initial_mode,
            terminal_vartheta: p.terminal_vartheta,
            min_dwell: p.min_dwell,
        };
        policy.validate().map_err(at("policy"))?;
        Ok(policy)
    }

    /// Validates every section and converts it into engine types.
    pub fn build(&self) -> Result<Scenario> {
        let (system, model) = self.build_system()?;

        let state = |path: &str, m: &ComplexMatrix| {
            DensityMatrix::new(to_mat2(m)).map_err(at(path)).and_then(|rho| {
                let s = *density_to_bloch(&rho).map_err(at(path))?.vector();
                Ok((rho, s))
            })
        };
        let (initial, s0) = state("states.initial", &self.states.initial)?;
        let (target, sd) = state("states.target", &self.states.target)?;

        let settings = SimulationSettings {
            t_final: self.simulation.t_final,
            dt: self.simulation.dt,
            event_tol: self.simulation.event_tol,
        };
        positive("simulation.t_final", settings.t_final)?;
        positive("simulation.dt", settings.dt)?;
        positive("simulation.event_tol", settings.event_tol)?;
        if settings.dt > settings.t_final {
            return Err(Error::validation("simulation.dt", "exceeds the horizon"));
        }

        let c = &self.controller;
        let weight = Weight::new(matrix3(&c.weight)).map_err(at("controller.weight"))?;
        positive("controller.xi", c.xi)?;
        let controller = ControllerSpec {
            weight,
            xi: c.xi,
            family: c.family,
            gamma: c.gamma,
            theta_hat: c.theta_hat,
            mode: Mode::One,
        };
        let mut warnings = controller
            .validate(settings.t_final)
            .map_err(at("controller.gamma"))?;

        let policy = self.build_policy()?;
        let controller = controller.with_mode(policy.initial_mode);

        let fts = match &self.certificates.fts {
            None => None,
            Some(f) => {
                let w = Weight::new(matrix3(&f.w)).map_err(at("certificates.fts.w"))?;
                positive("certificates.fts.alpha", f.alpha)?;
                positive("certificates.fts.c1", f.c1)?;
                positive("certificates.fts.c2", f.c2)?;
                positive("certificates.fts.zeta", f.zeta)?;
                Some(FtsCertificate {
                    weight,
                    w,
                    alpha: f.alpha,
                    c1: f.c1,
                    c2: f.c2,
                    t_final: settings.t_final,
                    zeta: f.zeta,
                })
            }
        };

        let ftcs = match &self.certificates.ftcs {
            None => None,
            Some(f) => {
                let cert = FtcsCertificate {
                    gamma: c.gamma,
                    theta_hat: c.theta_hat,
                    alpha1: f.alpha1,
                    alpha2: f.alpha2,
                    b1: f.b1.unwrap_or_else(|| (s0 - sd).norm()),
                    eta: f.eta,
                    varrho: f.varrho,
                    t_final: settings.t_final,
                    window: f.window,
                };
                cert.validate().map_err(at("certificates.ftcs"))?;
                Some(cert)
            }
        };
        if let Some(cert) = &ftcs {
            let (lambda1, _) = weight.extreme_eigenvalues();
            let bound = cert.alpha2.eval(1.0);
            if bound < lambda1 {
                warnings.push(format!(
                    "alpha2 coefficient {bound} is below lambda_max(P) = {lambda1}, so V <= alpha2(|e|) can fail"
                ));
            }
        }

        Ok(Scenario {
            name: self.name.clone(),
            system,
            model,
            initial,
            target,
            s0,
            sd,
            controller,
            policy,
            settings,
            fts,
            ftcs,
            reference_eta: self.certificates.ftcs.as_ref().and_then(|f| f.reference_eta),
            outputs: self.output.formats.clone(),
            warnings,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_expansion_allows_single_field_overrides() {
        let cfg = parse_config(r#"{"preset": "amplitude", "controller": {"xi": 2.5}}"#).unwrap();
        assert_eq!(cfg.controller.xi, 2.5);
        assert_eq!(cfg.controller.weight[0][0], 0.078);
        assert_eq!(cfg.simulation.t_final, 10.0);
    }

    #[test]
    fn round_trip() {
        for name in presets::NAMES {
            let cfg = presets::preset(name).unwrap();
            let again = parse_config(&to_json(&cfg)).unwrap();
            assert_eq!(cfg, again);
        }
    }

    #[test]
    fn errors_name_the_field() {
        let err = parse_config(r#"{"preset": "amplitude", "controller": {"xi": "fast"}}"#).unwrap_err();
        match err {
            Error::Validation { path, .. } => assert_eq!(path, "controller.xi"),
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_config(
            r#"{"preset": "dephasing", "system": {"channels": [{"operator": [[{"re":1},{"re":0}],[{"re":0},{"re":-1}]], "rate": -0.1}]}}"#,
        )
        .unwrap_err();
        match err {
            Error::Validation { path, .. } => assert_eq!(path, "system.channels[0].rate"),
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_config(
            r#"{"preset": "amplitude", "states": {"initial": [[{"re":1.2},{"re":0}],[{"re":0},{"re":-0.2}]]}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Validation { ref path, .. } if path == "states.initial"));
        assert!(matches!(parse_config("{ not json"), Err(Error::Parse(_))));
        let err = parse_config(r#"{"preset": "dephasing", "policy": {"kind": "fixed", "fixed": null}}"#).unwrap_err();
        assert!(matches!(err, Error::Validation { ref path, .. } if path == "policy.fixed"));
    }
}
