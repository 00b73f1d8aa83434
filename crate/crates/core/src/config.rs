//! JSON model configuration.
//!
//! ```json
//! {
//!   "kind": "bates",
//!   "params": { "lambda": 1.15, "theta": 0.04, "zeta": 0.2, "rho": -0.4 },
//!   "jumps": { "family": "exp_negative", "alpha": 0.6 },
//!   "state": { "x0": 0.0, "v0": 0.04 }
//! }
//! ```
//!
//! `jumps` and `state` are optional. Unknown keys are rejected.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{HestonParams, JumpTransform, ModelCharacteristics, ModelKind};
use crate::pricer::State;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum JumpConfig {
    None,
    ExpNegative { alpha: f64 },
    ExpSubordinator { a: f64, b: f64 },
}

impl JumpConfig {
    pub fn to_transform(&self) -> JumpTransform {
        match *self {
            JumpConfig::None => JumpTransform::None,
            JumpConfig::ExpNegative { alpha } => JumpTransform::ExpNegative { alpha },
            JumpConfig::ExpSubordinator { a, b } => JumpTransform::ExpSubordinator { a, b },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    #[serde(default)]
    pub x0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
    pub params: ParamsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jumps: Option<JumpConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateConfig>,
}

fn require(v: Option<f64>, name: &str, kind: ModelKind) -> Result<f64> {
    v.ok_or_else(|| Error::Config(format!("{} config is missing params.{name}", kind.as_str())))
}

fn forbid(v: Option<f64>, name: &str, kind: ModelKind) -> Result<()> {
    match v {
        Some(_) => Err(Error::Config(format!(
            "params.{name} is not used by {}",
            kind.as_str()
        ))),
        None => Ok(()),
    }
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid model config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn jumps(&self) -> JumpTransform {
        self.jumps
            .as_ref()
            .map_or(JumpTransform::None, JumpConfig::to_transform)
    }

    pub fn to_model(&self) -> Result<ModelCharacteristics> {
        let k = self.kind;
        let p = &self.params;
        match k {
            ModelKind::Heston | ModelKind::HestonJumps | ModelKind::Bates => {
                forbid(p.sigma, "sigma", k)?;
                forbid(p.delta, "delta", k)?;
                let diffusion = HestonParams::new(
                    require(p.lambda, "lambda", k)?,
                    require(p.theta, "theta", k)?,
                    require(p.zeta, "zeta", k)?,
                    require(p.rho, "rho", k)?,
                );
                let jumps = self.jumps();
                match k {
                    ModelKind::Heston if !jumps.is_none() => Err(Error::Config(
                        "heston takes no jumps; use heston_jumps".into(),
                    )),
                    ModelKind::Heston => ModelCharacteristics::heston(diffusion),
                    ModelKind::HestonJumps => ModelCharacteristics::heston_jumps(diffusion, jumps),
                    _ => ModelCharacteristics::bates(diffusion, jumps),
                }
            }
            ModelKind::Bns => {
                for (v, name) in [
                    (p.theta, "theta"),
                    (p.zeta, "zeta"),
                    (p.sigma, "sigma"),
                    (p.delta, "delta"),
                ] {
                    forbid(v, name, k)?;
                }
                ModelCharacteristics::bns(
                    require(p.lambda, "lambda", k)?,
                    require(p.rho, "rho", k)?,
                    self.jumps(),
                )
            }
            ModelKind::ExpLevy => {
                for (v, name) in [
                    (p.lambda, "lambda"),
                    (p.theta, "theta"),
                    (p.zeta, "zeta"),
                    (p.rho, "rho"),
                ] {
                    forbid(v, name, k)?;
                }
                let sigma = require(p.sigma, "sigma", k)?;
                match p.delta {
                    Some(delta) => {
                        ModelCharacteristics::exp_levy_with_drift(delta, sigma, self.jumps())
                    }
                    None => ModelCharacteristics::exp_levy(sigma, self.jumps()),
                }
            }
            ModelKind::Generic => Err(Error::Config(
                "generic models cannot be configured from JSON".into(),
            )),
        }
    }

    /// Initial state from the config, falling back to the model default.
    pub fn state(&self, model: &ModelCharacteristics) -> State {
        let default = State::default_for(model);
        match self.state {
            Some(s) => State::new(s.x0, s.v0.unwrap_or(default.v0)),
            None => default,
        }
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form.
    pub fn params_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))[..16].to_string()
    }
}
