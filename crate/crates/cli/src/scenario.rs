//! JSON scenario files.
//!
//! Units: resistance in Ω, voltages in V, currents in A, angles in rad.
//! Angular quantities accept a number or a short expression in `pi` such as
//! `"4*pi"`, `"-pi/2"` or `"pi/64"`.

use std::f64::consts::PI;
use std::path::PathBuf;

use gecert_core::circuit::{compose_series, Component, SampleTable, Signal, Sinusoid};
use gecert_core::GeneralizedEquation;
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("parse error at `{path}` (line {line}, column {column}): {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },
}

impl ScenarioError {
    fn invalid(field: &str, message: impl Into<String>) -> Self {
        ScenarioError::Validation {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

/// An angle or angular frequency in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Angle(pub f64);

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(x) => Ok(Angle(x)),
            Raw::Text(s) => parse_angle(&s).map(Angle).map_err(de::Error::custom),
        }
    }
}

/// `[coef][*]pi[/den]` or a plain number.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (
            n,
            d.parse::<f64>()
                .map_err(|_| format!("bad divisor in `{text}`"))?,
        ),
        None => (s.as_str(), 1.0),
    };
    let value = match num.strip_suffix("pi") {
        Some(coef) => {
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            let k = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c
                    .parse::<f64>()
                    .map_err(|_| format!("bad coefficient in `{text}`"))?,
            };
            k * PI
        }
        None => num
            .parse::<f64>()
            .map_err(|_| format!("cannot read `{text}` as an angle"))?,
    };
    if den == 0.0 {
        return Err(format!("division by zero in `{text}`"));
    }
    Ok(value / den)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SinusoidSpec {
    pub amplitude: f64,
    pub omega: Angle,
    #[serde(default = "zero_angle")]
    pub phase: Angle,
}

fn zero_angle() -> Angle {
    Angle(0.0)
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSpec {
    #[serde(default)]
    pub dc: f64,
    #[serde(default)]
    pub sinusoids: Vec<SinusoidSpec>,
    #[serde(default)]
    pub table: Option<SampleTable>,
}

impl SignalSpec {
    pub fn to_signal(&self) -> gecert_core::Result<Signal> {
        let sinusoids = self
            .sinusoids
            .iter()
            .map(|s| Sinusoid {
                amplitude: s.amplitude,
                omega: s.omega.0,
                phase: s.phase.0,
            })
            .collect();
        Signal::new(self.dc, sinusoids, self.table.clone())
    }
}

/// Optional overrides of the numerical tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    pub tol_z: Option<f64>,
    pub tol_eval: Option<f64>,
    pub tol_res: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    pub components: Vec<Component>,
    pub source: SignalSpec,
    #[serde(default)]
    pub perturbed_source: Option<SignalSpec>,
    pub grid: usize,
    /// Trajectory to certify and perturb (1-based).
    #[serde(default = "first_branch")]
    pub branch: usize,
    #[serde(default)]
    pub delta_link: Option<f64>,
    #[serde(default)]
    pub tolerances: ToleranceSpec,
    #[serde(default)]
    pub outputs: Option<PathBuf>,
    /// SHA-256 of the source text.
    #[serde(skip)]
    pub digest: String,
}

fn first_branch() -> usize {
    1
}

/// Parses and validates a scenario.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let mut scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        ScenarioError::Parse {
            path,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })?;
    scenario.digest = Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect();
    scenario.validate()?;
    Ok(scenario)
}

impl Scenario {
    fn validate(&self) -> Result<(), ScenarioError> {
        if self.components.is_empty() {
            return Err(ScenarioError::invalid(
                "components",
                "at least one component is required",
            ));
        }
        if self.grid < 2 {
            return Err(ScenarioError::invalid(
                "grid",
                "at least 2 points are required",
            ));
        }
        if self.branch == 0 {
            return Err(ScenarioError::invalid("branch", "branch ids start at 1"));
        }
        if let Some(d) = self.delta_link {
            if d.is_nan() || d <= 0.0 {
                return Err(ScenarioError::invalid("delta_link", "must be positive"));
            }
        }
        self.source
            .to_signal()
            .map_err(|e| ScenarioError::invalid("source", e.to_string()))?;
        if let Some(p) = &self.perturbed_source {
            p.to_signal()
                .map_err(|e| ScenarioError::invalid("perturbed_source", e.to_string()))?;
        }
        self.equation()?;
        Ok(())
    }

    pub fn equation(&self) -> Result<GeneralizedEquation, ScenarioError> {
        let source = self
            .source
            .to_signal()
            .map_err(|e| ScenarioError::invalid("source", e.to_string()))?;
        compose_series(&self.components, source)
            .map_err(|e| ScenarioError::invalid("components", e.to_string()))
    }

    pub fn perturbed_signal(&self) -> Option<Signal> {
        self.perturbed_source
            .as_ref()
            .and_then(|s| s.to_signal().ok())
    }
}
