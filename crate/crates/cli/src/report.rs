//! The structured run report written to `report.json`.
//!
//! Schema (all floats in SI units; absent stages are `null`):
//!
//! ```text
//! tool, version, scenario, scenario_digest   identification
//! stages                                     ["sweep", "certify", "perturb"] prefix
//! grid_points, delta_link, tolerances        effective numerical settings
//! trajectories                               count, isolation_margin, branches[]
//! certificate                                focus branch, emitted/refused counts,
//!                                            localization results, uniform (a, b, kappa)
//! perturbation                               bound report, Method 2 comparison
//! failures                                   [{stage, kind, message}]
//! pass                                       true iff failures is empty
//! ```

use gecert_core::perturb::BoundReport;
use gecert_core::Tolerances;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Sweep,
    Certify,
    Perturb,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchSummary {
    pub branch_id: usize,
    pub samples: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectorySummary {
    pub count: usize,
    /// `None` when fewer than two branches share a grid point.
    pub isolation_margin: Option<f64>,
    pub branches: Vec<BranchSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Refusal {
    pub t: f64,
    pub z: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformSummary {
    pub a: f64,
    pub b: f64,
    pub kappa: f64,
    pub b_ratio_cap: f64,
    pub b_pointwise_min: f64,
    /// Which of `a/κ` and `min b_t` fixed `b`.
    pub b_note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateSummary {
    pub branch_id: usize,
    pub emitted: usize,
    pub refused: usize,
    /// The first few refusals, in sample order.
    pub refusals: Vec<Refusal>,
    pub localization_samples: usize,
    pub localization_failures: usize,
    /// Largest `lipschitz_estimate / κ_t` over emitted certificates.
    pub max_lipschitz_ratio: f64,
    /// Largest excess of `|Δz|` over `κ_t·|Δp|`; `None` when refusals left gaps.
    pub continuity_excess: Option<f64>,
    pub uniform: Option<UniformSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Method2Summary {
    pub rho: f64,
    pub max_difference: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationSummary {
    pub branch_id: usize,
    /// False when the gate failed and the trajectory was localized anyway.
    pub gated: bool,
    pub bound: BoundReport,
    pub perturbed_max_residual: f64,
    pub method2: Option<Method2Summary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub stage: Stage,
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub scenario: String,
    pub scenario_digest: String,
    pub stages: Vec<Stage>,
    pub grid_points: usize,
    /// `None` when the linking gap is unbounded.
    pub delta_link: Option<f64>,
    pub tolerances: Tolerances,
    pub trajectories: Option<TrajectorySummary>,
    pub certificate: Option<CertificateSummary>,
    pub perturbation: Option<PerturbationSummary>,
    pub notes: Vec<String>,
    pub failures: Vec<Failure>,
    pub pass: bool,
}

impl RunReport {
    pub fn fail(&mut self, stage: Stage, kind: &str, message: impl Into<String>) {
        self.failures.push(Failure {
            stage,
            kind: kind.to_string(),
            message: message.into(),
        });
        self.pass = false;
    }

    pub fn has_failure(&self, kind: &str) -> bool {
        self.failures.iter().any(|f| f.kind == kind)
    }
}

pub(crate) fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}
