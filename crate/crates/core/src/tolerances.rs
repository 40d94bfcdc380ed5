//! Numerical tolerances shared by every stage.

use serde::{Deserialize, Serialize};

/// Absolute tolerance on currents used when deduplicating roots (A).
pub const TOL_Z: f64 = 1e-12;
/// Absolute tolerance on voltages used for closedness and set equality (V).
pub const TOL_EVAL: f64 = 1e-9;
/// Default residual tolerance for the selection check (V).
pub const TOL_RES: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub tol_z: f64,
    pub tol_eval: f64,
    pub tol_res: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol_z: TOL_Z,
            tol_eval: TOL_EVAL,
            tol_res: TOL_RES,
        }
    }
}
