//! Perturbed input signals: trajectory construction and the `4aε/b`
//! deviation bound.

mod method2;

pub use method2::{choose_window_radius, method2_trajectory};

use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{signal_distance, GeneralizedEquation, Signal, DISTANCE_GRID_POINTS};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::regularity::{AuxiliaryMap, SmrCertificate, UniformCertificate};
use crate::solver::{Sample, Trajectory};

/// Same `f` and `F`, driven by `p̃`.
pub fn perturbed_equation(eq: &GeneralizedEquation, p_tilde: &Signal) -> GeneralizedEquation {
    eq.with_signal(p_tilde.clone())
}

/// Largest violation of `G̃_t(v) = G_t(v) + p(t) − p̃(t)` over `vs` and of
/// `G̃_t⁻¹(w) = G_t⁻¹(w + p̃(t) − p(t))` over `ws`.
pub fn perturbation_shift_check(
    eq: &GeneralizedEquation,
    p_tilde: &Signal,
    t: f64,
    vs: &[f64],
    ws: &[f64],
) -> Result<f64> {
    let tilde = perturbed_equation(eq, p_tilde);
    let g = AuxiliaryMap::new(eq, t)?;
    let gt = AuxiliaryMap::new(&tilde, t)?;
    let mut worst: f64 = 0.0;
    for &v in vs {
        let lhs = gt.eval(v)?;
        let rhs = g.eval(v)?.shift(g.p_t() - gt.p_t());
        worst = worst.max(lhs.hausdorff(&rhs));
    }
    for &w in ws {
        let lhs = gt.inverse(w);
        let rhs = g.inverse(w + gt.p_t() - g.p_t());
        worst = worst.max(lhs.hausdorff(&rhs));
    }
    Ok(worst)
}

/// Base equation, perturbed signal, and `ε = max_t |p̃(t) − p(t)|`.
#[derive(Debug, Clone)]
pub struct PerturbationScenario {
    pub base: GeneralizedEquation,
    pub p_tilde: Signal,
    pub epsilon: f64,
}

impl PerturbationScenario {
    /// Measures `ε` on the default distance grid.
    pub fn new(base: GeneralizedEquation, p_tilde: Signal) -> Result<Self> {
        let grid = Grid::uniform(DISTANCE_GRID_POINTS)?;
        let epsilon = signal_distance(base.signal(), &p_tilde, &grid);
        Ok(Self {
            base,
            p_tilde,
            epsilon,
        })
    }

    pub fn perturbed(&self) -> GeneralizedEquation {
        perturbed_equation(&self.base, &self.p_tilde)
    }

    /// `ε < b/4`.
    pub fn gate_passes(&self, ucert: &UniformCertificate) -> bool {
        self.epsilon < ucert.b / 4.0
    }
}

/// `z̃(t) = G_t⁻¹(p̃(t) − p(t)) ∩ B_radius(z(t))` at every sample, with no gate.
///
/// Fails on the first sample whose localized preimage is empty or has more
/// than one component.
pub fn localize_pointwise(
    eq: &GeneralizedEquation,
    traj: &Trajectory,
    p_tilde: &Signal,
    radius: f64,
) -> Result<Trajectory> {
    let samples = traj
        .samples
        .par_iter()
        .map(|s| {
            let g = AuxiliaryMap::new(eq, s.t)?;
            let y0 = p_tilde.eval(s.t)? - g.p_t();
            let local = g.inverse(y0).restrict(s.z, radius);
            match local.as_singleton() {
                Some(z) => Ok(Sample { z, ..*s }),
                None if local.is_empty() => Err(Error::LocalizationEmpty { t: s.t }),
                None => Err(Error::LocalizationMultivalued {
                    t: s.t,
                    count: local.len(),
                }),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory::new(traj.branch_id, samples))
}

/// Method 1: pointwise localization in `B_a(z(t))`, after the gate `ε < b/4`.
pub fn construct_perturbed_trajectory(
    scenario: &PerturbationScenario,
    traj: &Trajectory,
    ucert: &UniformCertificate,
) -> Result<Trajectory> {
    if !scenario.gate_passes(ucert) {
        return Err(Error::GateViolation {
            epsilon: scenario.epsilon,
            gate: ucert.b / 4.0,
        });
    }
    localize_pointwise(&scenario.base, traj, &scenario.p_tilde, ucert.a)
}

/// Radii `(a_t, b_t − ε)` for `G̃_t` at `z(t)`, same `κ_t`.
pub fn perturbed_certificate(cert: &SmrCertificate, epsilon: f64) -> Result<SmrCertificate> {
    if !(epsilon >= 0.0) || epsilon >= cert.b {
        return Err(Error::EpsilonTooLarge { epsilon, b: cert.b });
    }
    Ok(SmrCertificate {
        b: cert.b - epsilon,
        ..*cert
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub epsilon: f64,
    /// `b/4`.
    pub gate: f64,
    /// `4aε/b`.
    pub bound: f64,
    /// `max_t |z̃(t) − z(t)|`.
    pub observed: f64,
    pub gate_pass: bool,
    pub pass: bool,
}

/// Compares the observed deviation against `4aε/b`.
///
/// Passes when the gate holds and the deviation is strictly below the bound,
/// or when both are zero.
pub fn verify_deviation_bound(
    traj: &Trajectory,
    z_tilde: &Trajectory,
    ucert: &UniformCertificate,
    epsilon: f64,
) -> Result<BoundReport> {
    let observed = max_deviation(traj, z_tilde)?;
    let gate = ucert.b / 4.0;
    let bound = 4.0 * ucert.a * epsilon / ucert.b;
    let gate_pass = epsilon < gate;
    let within = observed < bound || (epsilon == 0.0 && observed == 0.0);
    Ok(BoundReport {
        epsilon,
        gate,
        bound,
        observed,
        gate_pass,
        pass: gate_pass && within,
    })
}

/// `max_t |z̃(t) − z(t)|` for two trajectories on the same samples.
pub fn max_deviation(traj: &Trajectory, z_tilde: &Trajectory) -> Result<f64> {
    if traj.samples.len() != z_tilde.samples.len() {
        return Err(Error::GridMismatch);
    }
    let mut worst: f64 = 0.0;
    for (s, r) in traj.samples.iter().zip(&z_tilde.samples) {
        if s.index != r.index || s.t != r.t {
            return Err(Error::GridMismatch);
        }
        worst = worst.max((r.z - s.z).abs());
    }
    Ok(worst)
}
