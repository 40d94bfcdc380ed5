//! Stage orchestration: sweep, then certify the focus branch, then perturb it.

use std::fs;
use std::io;
use std::path::PathBuf;

use gecert_core::perturb::{
    choose_window_radius, construct_perturbed_trajectory, localize_pointwise, max_deviation,
    method2_trajectory, verify_deviation_bound, PerturbationScenario,
};
use gecert_core::regularity::{
    certify_trajectory, continuity_check, uniform_certificate, verify_localization, CertifyOptions,
    SmrCertificate,
};
use gecert_core::solver::{
    check_selection, default_delta_link, link_trajectories, sweep_with, Trajectory,
};
use gecert_core::{Grid, Tolerances};
use thiserror::Error;

use crate::output;
use crate::report::{
    finite, BranchSummary, CertificateSummary, Method2Summary, PerturbationSummary, Refusal,
    RunReport, Stage, TrajectorySummary, UniformSummary,
};
use crate::scenario::{Scenario, ScenarioError};

/// Ordinates sampled per certificate by the localization check.
pub const LOCALIZATION_SAMPLES: usize = 256;
/// Largest admissible gap between the two perturbation constructions (A).
pub const METHOD_AGREEMENT_TOL: f64 = 1e-10;
const MAX_LISTED_REFUSALS: usize = 5;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] gecert_core::Error),
    #[error("cannot write outputs: {0}")]
    Io(#[from] io::Error),
}

/// Command-line overrides; `None` keeps the scenario's value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub grid: Option<usize>,
    pub delta_link: Option<f64>,
    pub tol_res: Option<f64>,
    pub tol_z: Option<f64>,
    pub out: Option<PathBuf>,
    pub plot: bool,
}

pub const DEFAULT_OUT_DIR: &str = "gecert-out";

fn tolerances(s: &Scenario, o: &Overrides) -> Tolerances {
    let d = Tolerances::default();
    Tolerances {
        tol_z: o.tol_z.or(s.tolerances.tol_z).unwrap_or(d.tol_z),
        tol_eval: s.tolerances.tol_eval.unwrap_or(d.tol_eval),
        tol_res: o.tol_res.or(s.tolerances.tol_res).unwrap_or(d.tol_res),
    }
}

fn positive(name: &str, v: Option<f64>) -> Result<(), RunError> {
    match v {
        Some(x) if x.is_nan() || x <= 0.0 => Err(RunError::Input(format!(
            "--{name} must be positive, got {x}"
        ))),
        _ => Ok(()),
    }
}

/// Runs every stage up to and including `last`, writes the files, and
/// returns the report. Verification failures land in the report; only
/// input and I/O problems are errors.
pub fn run(scenario: &Scenario, last: Stage, o: &Overrides) -> Result<RunReport, RunError> {
    positive("delta-link", o.delta_link)?;
    positive("tol-res", o.tol_res)?;
    positive("tol-z", o.tol_z)?;
    let n = o.grid.unwrap_or(scenario.grid);
    if n < 2 {
        return Err(RunError::Input(format!(
            "--grid needs at least 2 points, got {n}"
        )));
    }
    let tol = tolerances(scenario, o);
    let eq = scenario.equation()?;
    let p_tilde = scenario.perturbed_signal();

    let mut knots = eq.signal().knots().to_vec();
    if let Some(q) = &p_tilde {
        knots.extend_from_slice(q.knots());
    }
    let grid = Grid::uniform(n)?.with_knots(&knots);

    let out_dir = o
        .out
        .clone()
        .or_else(|| scenario.outputs.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    fs::create_dir_all(&out_dir)?;

    let mut report = RunReport {
        tool: "gecert".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        scenario: scenario.name.clone(),
        scenario_digest: scenario.digest.clone(),
        stages: [Stage::Sweep, Stage::Certify, Stage::Perturb]
            .into_iter()
            .filter(|s| *s <= last)
            .collect(),
        grid_points: grid.len(),
        delta_link: None,
        tolerances: tol,
        trajectories: None,
        certificate: None,
        perturbation: None,
        notes: Vec::new(),
        failures: Vec::new(),
        pass: true,
    };

    // sweep
    let sets = sweep_with(&eq, &grid, &tol)?;
    let delta = o
        .delta_link
        .or(scenario.delta_link)
        .unwrap_or_else(|| default_delta_link(&sets));
    report.delta_link = finite(delta);
    let bundle = link_trajectories(&sets, &grid, delta)?;
    let mut branches = Vec::with_capacity(bundle.trajectories.len());
    for traj in &bundle.trajectories {
        let sel = check_selection(traj, &eq, tol.tol_res)?;
        if !sel.pass {
            report.fail(
                Stage::Sweep,
                "selection",
                format!(
                    "branch {} has residual {} > {}",
                    traj.branch_id, sel.max_residual, tol.tol_res
                ),
            );
        }
        let (t_start, t_end) = traj.span();
        let (z_min, z_max) = traj.z_range();
        branches.push(BranchSummary {
            branch_id: traj.branch_id,
            samples: traj.samples.len(),
            t_start,
            t_end,
            z_min,
            z_max,
            max_residual: sel.max_residual,
        });
    }
    if sets.iter().any(|s| !s.intervals().is_empty()) {
        report.notes.push(
            "some grid points have a continuum of solutions; continua are not linked".to_string(),
        );
    }
    report.trajectories = Some(TrajectorySummary {
        count: bundle.trajectories.len(),
        isolation_margin: finite(bundle.isolation_margin),
        branches,
    });
    output::write_trajectories(&out_dir, &bundle)?;

    let mut tilde_for_plot: Option<Trajectory> = None;
    if last >= Stage::Certify {
        let traj = bundle.branch(scenario.branch).ok_or_else(|| {
            RunError::Input(format!(
                "branch {} does not exist; the sweep found {}",
                scenario.branch,
                bundle.trajectories.len()
            ))
        })?;
        let (certs, ucert) = certify(&eq, traj, tol, &mut report, &out_dir)?;

        if last >= Stage::Perturb {
            match (&p_tilde, &ucert) {
                (None, _) => report
                    .notes
                    .push("no perturbed source; perturbation stage skipped".to_string()),
                (Some(_), None) => report.fail(
                    Stage::Perturb,
                    "no-uniform-certificate",
                    "the perturbation stage needs a uniform certificate",
                ),
                (Some(q), Some(u)) => {
                    let sc = PerturbationScenario::new(eq.clone(), q.clone())?;
                    tilde_for_plot = perturb(&sc, traj, &certs, u, tol, &mut report, &out_dir)?;
                }
            }
        }
    }

    if o.plot {
        output::write_svg(&out_dir, &bundle, tilde_for_plot.as_ref())?;
    }
    output::write_report(&out_dir, &report)?;
    Ok(report)
}

fn certify(
    eq: &gecert_core::GeneralizedEquation,
    traj: &Trajectory,
    tol: Tolerances,
    report: &mut RunReport,
    out_dir: &std::path::Path,
) -> Result<(Vec<SmrCertificate>, Option<gecert_core::UniformCertificate>), RunError> {
    let opts = CertifyOptions {
        tolerances: tol,
        ..CertifyOptions::default()
    };
    let mut certs = Vec::new();
    let mut refusals = Vec::new();
    for (s, r) in traj.samples.iter().zip(certify_trajectory(eq, traj, &opts)) {
        match r {
            Ok(c) => certs.push(c),
            Err(e) => refusals.push(Refusal {
                t: s.t,
                z: s.z,
                reason: e.to_string(),
            }),
        }
    }
    output::write_certificates(out_dir, &certs)?;

    let mut localization_failures = 0;
    let mut max_lipschitz_ratio: f64 = 0.0;
    for c in &certs {
        let r = verify_localization(eq, c, LOCALIZATION_SAMPLES)?;
        if !r.pass {
            localization_failures += 1;
        }
        max_lipschitz_ratio = max_lipschitz_ratio.max(r.lipschitz_estimate / c.kappa);
    }
    if localization_failures > 0 {
        report.fail(
            Stage::Certify,
            "localization",
            format!(
                "{localization_failures} of {} certificates failed verification",
                certs.len()
            ),
        );
    }

    let refused = refusals.len();
    let (continuity_excess, uniform) = if refused == 0 && !certs.is_empty() {
        let excess = continuity_check(traj, eq.signal(), &certs)?;
        if excess > tol.tol_z {
            report.fail(
                Stage::Certify,
                "continuity",
                format!("|dz| exceeds kappa_t |dp| by {excess}"),
            );
        }
        let u = uniform_certificate(&certs)?;
        output::write_uniform(out_dir, &u)?;
        (Some(excess), Some(u))
    } else {
        report.notes.push(format!(
            "{refused} of {} samples on branch {} have no certificate; no uniform certificate",
            traj.samples.len(),
            traj.branch_id
        ));
        (None, None)
    };

    report.certificate = Some(CertificateSummary {
        branch_id: traj.branch_id,
        emitted: certs.len(),
        refused,
        refusals: refusals.into_iter().take(MAX_LISTED_REFUSALS).collect(),
        localization_samples: LOCALIZATION_SAMPLES,
        localization_failures,
        max_lipschitz_ratio,
        continuity_excess,
        uniform: uniform.as_ref().map(|u| UniformSummary {
            a: u.a,
            b: u.b,
            kappa: u.kappa,
            b_ratio_cap: u.b_ratio_cap,
            b_pointwise_min: u.b_pointwise_min,
            b_note: b_note(u.b_ratio_cap, u.b_pointwise_min),
        }),
    });
    Ok((certs, uniform))
}

fn b_note(ratio_cap: f64, pointwise_min: f64) -> String {
    let binding = if ratio_cap <= pointwise_min {
        "the ratio cap a/kappa"
    } else {
        "the smallest pointwise b_t"
    };
    format!(
        "b = min(a/kappa, min b_t) with a/kappa = {ratio_cap} and min b_t = {pointwise_min}; \
         b is fixed by {binding}. Reading b as min b_t alone gives {pointwise_min}."
    )
}

fn perturb(
    sc: &PerturbationScenario,
    traj: &Trajectory,
    certs: &[SmrCertificate],
    u: &gecert_core::UniformCertificate,
    tol: Tolerances,
    report: &mut RunReport,
    out_dir: &std::path::Path,
) -> Result<Option<Trajectory>, RunError> {
    let gated = sc.gate_passes(u);
    let constructed = if gated {
        construct_perturbed_trajectory(sc, traj, u)
    } else {
        report.fail(
            Stage::Perturb,
            "gate-violation",
            format!("epsilon = {} is not below b/4 = {}", sc.epsilon, u.b / 4.0),
        );
        // still localize in B_a so the observed deviation is on record
        localize_pointwise(&sc.base, traj, &sc.p_tilde, u.a)
    };
    let z_tilde = match constructed {
        Ok(z) => z,
        Err(e) => {
            report.fail(Stage::Perturb, "localization", e.to_string());
            return Ok(None);
        }
    };
    output::write_perturbed(out_dir, traj, &z_tilde)?;

    let bound = verify_deviation_bound(traj, &z_tilde, u, sc.epsilon)?;
    if !(bound.observed < bound.bound || (bound.epsilon == 0.0 && bound.observed == 0.0)) {
        report.fail(
            Stage::Perturb,
            "deviation-bound",
            format!(
                "observed deviation {} is not below 4a eps/b = {}",
                bound.observed, bound.bound
            ),
        );
    }
    let tilde_eq = sc.perturbed();
    let sel = check_selection(&z_tilde, &tilde_eq, tol.tol_res)?;
    if !sel.pass {
        report.fail(
            Stage::Perturb,
            "perturbed-selection",
            format!("residual {} > {}", sel.max_residual, tol.tol_res),
        );
    }
    let excess = continuity_check(&z_tilde, &sc.p_tilde, certs)?;
    if excess > tol.tol_z {
        report.fail(
            Stage::Perturb,
            "perturbed-continuity",
            format!("|dz| exceeds kappa_t |dp| by {excess}"),
        );
    }

    let method2 = choose_window_radius(traj, &sc.p_tilde, u).and_then(|rho| {
        let m2 = method2_trajectory(&sc.base, traj, u, &sc.p_tilde, rho, tol.tol_z)?;
        let max_difference = max_deviation(&z_tilde, &m2)?;
        Ok(Method2Summary {
            rho,
            max_difference,
            pass: max_difference <= METHOD_AGREEMENT_TOL,
        })
    });
    let method2 = match method2 {
        Ok(m) => {
            if !m.pass {
                report.fail(
                    Stage::Perturb,
                    "method-agreement",
                    format!("the two constructions differ by {}", m.max_difference),
                );
            }
            Some(m)
        }
        Err(e) => {
            report.fail(Stage::Perturb, "method2", e.to_string());
            None
        }
    };

    report.perturbation = Some(PerturbationSummary {
        branch_id: traj.branch_id,
        gated,
        bound,
        perturbed_max_residual: sel.max_residual,
        method2,
    });
    Ok(Some(z_tilde))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn note_names_the_binding_term() {
        assert!(b_note(0.19, 1.1).contains("ratio cap"));
        assert!(b_note(2.0, 1.1).contains("pointwise"));
    }
}
