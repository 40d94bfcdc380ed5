use serde::Serialize;

use super::SolutionSet;
use crate::circuit::GeneralizedEquation;
use crate::error::{Error, Result};
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    /// Position in the sweep grid.
    pub index: usize,
    pub t: f64,
    pub z: f64,
}

/// One solution branch sampled on consecutive grid points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    /// 1-based label, ordered by start time then initial current.
    pub branch_id: usize,
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn new(branch_id: usize, samples: Vec<Sample>) -> Self {
        Self { branch_id, samples }
    }

    /// `[t_first, t_last]` covered by the samples.
    pub fn span(&self) -> (f64, f64) {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => (a.t, b.t),
            _ => (f64::NAN, f64::NAN),
        }
    }

    pub fn first_index(&self) -> usize {
        self.samples.first().map_or(0, |s| s.index)
    }

    /// Sample at a grid index, if the branch is alive there.
    pub fn at(&self, index: usize) -> Option<&Sample> {
        let k = index.checked_sub(self.first_index())?;
        self.samples.get(k)
    }

    pub fn z_range(&self) -> (f64, f64) {
        self.samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                (lo.min(s.z), hi.max(s.z))
            })
    }

    pub fn covers(&self, grid: &Grid) -> bool {
        self.samples.len() == grid.len() && self.first_index() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryBundle {
    pub trajectories: Vec<Trajectory>,
    pub isolation_margin: f64,
}

impl TrajectoryBundle {
    pub fn branch(&self, branch_id: usize) -> Option<&Trajectory> {
        self.trajectories.iter().find(|t| t.branch_id == branch_id)
    }
}

/// A quarter of the smallest gap between isolated solutions at the first
/// grid point that has two or more; infinite when no grid point does.
pub fn default_delta_link(sets: &[SolutionSet]) -> f64 {
    let spacing = sets
        .iter()
        .find(|s| s.points().len() >= 2)
        .map_or(f64::INFINITY, |s| {
            s.points()
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::INFINITY, f64::min)
        });
    0.25 * spacing
}

/// Greedy nearest matching between consecutive solution sets.
///
/// At each step the globally closest (predecessor, candidate) pair within
/// `delta_link` is joined first. Continuum components are never linked.
/// Unmatched predecessors close their branch and unmatched candidates open
/// a new one.
pub fn link_trajectories(
    sets: &[SolutionSet],
    grid: &Grid,
    delta_link: f64,
) -> Result<TrajectoryBundle> {
    if !(delta_link > 0.0) {
        return Err(Error::InvalidGrid(format!(
            "linking gap must be positive, got {delta_link}"
        )));
    }
    if sets.len() != grid.len() {
        return Err(Error::GridMismatch);
    }
    let ts = grid.points();
    let mut finished: Vec<Vec<Sample>> = Vec::new();
    let mut active: Vec<Vec<Sample>> = Vec::new();

    for (index, (set, &t)) in sets.iter().zip(ts).enumerate() {
        let candidates = set.points();
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (j, branch) in active.iter().enumerate() {
            let prev = branch[branch.len() - 1].z;
            let mut near: Vec<(f64, f64)> = candidates
                .iter()
                .map(|&z| ((z - prev).abs(), z))
                .filter(|&(d, _)| d < delta_link)
                .collect();
            near.sort_by(|a, b| a.0.total_cmp(&b.0));
            if let [(d1, z1), (d2, z2), ..] = near[..] {
                if (z1 - z2).abs() < delta_link && d2 < 2.0 * d1 {
                    return Err(Error::AmbiguousLink { t, z: prev });
                }
            }
            for (k, &z) in candidates.iter().enumerate() {
                let d = (z - prev).abs();
                if d < delta_link {
                    pairs.push((d, j, k));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

        let mut matched_branch = vec![None; active.len()];
        let mut used = vec![false; candidates.len()];
        for (_, j, k) in pairs {
            if matched_branch[j].is_none() && !used[k] {
                matched_branch[j] = Some(k);
                used[k] = true;
            }
        }

        let mut next_active = Vec::with_capacity(candidates.len());
        for (branch, m) in active.into_iter().zip(matched_branch) {
            match m {
                Some(k) => {
                    let mut branch = branch;
                    branch.push(Sample {
                        index,
                        t,
                        z: candidates[k],
                    });
                    next_active.push(branch);
                }
                None => finished.push(branch),
            }
        }
        for (k, &z) in candidates.iter().enumerate() {
            if !used[k] {
                next_active.push(vec![Sample { index, t, z }]);
            }
        }
        active = next_active;
    }
    finished.extend(active);
    finished.sort_by(|a, b| a[0].index.cmp(&b[0].index).then(a[0].z.total_cmp(&b[0].z)));

    let trajectories: Vec<Trajectory> = finished
        .into_iter()
        .enumerate()
        .map(|(i, samples)| Trajectory::new(i + 1, samples))
        .collect();
    let isolation_margin = isolation_margin(&trajectories);
    Ok(TrajectoryBundle {
        trajectories,
        isolation_margin,
    })
}

/// Smallest distance between two distinct branches at a shared grid point;
/// infinite for fewer than two branches or no shared points.
pub fn isolation_margin(trajectories: &[Trajectory]) -> f64 {
    let mut margin = f64::INFINITY;
    for (i, a) in trajectories.iter().enumerate() {
        for b in &trajectories[i + 1..] {
            for s in &a.samples {
                if let Some(o) = b.at(s.index) {
                    margin = margin.min((s.z - o.z).abs());
                }
            }
        }
    }
    margin
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelectionReport {
    pub max_residual: f64,
    pub pass: bool,
}

/// Largest `dist(p(t), (f + F)(z(t)))` along the trajectory.
pub fn check_selection(
    traj: &Trajectory,
    eq: &GeneralizedEquation,
    tol_res: f64,
) -> Result<SelectionReport> {
    let mut max_residual: f64 = 0.0;
    for s in &traj.samples {
        max_residual = max_residual.max(eq.residual(s.t, s.z)?);
    }
    Ok(SelectionReport {
        max_residual,
        pass: max_residual <= tol_res,
    })
}
