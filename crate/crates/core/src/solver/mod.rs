//! Static solves, time sweeps, and trajectory linking.

mod link;

use rayon::prelude::*;

pub use crate::grid::Grid;
pub use link::{
    check_selection, default_delta_link, isolation_margin, link_trajectories, Sample,
    SelectionReport, Trajectory, TrajectoryBundle,
};

use crate::circuit::GeneralizedEquation;
use crate::error::Result;
use crate::setmap::ValueSet;
use crate::tolerances::Tolerances;

/// The solution set `S(t)`: isolated points plus continuum intervals.
pub type SolutionSet = ValueSet;

/// All `z` with `p_value ∈ f(z) + F(z)`.
pub fn solve_static(eq: &GeneralizedEquation, p_value: f64) -> SolutionSet {
    solve_static_with(eq, p_value, &Tolerances::default())
}

pub fn solve_static_with(eq: &GeneralizedEquation, p_value: f64, tol: &Tolerances) -> SolutionSet {
    eq.sum().invert_at_with(p_value, tol)
}

/// `S(t)` at every grid point, in grid order.
pub fn sweep(eq: &GeneralizedEquation, grid: &Grid) -> Result<Vec<SolutionSet>> {
    sweep_with(eq, grid, &Tolerances::default())
}

pub fn sweep_with(
    eq: &GeneralizedEquation,
    grid: &Grid,
    tol: &Tolerances,
) -> Result<Vec<SolutionSet>> {
    grid.points()
        .par_iter()
        .map(|&t| Ok(solve_static_with(eq, eq.signal().eval(t)?, tol)))
        .collect()
}
