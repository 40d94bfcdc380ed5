//! Generalized equations `0 ∈ f(z) − p(t) + F(z)` for scalar circuits with
//! set-valued characteristics: closed piecewise graphs, static solution sets,
//! linked trajectories, strong-metric-regularity certificates and
//! perturbation bounds.

// `!(x > 0.0)` guards are deliberate: NaN must fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod error;
pub mod grid;
pub mod perturb;
pub mod regularity;
pub mod setmap;
pub mod solver;
pub mod tolerances;

pub use circuit::{compose_series, Component, GeneralizedEquation, Signal};
pub use error::{Error, Result};
pub use grid::Grid;
pub use perturb::{BoundReport, PerturbationScenario};
pub use regularity::{SmrCertificate, UniformCertificate};
pub use setmap::{
    Domain, FoldKind, FoldPoint, Form, Interval, Piece, PiecewiseGraph, ValueSet, VerticalSegment,
};
pub use solver::{SolutionSet, Trajectory, TrajectoryBundle};
pub use tolerances::Tolerances;
