//! Closed set-valued graphs in the i–v plane.

mod form;
mod graph;
mod value_set;

pub use form::{Form, FormKind, FormRoots, Rational};
pub use graph::{
    sum_with_function, Domain, FoldKind, FoldPoint, Piece, PiecewiseGraph, VerticalSegment,
};
pub use value_set::{Interval, ValueSet};
