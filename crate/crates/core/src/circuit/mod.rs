//! Series-loop composition and input signals.

mod component;
mod equation;
mod signal;

pub use component::{
    diac_characteristic, practical_diode_characteristic, Characteristic, Component,
    DIAC_BREAKOVER_CURRENT,
};
pub use equation::{compose_series, GeneralizedEquation};
pub use signal::{
    signal_distance, Interpolation, SampleTable, Signal, Sinusoid, DISTANCE_GRID_POINTS,
};
