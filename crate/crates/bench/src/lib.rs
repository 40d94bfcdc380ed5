//! Fixtures shared by the criterion benches.

use std::f64::consts::PI;

use gecert_core::circuit::{Component, Sinusoid};
use gecert_core::{compose_series, GeneralizedEquation, Signal};

/// The 220 Ω DIAC loop driven by `28 + 2.5 sin 4πt`.
pub fn diac_loop() -> GeneralizedEquation {
    let source = Signal::new(
        28.0,
        vec![Sinusoid {
            amplitude: 2.5,
            omega: 4.0 * PI,
            phase: 0.0,
        }],
        None,
    )
    .expect("valid source");
    compose_series(
        &[
            Component::Resistor { resistance: 220.0 },
            Component::Diac { d: 0.1 },
        ],
        source,
    )
    .expect("valid circuit")
}

/// `27.83 + 2.4 sin(4πt + π/64)`.
pub fn perturbed_source() -> Signal {
    Signal::new(
        27.83,
        vec![Sinusoid {
            amplitude: 2.4,
            omega: 4.0 * PI,
            phase: PI / 64.0,
        }],
        None,
    )
    .expect("valid source")
}
