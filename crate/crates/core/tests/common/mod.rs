//! Independent oracles: hand-written characteristic formulas, scans and
//! finite differences that do not go through the library's graph code.
#![allow(dead_code)]

use std::f64::consts::PI;

use gecert_core::circuit::{compose_series, Component, GeneralizedEquation, Signal, Sinusoid};

pub const R: f64 = 220.0;
pub const D: f64 = 0.1;

/// DIAC voltage off the origin, written directly from the model.
pub fn diac_value(z: f64) -> f64 {
    let c = -252.52 * D;
    let a = 15.0 * c;
    let b = 32.0 * D;
    if z > 1e-4 {
        (a * (z - 1e-4) - b) / (c * (z - 1e-4) - D)
    } else if z > 0.0 {
        32.0
    } else if z >= -1e-4 {
        -32.0
    } else {
        (a * (z + 1e-4) + b) / (-c * (z + 1e-4) - D)
    }
}

/// `R z + F_DIAC(z)` away from `z = 0`.
pub fn loop_value(z: f64) -> f64 {
    R * z + diac_value(z)
}

pub fn central_difference(f: impl Fn(f64) -> f64, z: f64) -> f64 {
    let h = 1e-8 * z.abs().max(1.0);
    (f(z + h) - f(z - h)) / (2.0 * h)
}

pub fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let x1 = hi - r * (hi - lo);
        let x2 = lo + r * (hi - lo);
        if f(x1) < f(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    0.5 * (lo + hi)
}

pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Midpoints of the cells of an `n`-point scan of `[lo, hi]` where `h`
/// changes sign. Cells whose ends straddle a jump count too, which is how a
/// vertical segment shows up.
pub fn scan_roots(h: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> (Vec<f64>, f64) {
    let step = (hi - lo) / (n - 1) as f64;
    let mut roots = Vec::new();
    let mut prev = h(lo);
    for i in 1..n {
        let z = lo + step * i as f64;
        let cur = h(z);
        if (prev < 0.0) != (cur < 0.0) {
            roots.push(z - 0.5 * step);
        }
        prev = cur;
    }
    (roots, step)
}

pub fn example_source() -> Signal {
    Signal::new(
        28.0,
        vec![Sinusoid {
            amplitude: 2.5,
            omega: 4.0 * PI,
            phase: 0.0,
        }],
        None,
    )
    .unwrap()
}

pub fn example_perturbed_source() -> Signal {
    Signal::new(
        27.83,
        vec![Sinusoid {
            amplitude: 2.4,
            omega: 4.0 * PI,
            phase: PI / 64.0,
        }],
        None,
    )
    .unwrap()
}

pub fn diac_equation() -> GeneralizedEquation {
    compose_series(
        &[
            Component::Resistor { resistance: R },
            Component::Diac { d: D },
        ],
        example_source(),
    )
    .unwrap()
}
