use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::setmap::{Domain, Form, Piece, PiecewiseGraph, Rational, VerticalSegment};

/// Current at which the DIAC model leaves its blocking plateau (A).
pub const DIAC_BREAKOVER_CURRENT: f64 = 1e-4;

/// Two-terminal series element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Component {
    Resistor {
        resistance: f64,
    },
    Zener {
        characteristic: PiecewiseGraph,
    },
    PracticalDiode {
        forward_voltage: f64,
        breakdown_voltage: f64,
    },
    Diac {
        d: f64,
    },
}

/// A component's voltage as a function of its current.
#[derive(Debug, Clone, PartialEq)]
pub enum Characteristic {
    SingleValued(PiecewiseGraph),
    SetValued(PiecewiseGraph),
}

impl Component {
    pub fn characteristic(&self) -> Result<Characteristic> {
        match self {
            Component::Resistor { resistance } => {
                if !(resistance.is_finite() && *resistance > 0.0) {
                    return Err(Error::InvalidComponent(format!(
                        "resistance must be positive, got {resistance}"
                    )));
                }
                Ok(Characteristic::SingleValued(PiecewiseGraph::affine(
                    *resistance,
                    0.0,
                )))
            }
            Component::Zener { characteristic } => {
                Ok(Characteristic::SetValued(characteristic.clone()))
            }
            Component::PracticalDiode {
                forward_voltage,
                breakdown_voltage,
            } => practical_diode_characteristic(*forward_voltage, *breakdown_voltage)
                .map(Characteristic::SetValued),
            Component::Diac { d } => diac_characteristic(*d).map(Characteristic::SetValued),
        }
    }
}

/// Ideal diode with forward drop `v_f` and reverse breakdown `v_b`:
/// `−v_b` for `z < 0`, `[−v_b, v_f]` at `0`, `v_f` for `z > 0`.
pub fn practical_diode_characteristic(v_f: f64, v_b: f64) -> Result<PiecewiseGraph> {
    if !(v_f.is_finite() && v_b.is_finite() && v_f > 0.0 && v_b > 0.0) {
        return Err(Error::InvalidComponent(format!(
            "diode voltages must be positive, got v_F = {v_f}, v_B = {v_b}"
        )));
    }
    PiecewiseGraph::new(
        vec![
            Piece::new(
                Domain::new(f64::NEG_INFINITY, 0.0, false, false)?,
                Form::constant(-v_b),
            )?,
            Piece::new(
                Domain::new(0.0, f64::INFINITY, false, false)?,
                Form::constant(v_f),
            )?,
        ],
        vec![VerticalSegment::new(0.0, -v_b, v_f)?],
    )
}

/// Five-branch DIAC model with `c = −252.52·d`, `a = 15·c`, `b = 32·d`.
///
/// Plateaus `±32` V up to the breakover current, a segment `[−32, 32]` at
/// zero, and linear-fractional branches tending to `±15` V beyond.
pub fn diac_characteristic(d: f64) -> Result<PiecewiseGraph> {
    if !(d.is_finite() && d != 0.0) {
        return Err(Error::InvalidComponent(format!(
            "DIAC parameter d must be nonzero, got {d}"
        )));
    }
    let c = -252.52 * d;
    let a = 15.0 * c;
    let b = 32.0 * d;
    let plateau = b / d;
    let z_b = DIAC_BREAKOVER_CURRENT;
    let forward = Rational {
        num_slope: a,
        num_offset: -b,
        den_slope: c,
        den_offset: -d,
        shift: z_b,
    };
    let reverse = Rational {
        num_slope: a,
        num_offset: b,
        den_slope: -c,
        den_offset: -d,
        shift: -z_b,
    };
    let inf = f64::INFINITY;
    PiecewiseGraph::new(
        vec![
            Piece::new(
                Domain::new(-inf, -z_b, false, false)?,
                Form::rational(reverse),
            )?,
            Piece::new(
                Domain::new(-z_b, 0.0, true, false)?,
                Form::constant(-plateau),
            )?,
            Piece::new(Domain::new(0.0, z_b, false, true)?, Form::constant(plateau))?,
            Piece::new(
                Domain::new(z_b, inf, false, false)?,
                Form::rational(forward),
            )?,
        ],
        vec![VerticalSegment::new(0.0, -plateau, plateau)?],
    )
}
