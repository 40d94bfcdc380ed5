//! Closed-form branch expressions: affine, shifted linear-fractional, and
//! their sums.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `(num_slope·(z−shift) + num_offset) / (den_slope·(z−shift) + den_offset)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rational {
    pub num_slope: f64,
    pub num_offset: f64,
    pub den_slope: f64,
    pub den_offset: f64,
    pub shift: f64,
}

impl Rational {
    pub fn denominator(&self, z: f64) -> f64 {
        self.den_slope * (z - self.shift) + self.den_offset
    }

    pub fn eval(&self, z: f64) -> f64 {
        let v = z - self.shift;
        (self.num_slope * v + self.num_offset) / (self.den_slope * v + self.den_offset)
    }

    /// Numerator of the derivative: `num_slope·den_offset − num_offset·den_slope`.
    pub fn cross(&self) -> f64 {
        self.num_slope * self.den_offset - self.num_offset * self.den_slope
    }

    pub fn derivative(&self, z: f64) -> f64 {
        let den = self.denominator(z);
        self.cross() / (den * den)
    }

    pub fn second_derivative(&self, z: f64) -> f64 {
        let den = self.denominator(z);
        -2.0 * self.cross() * self.den_slope / (den * den * den)
    }

    /// Abscissa where the denominator vanishes.
    pub fn pole(&self) -> Option<f64> {
        (self.den_slope != 0.0).then(|| self.shift - self.den_offset / self.den_slope)
    }

    fn is_finite(&self) -> bool {
        [
            self.num_slope,
            self.num_offset,
            self.den_slope,
            self.den_offset,
            self.shift,
        ]
        .iter()
        .all(|c| c.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormKind {
    Constant,
    Affine,
    Rational,
    Sum,
}

/// `slope·z + intercept` plus an optional [`Rational`] term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FormRepr", into = "FormRepr")]
pub struct Form {
    slope: f64,
    intercept: f64,
    rational: Option<Rational>,
}

/// Roots of `form(z) = y`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FormRoots {
    pub points: Vec<f64>,
    /// The form is constant and equal to `y`: every abscissa solves.
    pub everywhere: bool,
}

impl Form {
    pub fn constant(value: f64) -> Self {
        Self {
            slope: 0.0,
            intercept: value,
            rational: None,
        }
    }

    pub fn affine(slope: f64, intercept: f64) -> Self {
        Self {
            slope,
            intercept,
            rational: None,
        }
    }

    pub fn rational(r: Rational) -> Self {
        Self {
            slope: 0.0,
            intercept: 0.0,
            rational: Some(r),
        }
    }

    pub fn sum(slope: f64, intercept: f64, r: Rational) -> Self {
        Self {
            slope,
            intercept,
            rational: Some(r),
        }
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn rational_part(&self) -> Option<&Rational> {
        self.rational.as_ref()
    }

    pub fn kind(&self) -> FormKind {
        match (
            self.rational.is_some(),
            self.slope != 0.0 || self.intercept != 0.0,
        ) {
            (true, true) => FormKind::Sum,
            (true, false) => FormKind::Rational,
            (false, _) if self.slope != 0.0 => FormKind::Affine,
            (false, _) => FormKind::Constant,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.slope.is_finite()
            && self.intercept.is_finite()
            && self.rational.is_none_or(|r| r.is_finite())
    }

    pub fn eval(&self, z: f64) -> f64 {
        let base = self.slope * z + self.intercept;
        match &self.rational {
            Some(r) => base + r.eval(z),
            None => base,
        }
    }

    pub fn derivative(&self, z: f64) -> f64 {
        self.slope + self.rational.map_or(0.0, |r| r.derivative(z))
    }

    pub fn second_derivative(&self, z: f64) -> f64 {
        self.rational.map_or(0.0, |r| r.second_derivative(z))
    }

    /// Pointwise sum; at most one operand may carry a rational term.
    pub fn add(&self, other: &Self) -> Result<Self> {
        let rational = match (self.rational, other.rational) {
            (Some(_), Some(_)) => {
                return Err(Error::IncompatibleDomain(
                    "sum of two linear-fractional branches has no closed form in this taxonomy"
                        .into(),
                ))
            }
            (r, None) | (None, r) => r,
        };
        Ok(Self {
            slope: self.slope + other.slope,
            intercept: self.intercept + other.intercept,
            rational,
        })
    }

    /// Interior critical points of the derivative's sign (closed form).
    pub fn stationary_points(&self) -> Vec<f64> {
        let Some(r) = self.rational else {
            return Vec::new();
        };
        if self.slope == 0.0 || r.den_slope == 0.0 {
            return Vec::new();
        }
        // slope + K/den^2 = 0  <=>  den^2 = -K/slope
        let target = -r.cross() / self.slope;
        if !(target > 0.0) {
            return Vec::new();
        }
        let w = target.sqrt();
        let mut out: Vec<f64> = [-w, w]
            .iter()
            .map(|&den| (den - r.den_offset) / r.den_slope + r.shift)
            .collect();
        out.sort_by(f64::total_cmp);
        out
    }

    /// Solves `form(z) = y` in closed form. `flat_tol` decides when a
    /// constant form counts as equal to `y`.
    pub fn solve(&self, y: f64, flat_tol: f64) -> FormRoots {
        let Some(r) = self.rational else {
            if self.slope == 0.0 {
                return FormRoots {
                    points: Vec::new(),
                    everywhere: (self.intercept - y).abs() <= flat_tol,
                };
            }
            return FormRoots {
                points: vec![(y - self.intercept) / self.slope],
                everywhere: false,
            };
        };

        // In v = z - shift: (slope·v + c0)(ds·v + do) + ns·v + no = 0.
        let c0 = self.slope * r.shift + self.intercept - y;
        let a2 = self.slope * r.den_slope;
        let a1 = self.slope * r.den_offset + c0 * r.den_slope + r.num_slope;
        let a0 = c0 * r.den_offset + r.num_offset;

        let roots_v: Vec<f64> = if a2 == 0.0 {
            if a1 == 0.0 {
                return FormRoots {
                    points: Vec::new(),
                    everywhere: a0 == 0.0,
                };
            }
            vec![-a0 / a1]
        } else {
            let disc = a1 * a1 - 4.0 * a2 * a0;
            if disc < 0.0 {
                Vec::new()
            } else {
                let q = -0.5 * (a1 + a1.signum() * disc.sqrt());
                if q == 0.0 {
                    vec![0.0]
                } else {
                    vec![q / a2, a0 / q]
                }
            }
        };

        let points = roots_v
            .into_iter()
            .map(|v| v + r.shift)
            .filter(|&z| r.denominator(z) != 0.0)
            .map(|z| self.polish(z, y))
            .collect();
        FormRoots {
            points,
            everywhere: false,
        }
    }

    /// A few guarded Newton steps to recover digits lost in the quadratic.
    fn polish(&self, mut z: f64, y: f64) -> f64 {
        let mut resid = (self.eval(z) - y).abs();
        for _ in 0..3 {
            let d = self.derivative(z);
            if d == 0.0 || !d.is_finite() || resid == 0.0 {
                break;
            }
            let next = z - (self.eval(z) - y) / d;
            let next_resid = (self.eval(next) - y).abs();
            if !(next_resid < resid) {
                break;
            }
            z = next;
            resid = next_resid;
        }
        z
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum FormRepr {
    Constant {
        value: f64,
    },
    Affine {
        slope: f64,
        intercept: f64,
    },
    Rational {
        num_slope: f64,
        num_offset: f64,
        den_slope: f64,
        den_offset: f64,
        #[serde(default)]
        shift: f64,
    },
    Sum {
        slope: f64,
        intercept: f64,
        rational: Rational,
    },
}

impl TryFrom<FormRepr> for Form {
    type Error = Error;

    fn try_from(repr: FormRepr) -> Result<Self> {
        let form = match repr {
            FormRepr::Constant { value } => Form::constant(value),
            FormRepr::Affine { slope, intercept } => Form::affine(slope, intercept),
            FormRepr::Rational {
                num_slope,
                num_offset,
                den_slope,
                den_offset,
                shift,
            } => Form::rational(Rational {
                num_slope,
                num_offset,
                den_slope,
                den_offset,
                shift,
            }),
            FormRepr::Sum {
                slope,
                intercept,
                rational,
            } => Form::sum(slope, intercept, rational),
        };
        if !form.is_finite() {
            return Err(Error::InvalidPiece("non-finite coefficient".into()));
        }
        Ok(form)
    }
}

impl From<Form> for FormRepr {
    fn from(f: Form) -> Self {
        match (f.kind(), f.rational) {
            (FormKind::Constant, _) => FormRepr::Constant { value: f.intercept },
            (FormKind::Affine, _) => FormRepr::Affine {
                slope: f.slope,
                intercept: f.intercept,
            },
            (FormKind::Rational, Some(r)) => FormRepr::Rational {
                num_slope: r.num_slope,
                num_offset: r.num_offset,
                den_slope: r.den_slope,
                den_offset: r.den_offset,
                shift: r.shift,
            },
            (_, Some(r)) => FormRepr::Sum {
                slope: f.slope,
                intercept: f.intercept,
                rational: r,
            },
            (_, None) => unreachable!("rational kinds always carry a rational term"),
        }
    }
}
