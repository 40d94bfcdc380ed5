use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;

/// `amplitude · sin(omega · t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sinusoid {
    pub amplitude: f64,
    pub omega: f64,
    #[serde(default)]
    pub phase: f64,
}

impl Sinusoid {
    pub fn eval(&self, t: f64) -> f64 {
        self.amplitude * (self.omega * t + self.phase).sin()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    #[default]
    Linear,
    /// Holds `v_i` on `[t_i, t_{i+1})`.
    Step,
}

/// Tabulated waveform. Times are strictly increasing and cover `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableRepr", into = "TableRepr")]
pub struct SampleTable {
    times: Vec<f64>,
    values: Vec<f64>,
    interpolation: Interpolation,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableRepr {
    times: Vec<f64>,
    values: Vec<f64>,
    #[serde(default)]
    interpolation: Interpolation,
}

impl TryFrom<TableRepr> for SampleTable {
    type Error = Error;
    fn try_from(r: TableRepr) -> Result<Self> {
        SampleTable::new(r.times, r.values, r.interpolation)
    }
}

impl From<SampleTable> for TableRepr {
    fn from(s: SampleTable) -> Self {
        Self {
            times: s.times,
            values: s.values,
            interpolation: s.interpolation,
        }
    }
}

impl SampleTable {
    pub fn new(times: Vec<f64>, values: Vec<f64>, interpolation: Interpolation) -> Result<Self> {
        if times.len() != values.len() || times.is_empty() {
            return Err(Error::InvalidSignal(
                "table needs equally many times and values".into(),
            ));
        }
        if !times.iter().chain(&values).all(|x| x.is_finite()) {
            return Err(Error::InvalidSignal("table entries must be finite".into()));
        }
        if !times.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidSignal(
                "table times must increase strictly".into(),
            ));
        }
        if times[0] > 0.0 || times[times.len() - 1] < 1.0 {
            return Err(Error::InvalidSignal("table must cover [0, 1]".into()));
        }
        Ok(Self {
            times,
            values,
            interpolation,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    fn eval(&self, t: f64) -> f64 {
        // index of the last knot <= t
        let i = self.times.partition_point(|&k| k <= t).saturating_sub(1);
        if i + 1 >= self.times.len() {
            return self.values[self.values.len() - 1];
        }
        match self.interpolation {
            Interpolation::Step => self.values[i],
            Interpolation::Linear => {
                let (t0, t1) = (self.times[i], self.times[i + 1]);
                let (v0, v1) = (self.values[i], self.values[i + 1]);
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }
}

/// Input signal `p(t)`: DC level, sinusoids, and an optional table, summed.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Signal {
    #[serde(default)]
    pub dc: f64,
    #[serde(default)]
    pub sinusoids: Vec<Sinusoid>,
    #[serde(default)]
    pub table: Option<SampleTable>,
}

impl Signal {
    pub fn constant(dc: f64) -> Self {
        Self {
            dc,
            ..Self::default()
        }
    }

    pub fn new(dc: f64, sinusoids: Vec<Sinusoid>, table: Option<SampleTable>) -> Result<Self> {
        let s = Self {
            dc,
            sinusoids,
            table,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.dc.is_finite()
            && self
                .sinusoids
                .iter()
                .all(|s| s.amplitude.is_finite() && s.omega.is_finite() && s.phase.is_finite());
        if finite {
            Ok(())
        } else {
            Err(Error::InvalidSignal("non-finite coefficient".into()))
        }
    }

    /// `p(t)` for `t ∈ [0, 1]`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::OutOfRange { t });
        }
        Ok(self.value(t))
    }

    fn value(&self, t: f64) -> f64 {
        let tabulated = self.table.as_ref().map_or(0.0, |tab| tab.eval(t));
        self.dc + self.sinusoids.iter().map(|s| s.eval(t)).sum::<f64>() + tabulated
    }

    pub fn is_closed_form(&self) -> bool {
        self.table.is_none()
    }

    /// Table knots; the signal may be non-smooth there.
    pub fn knots(&self) -> &[f64] {
        self.table.as_ref().map_or(&[], |tab| tab.times())
    }

    /// `(1 − λ)·self + λ·other`, exact for table-free signals.
    pub fn blend(&self, other: &Signal, lambda: f64) -> Result<Signal> {
        if !(self.is_closed_form() && other.is_closed_form()) {
            return Err(Error::InvalidSignal(
                "cannot blend tabulated signals".into(),
            ));
        }
        let scale = |s: &Sinusoid, k: f64| Sinusoid {
            amplitude: s.amplitude * k,
            ..*s
        };
        let sinusoids = self
            .sinusoids
            .iter()
            .map(|s| scale(s, 1.0 - lambda))
            .chain(other.sinusoids.iter().map(|s| scale(s, lambda)))
            .filter(|s| s.amplitude != 0.0)
            .collect();
        Signal::new(
            (1.0 - lambda) * self.dc + lambda * other.dc,
            sinusoids,
            None,
        )
    }
}

/// Default sample count for [`signal_distance`].
pub const DISTANCE_GRID_POINTS: usize = 4096;

/// `max_t |p(t) − q(t)|` on the grid, refined by golden-section search on the
/// two cells around the discrete maximum.
pub fn signal_distance(p: &Signal, q: &Signal, grid: &Grid) -> f64 {
    let gap = |t: f64| (p.value(t) - q.value(t)).abs();
    let ts = grid.points();
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for (i, &t) in ts.iter().enumerate() {
        let g = gap(t);
        if g > best {
            best = g;
            best_i = i;
        }
    }
    for &k in p.knots().iter().chain(q.knots()) {
        if (0.0..=1.0).contains(&k) {
            best = best.max(gap(k));
        }
    }
    if p.is_closed_form() && q.is_closed_form() {
        let lo = ts[best_i.saturating_sub(1)];
        let hi = ts[(best_i + 1).min(ts.len() - 1)];
        best = best.max(golden_max(gap, lo, hi));
    }
    best
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    f1.max(f2)
}
