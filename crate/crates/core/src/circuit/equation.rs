use super::component::{Characteristic, Component};
use super::signal::Signal;
use crate::error::{Error, Result};
use crate::setmap::{sum_with_function, FoldPoint, PiecewiseGraph, ValueSet};

/// `0 ∈ f(z) − p(t) + F(z)` with the summed graph `f + F` and its fold
/// points precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedEquation {
    f: PiecewiseGraph,
    set_map: PiecewiseGraph,
    signal: Signal,
    sum: PiecewiseGraph,
    folds: Vec<FoldPoint>,
}

impl GeneralizedEquation {
    pub fn new(f: PiecewiseGraph, set_map: PiecewiseGraph, signal: Signal) -> Result<Self> {
        signal.validate()?;
        let sum = sum_with_function(&f, &set_map)?;
        let folds = sum.fold_points();
        Ok(Self {
            f,
            set_map,
            signal,
            sum,
            folds,
        })
    }

    /// Same `f` and `F`, new input signal.
    pub fn with_signal(&self, signal: Signal) -> Self {
        Self {
            signal,
            ..self.clone()
        }
    }

    pub fn f(&self) -> &PiecewiseGraph {
        &self.f
    }

    pub fn set_map(&self) -> &PiecewiseGraph {
        &self.set_map
    }

    pub fn signal(&self) -> &Signal {
        &self.signal
    }

    /// The graph of `f + F`.
    pub fn sum(&self) -> &PiecewiseGraph {
        &self.sum
    }

    pub fn folds(&self) -> &[FoldPoint] {
        &self.folds
    }

    /// `(f + F)(z)`.
    pub fn eval_sum(&self, z: f64) -> Result<ValueSet> {
        self.sum.eval(z)
    }

    /// `dist(p_value, (f + F)(z))`; infinite outside the domain.
    pub fn residual_at(&self, p_value: f64, z: f64) -> f64 {
        self.sum
            .eval(z)
            .map_or(f64::INFINITY, |v| v.distance_to(p_value))
    }

    pub fn residual(&self, t: f64, z: f64) -> Result<f64> {
        Ok(self.residual_at(self.signal.eval(t)?, z))
    }
}

/// Series loop: resistances add into `f`, the single set-valued element
/// becomes `F`, and the source drives `p`.
pub fn compose_series(components: &[Component], source: Signal) -> Result<GeneralizedEquation> {
    if components.is_empty() {
        return Err(Error::UnsupportedTopology(
            "the loop has no components".into(),
        ));
    }
    let mut resistance = 0.0;
    let mut set_map: Option<PiecewiseGraph> = None;
    for c in components {
        match c.characteristic()? {
            Characteristic::SingleValued(g) => {
                // only resistors are single-valued
                resistance += g.pieces()[0].form().slope();
            }
            Characteristic::SetValued(g) => {
                if set_map.replace(g).is_some() {
                    return Err(Error::UnsupportedTopology(
                        "more than one set-valued component in the loop".into(),
                    ));
                }
            }
        }
    }
    GeneralizedEquation::new(
        PiecewiseGraph::affine(resistance, 0.0),
        set_map.unwrap_or_else(PiecewiseGraph::zero),
        source,
    )
}
