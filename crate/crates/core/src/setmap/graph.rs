use serde::{Deserialize, Serialize};

use super::form::Form;
use super::value_set::{Interval, ValueSet};
use crate::error::{Error, Result};
use crate::tolerances::{Tolerances, TOL_EVAL};

/// Real interval with explicit open/closed ends. Infinite ends are open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainRepr", into = "DomainRepr")]
pub struct Domain {
    lo: f64,
    hi: f64,
    lo_closed: bool,
    hi_closed: bool,
}

impl Domain {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::InvalidPiece(format!(
                "bad domain bounds ({lo}, {hi})"
            )));
        }
        if (lo_closed && lo.is_infinite()) || (hi_closed && hi.is_infinite()) {
            return Err(Error::InvalidPiece(
                "infinite domain end cannot be closed".into(),
            ));
        }
        if lo == hi && !(lo_closed && hi_closed) {
            return Err(Error::InvalidPiece(format!("empty domain at {lo}")));
        }
        Ok(Self {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }

    pub fn whole() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
            lo_closed: false,
            hi_closed: false,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, z: f64) -> bool {
        let above = z > self.lo || (self.lo_closed && z == self.lo);
        let below = z < self.hi || (self.hi_closed && z == self.hi);
        above && below
    }

    pub fn contains_interior(&self, z: f64) -> bool {
        self.lo < z && z < self.hi
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let (lo, lo_closed) = match self.lo.total_cmp(&other.lo) {
            std::cmp::Ordering::Greater => (self.lo, self.lo_closed),
            std::cmp::Ordering::Less => (other.lo, other.lo_closed),
            std::cmp::Ordering::Equal => (self.lo, self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.total_cmp(&other.hi) {
            std::cmp::Ordering::Less => (self.hi, self.hi_closed),
            std::cmp::Ordering::Greater => (other.hi, other.hi_closed),
            std::cmp::Ordering::Equal => (self.hi, self.hi_closed && other.hi_closed),
        };
        Domain::new(lo, hi, lo_closed, hi_closed).ok()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainRepr {
    lo: Option<f64>,
    hi: Option<f64>,
    #[serde(default)]
    lo_closed: bool,
    #[serde(default)]
    hi_closed: bool,
}

impl TryFrom<DomainRepr> for Domain {
    type Error = Error;
    fn try_from(r: DomainRepr) -> Result<Self> {
        Domain::new(
            r.lo.unwrap_or(f64::NEG_INFINITY),
            r.hi.unwrap_or(f64::INFINITY),
            r.lo_closed,
            r.hi_closed,
        )
    }
}

impl From<Domain> for DomainRepr {
    fn from(d: Domain) -> Self {
        Self {
            lo: d.lo.is_finite().then_some(d.lo),
            hi: d.hi.is_finite().then_some(d.hi),
            lo_closed: d.lo_closed,
            hi_closed: d.hi_closed,
        }
    }
}

/// One function branch of a graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PieceRepr", into = "PieceRepr")]
pub struct Piece {
    domain: Domain,
    form: Form,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PieceRepr {
    domain: Domain,
    form: Form,
}

impl TryFrom<PieceRepr> for Piece {
    type Error = Error;
    fn try_from(r: PieceRepr) -> Result<Self> {
        Piece::new(r.domain, r.form)
    }
}

impl From<Piece> for PieceRepr {
    fn from(p: Piece) -> Self {
        Self {
            domain: p.domain,
            form: p.form,
        }
    }
}

impl Piece {
    pub fn new(domain: Domain, form: Form) -> Result<Self> {
        if !form.is_finite() {
            return Err(Error::InvalidPiece("non-finite coefficient".into()));
        }
        if let Some(pole) = form.rational_part().and_then(|r| r.pole()) {
            if domain.lo <= pole && pole <= domain.hi {
                return Err(Error::InvalidPiece(format!(
                    "denominator vanishes at z = {pole}, inside [{}, {}]",
                    domain.lo, domain.hi
                )));
            }
        }
        if let Some(r) = form.rational_part() {
            if r.den_slope == 0.0 && r.den_offset == 0.0 {
                return Err(Error::InvalidPiece("identically zero denominator".into()));
            }
        }
        Ok(Self { domain, form })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn form(&self) -> &Form {
        &self.form
    }
}

/// Multivalued point of a graph: `{z0} × [lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SegmentRepr", into = "SegmentRepr")]
pub struct VerticalSegment {
    z0: f64,
    values: Interval,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentRepr {
    z0: f64,
    lo: f64,
    hi: f64,
}

impl TryFrom<SegmentRepr> for VerticalSegment {
    type Error = Error;
    fn try_from(r: SegmentRepr) -> Result<Self> {
        VerticalSegment::new(r.z0, r.lo, r.hi)
    }
}

impl From<VerticalSegment> for SegmentRepr {
    fn from(s: VerticalSegment) -> Self {
        Self {
            z0: s.z0,
            lo: s.values.lo,
            hi: s.values.hi,
        }
    }
}

impl VerticalSegment {
    pub fn new(z0: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(z0.is_finite() && lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::InvalidGraph(format!(
                "bad segment at {z0}: [{lo}, {hi}]"
            )));
        }
        Ok(Self {
            z0,
            values: Interval::new(lo, hi),
        })
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    pub fn values(&self) -> Interval {
        self.values
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FoldKind {
    LocalMax,
    LocalMin,
    SegmentEndpoint,
}

/// Point of the graph where the inverse stops being locally single-valued.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldPoint {
    pub z: f64,
    pub y: f64,
    pub kind: FoldKind,
}

/// Closed set-valued map ℝ ⇉ ℝ made of closed-form branches and vertical
/// segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct PiecewiseGraph {
    pieces: Vec<Piece>,
    segments: Vec<VerticalSegment>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphRepr {
    pieces: Vec<Piece>,
    #[serde(default)]
    segments: Vec<VerticalSegment>,
}

impl TryFrom<GraphRepr> for PiecewiseGraph {
    type Error = Error;
    fn try_from(r: GraphRepr) -> Result<Self> {
        PiecewiseGraph::new(r.pieces, r.segments)
    }
}

impl From<PiecewiseGraph> for GraphRepr {
    fn from(g: PiecewiseGraph) -> Self {
        Self {
            pieces: g.pieces,
            segments: g.segments,
        }
    }
}

impl PiecewiseGraph {
    /// Validates disjointness, coverage and closedness of the graph.
    pub fn new(mut pieces: Vec<Piece>, mut segments: Vec<VerticalSegment>) -> Result<Self> {
        if pieces.is_empty() && segments.len() != 1 {
            return Err(Error::InvalidGraph(
                "a graph needs pieces or exactly one segment".into(),
            ));
        }
        pieces.sort_by(|a, b| {
            a.domain
                .lo
                .total_cmp(&b.domain.lo)
                .then(a.domain.hi.total_cmp(&b.domain.hi))
        });
        segments.sort_by(|a, b| a.z0.total_cmp(&b.z0));
        if segments.windows(2).any(|w| w[0].z0 == w[1].z0) {
            return Err(Error::InvalidGraph("two segments share an abscissa".into()));
        }
        let has_segment = |x: f64| segments.iter().any(|s| s.z0 == x);

        for w in pieces.windows(2) {
            let (p, q) = (&w[0].domain, &w[1].domain);
            if p.hi > q.lo || (p.hi == q.lo && p.hi_closed && q.lo_closed) {
                return Err(Error::InvalidGraph(format!(
                    "pieces overlap near z = {}",
                    q.lo
                )));
            }
            if p.hi < q.lo {
                return Err(Error::InvalidGraph(format!(
                    "gap between {} and {} in the domain",
                    p.hi, q.lo
                )));
            }
            if !p.hi_closed && !q.lo_closed && !has_segment(p.hi) {
                return Err(Error::InvalidGraph(format!(
                    "abscissa {} is not covered",
                    p.hi
                )));
            }
        }
        if let (Some(first), Some(last)) = (pieces.first(), pieces.last()) {
            for s in &segments {
                if pieces.iter().any(|p| p.domain.contains_interior(s.z0)) {
                    return Err(Error::InvalidGraph(format!(
                        "segment at {} lies inside a piece",
                        s.z0
                    )));
                }
                if s.z0 < first.domain.lo || s.z0 > last.domain.hi {
                    return Err(Error::InvalidGraph(format!(
                        "segment at {} is detached from the pieces",
                        s.z0
                    )));
                }
            }
        }

        let graph = Self { pieces, segments };
        graph.check_closed()?;
        Ok(graph)
    }

    /// Single-valued graph of a piecewise closed-form function.
    pub fn function(pieces: Vec<Piece>) -> Result<Self> {
        Self::new(pieces, Vec::new())
    }

    /// `z ↦ slope·z + intercept` on the whole line.
    pub fn affine(slope: f64, intercept: f64) -> Self {
        Self {
            pieces: vec![Piece {
                domain: Domain::whole(),
                form: Form::affine(slope, intercept),
            }],
            segments: Vec::new(),
        }
    }

    pub fn zero() -> Self {
        Self::affine(0.0, 0.0)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn segments(&self) -> &[VerticalSegment] {
        &self.segments
    }

    pub fn is_function(&self) -> bool {
        self.segments.is_empty()
    }

    /// Closure of the declared domain.
    pub fn domain_bounds(&self) -> (f64, f64) {
        let lo = self
            .pieces
            .first()
            .map(|p| p.domain.lo)
            .into_iter()
            .chain(self.segments.first().map(|s| s.z0))
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .pieces
            .last()
            .map(|p| p.domain.hi)
            .into_iter()
            .chain(self.segments.last().map(|s| s.z0))
            .fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// Finite piece endpoints and segment abscissas, sorted and deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut xs: Vec<f64> = self
            .pieces
            .iter()
            .flat_map(|p| [p.domain.lo, p.domain.hi])
            .chain(self.segments.iter().map(|s| s.z0))
            .filter(|x| x.is_finite())
            .collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs
    }

    fn check_closed(&self) -> Result<()> {
        for x in self.breakpoints() {
            let here = self.eval(x)?;
            for p in &self.pieces {
                if p.domain.lo == x || p.domain.hi == x {
                    let limit = p.form.eval(x);
                    if here.distance_to(limit) > TOL_EVAL {
                        return Err(Error::NotClosed { z: x, limit });
                    }
                }
            }
        }
        Ok(())
    }

    /// The set `G(z)`: union of every piece value and segment attained at `z`.
    pub fn eval(&self, z: f64) -> Result<ValueSet> {
        let points: Vec<f64> = self
            .pieces
            .iter()
            .filter(|p| p.domain.contains(z))
            .map(|p| p.form.eval(z))
            .collect();
        let intervals: Vec<Interval> = self
            .segments
            .iter()
            .filter(|s| s.z0 == z)
            .map(|s| s.values)
            .collect();
        if points.is_empty() && intervals.is_empty() {
            return Err(Error::DomainMiss { z });
        }
        Ok(ValueSet::from_parts(points, intervals, TOL_EVAL))
    }

    /// Value of a single-valued graph at `z`.
    pub fn eval_function(&self, z: f64) -> Result<f64> {
        let v = self.eval(z)?;
        v.as_singleton()
            .ok_or_else(|| Error::IncompatibleDomain(format!("graph is multivalued at z = {z}")))
    }

    /// All `z` with `y ∈ G(z)`, using the default tolerances.
    pub fn invert_at(&self, y: f64) -> ValueSet {
        self.invert_at_with(y, &Tolerances::default())
    }

    pub fn invert_at_with(&self, y: f64, tol: &Tolerances) -> ValueSet {
        let mut points = Vec::new();
        let mut intervals = Vec::new();
        for p in &self.pieces {
            let d = &p.domain;
            let roots = p.form.solve(y, tol.tol_eval);
            if roots.everywhere {
                intervals.push(Interval::new(d.lo, d.hi));
                continue;
            }
            for z in roots.points {
                if d.contains(z) {
                    points.push(z);
                } else if d.lo_closed && (z - d.lo).abs() <= tol.tol_z {
                    points.push(d.lo);
                } else if d.hi_closed && (z - d.hi).abs() <= tol.tol_z {
                    points.push(d.hi);
                }
            }
        }
        for s in &self.segments {
            if s.values.contains(y) {
                points.push(s.z0);
            }
        }
        ValueSet::from_parts(points, intervals, tol.tol_z)
    }

    /// Closed-form derivative at an interior point of a piece.
    pub fn derivative(&self, z: f64) -> Result<f64> {
        if self.segments.iter().any(|s| s.z0 == z) {
            return Err(Error::AtKink { z });
        }
        if let Some(p) = self.pieces.iter().find(|p| p.domain.contains_interior(z)) {
            return Ok(p.form.derivative(z));
        }
        if self.pieces.iter().any(|p| p.domain.contains(z)) {
            Err(Error::AtKink { z })
        } else {
            Err(Error::DomainMiss { z })
        }
    }

    /// Piece whose open interior holds `z`.
    pub fn piece_at(&self, z: f64) -> Option<&Piece> {
        self.pieces.iter().find(|p| p.domain.contains_interior(z))
    }

    /// Local extrema of the branches (stationary points and kinks where the
    /// slope changes sign) plus both ends of every vertical segment, sorted
    /// by abscissa.
    pub fn fold_points(&self) -> Vec<FoldPoint> {
        let mut folds = Vec::new();
        for p in self.pieces.iter().filter(|p| !p.domain.is_point()) {
            for z in p.form.stationary_points() {
                if !p.domain.contains_interior(z) {
                    continue;
                }
                let curvature = p.form.second_derivative(z);
                let kind = if curvature > 0.0 {
                    FoldKind::LocalMin
                } else if curvature < 0.0 {
                    FoldKind::LocalMax
                } else {
                    continue;
                };
                folds.push(FoldPoint {
                    z,
                    y: p.form.eval(z),
                    kind,
                });
            }
        }
        for x in self.breakpoints() {
            if self.segments.iter().any(|s| s.z0 == x) {
                continue;
            }
            let left = self
                .pieces
                .iter()
                .find(|p| !p.domain.is_point() && p.domain.hi == x);
            let right = self
                .pieces
                .iter()
                .find(|p| !p.domain.is_point() && p.domain.lo == x);
            let (Some(l), Some(r)) = (left, right) else {
                continue;
            };
            let (dl, dr) = (l.form.derivative(x), r.form.derivative(x));
            let kind = if dl > 0.0 && dr < 0.0 {
                FoldKind::LocalMax
            } else if dl < 0.0 && dr > 0.0 {
                FoldKind::LocalMin
            } else {
                continue;
            };
            let y = if l.domain.hi_closed {
                l.form.eval(x)
            } else {
                r.form.eval(x)
            };
            folds.push(FoldPoint { z: x, y, kind });
        }
        for s in &self.segments {
            folds.push(FoldPoint {
                z: s.z0,
                y: s.values.lo,
                kind: FoldKind::SegmentEndpoint,
            });
            if s.values.hi > s.values.lo {
                folds.push(FoldPoint {
                    z: s.z0,
                    y: s.values.hi,
                    kind: FoldKind::SegmentEndpoint,
                });
            }
        }
        folds.sort_by(|a, b| a.z.total_cmp(&b.z).then(a.y.total_cmp(&b.y)));
        folds
    }

    /// `inf |G'(v)|` over `v ∈ [lo, hi]`, exact per piece.
    ///
    /// Each branch derivative is monotone between poles, so its extreme
    /// values on a sub-interval sit at the ends; a sign change in between
    /// means the infimum is zero. A vertical segment in the range also
    /// yields zero.
    pub fn min_abs_slope(&self, lo: f64, hi: f64) -> f64 {
        if self.segments.iter().any(|s| lo <= s.z0 && s.z0 <= hi) {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for p in &self.pieces {
            let a = p.domain.lo.max(lo);
            let b = p.domain.hi.min(hi);
            if a >= b {
                continue;
            }
            let (da, db) = (p.form.derivative(a), p.form.derivative(b));
            if da.signum() != db.signum() || da == 0.0 || db == 0.0 {
                return 0.0;
            }
            best = best.min(da.abs()).min(db.abs());
        }
        best
    }
}

/// Graph of `z ↦ f(z) + F(z)` for a single-valued piecewise `f`.
pub fn sum_with_function(f: &PiecewiseGraph, set_map: &PiecewiseGraph) -> Result<PiecewiseGraph> {
    if !f.is_function() {
        return Err(Error::IncompatibleDomain(
            "the single-valued operand has vertical segments".into(),
        ));
    }
    let (flo, fhi) = f.domain_bounds();
    let (glo, ghi) = set_map.domain_bounds();
    if glo < flo || ghi > fhi {
        return Err(Error::IncompatibleDomain(format!(
            "function defined on [{flo}, {fhi}] cannot be added on [{glo}, {ghi}]"
        )));
    }
    let mut pieces = Vec::new();
    for pf in &f.pieces {
        for pg in &set_map.pieces {
            if let Some(domain) = pf.domain.intersect(&pg.domain) {
                pieces.push(Piece::new(domain, pf.form.add(&pg.form)?)?);
            }
        }
    }
    let segments = set_map
        .segments
        .iter()
        .map(|s| {
            let shift = f.eval_function(s.z0)?;
            VerticalSegment::new(s.z0, s.values.lo + shift, s.values.hi + shift)
        })
        .collect::<Result<Vec<_>>>()?;
    PiecewiseGraph::new(pieces, segments)
}
