use serde::{Deserialize, Serialize};

/// Closed real interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "interval [{lo}, {hi}] is reversed");
        Self { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn distance(&self, x: f64) -> f64 {
        if x < self.lo {
            self.lo - x
        } else if x > self.hi {
            x - self.hi
        } else {
            0.0
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn shift(&self, by: f64) -> Self {
        Self::new(self.lo + by, self.hi + by)
    }

    pub fn negate(&self) -> Self {
        Self::new(-self.hi, -self.lo)
    }
}

/// A finite union of points and closed intervals of the real line.
///
/// Used both as the value of a set-valued map at one abscissa and as a
/// preimage (solution set). Always kept canonical: intervals sorted and
/// pairwise disjoint, points sorted and outside every interval.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValueSet {
    points: Vec<f64>,
    intervals: Vec<Interval>,
}

impl ValueSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn point(x: f64) -> Self {
        Self {
            points: vec![x],
            intervals: Vec::new(),
        }
    }

    pub fn interval(iv: Interval) -> Self {
        Self::from_parts(Vec::new(), vec![iv], 0.0)
    }

    /// Builds a canonical set. Intervals closer than `tol` are merged,
    /// points within `tol` of an interval or of a previous point are dropped,
    /// and zero-width intervals become points.
    pub fn from_parts(mut points: Vec<f64>, mut intervals: Vec<Interval>, tol: f64) -> Self {
        intervals.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
        let mut merged: Vec<Interval> = Vec::with_capacity(intervals.len());
        for iv in intervals {
            match merged.last_mut() {
                Some(last) if iv.lo <= last.hi + tol => last.hi = last.hi.max(iv.hi),
                _ => merged.push(iv),
            }
        }
        let (degenerate, merged): (Vec<_>, Vec<_>) =
            merged.into_iter().partition(|iv| iv.width() <= 0.0);
        points.extend(degenerate.iter().map(|iv| iv.lo));

        points.sort_by(f64::total_cmp);
        let mut kept: Vec<f64> = Vec::with_capacity(points.len());
        for x in points {
            if merged.iter().any(|iv| iv.distance(x) <= tol) {
                continue;
            }
            if let Some(&last) = kept.last() {
                if x - last <= tol {
                    continue;
                }
            }
            kept.push(x);
        }
        Self {
            points: kept,
            intervals: merged,
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.intervals.is_empty()
    }

    /// Number of connected components.
    pub fn len(&self) -> usize {
        self.points.len() + self.intervals.len()
    }

    /// The unique element, if the set is a single point.
    pub fn as_singleton(&self) -> Option<f64> {
        match (self.points.as_slice(), self.intervals.is_empty()) {
            ([x], true) => Some(*x),
            _ => None,
        }
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.distance_to(x) <= tol
    }

    /// Distance from `x` to the set; `+inf` for the empty set.
    pub fn distance_to(&self, x: f64) -> f64 {
        let p = self.points.iter().map(|&q| (q - x).abs());
        let i = self.intervals.iter().map(|iv| iv.distance(x));
        p.chain(i).fold(f64::INFINITY, f64::min)
    }

    pub fn shift(&self, by: f64) -> Self {
        Self {
            points: self.points.iter().map(|x| x + by).collect(),
            intervals: self.intervals.iter().map(|iv| iv.shift(by)).collect(),
        }
    }

    pub fn negate(&self) -> Self {
        let mut points: Vec<f64> = self.points.iter().map(|x| -x).collect();
        points.reverse();
        let mut intervals: Vec<Interval> = self.intervals.iter().map(Interval::negate).collect();
        intervals.reverse();
        Self { points, intervals }
    }

    pub fn union(&self, other: &Self, tol: f64) -> Self {
        let points = self.points.iter().chain(&other.points).copied().collect();
        let intervals = self
            .intervals
            .iter()
            .chain(&other.intervals)
            .copied()
            .collect();
        Self::from_parts(points, intervals, tol)
    }

    /// Keeps the part of the set inside the closed ball `[center - radius, center + radius]`.
    pub fn restrict(&self, center: f64, radius: f64) -> Self {
        let ball = Interval::new(center - radius, center + radius);
        let points = self
            .points
            .iter()
            .copied()
            .filter(|&x| ball.contains(x))
            .collect();
        let intervals = self
            .intervals
            .iter()
            .filter(|iv| iv.hi >= ball.lo && iv.lo <= ball.hi)
            .map(|iv| Interval::new(iv.lo.max(ball.lo), iv.hi.min(ball.hi)))
            .collect();
        Self::from_parts(points, intervals, 0.0)
    }

    /// Components as intervals (points are zero-width), sorted by position.
    fn components(&self) -> Vec<Interval> {
        let mut all: Vec<Interval> = self
            .points
            .iter()
            .map(|&x| Interval::new(x, x))
            .chain(self.intervals.iter().copied())
            .collect();
        all.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        all
    }

    /// One-sided Hausdorff excess `sup_{x in self} d(x, other)`.
    fn excess_over(&self, other: &Self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        if other.is_empty() {
            return f64::INFINITY;
        }
        let theirs = other.components();
        let mut worst = 0.0_f64;
        for comp in self.components() {
            // d(., other) is piecewise linear on comp; its maximum sits at an
            // endpoint or at the midpoint of a gap between two components of
            // `other`.
            let mut candidates = vec![comp.lo, comp.hi];
            for pair in theirs.windows(2) {
                let mid = 0.5 * (pair[0].hi + pair[1].lo);
                if comp.contains(mid) {
                    candidates.push(mid);
                }
            }
            for x in candidates {
                worst = worst.max(other.distance_to(x));
            }
        }
        worst
    }

    /// Hausdorff distance; `0` for two empty sets, `+inf` if exactly one is empty.
    pub fn hausdorff(&self, other: &Self) -> f64 {
        self.excess_over(other).max(other.excess_over(self))
    }

    /// Same number of components and Hausdorff distance within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.points.len() == other.points.len()
            && self.intervals.len() == other.intervals.len()
            && self.hausdorff(other) <= tol
    }
}
