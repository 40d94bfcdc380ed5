use crate::error::{Error, Result};

/// Strictly increasing sample times covering `[0, 1]` with both ends included.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
}

impl Grid {
    /// `n` equally spaced points; the last one is exactly `1`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {n}"
            )));
        }
        let last = (n - 1) as f64;
        let points = (0..n).map(|i| i as f64 / last).collect();
        Ok(Self { points })
    }

    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidGrid("need at least 2 points".into()));
        }
        if points[0] != 0.0 || points[points.len() - 1] != 1.0 {
            return Err(Error::InvalidGrid(
                "grid must start at 0 and end at 1".into(),
            ));
        }
        if !points.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidGrid(
                "points must be strictly increasing".into(),
            ));
        }
        Ok(Self { points })
    }

    /// Adds the knots lying strictly inside `(0, 1)`.
    pub fn with_knots(&self, knots: &[f64]) -> Self {
        let mut points: Vec<f64> = self
            .points
            .iter()
            .copied()
            .chain(knots.iter().copied().filter(|&k| k > 0.0 && k < 1.0))
            .collect();
        points.sort_by(f64::total_cmp);
        points.dedup();
        Self { points }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_grid_hits_both_ends() {
        let g = Grid::uniform(1024).unwrap();
        assert_eq!(g.points()[0], 0.0);
        assert_eq!(*g.points().last().unwrap(), 1.0);
        assert!(Grid::uniform(1).is_err());
    }

    #[test]
    fn knots_are_merged() {
        let g = Grid::uniform(3).unwrap().with_knots(&[0.25, 0.5, 1.5]);
        assert_eq!(g.points(), &[0.0, 0.25, 0.5, 1.0]);
    }

    #[test]
    fn explicit_points_are_validated() {
        assert!(Grid::from_points(vec![0.0, 0.5, 1.0]).is_ok());
        assert!(Grid::from_points(vec![0.0, 0.5, 0.5, 1.0]).is_err());
        assert!(Grid::from_points(vec![0.1, 1.0]).is_err());
    }
}
