//! Breakpoint representation of piecewise-linear curves such as the
//! best-response value `B*(f, r^a)` as a function of the attack budget.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A continuous piecewise-linear curve stored as breakpoints with strictly
/// increasing x. Values between breakpoints are linear interpolations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseLinearCurve {
    breakpoints: Vec<(Rational, Rational)>,
}

impl PiecewiseLinearCurve {
    pub fn new(breakpoints: Vec<(Rational, Rational)>) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::domain("a curve needs at least one breakpoint"));
        }
        for pair in breakpoints.windows(2) {
            if pair[0].0 >= pair[1].0 {
                return Err(Error::domain(format!(
                    "breakpoint x values must be strictly increasing, got {} then {}",
                    pair[0].0, pair[1].0
                )));
            }
        }
        Ok(PiecewiseLinearCurve { breakpoints })
    }

    /// Builds a curve from sample points, dropping interior points that lie
    /// exactly on the segment between their neighbors.
    pub fn from_points_simplified(points: Vec<(Rational, Rational)>) -> Result<Self> {
        let mut kept: Vec<(Rational, Rational)> = Vec::with_capacity(points.len());
        for p in points {
            while kept.len() >= 2 {
                let a = &kept[kept.len() - 2];
                let b = &kept[kept.len() - 1];
                // b is redundant iff it sits on the chord from a to p.
                let lhs = (&b.1 - &a.1) * (&p.0 - &a.0);
                let rhs = (&p.1 - &a.1) * (&b.0 - &a.0);
                if lhs == rhs {
                    kept.pop();
                } else {
                    break;
                }
            }
            kept.push(p);
        }
        PiecewiseLinearCurve::new(kept)
    }

    pub fn breakpoints(&self) -> &[(Rational, Rational)] {
        &self.breakpoints
    }

    pub fn x_min(&self) -> &Rational {
        &self.breakpoints[0].0
    }

    pub fn x_max(&self) -> &Rational {
        &self.breakpoints[self.breakpoints.len() - 1].0
    }

    /// Interpolated value at `x`; errors outside the curve's domain.
    pub fn value_at(&self, x: &Rational) -> Result<Rational> {
        if x < self.x_min() || x > self.x_max() {
            return Err(Error::domain(format!(
                "x = {x} outside curve domain [{}, {}]",
                self.x_min(),
                self.x_max()
            )));
        }
        let idx = self.breakpoints.partition_point(|(bx, _)| bx <= x);
        if idx == 0 {
            return Ok(self.breakpoints[0].1.clone());
        }
        let (x0, y0) = &self.breakpoints[idx - 1];
        if x0 == x || idx == self.breakpoints.len() {
            return Ok(y0.clone());
        }
        let (x1, y1) = &self.breakpoints[idx];
        Ok(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
    }

    /// Slopes of the segments between consecutive breakpoints.
    pub fn slopes(&self) -> Vec<Rational> {
        self.breakpoints
            .windows(2)
            .map(|pair| (&pair[1].1 - &pair[0].1) / (&pair[1].0 - &pair[0].0))
            .collect()
    }

    /// The x positions where the slope changes from 1 to 0.
    pub fn descending_kinks(&self) -> Vec<Rational> {
        let slopes = self.slopes();
        let one = Rational::from_integer(1.into());
        let mut kinks = Vec::new();
        for i in 1..slopes.len() {
            if slopes[i - 1] == one && slopes[i].is_zero() {
                kinks.push(self.breakpoints[i].0.clone());
            }
        }
        kinks
    }
}
