//! Cumulative mass table for densities without a closed-form cdf.
//!
//! The cdf is stored at a fixed set of knots; between knots it is the knot
//! value plus one short quadrature. Inversion locates the knot cell by
//! binary search and then runs Newton steps safeguarded by bisection, in a
//! coordinate the density may choose so that the cdf is close to linear.

use crate::error::{Error, Result};

/// Knots for the table: `2^KNOT_LEVEL` equal cells.
pub(crate) const KNOT_LEVEL: u32 = 8;

/// Per-cell quadrature tolerance used when building the table.
pub(crate) const CELL_TOL: f64 = 1e-14;

/// Inversion stops once `|cdf(x) - u|` or the bracket width is this small.
pub(crate) const INVERSE_RESIDUAL: f64 = 1e-12;
pub(crate) const INVERSE_BRACKET: f64 = 1e-14;

/// A density known up to its normalizing constant.
pub(crate) trait RawDensity {
    fn raw_pdf(&self, x: f64) -> f64;
    fn raw_mass(&self, lo: f64, hi: f64, tol: f64) -> Result<f64>;

    /// Increasing map to the coordinate inversion iterates in.
    fn warp(&self, x: f64) -> f64 {
        x
    }

    fn unwarp(&self, y: f64) -> f64 {
        y
    }

    /// Raw density per unit of the warped coordinate, at `x`.
    fn warped_pdf(&self, x: f64) -> f64 {
        self.raw_pdf(x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CdfTable {
    knots: Vec<f64>,
    cumulative: Vec<f64>,
}

pub(crate) fn dyadic_knots(extra: &[f64]) -> Vec<f64> {
    let cells = 1usize << KNOT_LEVEL;
    let mut knots: Vec<f64> = (0..=cells).map(|k| k as f64 / cells as f64).collect();
    knots.extend(extra.iter().copied().filter(|x| *x > 0.0 && *x < 1.0));
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    knots
}

impl CdfTable {
    pub(crate) fn build<D: RawDensity>(density: &D, knots: Vec<f64>, tol: f64) -> Result<Self> {
        let mut cumulative = Vec::with_capacity(knots.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in knots.windows(2) {
            let m = density.raw_mass(w[0], w[1], tol)?;
            if m.is_nan() || m < 0.0 {
                return Err(Error::invalid(format!(
                    "negative or undefined mass {m} on [{}, {}]",
                    w[0], w[1]
                )));
            }
            acc += m;
            cumulative.push(acc);
        }
        if !(acc > 0.0 && acc.is_finite()) {
            return Err(Error::invalid(format!("total mass {acc} is not positive")));
        }
        Ok(CdfTable { knots, cumulative })
    }

    /// Normalizing constant: raw mass of [0,1].
    pub(crate) fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    fn cell_of(&self, x: f64) -> usize {
        let k = self.knots.partition_point(|&t| t <= x);
        k.saturating_sub(1).min(self.knots.len() - 2)
    }

    pub(crate) fn cdf<D: RawDensity>(&self, density: &D, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        if x >= 1.0 {
            return Ok(1.0);
        }
        let k = self.cell_of(x);
        let partial = if x == self.knots[k] {
            0.0
        } else {
            density.raw_mass(self.knots[k], x, CELL_TOL)?
        };
        Ok(((self.cumulative[k] + partial) / self.total()).clamp(0.0, 1.0))
    }

    pub(crate) fn inverse<D: RawDensity>(&self, density: &D, u: f64) -> Result<f64> {
        if u <= 0.0 {
            return Ok(0.0);
        }
        if u >= 1.0 {
            return Ok(1.0);
        }
        let total = self.total();
        let target = u * total;
        // First cell whose upper cumulative value reaches the target.
        let upper = self.cumulative.partition_point(|&c| c < target);
        let k = upper.saturating_sub(1).min(self.knots.len() - 2);
        let base = self.cumulative[k];
        let anchor = self.knots[k];
        let (mut lo, mut hi) = (density.warp(anchor), density.warp(self.knots[k + 1]));
        let cell_mass = self.cumulative[k + 1] - base;
        let mut y = if cell_mass > 0.0 {
            lo + (hi - lo) * ((target - base) / cell_mass).clamp(0.0, 1.0)
        } else {
            lo
        };
        let mut x = density.unwarp(y);
        for _ in 0..200 {
            let g = (base + density.raw_mass(anchor, x, CELL_TOL)? - target) / total;
            if g.abs() <= INVERSE_RESIDUAL {
                return Ok(x);
            }
            if g < 0.0 {
                lo = y;
            } else {
                hi = y;
            }
            let (xl, xh) = (density.unwarp(lo), density.unwarp(hi));
            if xh - xl <= INVERSE_BRACKET {
                return Ok(0.5 * (xl + xh));
            }
            let slope = density.warped_pdf(x) / total;
            let newton = y - g / slope;
            y = if slope > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            // Near an endpoint the warped step can be finer than the
            // spacing of doubles in x; then x is as good as it gets.
            let next = density.unwarp(y);
            if next == x {
                return Ok(x);
            }
            x = next;
        }
        Ok(x)
    }
}
