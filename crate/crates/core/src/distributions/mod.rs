//! Continuous distributions on [0,1] that feed the binary expansion.

mod beta;
mod config;
mod custom;
mod piecewise;
mod tabulated;
mod trapezoid;

use std::fmt;

pub use beta::{ln_beta, ln_gamma, Beta, ENDPOINT_CAP};
pub use config::{parse_key_values, KeyValues};
pub use custom::CustomPdf;
pub use piecewise::PiecewiseConstant;
pub use trapezoid::Trapezoidal;

use crate::error::{Error, Result};

/// Number of equally spaced offsets in [0, 1/2] probed by the grid
/// symmetry check.
pub const SYMMETRY_GRID: usize = 1025;

#[derive(Debug, Clone)]
pub enum DistributionModel {
    Uniform,
    Beta(Beta),
    Trapezoidal(Trapezoidal),
    PiecewiseConstant(PiecewiseConstant),
    Custom(CustomPdf),
}

fn check_unit(what: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("{what} = {x} outside [0, 1]")));
    }
    Ok(())
}

impl DistributionModel {
    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        Beta::new(alpha, beta).map(DistributionModel::Beta)
    }

    pub fn trapezoidal(c: f64, d: f64) -> Result<Self> {
        Trapezoidal::new(c, d).map(DistributionModel::Trapezoidal)
    }

    /// Trapezoid with plateau `[1/2 - delta, 1/2 + delta]`.
    pub fn symmetric_trapezoid(delta: f64) -> Result<Self> {
        Trapezoidal::symmetric(delta).map(DistributionModel::Trapezoidal)
    }

    pub fn piecewise(breakpoints: Vec<f64>, densities: Vec<f64>) -> Result<Self> {
        PiecewiseConstant::new(breakpoints, densities).map(DistributionModel::PiecewiseConstant)
    }

    pub fn custom<F>(density: F, hints: Vec<f64>) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        CustomPdf::new(density, hints).map(DistributionModel::Custom)
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        check_unit("x", x)?;
        Ok(self.pdf_unchecked(x))
    }

    fn pdf_unchecked(&self, x: f64) -> f64 {
        match self {
            DistributionModel::Uniform => 1.0,
            DistributionModel::Beta(m) => m.pdf(x),
            DistributionModel::Trapezoidal(m) => m.pdf(x),
            DistributionModel::PiecewiseConstant(m) => m.pdf(x),
            DistributionModel::Custom(m) => m.pdf(x),
        }
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        check_unit("x", x)?;
        match self {
            DistributionModel::Uniform => Ok(x),
            DistributionModel::Beta(m) => m.cdf(x),
            DistributionModel::Trapezoidal(m) => Ok(m.cdf(x)),
            DistributionModel::PiecewiseConstant(m) => Ok(m.cdf(x)),
            DistributionModel::Custom(m) => m.cdf(x),
        }
    }

    pub fn inverse_cdf(&self, u: f64) -> Result<f64> {
        check_unit("u", u)?;
        match self {
            DistributionModel::Uniform => Ok(u),
            DistributionModel::Beta(m) => m.inverse_cdf(u),
            DistributionModel::Trapezoidal(m) => Ok(m.inverse_cdf(u)),
            DistributionModel::PiecewiseConstant(m) => Ok(m.inverse_cdf(u)),
            DistributionModel::Custom(m) => m.inverse_cdf(u),
        }
    }

    /// Probability of `[lo, hi]`, as `cdf(hi) - cdf(lo)`.
    pub fn mass(&self, lo: f64, hi: f64) -> Result<f64> {
        if hi < lo {
            return Err(Error::domain(format!("empty interval [{lo}, {hi}]")));
        }
        Ok((self.cdf(hi)? - self.cdf(lo)?).max(0.0))
    }

    /// Whether the density is symmetric about 1/2.
    ///
    /// Parametric kinds are checked structurally (Beta: α = β, trapezoid:
    /// c + d = 1, step densities: mirrored steps). A custom density is
    /// probed at `SYMMETRY_GRID` offsets `ε` in [0, 1/2] and passes when
    /// `|pdf(1/2 - ε) - pdf(1/2 + ε)| <= tolerance` at all of them.
    pub fn is_symmetric(&self, tolerance: f64) -> bool {
        match self {
            DistributionModel::Uniform => true,
            DistributionModel::Beta(m) => (m.alpha() - m.beta()).abs() <= tolerance,
            DistributionModel::Trapezoidal(m) => m.is_symmetric(tolerance),
            DistributionModel::PiecewiseConstant(m) => m.is_symmetric(tolerance),
            DistributionModel::Custom(_) => self.grid_asymmetry() <= tolerance,
        }
    }

    /// Largest `|pdf(1/2 - ε) - pdf(1/2 + ε)|` over the symmetry grid.
    pub fn grid_asymmetry(&self) -> f64 {
        let steps = (SYMMETRY_GRID - 1) as f64;
        (0..SYMMETRY_GRID)
            .map(|k| {
                let eps = 0.5 * k as f64 / steps;
                (self.pdf_unchecked(0.5 - eps) - self.pdf_unchecked(0.5 + eps)).abs()
            })
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for DistributionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionModel::Uniform => write!(f, "Uniform(0, 1)"),
            DistributionModel::Beta(m) => write!(f, "Beta({}, {})", m.alpha(), m.beta()),
            DistributionModel::Trapezoidal(m) => {
                write!(f, "Trapezoidal(c = {}, d = {})", m.c(), m.d())
            }
            DistributionModel::PiecewiseConstant(m) => write!(
                f,
                "PiecewiseConstant(breakpoints = {:?}, densities = {:?})",
                m.breakpoints(),
                m.densities()
            ),
            DistributionModel::Custom(m) => write!(f, "CustomPdf(hints = {:?})", m.hints()),
        }
    }
}
