use std::fmt;
use std::sync::Arc;

use super::tabulated::{dyadic_knots, CdfTable, RawDensity, CELL_TOL};
use crate::error::{Error, Result};
use crate::quadrature::Quadrature;

type DensityFn = dyn Fn(f64) -> f64 + Send + Sync;

/// A user-supplied density on [0,1], normalized numerically.
///
/// `hints` lists points where the density jumps or has a kink; they become
/// quadrature knots so that no cell straddles a discontinuity.
#[derive(Clone)]
pub struct CustomPdf {
    density: Arc<DensityFn>,
    hints: Vec<f64>,
    table: Arc<CdfTable>,
}

impl CustomPdf {
    pub fn new<F>(density: F, hints: Vec<f64>) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if hints.iter().any(|h| !(0.0..=1.0).contains(h)) {
            return Err(Error::invalid("integration hints must lie in [0, 1]"));
        }
        let raw = Unnormalized { density: &density };
        let knots = dyadic_knots(&hints);
        // A first pass fixes the scale so the per-cell tolerance is relative.
        let rough = CdfTable::build(&raw, knots.clone(), 1e-8)?;
        let table = CdfTable::build(&raw, knots, CELL_TOL * rough.total().max(1e-300))?;
        Ok(CustomPdf {
            density: Arc::new(density),
            hints,
            table: Arc::new(table),
        })
    }

    pub fn hints(&self) -> &[f64] {
        &self.hints
    }

    fn raw(&self) -> Unnormalized<'_, DensityFn> {
        Unnormalized {
            density: &*self.density,
        }
    }

    pub(crate) fn pdf(&self, x: f64) -> f64 {
        (self.density)(x).max(0.0) / self.table.total()
    }

    pub(crate) fn cdf(&self, x: f64) -> Result<f64> {
        self.table.cdf(&self.raw(), x)
    }

    pub(crate) fn inverse_cdf(&self, u: f64) -> Result<f64> {
        self.table.inverse(&self.raw(), u)
    }
}

impl fmt::Debug for CustomPdf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomPdf")
            .field("hints", &self.hints)
            .field("mass", &self.table.total())
            .finish()
    }
}

struct Unnormalized<'a, F: ?Sized> {
    density: &'a F,
}

impl<F: Fn(f64) -> f64 + ?Sized> RawDensity for Unnormalized<'_, F> {
    fn raw_pdf(&self, x: f64) -> f64 {
        (self.density)(x)
    }

    fn raw_mass(&self, lo: f64, hi: f64, tol: f64) -> Result<f64> {
        let f = |x: f64| {
            let v = (self.density)(x);
            if v < 0.0 {
                f64::NAN
            } else {
                v
            }
        };
        Quadrature::with_tolerance(tol).integrate(f, lo, hi)
    }
}
