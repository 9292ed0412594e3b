//! Beta(α, β) on [0,1].
//!
//! When α = 1 or β = 1 the cdf has a closed form. Otherwise the cdf comes
//! from a quadrature table; on the half of [0,1] next to a singular
//! endpoint (exponent below 1) the integral is taken in the variable
//! `t = x^α` (or `s = (1-x)^β`), which turns the integrand into a bounded
//! smooth function.

use std::sync::Arc;

use super::tabulated::{dyadic_knots, CdfTable, RawDensity, CELL_TOL, KNOT_LEVEL};
use crate::error::{Error, Result};
use crate::quadrature::Quadrature;

/// Points closer than this to a singular endpoint report the density at
/// this distance instead of infinity.
pub const ENDPOINT_CAP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Beta {
    alpha: f64,
    beta: f64,
    ln_norm: f64,
    table: Option<Arc<CdfTable>>,
}

impl Beta {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!(
                    "beta parameter {name} = {v} must be positive and finite"
                )));
            }
        }
        let mut model = Beta {
            alpha,
            beta,
            ln_norm: match (alpha == 1.0, beta == 1.0) {
                // B(1, β) = 1/β, B(α, 1) = 1/α
                (true, _) => -beta.ln(),
                (_, true) => -alpha.ln(),
                _ => ln_beta(alpha, beta),
            },
            table: None,
        };
        if alpha != 1.0 && beta != 1.0 {
            // Geometric knots toward a singular endpoint keep every table
            // cell short in the substituted variable.
            let mut extra = vec![0.5];
            if alpha < 1.0 {
                extra.extend((KNOT_LEVEL + 1..=60).map(|k| (-(k as f64)).exp2()));
            }
            if beta < 1.0 {
                extra.extend((KNOT_LEVEL + 1..=52).map(|k| 1.0 - (-(k as f64)).exp2()));
            }
            let table = CdfTable::build(&model, dyadic_knots(&extra), CELL_TOL)?;
            model.table = Some(Arc::new(table));
        }
        Ok(model)
    }

    /// The symmetric member Beta(α, α).
    pub fn symmetric(alpha: f64) -> Result<Self> {
        Beta::new(alpha, alpha)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    fn normalizer(&self) -> f64 {
        self.table.as_ref().map_or(1.0, |t| t.total())
    }

    pub(crate) fn pdf(&self, x: f64) -> f64 {
        let x = if self.alpha < 1.0 {
            x.max(ENDPOINT_CAP)
        } else {
            x
        };
        let x = if self.beta < 1.0 {
            x.min(1.0 - ENDPOINT_CAP)
        } else {
            x
        };
        self.raw_pdf(x) / self.normalizer()
    }

    pub(crate) fn cdf(&self, x: f64) -> Result<f64> {
        match &self.table {
            Some(table) => table.cdf(self, x),
            None => Ok(self.closed_cdf(x)),
        }
    }

    pub(crate) fn inverse_cdf(&self, u: f64) -> Result<f64> {
        match &self.table {
            Some(table) => table.inverse(self, u),
            None => Ok(self.closed_inverse(u)),
        }
    }

    fn closed_cdf(&self, x: f64) -> f64 {
        match (self.alpha == 1.0, self.beta == 1.0) {
            (true, true) => x,
            // 1 - (1-x)^β
            (true, false) => -(self.beta * (-x).ln_1p()).exp_m1(),
            (false, true) => x.powf(self.alpha),
            (false, false) => unreachable!("tabulated model"),
        }
    }

    fn closed_inverse(&self, u: f64) -> f64 {
        match (self.alpha == 1.0, self.beta == 1.0) {
            (true, true) => u,
            (true, false) => -((-u).ln_1p() / self.beta).exp_m1(),
            (false, true) => u.powf(1.0 / self.alpha),
            (false, false) => unreachable!("tabulated model"),
        }
    }

    /// Mass of `[lo, hi]` within one half of [0,1], in the substituted
    /// variable when the nearby endpoint is singular.
    fn half_mass(&self, lo: f64, hi: f64, left_half: bool, tol: f64) -> Result<f64> {
        if hi <= lo {
            return Ok(0.0);
        }
        let q = Quadrature::with_tolerance(tol);
        let (a, b, ln_norm) = (self.alpha, self.beta, self.ln_norm);
        if left_half && a < 1.0 {
            // x = t^(1/α): x^(α-1) dx = dt / α
            let g = |t: f64| {
                let x = t.powf(1.0 / a);
                ((b - 1.0) * (-x).ln_1p() - ln_norm).exp() / a
            };
            q.integrate(g, lo.powf(a), hi.powf(a))
        } else if !left_half && b < 1.0 {
            // 1 - x = s^(1/β): (1-x)^(β-1) dx = -ds / β
            let g = |s: f64| {
                let y = s.powf(1.0 / b);
                ((a - 1.0) * (-y).ln_1p() - ln_norm).exp() / b
            };
            q.integrate(g, (1.0 - hi).powf(b), (1.0 - lo).powf(b))
        } else {
            q.integrate(|x| self.raw_pdf(x), lo, hi)
        }
    }
}

impl RawDensity for Beta {
    /// Density using the Lanczos normalizer; the table total absorbs its
    /// residual error.
    fn raw_pdf(&self, x: f64) -> f64 {
        let left = if self.alpha == 1.0 {
            0.0
        } else {
            (self.alpha - 1.0) * x.ln()
        };
        let right = if self.beta == 1.0 {
            0.0
        } else {
            (self.beta - 1.0) * (-x).ln_1p()
        };
        (left + right - self.ln_norm).exp()
    }

    fn raw_mass(&self, lo: f64, hi: f64, tol: f64) -> Result<f64> {
        let mid = 0.5;
        let left = self.half_mass(lo, hi.min(mid), true, tol)?;
        let right = self.half_mass(lo.max(mid), hi, false, tol)?;
        Ok(left + right)
    }

    /// The substitution variables of `half_mass`, shifted so both halves
    /// meet at 0 when x = 1/2.
    fn warp(&self, x: f64) -> f64 {
        if x <= 0.5 {
            if self.alpha < 1.0 {
                x.powf(self.alpha) - 0.5f64.powf(self.alpha)
            } else {
                x - 0.5
            }
        } else if self.beta < 1.0 {
            0.5f64.powf(self.beta) - (1.0 - x).powf(self.beta)
        } else {
            x - 0.5
        }
    }

    fn unwarp(&self, y: f64) -> f64 {
        let x = if y <= 0.0 {
            if self.alpha < 1.0 {
                (y + 0.5f64.powf(self.alpha))
                    .max(0.0)
                    .powf(1.0 / self.alpha)
            } else {
                y + 0.5
            }
        } else if self.beta < 1.0 {
            1.0 - (0.5f64.powf(self.beta) - y).max(0.0).powf(1.0 / self.beta)
        } else {
            y + 0.5
        };
        x.clamp(0.0, 1.0)
    }

    fn warped_pdf(&self, x: f64) -> f64 {
        if x <= 0.5 && self.alpha < 1.0 {
            ((self.beta - 1.0) * (-x).ln_1p() - self.ln_norm).exp() / self.alpha
        } else if x > 0.5 && self.beta < 1.0 {
            ((self.alpha - 1.0) * x.ln() - self.ln_norm).exp() / self.beta
        } else {
            self.raw_pdf(x)
        }
    }
}

/// `ln Γ(x)` for `x > 0`, Lanczos approximation (g = 7, 9 terms).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection: Γ(x)Γ(1-x) = π / sin(πx)
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (k, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + k as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}
