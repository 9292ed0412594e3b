use crate::error::{Error, Result};

/// Trapezoidal density: rises linearly from 0 on `[0, c]`, is flat at
/// height `h = 2 / (1 + d - c)` on `[c, d]`, and falls linearly to 0 on
/// `[d, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trapezoidal {
    c: f64,
    d: f64,
    height: f64,
}

impl Trapezoidal {
    pub fn new(c: f64, d: f64) -> Result<Self> {
        if !(c.is_finite() && d.is_finite() && 0.0 <= c && c <= d && d <= 1.0) {
            return Err(Error::invalid(format!(
                "trapezoid needs 0 <= c <= d <= 1, got c = {c}, d = {d}"
            )));
        }
        Ok(Trapezoidal {
            c,
            d,
            height: 2.0 / (1.0 + d - c),
        })
    }

    /// Plateau `[1/2 - delta, 1/2 + delta]`, symmetric about 1/2.
    pub fn symmetric(delta: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&delta) {
            return Err(Error::invalid(format!(
                "plateau half-width {delta} outside [0, 0.5]"
            )));
        }
        Trapezoidal::new(0.5 - delta, 0.5 + delta)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub(crate) fn pdf(&self, x: f64) -> f64 {
        let h = self.height;
        if x < self.c {
            h * x / self.c
        } else if x <= self.d {
            h
        } else {
            h * (1.0 - x) / (1.0 - self.d)
        }
    }

    /// Mass to the left of the plateau and up to its right end.
    fn breaks(&self) -> (f64, f64) {
        let rise = 0.5 * self.height * self.c;
        (rise, rise + self.height * (self.d - self.c))
    }

    pub(crate) fn cdf(&self, x: f64) -> f64 {
        let h = self.height;
        let (rise, plateau_end) = self.breaks();
        if x <= self.c {
            if self.c == 0.0 {
                0.0
            } else {
                h * x * x / (2.0 * self.c)
            }
        } else if x <= self.d {
            rise + h * (x - self.c)
        } else if self.d == 1.0 {
            plateau_end
        } else {
            let r = 1.0 - x;
            1.0 - h * r * r / (2.0 * (1.0 - self.d))
        }
    }

    pub(crate) fn inverse_cdf(&self, u: f64) -> f64 {
        let h = self.height;
        let (rise, plateau_end) = self.breaks();
        if u <= rise {
            (2.0 * self.c * u / h).sqrt()
        } else if u <= plateau_end {
            self.c + (u - rise) / h
        } else {
            (1.0 - (2.0 * (1.0 - self.d) * (1.0 - u) / h).sqrt()).clamp(self.d, 1.0)
        }
    }

    pub(crate) fn is_symmetric(&self, tolerance: f64) -> bool {
        (self.c + self.d - 1.0).abs() <= tolerance
    }
}
