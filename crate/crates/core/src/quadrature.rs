//! Adaptive Simpson quadrature with Richardson correction.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    /// Absolute error target for the whole interval.
    pub abs_tol: f64,
    /// Maximum bisection depth.
    pub max_depth: u32,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            abs_tol: 1e-9,
            max_depth: 40,
        }
    }
}

impl Quadrature {
    pub fn with_tolerance(abs_tol: f64) -> Self {
        Quadrature {
            abs_tol,
            ..Quadrature::default()
        }
    }

    /// Integral of `f` over `[lo, hi]`.
    ///
    /// Segments that reach `max_depth` without meeting their share of the
    /// tolerance contribute their error estimate to a running total; the
    /// call fails if that total exceeds `abs_tol`, or if `f` returns a
    /// non-finite value.
    pub fn integrate<F>(&self, f: F, lo: f64, hi: f64) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        if !(lo.is_finite() && hi.is_finite()) || hi < lo {
            return Err(Error::Quadrature {
                lo,
                hi,
                reason: "bad bounds".into(),
            });
        }
        if hi == lo {
            return Ok(0.0);
        }
        let fa = f(lo);
        let fb = f(hi);
        let (m, fm, whole) = simpson(&f, lo, fa, hi, fb);
        let mut state = State {
            leftover: 0.0,
            finite: true,
        };
        let value = recurse(
            &f,
            Segment {
                a: lo,
                fa,
                m,
                fm,
                b: hi,
                fb,
                whole,
            },
            self.abs_tol,
            0,
            self.max_depth,
            &mut state,
        );
        if !state.finite || !value.is_finite() {
            return Err(Error::Quadrature {
                lo,
                hi,
                reason: "integrand is not finite".into(),
            });
        }
        if state.leftover > self.abs_tol {
            return Err(Error::Quadrature {
                lo,
                hi,
                reason: format!(
                    "depth cap {} reached with error estimate {:e}",
                    self.max_depth, state.leftover
                ),
            });
        }
        Ok(value)
    }
}

struct State {
    leftover: f64,
    finite: bool,
}

#[derive(Clone, Copy)]
struct Segment {
    a: f64,
    fa: f64,
    m: f64,
    fm: f64,
    b: f64,
    fb: f64,
    whole: f64,
}

#[inline]
fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
}

fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    s: Segment,
    tol: f64,
    depth: u32,
    max_depth: u32,
    state: &mut State,
) -> f64 {
    let (lm, flm, left) = simpson(f, s.a, s.fa, s.m, s.fm);
    let (rm, frm, right) = simpson(f, s.m, s.fm, s.b, s.fb);
    if !(flm.is_finite() && frm.is_finite()) {
        state.finite = false;
        return f64::NAN;
    }
    let delta = left + right - s.whole;
    // Once the segment collapses to adjacent floats no further split helps.
    let exhausted = s.m <= s.a || s.m >= s.b;
    // Differences at the rounding-noise level of the segment count as converged.
    let noise = 64.0 * f64::EPSILON * (left.abs() + right.abs());
    if delta.abs() <= 15.0 * tol || delta.abs() <= noise {
        return left + right + delta / 15.0;
    }
    if depth >= max_depth || exhausted {
        state.leftover += delta.abs() / 15.0;
        return left + right + delta / 15.0;
    }
    let half = 0.5 * tol;
    recurse(
        f,
        Segment {
            a: s.a,
            fa: s.fa,
            m: lm,
            fm: flm,
            b: s.m,
            fb: s.fm,
            whole: left,
        },
        half,
        depth + 1,
        max_depth,
        state,
    ) + recurse(
        f,
        Segment {
            a: s.m,
            fa: s.fm,
            m: rm,
            fm: frm,
            b: s.b,
            fb: s.fb,
            whole: right,
        },
        half,
        depth + 1,
        max_depth,
        state,
    )
}
