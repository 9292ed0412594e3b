use crate::error::{Error, Result};

/// Mass-sum tolerance accepted by [`PiecewiseConstant::new`].
const MASS_TOL: f64 = 1e-9;

/// Step density: `densities[k]` on `[breakpoints[k], breakpoints[k+1])`,
/// with the last segment closed at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstant {
    breakpoints: Vec<f64>,
    densities: Vec<f64>,
    /// cdf at each breakpoint
    cumulative: Vec<f64>,
}

impl PiecewiseConstant {
    /// Validates shape and requires total mass 1 (within 1e-9).
    pub fn new(breakpoints: Vec<f64>, densities: Vec<f64>) -> Result<Self> {
        let model = Self::unchecked_mass(breakpoints, densities)?;
        let total = *model.cumulative.last().unwrap();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::invalid(format!(
                "piecewise densities integrate to {total}, not 1"
            )));
        }
        Ok(model)
    }

    /// Scales nonnegative `weights` so the density integrates to 1.
    pub fn normalized(breakpoints: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let raw = Self::unchecked_mass(breakpoints, weights)?;
        let total = *raw.cumulative.last().unwrap();
        if total <= 0.0 {
            return Err(Error::invalid("piecewise weights have zero mass"));
        }
        let densities = raw.densities.iter().map(|d| d / total).collect();
        Self::new(raw.breakpoints, densities)
    }

    /// The two-step density with 1/2 on [0, 1/2) and 3/2 on [1/2, 1]: its
    /// bits are pairwise independent without being equiprobable.
    pub fn half_and_three_halves() -> Self {
        Self::new(vec![0.0, 0.5, 1.0], vec![0.5, 1.5]).expect("valid density")
    }

    fn unchecked_mass(breakpoints: Vec<f64>, densities: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 || densities.len() + 1 != breakpoints.len() {
            return Err(Error::invalid(format!(
                "{} breakpoints need {} densities, got {}",
                breakpoints.len(),
                breakpoints.len().saturating_sub(1),
                densities.len()
            )));
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(Error::invalid("breakpoints must run from 0 to 1"));
        }
        if breakpoints
            .windows(2)
            .any(|w| w[0].is_nan() || w[1].is_nan() || w[0] >= w[1])
        {
            return Err(Error::invalid("breakpoints must be strictly increasing"));
        }
        if densities.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::invalid("densities must be finite and nonnegative"));
        }
        let mut cumulative = Vec::with_capacity(breakpoints.len());
        cumulative.push(0.0);
        let mut acc = 0.0;
        for (w, d) in breakpoints.windows(2).zip(&densities) {
            acc += d * (w[1] - w[0]);
            cumulative.push(acc);
        }
        Ok(PiecewiseConstant {
            breakpoints,
            densities,
            cumulative,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn densities(&self) -> &[f64] {
        &self.densities
    }

    fn segment_of(&self, x: f64) -> usize {
        let k = self.breakpoints.partition_point(|&b| b <= x);
        k.saturating_sub(1).min(self.densities.len() - 1)
    }

    pub(crate) fn pdf(&self, x: f64) -> f64 {
        self.densities[self.segment_of(x)]
    }

    pub(crate) fn cdf(&self, x: f64) -> f64 {
        if x >= 1.0 {
            return 1.0;
        }
        let k = self.segment_of(x);
        (self.cumulative[k] + self.densities[k] * (x - self.breakpoints[k])).min(1.0)
    }

    pub(crate) fn inverse_cdf(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return 1.0;
        }
        // First segment whose cumulative upper end reaches u; it has positive
        // density unless u sits exactly on a plateau of the cdf.
        let upper = self.cumulative.partition_point(|&c| c < u);
        let k = upper.saturating_sub(1).min(self.densities.len() - 1);
        let d = self.densities[k];
        if d == 0.0 {
            return self.breakpoints[k];
        }
        let x = self.breakpoints[k] + (u - self.cumulative[k]) / d;
        x.clamp(self.breakpoints[k], self.breakpoints[k + 1])
    }

    /// Merges neighbouring segments whose densities agree within `tolerance`.
    fn canonical(&self, tolerance: f64) -> (Vec<f64>, Vec<f64>) {
        let mut bps = vec![self.breakpoints[0]];
        let mut ds: Vec<f64> = Vec::new();
        for (k, &d) in self.densities.iter().enumerate() {
            match ds.last() {
                Some(&prev) if (prev - d).abs() <= tolerance => {
                    *bps.last_mut().unwrap() = self.breakpoints[k + 1];
                }
                _ => {
                    ds.push(d);
                    bps.push(self.breakpoints[k + 1]);
                }
            }
        }
        (bps, ds)
    }

    /// Structural mirror check: after merging equal neighbours, breakpoints
    /// reflect onto each other about 1/2 and densities read the same
    /// backwards.
    pub(crate) fn is_symmetric(&self, tolerance: f64) -> bool {
        let (bps, ds) = self.canonical(tolerance);
        let m = bps.len() - 1;
        let mirrored_bps = (0..=m).all(|k| (bps[k] + bps[m - k] - 1.0).abs() <= tolerance);
        let mirrored_ds = (0..m).all(|k| (ds[k] - ds[m - 1 - k]).abs() <= tolerance);
        mirrored_bps && mirrored_ds
    }
}
