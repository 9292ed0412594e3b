//! Bernoulli bit streams from the binary expansion of a continuous random
//! variable on [0,1].
//!
//! A draw `x` from a density on [0,1] is truncated to its first `n` binary
//! digits; bit `i` is 1 exactly when `x` falls in one of the `2^(i-1)`
//! value-1 intervals of level `i`. The density shapes the marginals and the
//! pairwise correlations of the bits: symmetric densities about 1/2 give
//! fair bits, and the uniform density gives independent fair bits.
//!
//! - [`dyadic`]: expansions and the interval sets each bit induces.
//! - [`distributions`]: uniform, beta, trapezoidal, step and custom densities.
//! - [`exact`]: theoretical marginals, joints, covariance and correlation.
//! - [`sampler`]: seeded sampling and empirical estimates.
//! - [`experiment`]: parameter sweeps and CSV output.

pub mod distributions;
pub mod dyadic;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod quadrature;
pub mod sampler;
pub mod statistics;

pub use distributions::DistributionModel;
pub use dyadic::{
    bit_intervals, expand, value_of, BitVector, DyadicIntervalSet, Interval, MAX_PRECISION,
};
pub use error::{Error, Result};
pub use exact::{bit_marginal, independence_check, joint_probability, statistics};
pub use sampler::{draw_bits, empirical_statistics, estimate_streaming, SampleRun};
pub use statistics::{BitStatistics, Source};
