//! Theoretical bit statistics: probabilities of unions of dyadic intervals
//! under a model, summed as cdf differences.

use rayon::prelude::*;

use crate::distributions::DistributionModel;
use crate::dyadic::{bit_intervals, check_bit_value, check_precision, Interval};
use crate::error::{Error, Result};
use crate::statistics::{BitStatistics, Source};

/// Bits with `p(1-p)` at or below this are treated as constant.
pub const DEGENERATE_VARIANCE: f64 = 1e-12;

fn interval_mass(model: &DistributionModel, iv: &Interval) -> Result<f64> {
    model.mass(iv.lo, iv.hi).map_err(|e| match e {
        Error::Quadrature { reason, .. } => Error::Quadrature {
            lo: iv.lo,
            hi: iv.hi,
            reason,
        },
        other => other,
    })
}

fn total_mass<I>(model: &DistributionModel, intervals: I) -> Result<f64>
where
    I: IntoIterator<Item = Interval>,
{
    let mut acc = 0.0;
    for iv in intervals {
        acc += interval_mass(model, &iv)?;
    }
    Ok(acc.clamp(0.0, 1.0))
}

/// `Pr[B_i = 1]`: the model's mass on the `2^(i-1)` value-1 intervals of
/// level `i`.
pub fn bit_marginal(model: &DistributionModel, i: u32) -> Result<f64> {
    let set = bit_intervals(i, 1)?;
    total_mass(model, set.intervals())
}

/// `Pr[B_i = bi, B_j = bj]` for `i != j`, from the intersection of the two
/// dyadic sets.
pub fn joint_probability(model: &DistributionModel, i: u32, j: u32, bi: u8, bj: u8) -> Result<f64> {
    if i == j {
        return Err(Error::domain(format!(
            "joint probability needs i != j, got {i}"
        )));
    }
    check_bit_value(bi)?;
    check_bit_value(bj)?;
    let a = bit_intervals(i, bi)?;
    let b = bit_intervals(j, bj)?;
    total_mass(model, a.intersect(&b))
}

/// Exact statistics of the first `n` bits. Pairs are evaluated in
/// parallel; each entry depends only on its own pair.
pub fn statistics(model: &DistributionModel, n: u32) -> Result<BitStatistics> {
    check_precision(n)?;
    let marginals = (1..=n)
        .into_par_iter()
        .map(|i| bit_marginal(model, i))
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(u32, u32)> = (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .collect();
    let pair_joint = pairs
        .par_iter()
        .map(|&(i, j)| joint_probability(model, i, j, 1, 1))
        .collect::<Result<Vec<_>>>()?;
    let n = n as usize;
    let mut joint = vec![0.0; n * n];
    for (k, p) in marginals.iter().enumerate() {
        joint[k * n + k] = *p;
    }
    for (&(i, j), p) in pairs.iter().zip(pair_joint) {
        let (i, j) = (i as usize - 1, j as usize - 1);
        joint[i * n + j] = p;
        joint[j * n + i] = p;
    }
    BitStatistics::from_moments(marginals, joint, Source::Exact, DEGENERATE_VARIANCE)
}

/// Pairs `(i, j, deviation)` whose largest
/// `|Pr[bi, bj] - Pr[bi] Pr[bj]|` over the four outcomes exceeds
/// `tolerance`. An empty list means pairwise independence.
pub fn independence_check(stats: &BitStatistics, tolerance: f64) -> Vec<(u32, u32, f64)> {
    stats
        .pairs()
        .filter_map(|(i, j)| {
            let table = stats.pair_table(i, j);
            let pi = [1.0 - stats.marginal(i), stats.marginal(i)];
            let pj = [1.0 - stats.marginal(j), stats.marginal(j)];
            let mut dev: f64 = 0.0;
            for bi in 0..2 {
                for bj in 0..2 {
                    dev = dev.max((table[bi][bj] - pi[bi] * pj[bj]).abs());
                }
            }
            (dev > tolerance).then_some((i, j, dev))
        })
        .collect()
}
