//! Test-only oracles, independent of the library's interval arithmetic and
//! quadrature.

#![allow(dead_code)]

use bitexpand_core::distributions::PiecewiseConstant;
use bitexpand_core::DistributionModel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Exact mass of each of the `2^n` dyadic cells under a step density,
/// from segment/cell overlap lengths.
pub fn step_cell_masses(breakpoints: &[f64], densities: &[f64], n: u32) -> Vec<f64> {
    let cells = 1usize << n;
    (0..cells)
        .map(|k| {
            let lo = k as f64 / cells as f64;
            let hi = (k + 1) as f64 / cells as f64;
            breakpoints
                .windows(2)
                .zip(densities)
                .map(|(w, d)| {
                    let overlap = hi.min(w[1]) - lo.max(w[0]);
                    if overlap > 0.0 {
                        overlap * d
                    } else {
                        0.0
                    }
                })
                .sum()
        })
        .collect()
}

/// Marginals and pairwise `Pr[1,1]` (row-major `n x n`) by summing cells.
pub fn enumerate_cells(cells: &[f64], n: u32) -> (Vec<f64>, Vec<f64>) {
    let w = n as usize;
    let bit = |k: usize, i: usize| (k >> (w - 1 - i)) & 1 == 1;
    let mut marg = vec![0.0; w];
    let mut joint = vec![0.0; w * w];
    for (k, m) in cells.iter().enumerate() {
        for i in 0..w {
            if bit(k, i) {
                marg[i] += m;
                for j in 0..w {
                    if bit(k, j) {
                        joint[i * w + j] += m;
                    }
                }
            }
        }
    }
    (marg, joint)
}

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Step density with random breakpoints and weights, normalized.
pub fn random_step(rng: &mut impl Rng, segments: usize) -> PiecewiseConstant {
    let mut cuts: Vec<f64> = (0..segments - 1).map(|_| rng.random::<f64>()).collect();
    cuts.sort_by(f64::total_cmp);
    let mut bps = vec![0.0];
    bps.extend(cuts);
    bps.push(1.0);
    bps.dedup();
    let weights: Vec<f64> = (0..bps.len() - 1)
        .map(|_| rng.random_range(0.05..3.0))
        .collect();
    PiecewiseConstant::normalized(bps, weights).unwrap()
}

/// Step density mirrored about 1/2.
pub fn random_symmetric_step(rng: &mut impl Rng, half_segments: usize) -> PiecewiseConstant {
    let mut cuts: Vec<f64> = (0..half_segments - 1)
        .map(|_| rng.random_range(0.0..0.5))
        .collect();
    cuts.sort_by(f64::total_cmp);
    let mut left = vec![0.0];
    left.extend(cuts);
    let weights: Vec<f64> = (0..left.len())
        .map(|_| rng.random_range(0.05..3.0))
        .collect();
    let mut bps = left.clone();
    bps.extend(left.iter().rev().map(|x| 1.0 - x));
    bps.dedup();
    let mut ws = weights.clone();
    ws.extend(weights.iter().rev());
    // a single middle segment appears twice after mirroring; merge it
    if ws.len() != bps.len() - 1 {
        let mid = weights.len() - 1;
        ws.remove(mid);
    }
    PiecewiseConstant::normalized(bps, ws).unwrap()
}

pub fn step_model(p: PiecewiseConstant) -> DistributionModel {
    DistributionModel::PiecewiseConstant(p)
}
