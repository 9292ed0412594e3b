//! Seeded inverse-transform sampling of the model followed by binary
//! expansion, and empirical estimation of bit statistics.
//!
//! # Uniform stream
//!
//! The stream is named [`STREAM_NAME`]. Draw `k` of seed `s` lives in chunk
//! `c = k / CHUNK_ROWS` at offset `k % CHUNK_ROWS`; chunk `c` is the output
//! of ChaCha8 keyed by `seed_from_u64(s)` on stream number `c`. Each draw
//! consumes one 64-bit word `w` and becomes `u = (w >> 11) * 2^-53`, so
//! `u` lies in [0, 1) on the 2^-53 grid. Chunks are independent, which
//! lets workers generate them in any order without changing the result.

use std::io::{self, Write};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::distributions::DistributionModel;
use crate::dyadic::{check_precision, expand, BitVector};
use crate::error::{Error, Result};
use crate::statistics::{BitStatistics, Source};

pub const STREAM_NAME: &str = "chacha8-chunked-v1";

/// Rows per independently seeded chunk.
pub const CHUNK_ROWS: u64 = 1 << 16;

/// Larger runs must go through [`estimate_streaming`].
pub const MAX_STORED_ROWS: u64 = 10_000_000;

/// Uniform variates `[start, start + len)` of chunk `chunk`.
fn chunk_uniforms(seed: u64, chunk: u64, len: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    (0..len).map(|_| word_to_unit(rng.next_u64())).collect()
}

#[inline]
fn word_to_unit(w: u64) -> f64 {
    (w >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// The first `count` uniforms of the stream for `seed`.
pub fn uniforms(seed: u64, count: u64) -> Vec<f64> {
    chunk_ranges(count)
        .flat_map(|(chunk, len)| chunk_uniforms(seed, chunk, len))
        .collect()
}

fn chunk_ranges(count: u64) -> impl Iterator<Item = (u64, usize)> {
    let chunks = count.div_ceil(CHUNK_ROWS);
    (0..chunks).map(move |c| {
        let len = (count - c * CHUNK_ROWS).min(CHUNK_ROWS) as usize;
        (c, len)
    })
}

/// Seed for the `index`-th independent substream of `base`
/// (SplitMix64 finalizer over a Weyl step).
pub fn substream_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One row: the `n`-bit expansion of `F^-1(u)`.
pub fn row_from_uniform(model: &DistributionModel, n: u32, u: f64) -> Result<BitVector> {
    expand(model.inverse_cdf(u)?, n)
}

fn check_run(n: u32, count: u64) -> Result<()> {
    check_precision(n)?;
    if count == 0 {
        return Err(Error::domain("sample count must be at least 1"));
    }
    Ok(())
}

fn chunk_cells(
    model: &DistributionModel,
    n: u32,
    seed: u64,
    chunk: u64,
    len: usize,
) -> Result<Vec<u64>> {
    chunk_uniforms(seed, chunk, len)
        .into_iter()
        .map(|u| row_from_uniform(model, n, u).map(|b| b.cell()))
        .collect()
}

/// A stored bit matrix: `count` rows of `n` bits.
#[derive(Debug, Clone)]
pub struct SampleRun {
    model: DistributionModel,
    n: u32,
    seed: u64,
    /// Row `k` packed as its level-`n` cell index.
    rows: Vec<u64>,
}

impl SampleRun {
    pub fn model(&self) -> &DistributionModel {
        &self.model
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn count(&self) -> u64 {
        self.rows.len() as u64
    }

    pub fn row(&self, k: usize) -> BitVector {
        BitVector::from_cell(self.rows[k], self.n).expect("stored rows fit in n bits")
    }

    pub fn rows(&self) -> impl Iterator<Item = BitVector> + '_ {
        (0..self.rows.len()).map(|k| self.row(k))
    }

    /// Raw export: one `0`/`1` line per draw, newline terminated.
    pub fn write_bits<W: Write>(&self, mut out: W) -> io::Result<()> {
        for row in self.rows() {
            writeln!(out, "{row}")?;
        }
        Ok(())
    }
}

/// Draws `count` rows of `n` bits from `model` under `seed`.
pub fn draw_bits(model: &DistributionModel, n: u32, count: u64, seed: u64) -> Result<SampleRun> {
    check_run(n, count)?;
    if count > MAX_STORED_ROWS {
        return Err(Error::domain(format!(
            "{count} rows exceed the stored-run limit {MAX_STORED_ROWS}; use estimate_streaming"
        )));
    }
    let ranges: Vec<_> = chunk_ranges(count).collect();
    let chunks = ranges
        .par_iter()
        .map(|&(c, len)| chunk_cells(model, n, seed, c, len))
        .collect::<Result<Vec<_>>>()?;
    Ok(SampleRun {
        model: model.clone(),
        n,
        seed,
        rows: chunks.concat(),
    })
}

/// Mergeable counts of ones and of pairwise co-occurring ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitCounts {
    n: u32,
    rows: u64,
    ones: Vec<u64>,
    pairs: Vec<u64>,
}

impl BitCounts {
    pub fn new(n: u32) -> Self {
        let w = n as usize;
        BitCounts {
            n,
            rows: 0,
            ones: vec![0; w],
            pairs: vec![0; w * w],
        }
    }

    pub fn rows(&self) -> u64 {
        self.rows
    }

    /// Adds one row given as its level-`n` cell index.
    pub fn push_cell(&mut self, cell: u64) {
        let n = self.n as usize;
        self.rows += 1;
        let set: Vec<usize> = (0..n).filter(|&i| (cell >> (n - 1 - i)) & 1 == 1).collect();
        for (a, &i) in set.iter().enumerate() {
            self.ones[i] += 1;
            for &j in &set[a + 1..] {
                self.pairs[i * n + j] += 1;
            }
        }
    }

    pub fn merge(&mut self, other: &BitCounts) {
        assert_eq!(self.n, other.n, "merging counts of different widths");
        self.rows += other.rows;
        for (a, b) in self.ones.iter_mut().zip(&other.ones) {
            *a += b;
        }
        for (a, b) in self.pairs.iter_mut().zip(&other.pairs) {
            *a += b;
        }
    }

    /// Column means and co-occurrence frequencies; constant columns get
    /// undefined correlations.
    pub fn statistics(&self, seed: u64) -> Result<BitStatistics> {
        if self.rows < 2 {
            return Err(Error::domain("empirical statistics need at least 2 rows"));
        }
        let n = self.n as usize;
        let total = self.rows as f64;
        let marginals: Vec<f64> = self.ones.iter().map(|&c| c as f64 / total).collect();
        let mut joint = vec![0.0; n * n];
        for i in 0..n {
            joint[i * n + i] = marginals[i];
            for j in i + 1..n {
                let p = self.pairs[i * n + j] as f64 / total;
                joint[i * n + j] = p;
                joint[j * n + i] = p;
            }
        }
        let source = Source::Empirical {
            count: self.rows,
            seed,
        };
        BitStatistics::from_moments(marginals, joint, source, 0.0)
    }
}

/// Statistics of a stored run.
pub fn empirical_statistics(run: &SampleRun) -> Result<BitStatistics> {
    let mut counts = BitCounts::new(run.n);
    for &cell in &run.rows {
        counts.push_cell(cell);
    }
    counts.statistics(run.seed)
}

/// Same estimate as `empirical_statistics(draw_bits(..))`, without storing
/// rows. Chunks are counted in parallel and merged in chunk order.
pub fn estimate_streaming(
    model: &DistributionModel,
    n: u32,
    count: u64,
    seed: u64,
) -> Result<BitStatistics> {
    check_run(n, count)?;
    let ranges: Vec<_> = chunk_ranges(count).collect();
    let partial = ranges
        .par_iter()
        .map(|&(c, len)| {
            let mut counts = BitCounts::new(n);
            for cell in chunk_cells(model, n, seed, c, len)? {
                counts.push_cell(cell);
            }
            Ok(counts)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = BitCounts::new(n);
    for c in &partial {
        total.merge(c);
    }
    total.statistics(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::PiecewiseConstant;

    #[test]
    fn worked_example_row() {
        let row = row_from_uniform(&DistributionModel::Uniform, 6, 0.72).unwrap();
        assert_eq!(row.to_vec(), vec![1, 0, 1, 1, 1, 0]);
    }

    #[test]
    fn zero_count_is_rejected() {
        assert!(draw_bits(&DistributionModel::Uniform, 3, 0, 1).is_err());
        assert!(estimate_streaming(&DistributionModel::Uniform, 3, 0, 1).is_err());
        assert!(draw_bits(&DistributionModel::Uniform, 0, 10, 1).is_err());
    }

    #[test]
    fn uniforms_are_in_unit_interval_and_chunked() {
        let us = uniforms(7, CHUNK_ROWS + 10);
        assert_eq!(us.len() as u64, CHUNK_ROWS + 10);
        assert!(us.iter().all(|u| (0.0..1.0).contains(u)));
        // the second chunk starts a fresh stream, not a continuation
        let second = chunk_uniforms(7, 1, 10);
        assert_eq!(&us[CHUNK_ROWS as usize..], &second[..]);
        assert_ne!(us[0], second[0]);
    }

    #[test]
    fn uniform_first_bit_mean() {
        let run = draw_bits(&DistributionModel::Uniform, 1, 100_000, 20_240_601).unwrap();
        let s = empirical_statistics(&run).unwrap();
        // 3 sigma with sigma = 0.5 / sqrt(1e5)
        assert!(
            (0.4953..=0.5047).contains(&s.marginal(1)),
            "{}",
            s.marginal(1)
        );
    }

    #[test]
    fn stored_and_streamed_estimates_agree() {
        let m = DistributionModel::PiecewiseConstant(PiecewiseConstant::half_and_three_halves());
        let count = 2 * CHUNK_ROWS + 123;
        let run = draw_bits(&m, 3, count, 99).unwrap();
        let a = empirical_statistics(&run).unwrap();
        let b = estimate_streaming(&m, 3, count, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.source(), Source::Empirical { count, seed: 99 });
    }

    #[test]
    fn counts_merge_in_any_order() {
        let cells = [0b101u64, 0b111, 0b000, 0b011, 0b110];
        let mut whole = BitCounts::new(3);
        for c in cells {
            whole.push_cell(c);
        }
        let mut left = BitCounts::new(3);
        let mut right = BitCounts::new(3);
        for c in &cells[..2] {
            left.push_cell(*c);
        }
        for c in &cells[2..] {
            right.push_cell(*c);
        }
        let mut rl = right.clone();
        rl.merge(&left);
        left.merge(&right);
        assert_eq!(left, whole);
        assert_eq!(rl, whole);
        let s = whole.statistics(0).unwrap();
        assert_eq!(s.marginal(1), 0.6);
        assert_eq!(s.joint(1, 3), 0.4);
    }

    #[test]
    fn constant_columns_are_undefined() {
        let m =
            DistributionModel::custom(|x| if x < 0.01 { 100.0 } else { 0.0 }, vec![0.01]).unwrap();
        let run = draw_bits(&m, 3, 1000, 5).unwrap();
        assert!(run.rows().all(|r| r.cell() == 0));
        let s = empirical_statistics(&run).unwrap();
        assert_eq!(s.marginals(), &[0.0, 0.0, 0.0]);
        assert_eq!(s.correlation(1, 2), None);
        assert_eq!(s.correlation(2, 3), None);
    }

    #[test]
    fn single_row_cannot_be_estimated() {
        let run = draw_bits(&DistributionModel::Uniform, 3, 1, 5).unwrap();
        assert!(empirical_statistics(&run).is_err());
    }

    #[test]
    fn raw_export_format() {
        let run = draw_bits(&DistributionModel::Uniform, 5, 4, 11).unwrap();
        let mut buf = Vec::new();
        run.write_bits(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(text.ends_with('\n'));
        for (line, row) in lines.iter().zip(run.rows()) {
            assert_eq!(line.len(), 5);
            assert!(line.chars().all(|c| c == '0' || c == '1'));
            assert_eq!(*line, row.to_string());
        }
    }

    #[test]
    fn substreams_differ() {
        assert_ne!(substream_seed(1, 0), substream_seed(1, 1));
        assert_ne!(substream_seed(1, 0), substream_seed(2, 0));
        assert_eq!(substream_seed(42, 3), substream_seed(42, 3));
    }
}
