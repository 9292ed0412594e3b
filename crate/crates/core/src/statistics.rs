//! Bit marginals, pairwise joints, covariance and correlation, whether
//! computed exactly or estimated from samples.

use std::fmt;

use crate::error::{Error, Result};

/// Where a [`BitStatistics`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Exact,
    Empirical { count: u64, seed: u64 },
}

/// Statistics of the first `n` expansion bits. Indices are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct BitStatistics {
    n: u32,
    marginals: Vec<f64>,
    joint: Vec<f64>,
    covariance: Vec<f64>,
    correlation: Vec<Option<f64>>,
    source: Source,
}

impl BitStatistics {
    /// Assembles the statistics from `p_i = Pr[B_i = 1]` and the row-major
    /// `n x n` table of `Pr[B_i = 1, B_j = 1]` (diagonal equal to `p_i`).
    ///
    /// A bit whose variance `p(1-p)` is at most `degenerate` gets undefined
    /// correlations in its row and column.
    pub fn from_moments(
        marginals: Vec<f64>,
        joint: Vec<f64>,
        source: Source,
        degenerate: f64,
    ) -> Result<Self> {
        let n = marginals.len();
        if n == 0 || joint.len() != n * n {
            return Err(Error::domain(format!(
                "{} marginals need a {n}x{n} joint table, got {} entries",
                n,
                joint.len()
            )));
        }
        let mut covariance = vec![0.0; n * n];
        let mut correlation = vec![None; n * n];
        for i in 0..n {
            for j in 0..n {
                let (pi, pj) = (marginals[i], marginals[j]);
                let cov = joint[i * n + j] - pi * pj;
                covariance[i * n + j] = cov;
                let var = (pi * (1.0 - pi)) * (pj * (1.0 - pj));
                let defined = pi * (1.0 - pi) > degenerate && pj * (1.0 - pj) > degenerate;
                correlation[i * n + j] = if !defined {
                    None
                } else if i == j {
                    Some(1.0)
                } else {
                    Some((cov / var.sqrt()).clamp(-1.0, 1.0))
                };
            }
        }
        Ok(BitStatistics {
            n: n as u32,
            marginals,
            joint,
            covariance,
            correlation,
            source,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn source(&self) -> Source {
        self.source
    }

    pub fn marginals(&self) -> &[f64] {
        &self.marginals
    }

    fn idx(&self, i: u32, j: u32) -> usize {
        assert!(
            (1..=self.n).contains(&i) && (1..=self.n).contains(&j),
            "bit pair ({i}, {j}) out of range for n = {}",
            self.n
        );
        ((i - 1) * self.n + (j - 1)) as usize
    }

    /// `Pr[B_i = 1]`.
    pub fn marginal(&self, i: u32) -> f64 {
        self.idx(i, i);
        self.marginals[(i - 1) as usize]
    }

    /// `Pr[B_i = 1, B_j = 1]`.
    pub fn joint(&self, i: u32, j: u32) -> f64 {
        self.joint[self.idx(i, j)]
    }

    pub fn covariance(&self, i: u32, j: u32) -> f64 {
        self.covariance[self.idx(i, j)]
    }

    /// Pearson correlation, `None` when either bit is constant.
    pub fn correlation(&self, i: u32, j: u32) -> Option<f64> {
        self.correlation[self.idx(i, j)]
    }

    /// `table[bi][bj] = Pr[B_i = bi, B_j = bj]`.
    pub fn pair_table(&self, i: u32, j: u32) -> [[f64; 2]; 2] {
        let (pi, pj, p11) = (self.marginal(i), self.marginal(j), self.joint(i, j));
        [[1.0 - pi - pj + p11, pj - p11], [pi - p11, p11]]
    }

    /// Pairs `i < j`, in row order.
    pub fn pairs(&self) -> impl Iterator<Item = (u32, u32)> {
        let n = self.n;
        (1..=n).flat_map(move |i| (i + 1..=n).map(move |j| (i, j)))
    }
}

impl fmt::Display for BitStatistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.source {
            Source::Exact => writeln!(f, "exact statistics, n = {}", self.n)?,
            Source::Empirical { count, seed } => writeln!(
                f,
                "empirical statistics, n = {}, {count} samples, seed {seed}",
                self.n
            )?,
        }
        writeln!(f, "{:>4}  {:>12}", "bit", "Pr[B=1]")?;
        for i in 1..=self.n {
            writeln!(f, "{:>4}  {:>12.9}", i, self.marginal(i))?;
        }
        writeln!(
            f,
            "{:>4} {:>4}  {:>12} {:>13} {:>13}",
            "i", "j", "Pr[1,1]", "cov", "cor"
        )?;
        for (i, j) in self.pairs() {
            let cor = match self.correlation(i, j) {
                Some(r) => format!("{r:>13.9}"),
                None => format!("{:>13}", "undefined"),
            };
            writeln!(
                f,
                "{:>4} {:>4}  {:>12.9} {:>13.9} {}",
                i,
                j,
                self.joint(i, j),
                self.covariance(i, j),
                cor
            )?;
        }
        Ok(())
    }
}
