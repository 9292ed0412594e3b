//! Parameter sweeps pairing exact and sampled bit correlations, and the
//! bit-probability curve of the shifted trapezoid.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;

use crate::distributions::{DistributionModel, KeyValues};
use crate::dyadic::check_precision;
use crate::error::{Error, Result};
use crate::exact::{self, bit_marginal};
use crate::sampler::{estimate_streaming, substream_seed};
use crate::statistics::BitStatistics;

/// Shape parameters of the beta sweep: `{0.1, 0.25, 0.75, 1, 2, 3, ..., 20}`.
pub fn default_alpha_grid() -> Vec<f64> {
    let mut grid = vec![0.1, 0.25, 0.75, 1.0];
    grid.extend((2..=20).map(f64::from));
    grid
}

/// Ten equally spaced plateau half-widths from 0 to 0.5.
pub fn default_delta_grid() -> Vec<f64> {
    linspace(0.0, 0.5, 10)
}

/// Plateau start `c` values for the shifted trapezoid (`d = c + 1/4`).
pub fn default_c_grid() -> Vec<f64> {
    linspace(0.0, 0.75, 31)
}

pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|k| {
                if k == count - 1 {
                    stop
                } else {
                    start + (stop - start) * k as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}

/// Plateau width of the shifted trapezoid.
pub const EXAMPLE1_WIDTH: f64 = 0.25;

/// Parameter grid: either an explicit list `a,b,c` or `start:stop:count`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |what: &str| Error::Parse(format!("grid `{s}`: {what}"));
        let values = if s.contains(':') {
            let parts: Vec<&str> = s.split(':').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(bad("range form is start:stop:count"));
            }
            let start: f64 = parts[0].parse().map_err(|_| bad("bad start"))?;
            let stop: f64 = parts[1].parse().map_err(|_| bad("bad stop"))?;
            let count: usize = parts[2].parse().map_err(|_| bad("bad count"))?;
            linspace(start, stop, count)
        } else {
            s.split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| bad("bad number")))
                .collect::<Result<Vec<_>>>()?
        };
        if values.is_empty() {
            return Err(bad("no values"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(bad("values must be finite"));
        }
        Ok(Grid(values))
    }
}

/// Which one-parameter family a sweep walks through.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Beta(α, α).
    BetaSymmetric,
    /// Trapezoid with plateau `[1/2 - Δ, 1/2 + Δ]`.
    TrapezoidSymmetric,
    /// Trapezoid with plateau `[c, c + 1/4]`.
    TrapezoidC,
    /// A config fragment with one model key replaced by the grid value.
    Custom { template: KeyValues, param: String },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::BetaSymmetric => "beta-symmetric",
            Family::TrapezoidSymmetric => "trapezoid-symmetric",
            Family::TrapezoidC => "trapezoid-C",
            Family::Custom { .. } => "custom",
        }
    }

    pub fn default_grid(&self) -> Option<Vec<f64>> {
        match self {
            Family::BetaSymmetric => Some(default_alpha_grid()),
            Family::TrapezoidSymmetric => Some(default_delta_grid()),
            Family::TrapezoidC => Some(default_c_grid()),
            Family::Custom { .. } => None,
        }
    }

    fn check_param(&self, v: f64) -> Result<()> {
        let ok = match self {
            Family::BetaSymmetric => v > 0.0 && v.is_finite(),
            Family::TrapezoidSymmetric => (0.0..=0.5).contains(&v),
            Family::TrapezoidC => (0.0..=1.0 - EXAMPLE1_WIDTH).contains(&v),
            Family::Custom { .. } => v.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "grid value {v} outside the {} family domain",
                self.name()
            )))
        }
    }

    pub fn model(&self, v: f64) -> Result<DistributionModel> {
        self.check_param(v)?;
        match self {
            Family::BetaSymmetric => DistributionModel::beta(v, v),
            Family::TrapezoidSymmetric => DistributionModel::symmetric_trapezoid(v),
            Family::TrapezoidC => DistributionModel::trapezoidal(v, (v + EXAMPLE1_WIDTH).min(1.0)),
            Family::Custom { template, param } => {
                let mut kv = template.clone();
                kv.set(param, v.to_string());
                DistributionModel::from_config(&kv)
            }
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    /// Parses the three named families; `custom` needs a template and is
    /// built directly.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "beta-symmetric" | "beta" => Ok(Family::BetaSymmetric),
            "trapezoid-symmetric" | "trapezoid" => Ok(Family::TrapezoidSymmetric),
            "trapezoid-c" => Ok(Family::TrapezoidC),
            other => Err(Error::Parse(format!("unknown family `{other}`"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub family: Family,
    pub grid: Vec<f64>,
    pub bits: u32,
    pub samples: u64,
    pub seed: u64,
}

impl SweepConfig {
    pub const DEFAULT_BITS: u32 = 3;
    pub const DEFAULT_SAMPLES: u64 = 100_000;

    /// Family defaults: its own grid, 3 bits, 10^5 samples, seed 0.
    pub fn new(family: Family) -> Self {
        let grid = family.default_grid().unwrap_or_default();
        SweepConfig {
            family,
            grid,
            bits: Self::DEFAULT_BITS,
            samples: Self::DEFAULT_SAMPLES,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::domain("sweep grid is empty"));
        }
        for &v in &self.grid {
            self.family.check_param(v)?;
        }
        check_precision(self.bits)?;
        if self.samples < 2 {
            return Err(Error::domain("a sweep needs at least 2 samples per point"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub theory: BitStatistics,
    pub empirical: BitStatistics,
}

impl SweepRow {
    /// Max minus min of the theoretical pairwise correlations.
    pub fn theory_spread(&self) -> Option<f64> {
        let rhos: Option<Vec<f64>> = self
            .theory
            .pairs()
            .map(|(i, j)| self.theory.correlation(i, j))
            .collect();
        let rhos = rhos?;
        if rhos.is_empty() {
            return None;
        }
        let max = rhos.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = rhos.iter().copied().fold(f64::INFINITY, f64::min);
        Some(max - min)
    }
}

/// A sweep that failed at one grid point.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("sweep point {param:?} (index {index}): {source}")]
pub struct SweepError {
    pub index: usize,
    pub param: f64,
    #[source]
    pub source: Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub family: Family,
    pub bits: u32,
    pub rows: Vec<SweepRow>,
}

/// Runs every grid point, in parallel, with sampling seed
/// `substream_seed(seed, index)`. Rows come back in grid order.
pub fn run_sweep(config: &SweepConfig) -> std::result::Result<SweepResult, SweepError> {
    if let Err(source) = config.validate() {
        let bad = config
            .grid
            .iter()
            .position(|&v| config.family.check_param(v).is_err())
            .unwrap_or(0);
        return Err(SweepError {
            index: bad,
            param: config.grid.get(bad).copied().unwrap_or(f64::NAN),
            source,
        });
    }
    let rows = config
        .grid
        .par_iter()
        .enumerate()
        .map(|(index, &param)| {
            let point = || -> Result<SweepRow> {
                let model = config.family.model(param)?;
                let theory = exact::statistics(&model, config.bits)?;
                let seed = substream_seed(config.seed, index as u64);
                let empirical = estimate_streaming(&model, config.bits, config.samples, seed)?;
                Ok(SweepRow {
                    param,
                    theory,
                    empirical,
                })
            };
            point().map_err(|source| SweepError {
                index,
                param,
                source,
            })
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(SweepResult {
        family: config.family.clone(),
        bits: config.bits,
        rows,
    })
}

fn pair_label(i: u32, j: u32, n: u32) -> String {
    if n < 10 {
        format!("{i}{j}")
    } else {
        format!("{i}_{j}")
    }
}

/// Decimal rendering with 9 significant digits; `nan` for undefined.
pub fn format_sig(x: f64) -> String {
    const DIGITS: i32 = 9;
    if x.is_nan() {
        return "nan".into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (DIGITS - 1 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // Rounding can carry into a new leading digit (9.9999999996 -> 10.00000000).
    let rounded: f64 = s.parse().unwrap_or(x);
    if rounded != 0.0 && rounded.abs().log10().floor() as i32 > magnitude && decimals > 0 {
        return format!("{x:.prec$}", prec = decimals - 1);
    }
    s
}

fn format_opt(x: Option<f64>) -> String {
    format_sig(x.unwrap_or(f64::NAN))
}

impl SweepResult {
    pub fn header(&self) -> String {
        let n = self.bits;
        let pairs: Vec<(u32, u32)> = (1..=n)
            .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
            .collect();
        let mut cols = vec!["param".to_string()];
        for suffix in ["theory", "emp"] {
            for &(i, j) in &pairs {
                cols.push(format!("rho{}_{suffix}", pair_label(i, j, n)));
            }
        }
        for i in 1..=n {
            cols.push(format!("p{i}"));
        }
        cols.join(",")
    }

    /// CSV: header, then one row per grid point. Marginal columns are the
    /// exact values.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", self.header())?;
        for row in &self.rows {
            let mut cols = vec![format_sig(row.param)];
            for stats in [&row.theory, &row.empirical] {
                for (i, j) in stats.pairs() {
                    cols.push(format_opt(stats.correlation(i, j)));
                }
            }
            for &p in row.theory.marginals() {
                cols.push(format_sig(p));
            }
            writeln!(out, "{}", cols.join(","))?;
        }
        Ok(())
    }
}

/// `Pr[B_1 = 1]` and `Pr[B_2 = 1]` for the trapezoid with plateau
/// `[c, c + 1/4]`.
pub fn example1_point(c: f64) -> Result<(f64, f64)> {
    let model = Family::TrapezoidC.model(c)?;
    Ok((bit_marginal(&model, 1)?, bit_marginal(&model, 2)?))
}

pub fn example1_curve(grid: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    if grid.is_empty() {
        return Err(Error::domain("example grid is empty"));
    }
    grid.iter()
        .map(|&c| example1_point(c).map(|(p1, p2)| (c, p1, p2)))
        .collect()
}

pub fn write_example1_csv<W: Write>(curve: &[(f64, f64, f64)], mut out: W) -> io::Result<()> {
    writeln!(out, "c,p1,p2")?;
    for &(c, p1, p2) in curve {
        writeln!(
            out,
            "{},{},{}",
            format_sig(c),
            format_sig(p1),
            format_sig(p2)
        )?;
    }
    Ok(())
}

/// Bisection for the `c` in `[lo, hi]` where `Pr[B_bit = 1] = 1/2`.
pub fn example1_crossing(bit: u32, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let g = |c: f64| -> Result<f64> {
        let model = Family::TrapezoidC.model(c)?;
        Ok(bit_marginal(&model, bit)? - 0.5)
    };
    let (mut lo, mut hi) = (lo, hi);
    let (mut glo, ghi) = (g(lo)?, g(hi)?);
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    if glo.signum() == ghi.signum() {
        return Err(Error::domain(format!(
            "no sign change of Pr[B_{bit} = 1] - 1/2 on [{lo}, {hi}]"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid)?;
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_grid_literal() {
        let g = default_alpha_grid();
        assert_eq!(g.len(), 23);
        assert_eq!(&g[..5], &[0.1, 0.25, 0.75, 1.0, 2.0]);
        assert_eq!(*g.last().unwrap(), 20.0);
        let d = default_delta_grid();
        assert_eq!(d.len(), 10);
        assert_eq!((d[0], d[9]), (0.0, 0.5));
    }

    #[test]
    fn grid_parsing() {
        assert_eq!("1, 2,3".parse::<Grid>().unwrap(), Grid(vec![1.0, 2.0, 3.0]));
        assert_eq!("0:1:3".parse::<Grid>().unwrap(), Grid(vec![0.0, 0.5, 1.0]));
        assert!("0:1".parse::<Grid>().is_err());
        assert!("".parse::<Grid>().is_err());
        assert!("0:1:0".parse::<Grid>().is_err());
        assert!("a,b".parse::<Grid>().is_err());
        assert!("inf".parse::<Grid>().is_err());
    }

    #[test]
    fn family_domains() {
        assert!(Family::BetaSymmetric.model(0.0).is_err());
        assert!(Family::TrapezoidSymmetric.model(0.51).is_err());
        assert!(Family::TrapezoidC.model(0.8).is_err());
        assert!(Family::TrapezoidC.model(0.75).is_ok());
        let mut cfg = SweepConfig::new(Family::BetaSymmetric);
        cfg.grid = vec![];
        assert!(cfg.validate().is_err());
        cfg.grid = vec![1.0, -1.0];
        let err = run_sweep(&cfg).unwrap_err();
        assert_eq!(err.index, 1);
        assert_eq!(err.param, -1.0);
    }

    #[test]
    fn custom_family_substitutes_parameter() {
        let template = crate::distributions::parse_key_values("kind=beta; beta=2").unwrap();
        let fam = Family::Custom {
            template,
            param: "alpha".into(),
        };
        match fam.model(3.0).unwrap() {
            DistributionModel::Beta(b) => assert_eq!((b.alpha(), b.beta()), (3.0, 2.0)),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(-0.375), "-0.375000000");
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(20.0), "20.0000000");
        assert_eq!(format_sig(0.1), "0.100000000");
        assert_eq!(format_sig(f64::NAN), "nan");
        assert_eq!(format_sig(1.0 / 3.0), "0.333333333");
        assert_eq!(format_sig(9.9999999996), "10.0000000");
    }

    #[test]
    fn small_sweep_csv_shape() {
        let cfg = SweepConfig {
            family: Family::BetaSymmetric,
            grid: vec![1.0, 2.0],
            bits: 3,
            samples: 1000,
            seed: 3,
        };
        let res = run_sweep(&cfg).unwrap();
        let mut buf = Vec::new();
        res.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "param,rho12_theory,rho13_theory,rho23_theory,rho12_emp,rho13_emp,rho23_emp,p1,p2,p3"
        );
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), 10);
        assert_eq!(&first[1..4], &["0", "0", "0"]);
        let second: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(second[1], "-0.375000000");
    }

    #[test]
    fn two_bit_header() {
        let cfg = SweepConfig {
            family: Family::BetaSymmetric,
            grid: vec![2.0],
            bits: 2,
            samples: 100,
            seed: 0,
        };
        let res = run_sweep(&cfg).unwrap();
        assert_eq!(res.header(), "param,rho12_theory,rho12_emp,p1,p2");
        assert!((res.rows[0].theory.correlation(1, 2).unwrap() + 0.375).abs() < 1e-10);
    }

    #[test]
    fn example1_values() {
        let (p1, p2) = example1_point(0.375).unwrap();
        assert!((p1 - 0.5).abs() < 1e-15 && (p2 - 0.5).abs() < 1e-15);
        assert!(example1_point(0.8).is_err());
        assert!(example1_curve(&[]).is_err());
    }
}
