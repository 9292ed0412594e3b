//! `bitexpand`: expansions, exact bit statistics, sampling and sweeps.
//!
//! Exit codes: 0 success, 2 usage error, 3 numerical failure, 1 I/O error.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bitexpand_core::distributions::{parse_key_values, KeyValues};
use bitexpand_core::experiment::{
    example1_curve, run_sweep, write_example1_csv, Family, Grid, SweepConfig,
};
use bitexpand_core::{draw_bits, estimate_streaming, exact, expand, DistributionModel, Error};
use clap::{Parser, Subcommand};

/// Default threshold on the spread of pairwise correlations below which a
/// sweep point is reported as equicorrelated.
const EQUICORRELATION_THRESHOLD: f64 = 0.05;

#[derive(Debug, Parser)]
#[command(
    name = "bitexpand",
    version,
    about = "Bernoulli bits from binary expansions of [0,1] variates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the n-bit truncated binary expansion of x.
    Expand { x: f64, n: u32 },

    /// Exact and sampled pairwise bit correlations over a parameter grid.
    Sweep(SweepArgs),

    /// Pr[B1 = 1] and Pr[B2 = 1] for trapezoids with plateau [c, c + 1/4].
    Example1 {
        /// `a,b,c` or `start:stop:count`; defaults to 31 points on [0, 0.75].
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Exact bit statistics of one distribution.
    Stats {
        /// Config fragment, e.g. `kind=beta;alpha=2;beta=2`.
        #[arg(long)]
        dist: String,
        #[arg(long, default_value_t = 3)]
        bits: u32,
        /// Also write the pairwise table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },

    /// Draw samples and export raw bits, one '0'/'1' line per draw.
    Sample {
        #[arg(long)]
        dist: String,
        #[arg(long, default_value_t = 3)]
        bits: u32,
        #[arg(long)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print empirical statistics to stderr as well.
        #[arg(long)]
        summary: bool,
    },
}

#[derive(Debug, clap::Args)]
struct SweepArgs {
    /// beta-symmetric | trapezoid-symmetric | trapezoid-C | custom
    #[arg(long)]
    family: Option<String>,
    /// `a,b,c` or `start:stop:count`; each family has a default.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    bits: Option<u32>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat key=value file; flags take precedence over it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model template for the custom family.
    #[arg(long)]
    dist: Option<String>,
    /// Model key the custom family's grid values are written to.
    #[arg(long)]
    param: Option<String>,
    #[arg(long)]
    equicorrelation_threshold: Option<f64>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Quadrature { .. } => Failure::Numerical(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Expand { x, n } => {
            let bits = expand(x, n)?;
            println!("{bits}");
            Ok(())
        }
        Command::Sweep(args) => sweep(args),
        Command::Example1 { grid, out } => {
            let grid = match grid {
                Some(spec) => spec.parse::<Grid>()?.0,
                None => bitexpand_core::experiment::default_c_grid(),
            };
            let curve = example1_curve(&grid)?;
            with_output(out.as_deref(), |w| write_example1_csv(&curve, w))
        }
        Command::Stats { dist, bits, csv } => {
            let model: DistributionModel = dist.parse()?;
            let stats = exact::statistics(&model, bits)?;
            println!("{model}");
            print!("{stats}");
            if let Some(path) = csv {
                with_output(Some(&path), |w| write_stats_csv(&stats, w))?;
            }
            Ok(())
        }
        Command::Sample {
            dist,
            bits,
            count,
            seed,
            out,
            summary,
        } => {
            let model: DistributionModel = dist.parse()?;
            let run = draw_bits(&model, bits, count, seed)?;
            with_output(out.as_deref(), |w| run.write_bits(w))?;
            if summary {
                let stats = estimate_streaming(&model, bits, count, seed)?;
                eprint!("{stats}");
            }
            Ok(())
        }
    }
}

fn with_output<F>(path: Option<&Path>, write: F) -> Result<(), Failure>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match path {
        Some(p) => {
            let mut w = BufWriter::new(
                File::create(p)
                    .map_err(|e| Failure::Io(format!("cannot create {}: {e}", p.display())))?,
            );
            write(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn write_stats_csv(stats: &bitexpand_core::BitStatistics, w: &mut dyn Write) -> io::Result<()> {
    use bitexpand_core::experiment::format_sig;
    writeln!(w, "i,j,p_i,p_j,joint11,cov,rho")?;
    for (i, j) in stats.pairs() {
        writeln!(
            w,
            "{i},{j},{},{},{},{},{}",
            format_sig(stats.marginal(i)),
            format_sig(stats.marginal(j)),
            format_sig(stats.joint(i, j)),
            format_sig(stats.covariance(i, j)),
            format_sig(stats.correlation(i, j).unwrap_or(f64::NAN)),
        )?;
    }
    Ok(())
}

fn parse_flag<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, Failure> {
    value
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("`{key}`: cannot parse `{value}`")))
}

/// Flag value if given, else the config file's, else `None`.
fn pick<T: std::str::FromStr>(
    flag: Option<T>,
    file: &KeyValues,
    key: &str,
) -> Result<Option<T>, Failure> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => file.get(key).map(|v| parse_flag(key, v)).transpose(),
    }
}

fn sweep(args: SweepArgs) -> Result<(), Failure> {
    let file = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            parse_key_values(&text)?
        }
        None => KeyValues::default(),
    };

    let family_name: String = pick(args.family, &file, "family")?
        .ok_or_else(|| Failure::Usage("--family is required".into()))?;
    let family = if family_name.eq_ignore_ascii_case("custom") {
        let mut template = file.clone();
        if let Some(fragment) = &args.dist {
            for key in [
                "kind",
                "alpha",
                "beta",
                "c",
                "d",
                "delta",
                "breakpoints",
                "densities",
            ] {
                if let Some(v) = parse_key_values(fragment)?.get(key) {
                    template.set(key, v);
                }
            }
        }
        let param: String = pick(args.param, &file, "param")?
            .ok_or_else(|| Failure::Usage("the custom family needs --param".into()))?;
        Family::Custom { template, param }
    } else {
        family_name.parse::<Family>()?
    };

    let mut config = SweepConfig::new(family);
    if let Some(spec) = pick::<String>(args.grid, &file, "grid")? {
        config.grid = spec.parse::<Grid>()?.0;
    }
    if let Some(bits) = pick(args.bits, &file, "bits")? {
        config.bits = bits;
    }
    if let Some(samples) = pick(args.samples, &file, "samples")? {
        config.samples = samples;
    }
    if let Some(seed) = pick(args.seed, &file, "seed")? {
        config.seed = seed;
    }
    let out: Option<PathBuf> = pick(args.out, &file, "out")?;
    let threshold = pick(args.equicorrelation_threshold, &file, "threshold")?
        .unwrap_or(EQUICORRELATION_THRESHOLD);

    config.validate()?;
    let result = run_sweep(&config).map_err(|e| {
        let msg = e.to_string();
        match e.source {
            Error::Quadrature { .. } => Failure::Numerical(msg),
            _ => Failure::Usage(msg),
        }
    })?;
    with_output(out.as_deref(), |w| result.write_csv(w))?;

    let equi: Vec<String> = result
        .rows
        .iter()
        .filter(|r| r.theory_spread().is_some_and(|s| s < threshold))
        .map(|r| r.param.to_string())
        .collect();
    if !equi.is_empty() {
        eprintln!(
            "equicorrelated points (theoretical spread < {threshold}): {}",
            equi.join(", ")
        );
    }
    Ok(())
}
