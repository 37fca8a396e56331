//! Command-line flags and their validation.

use std::path::PathBuf;

use bethe_core::model::{ModelSpec, Spin};
use bethe_core::solver::SolveOptions;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "bethe", version, about = "Bethe equations of periodic spin chains: solutions, singular states, spectra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Find solutions by a multi-seed sweep, or polish one seed given with --roots.
    Solve(Common),
    /// Classify a root set as regular, singular physical or singular unphysical.
    Classify(Common),
    /// Twist expansion of a physical singular solution.
    Expand(Common),
    /// Check that a solution gives an eigenvector of the transfer matrix and the Hamiltonian.
    Verify(Common),
    /// Count solutions for every magnon number of a chain.
    Census(Common),
    /// Exact diagonalization of one sector, matched against Bethe energies.
    Spectrum(Common),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Xxx,
    Xxz,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, value_enum, default_value = "xxx")]
    pub model: ModelArg,
    /// Spin as `1/2`, `1`, `3/2`, ...
    #[arg(long, default_value = "1/2")]
    pub spin: String,
    /// Anisotropy of the xxz chain.
    #[arg(long, default_value_t = 0.5)]
    pub eta: f64,
    /// Number of sites.
    #[arg(short = 'N', long = "sites")]
    pub sites: usize,
    /// Number of magnons.
    #[arg(short = 'M', long = "magnons")]
    pub magnons: Option<usize>,
    /// Twist angle.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub beta: f64,
    /// Expansion order (expand).
    #[arg(long, default_value_t = 4)]
    pub order: usize,
    /// Decimal digits; 0 selects double precision.
    #[arg(long, env = "BETHE_PRECISION", default_value_t = 0)]
    pub precision: u32,
    /// Accepted scaled residual norm.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Newton seeds per sweep.
    #[arg(long)]
    pub seeds: Option<usize>,
    /// Random seed of the sweep.
    #[arg(long)]
    pub rng: Option<u64>,
    /// Comma-separated roots, e.g. `i/2,-i/2` or `0.3+0.1i`.
    #[arg(long, allow_hyphen_values = true)]
    pub roots: Option<String>,
    /// Write the result here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Solve,
    Classify,
    Expand,
    Verify,
    Census,
    Spectrum,
}

/// Validated parameters of one invocation.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: CommandKind,
    pub spec: ModelSpec,
    pub options: SolveOptions,
    pub precision_digits: u32,
    pub roots: Option<String>,
    pub order: usize,
    pub output_path: Option<PathBuf>,
    pub format: Format,
}

/// Largest accepted precision in decimal digits.
pub const MAX_DIGITS: u32 = 2000;

/// Parses and validates `argv`. The error is either a clap error (usage,
/// help or version) or a validation message.
pub fn parse_args<I, S>(argv: I) -> Result<RunConfig, ParseError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(ParseError::Clap)?;
    let (command, c) = match cli.command {
        Command::Solve(c) => (CommandKind::Solve, c),
        Command::Classify(c) => (CommandKind::Classify, c),
        Command::Expand(c) => (CommandKind::Expand, c),
        Command::Verify(c) => (CommandKind::Verify, c),
        Command::Census(c) => (CommandKind::Census, c),
        Command::Spectrum(c) => (CommandKind::Spectrum, c),
    };
    validate(command, c).map_err(ParseError::Invalid)
}

#[derive(Debug)]
pub enum ParseError {
    Clap(clap::Error),
    Invalid(String),
}

fn validate(command: CommandKind, c: Common) -> Result<RunConfig, String> {
    let spin: Spin = c.spin.parse().map_err(|e| format!("--spin: {e}"))?;
    let magnons = match (command, c.magnons) {
        (CommandKind::Census, m) => m.unwrap_or(0),
        (_, Some(m)) => m,
        (_, None) => return Err("-M is required for this command".into()),
    };
    let mut spec = match c.model {
        ModelArg::Xxx => ModelSpec::xxx(c.sites, magnons),
        ModelArg::Xxz => ModelSpec::xxz(c.sites, magnons, c.eta),
    }
    .with_spin(spin)
    .with_beta(c.beta);
    if command == CommandKind::Census {
        spec = spec.with_magnons(0);
    }
    spec.validate().map_err(|e| e.to_string())?;
    if command == CommandKind::Census && c.beta != 0.0 {
        return Err("census runs at zero twist; drop --beta".into());
    }
    if matches!(command, CommandKind::Classify | CommandKind::Verify) && c.roots.is_none() {
        return Err("--roots is required for this command".into());
    }
    if c.precision > MAX_DIGITS {
        return Err(format!("--precision must not exceed {MAX_DIGITS}"));
    }
    if c.order == 0 {
        return Err("--order must be at least 1".into());
    }
    let mut options = if command == CommandKind::Census {
        bethe_core::census::census_options()
    } else {
        SolveOptions::default()
    };
    if c.precision > 0 {
        let mut mp = bethe_core::numeric::with_digits(c.precision, SolveOptions::for_precision::<bethe_core::Mp>);
        mp.seed_count = options.seed_count;
        options = mp;
    }
    if let Some(tol) = c.tol {
        if !(tol > 0.0 && tol < 1.0) {
            return Err("--tol must lie in (0, 1)".into());
        }
        options = options.with_tolerance(tol);
    }
    if let Some(k) = c.seeds {
        if k == 0 {
            return Err("--seeds must be at least 1".into());
        }
        options = options.with_seeds(k);
    }
    if let Some(r) = c.rng {
        options = options.with_random_seed(r);
    }
    options.validate().map_err(|e| e.to_string())?;
    Ok(RunConfig {
        command,
        spec,
        options,
        precision_digits: c.precision,
        roots: c.roots,
        order: c.order,
        output_path: c.out,
        format: c.format,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok(args: &str) -> RunConfig {
        parse_args(std::iter::once("bethe").chain(args.split_whitespace())).unwrap()
    }

    fn err(args: &str) -> ParseError {
        parse_args(std::iter::once("bethe").chain(args.split_whitespace())).unwrap_err()
    }

    #[test]
    fn classify_example() {
        let c = ok("classify --model xxx --spin 1/2 -N 4 -M 2 --roots 0.5i,-0.5i");
        assert_eq!(c.command, CommandKind::Classify);
        assert_eq!(c.spec, ModelSpec::xxx(4, 2));
        assert_eq!(c.roots.as_deref(), Some("0.5i,-0.5i"));
        assert_eq!(c.format, Format::Json);
    }

    #[test]
    fn hyphenated_values() {
        let c = ok("classify -N 4 -M 2 --roots -i/2,i/2 --beta -0.1");
        assert_eq!(c.roots.as_deref(), Some("-i/2,i/2"));
        assert_eq!(c.spec.beta, -0.1);
    }

    #[test]
    fn census_needs_no_magnons() {
        let c = ok("census -N 3");
        assert_eq!(c.spec.magnons, 0);
        assert_eq!(c.options.seed_count, 1000);
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(err("solve -N 4 -M 3"), ParseError::Invalid(_)));
        assert!(matches!(err("solve -N 4"), ParseError::Invalid(_)));
        assert!(matches!(err("classify -N 4 -M 2"), ParseError::Invalid(_)));
        assert!(matches!(err("solve -N 4 -M 2 --spin 0"), ParseError::Invalid(_)));
        assert!(matches!(err("solve -N 4 -M 2 --tol 2"), ParseError::Invalid(_)));
        assert!(matches!(err("solve -N 4 -M 2 --seeds 0"), ParseError::Invalid(_)));
        assert!(matches!(err("expand -N 4 -M 2 --order 0"), ParseError::Invalid(_)));
        assert!(matches!(err("census -N 4 --beta 0.1"), ParseError::Invalid(_)));
        assert!(matches!(err("solve -N 4 -M 2 --model xxz --eta 0"), ParseError::Invalid(_)));
        assert!(matches!(err("solve -N 4 -M 2 --bogus"), ParseError::Clap(_)));
        assert!(matches!(err("frobnicate -N 4"), ParseError::Clap(_)));
    }

    #[test]
    fn precision_sets_tolerances() {
        let c = ok("expand -N 4 -M 2 --order 4 --precision 40");
        assert_eq!(c.precision_digits, 40);
        assert_eq!(c.options.tolerances.detection, 1e-20);
        let d = ok("solve -N 4 -M 2 --tol 1e-9 --seeds 50 --rng 7");
        assert_eq!(d.options.tolerances.solution, 1e-9);
        assert_eq!((d.options.seed_count, d.options.random_seed), (50, 7));
    }
}
