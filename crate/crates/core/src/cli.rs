//! Command-line surface.
//!
//! Exit codes: 0 success, 1 validation, 2 I/O, 3 numeric domain.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::error::Error;
use crate::figures::{self, FigureConfig, FigureError};
use crate::ghost::{self, ScalingCase, TrialClass, GHOST_THRESHOLD};
use crate::numtheory::{self, Natural};
use crate::output::{self, OutputError, OutputFormat, ResultRow, Table};
use crate::spinsim;
use crate::sums::SumSpec;

#[derive(Debug, Parser)]
#[command(
    name = "gauss-factor",
    version,
    about = "Factoring with truncated, randomized and higher-order Gauss sums"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify every trial factor in a window.
    Scan(ScanArgs),
    /// Classify a single trial factor.
    Classify(ClassifyArgs),
    /// Smallest truncation suppressing |s_M(eps)| below the threshold.
    Suppression(SuppressionArgs),
    /// Required truncation per number against N^(1/2n).
    Scaling(ScalingArgs),
    /// Spin-1/2 pulse-sequence simulation over a window.
    Simulate(SimulateArgs),
    /// Emit the plot data for one of figures 1-5.
    ReproduceFigure(FigureArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StrategyArgs {
    /// Order n of the exponential sum.
    #[arg(long, default_value_t = 2)]
    pub order: u32,
    /// Truncation parameter M (terms m = 0..=M).
    #[arg(long)]
    pub truncation: Option<u64>,
    /// Use M = ceil(ln N).
    #[arg(long)]
    pub ln_truncation: bool,
    /// Evaluate the complete sum over all l residues.
    #[arg(long)]
    pub complete: bool,
    /// Number of randomly drawn terms.
    #[arg(long)]
    pub count: Option<u64>,
    /// Upper end of the range [0, m_max] the terms are drawn from.
    #[arg(long)]
    pub m_max: Option<u64>,
    /// Seed of the term draw.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Number to factor, in decimal.
    #[arg(long = "n")]
    pub n: String,
    /// Trial-factor window as l_min:l_max.
    #[arg(long)]
    pub window: String,
    #[command(flatten)]
    pub strategy: StrategyArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long = "n")]
    pub n: String,
    /// Trial factor.
    #[arg(long = "l")]
    pub l: String,
    #[command(flatten)]
    pub strategy: StrategyArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SuppressionArgs {
    /// Comma-separated epsilon values.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub epsilon: Vec<f64>,
    #[arg(long, default_value_t = 2)]
    pub order: u32,
    #[arg(long, default_value_t = GHOST_THRESHOLD)]
    pub threshold: f64,
    #[arg(long, default_value_t = ghost::DEFAULT_M_CAP)]
    pub cap: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    /// A case as N:l_min:l_max; repeat for several.
    #[arg(long = "case", required = true)]
    pub cases: Vec<String>,
    #[arg(long, default_value_t = 2)]
    pub order: u32,
    #[arg(long, default_value_t = GHOST_THRESHOLD)]
    pub threshold: f64,
    #[arg(long, default_value_t = 100_000)]
    pub cap: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long = "n")]
    pub n: String,
    #[arg(long)]
    pub window: String,
    #[command(flatten)]
    pub strategy: StrategyArgs,
    /// Flip angle per pulse, radians.
    #[arg(long)]
    pub theta: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// Figure number, 1 to 5.
    pub figure: u8,
    /// Directory receiving the data files.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Replacement for the shipped figure defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid --{field}: {reason}")]
    Validation { field: &'static str, reason: String },
    #[error("{0}")]
    Io(String),
    #[error("{context}: {source}")]
    Numeric { context: String, source: Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } => 1,
            CliError::Io(_) => 2,
            CliError::Numeric { .. } => 3,
        }
    }

    fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        CliError::Validation {
            field,
            reason: reason.into(),
        }
    }
}

impl From<OutputError> for CliError {
    fn from(e: OutputError) -> Self {
        match e {
            OutputError::Empty | OutputError::Parse { .. } => CliError::invalid("output", e.to_string()),
            OutputError::Io { .. } => CliError::Io(e.to_string()),
        }
    }
}

fn numeric(context: impl Into<String>) -> impl FnOnce(Error) -> CliError {
    let context = context.into();
    move |source| CliError::Numeric { context, source }
}

fn parse_natural(field: &'static str, s: &str) -> Result<Natural, CliError> {
    s.parse()
        .map_err(|_| CliError::invalid(field, format!("{s:?} is not a non-negative decimal integer")))
}

pub fn parse_window(s: &str) -> Result<(Natural, Natural), CliError> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| CliError::invalid("window", format!("{s:?} is not of the form l_min:l_max")))?;
    let lo = parse_natural("window", lo)?;
    let hi = parse_natural("window", hi)?;
    if lo.to_u64().is_some_and(|v| v < 2) || lo > hi {
        return Err(CliError::invalid(
            "window",
            format!("need 2 <= l_min <= l_max, got {lo}:{hi}"),
        ));
    }
    Ok((lo, hi))
}

impl StrategyArgs {
    pub fn to_spec(&self, n: &Natural) -> Result<SumSpec, CliError> {
        if self.order < 2 {
            return Err(CliError::invalid(
                "order",
                format!("must be at least 2, got {}", self.order),
            ));
        }
        let randomized = self.count.is_some() || self.m_max.is_some() || self.seed.is_some();
        let chosen = [self.truncation.is_some(), self.ln_truncation, self.complete, randomized]
            .iter()
            .filter(|&&b| b)
            .count();
        if chosen != 1 {
            return Err(CliError::invalid(
                "truncation",
                "give exactly one of --truncation, --ln-truncation, --complete or --count/--m-max/--seed",
            ));
        }
        if let Some(m) = self.truncation {
            return Ok(SumSpec::full(self.order, m).expect("order checked"));
        }
        if self.ln_truncation {
            return Ok(SumSpec::full(self.order, ghost::ln_truncation(n)).expect("order checked"));
        }
        if self.complete {
            if self.order != 2 {
                return Err(CliError::invalid("complete", "complete sums require --order 2"));
            }
            return Ok(SumSpec::complete());
        }
        let count = self
            .count
            .ok_or_else(|| CliError::invalid("count", "required for randomized sums"))?;
        let m_max = self
            .m_max
            .ok_or_else(|| CliError::invalid("m-max", "required for randomized sums"))?;
        let seed = self
            .seed
            .ok_or_else(|| CliError::invalid("seed", "required for randomized sums"))?;
        if count == 0 {
            return Err(CliError::invalid("count", "must be at least 1"));
        }
        if m_max == u64::MAX || count > m_max + 1 {
            return Err(CliError::invalid(
                "count",
                format!("cannot draw {count} distinct values from [0, {m_max}]"),
            ));
        }
        Ok(SumSpec::randomized(self.order, count, m_max, seed).expect("fields checked"))
    }
}

fn emit_rows(rows: &[ResultRow], out: &OutputArgs) -> Result<(), CliError> {
    Ok(output::emit(rows, out.format, out.output.as_deref())?)
}

fn emit_table(table: &Table, out: &OutputArgs) -> Result<(), CliError> {
    let text = table.render(out.format)?;
    Ok(output::write_text(&text, out.output.as_deref())?)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Scan(args) => scan(args),
        Command::Classify(args) => classify(args),
        Command::Suppression(args) => suppression(args),
        Command::Scaling(args) => scaling(args),
        Command::Simulate(args) => simulate(args),
        Command::ReproduceFigure(args) => reproduce_figure(args),
    }
}

fn scan(args: ScanArgs) -> Result<(), CliError> {
    let n = parse_natural("n", &args.n)?;
    let (lo, hi) = parse_window(&args.window)?;
    let spec = args.strategy.to_spec(&n)?;
    let trials = ghost::scan_window(&n, &lo, &hi, &spec).map_err(numeric(format!("scan N={n} window {lo}:{hi}")))?;
    let rows: Vec<ResultRow> = trials.iter().map(ResultRow::from_trial).collect();
    emit_rows(&rows, &args.output)
}

fn classify(args: ClassifyArgs) -> Result<(), CliError> {
    let n = parse_natural("n", &args.n)?;
    let l = parse_natural("l", &args.l)?;
    if l.to_u64().is_some_and(|v| v < 2) {
        return Err(CliError::invalid("l", "trial factor must be at least 2"));
    }
    let spec = args.strategy.to_spec(&n)?;
    let trial = ghost::classify(&n, &l, &spec).map_err(numeric(format!("classify N={n} l={l}")))?;
    emit_rows(&[ResultRow::from_trial(&trial)], &args.output)
}

fn suppression(args: SuppressionArgs) -> Result<(), CliError> {
    if args.order < 2 {
        return Err(CliError::invalid("order", "must be at least 2"));
    }
    if args.cap < 1 {
        return Err(CliError::invalid("cap", "must be at least 1"));
    }
    if let Some(bad) = args.epsilon.iter().find(|e| !e.is_finite() || **e == 0.0) {
        return Err(CliError::invalid("epsilon", format!("{bad} is zero or not finite")));
    }
    let results: Vec<Option<u64>> = args
        .epsilon
        .par_iter()
        .map(|&eps| {
            ghost::min_suppression_m(eps, args.order, args.threshold, args.cap)
                .map_err(numeric(format!("suppression eps={eps} n={}", args.order)))
        })
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(vec![
        "epsilon",
        "order",
        "threshold",
        "required_m",
        "inverse_sqrt_epsilon",
    ]);
    for (&eps, m) in args.epsilon.iter().zip(results) {
        table.push(vec![
            eps.into(),
            u64::from(args.order).into(),
            args.threshold.into(),
            m.into(),
            (1.0 / eps.abs().sqrt()).into(),
        ]);
    }
    emit_table(&table, &args.output)
}

fn parse_case(s: &str) -> Result<ScalingCase, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::invalid(
            "case",
            format!("{s:?} is not of the form N:l_min:l_max"),
        ));
    }
    let n = parse_natural("case", parts[0])?;
    let (lo, hi) =
        parse_window(&format!("{}:{}", parts[1], parts[2])).map_err(|e| CliError::invalid("case", e.to_string()))?;
    Ok(ScalingCase::new(n, lo, hi))
}

fn scaling(args: ScalingArgs) -> Result<(), CliError> {
    if args.order < 2 {
        return Err(CliError::invalid("order", "must be at least 2"));
    }
    if args.cap < 1 {
        return Err(CliError::invalid("cap", "must be at least 1"));
    }
    let cases = args
        .cases
        .iter()
        .map(|c| parse_case(c))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = ghost::scaling_study(&cases, args.order, args.threshold, args.cap)
        .map_err(numeric(format!("scaling study n={}", args.order)))?;
    let mut table = Table::new(vec!["n", "order", "worst_epsilon", "required_m", "root"]);
    for r in rows {
        table.push(vec![
            r.n.to_string().into(),
            u64::from(r.order).into(),
            r.worst_epsilon.into(),
            r.required_m.into(),
            r.root.into(),
        ]);
    }
    emit_table(&table, &args.output)
}

fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let n = parse_natural("n", &args.n)?;
    let (lo, hi) = parse_window(&args.window)?;
    let spec = args.strategy.to_spec(&n)?;
    if !(args.theta.is_finite() && args.theta > 0.0) {
        return Err(CliError::invalid("theta", "must be positive and finite"));
    }
    let len = (hi.as_biguint() - lo.as_biguint())
        .try_into()
        .ok()
        .and_then(|s: u64| s.checked_add(1))
        .ok_or_else(|| CliError::invalid("window", "too wide"))?;
    let rows = (0..len)
        .into_par_iter()
        .map(|offset| {
            let l = lo.add_u64(offset);
            let ctx = || format!("simulate N={n} l={l}");
            let reading = spinsim::simulate_experiment(&n, &l, &spec, args.theta).map_err(numeric(ctx()))?;
            let eps = numtheory::epsilon(&n, &l).map_err(numeric(ctx()))?;
            let terms = spec.term_indices(&l).map_err(numeric(ctx()))?.len() as u64;
            Ok(ResultRow {
                l: l.to_string(),
                epsilon: eps.value(),
                magnitude: reading.normalized_signal,
                class: TrialClass::from_magnitude(eps.is_zero(), reading.normalized_signal).to_string(),
                seed: spec.seed(),
                term_count: terms,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    emit_rows(&rows, &args.output)
}

fn reproduce_figure(args: FigureArgs) -> Result<(), CliError> {
    if !(1..=5).contains(&args.figure) {
        return Err(CliError::invalid(
            "figure",
            format!("expected 1 to 5, got {}", args.figure),
        ));
    }
    let config = match &args.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
            FigureConfig::from_toml(&text).map_err(|e| CliError::invalid("config", e.to_string()))?
        }
        None => FigureConfig::default(),
    };
    let files = figures::reproduce(args.figure, &config, args.format).map_err(|e| match e {
        FigureError::UnknownFigure(f) => CliError::invalid("figure", format!("expected 1 to 5, got {f}")),
        FigureError::Numeric { figure, source } => CliError::Numeric {
            context: format!("figure {figure}"),
            source,
        },
        FigureError::Output(e) => e.into(),
    })?;
    fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", args.out_dir.display())))?;
    for file in files {
        let path = args.out_dir.join(&file.name);
        output::write_text(&file.contents, Some(&path))?;
        log::info!("wrote {}", path.display());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strategy() -> StrategyArgs {
        StrategyArgs {
            order: 2,
            truncation: None,
            ln_truncation: false,
            complete: false,
            count: None,
            m_max: None,
            seed: None,
        }
    }

    #[test]
    fn window_parsing() {
        let (lo, hi) = parse_window("1299699:1299731").unwrap();
        assert_eq!((lo.to_string(), hi.to_string()), ("1299699".into(), "1299731".into()));
        for bad in ["5", "5:4", "1:4", "a:4", "3:-4"] {
            let err = parse_window(bad).unwrap_err();
            assert_eq!(err.exit_code(), 1);
            assert!(err.to_string().contains("--window"), "{err}");
        }
    }

    #[test]
    fn strategy_selection() {
        let n = Natural::from(15u64);
        assert!(strategy().to_spec(&n).is_err());
        let s = StrategyArgs {
            truncation: Some(4),
            ..strategy()
        };
        assert_eq!(s.to_spec(&n).unwrap(), SumSpec::full(2, 4).unwrap());
        let s = StrategyArgs {
            truncation: Some(4),
            complete: true,
            ..strategy()
        };
        assert!(s.to_spec(&n).is_err());
        let s = StrategyArgs {
            count: Some(10),
            m_max: Some(1000),
            ..strategy()
        };
        let err = s.to_spec(&n).unwrap_err();
        assert!(err.to_string().contains("--seed"));
        let s = StrategyArgs {
            count: Some(10),
            m_max: Some(5),
            seed: Some(1),
            ..strategy()
        };
        assert!(s.to_spec(&n).unwrap_err().to_string().contains("--count"));
        let s = StrategyArgs {
            ln_truncation: true,
            ..strategy()
        };
        assert_eq!(s.to_spec(&n).unwrap(), SumSpec::full(2, 3).unwrap());
        let s = StrategyArgs {
            complete: true,
            order: 3,
            ..strategy()
        };
        assert!(s.to_spec(&n).is_err());
        let s = StrategyArgs {
            truncation: Some(3),
            order: 1,
            ..strategy()
        };
        assert!(s.to_spec(&n).unwrap_err().to_string().contains("--order"));
    }

    #[test]
    fn case_parsing() {
        let c = parse_case("10403:2:101").unwrap();
        assert_eq!(c.n.to_string(), "10403");
        assert!(parse_case("10403:2").is_err());
        assert!(parse_case("10403:9:2").is_err());
    }

    #[test]
    fn error_codes() {
        assert_eq!(CliError::Io("x".into()).exit_code(), 2);
        let e = CliError::Numeric {
            context: "scan".into(),
            source: Error::ZeroModulus,
        };
        assert_eq!(e.exit_code(), 3);
    }
}
