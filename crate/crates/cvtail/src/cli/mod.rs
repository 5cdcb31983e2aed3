//! The `cvtail` command-line interface.
//!
//! Subcommands: `cvplot`, `test`, `tables`, `fit-gpd`, `returns`. Machine
//! output goes to stdout (or `--out`); diagnostics go to stderr; the exit
//! status is zero exactly when a report was produced.

pub mod commands;
pub mod input;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::distributions::TailModel;
use crate::empirics::Statistic;
use crate::{Error, Result};
use commands::{PMethod, TableKind, TablesResult};
use input::{InputOptions, Part, RawInput};

#[derive(Debug, Parser)]
#[command(
    name = "cvtail",
    version,
    about = "Residual-CV tail diagnostics: CV-plots, exponentiality tests, Monte Carlo tables, GPD fits"
)]
struct Cli {
    /// Seed for every randomized step (synthetic data and simulations)
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Replicates for simulations (default: 10000 for test and power
    /// tables, 50000 for critical tables)
    #[arg(long, global = true)]
    reps: Option<usize>,
    /// Output format for reports and tables
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write machine output to a file instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// CV-plot data with simulated pointwise null bands (CSV)
    Cvplot(CvplotArgs),
    /// Test exponentiality of a sample and report a p-value
    Test(TestArgs),
    /// Simulate critical-value or power tables
    Tables(TablesArgs),
    /// Fit a generalized Pareto distribution by maximum likelihood
    FitGpd(FitGpdArgs),
    /// Compute log-returns of a price series and split the parts
    Returns(ReturnsArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Input file with one positive value per line ('-' reads stdin);
    /// with --prices, a date,price CSV
    #[arg(long, value_name = "FILE", conflicts_with = "synthetic")]
    input: Option<String>,
    /// Built-in generator: exp:n=N[,mu=M] | gpd:n=N,xi=X[,beta=B] | abst:n=N,nu=V
    #[arg(long, value_name = "SPEC")]
    synthetic: Option<String>,
    /// Treat the input as a date,price CSV and analyze its log-returns
    #[arg(long, requires = "input")]
    prices: bool,
    /// Which return part to analyze when --prices is set
    #[arg(long, value_enum, default_value_t = Part::Pos)]
    part: Part,
    /// Use only the K largest values as the working sample
    #[arg(long, value_name = "K")]
    largest: Option<usize>,
}

impl InputArgs {
    fn to_options(&self, seed: u64) -> Result<InputOptions> {
        let raw = match (&self.input, &self.synthetic) {
            (Some(path), None) if path == "-" => RawInput::Stdin,
            (Some(path), None) => RawInput::File(PathBuf::from(path)),
            (None, Some(spec)) => {
                let (model, n) = input::parse_synthetic(spec)?;
                RawInput::Synthetic { model, n }
            }
            (None, None) => {
                return Err(Error::Config("provide --input FILE or --synthetic SPEC".into()))
            }
            (Some(_), Some(_)) => unreachable!("clap enforces the conflict"),
        };
        Ok(InputOptions {
            raw,
            prices: self.prices,
            part: self.part,
            largest: self.largest,
            seed,
        })
    }
}

#[derive(Debug, Args)]
struct CvplotArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Smallest tail size plotted
    #[arg(long, default_value_t = crate::empirics::DEFAULT_MIN_TAIL)]
    min_tail: usize,
    /// Pointwise coverage of the null bands (0 collapses both bands to
    /// the simulated median)
    #[arg(long, default_value_t = 0.9)]
    band_level: f64,
    /// Replicates for the band simulation
    #[arg(long, default_value_t = 2000)]
    band_reps: usize,
}

#[derive(Debug, Args)]
struct TestArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Statistic: tm (with --m), t0..t9, cv, mw, su
    #[arg(long)]
    stat: String,
    /// Order of the dyadic statistic when --stat tm
    #[arg(long)]
    m: Option<usize>,
    /// P-value back-end (asym and approx apply to T_m only)
    #[arg(long, value_enum, default_value_t = PMethod::Mc)]
    p_method: PMethod,
    /// Smallest dyadic sub-sample allowed for T_m
    #[arg(long, default_value_t = crate::empirics::DEFAULT_MIN_TAIL)]
    min_tail: usize,
}

#[derive(Debug, Args)]
struct TablesArgs {
    /// Which table to simulate
    #[arg(long, value_enum)]
    which: TableKind,
    /// Comma list of statistics (tm expands over --m)
    #[arg(long, default_value = "t0,t1,t2,t3,t4")]
    stat: String,
    /// Comma list of sample sizes
    #[arg(long)]
    n: Option<String>,
    /// Comma list of orders, used when --stat contains "tm"
    #[arg(long)]
    m: Option<String>,
    /// Comma list of quantile levels, percent or probability
    #[arg(long, default_value = "90,95,99")]
    levels: String,
    /// Critical points of the large-sample mixture law (T_m only, no --n)
    #[arg(long)]
    asymptotic: bool,
    /// Alternative model for power tables, e.g. gpd:xi=0.25 or abst:nu=4
    #[arg(long, value_name = "SPEC")]
    alt: Option<String>,
    /// Significance level for power tables
    #[arg(long, default_value_t = 0.05)]
    level: f64,
    /// Replicates for critical rows simulated inside a power run
    #[arg(long, default_value_t = 50_000)]
    table_reps: usize,
    /// Reuse critical points from a CSV produced by `tables --which critical`
    #[arg(long, value_name = "FILE")]
    critical: Option<PathBuf>,
    /// Smallest dyadic sub-sample allowed for T_m
    #[arg(long, default_value_t = crate::empirics::MIN_TAIL_FLOOR)]
    min_tail: usize,
}

#[derive(Debug, Args)]
struct FitGpdArgs {
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Debug, Args)]
struct ReturnsArgs {
    /// Price series as date,price CSV ('-' reads stdin)
    #[arg(long, value_name = "FILE")]
    input: String,
    /// Which values to emit
    #[arg(long, value_enum, default_value_t = Part::Raw)]
    part: Part,
}

/// Parse args from the process environment, run, and report the exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Cvplot(args) => {
            let input = args.input.to_options(cli.seed)?;
            let opts = commands::CvplotOptions {
                min_tail: args.min_tail,
                band_level: args.band_level,
                band_reps: args.band_reps,
                seed: cli.seed,
            };
            let csv = commands::run_cvplot(&input, &opts)?;
            emit(&cli.out, &csv)
        }
        Command::Test(args) => {
            let input = args.input.to_options(cli.seed)?;
            let statistic = resolve_statistic(&args.stat, args.m)?;
            let opts = commands::TestOptions {
                statistic,
                p_method: args.p_method,
                reps: cli.reps.unwrap_or(10_000),
                min_tail: args.min_tail,
                seed: cli.seed,
            };
            let report = commands::run_test(&input, &opts)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            let rendered = match cli.format {
                Format::Json => report.to_json_string(),
                Format::Text => report.to_text(),
                Format::Csv => report.to_csv()?,
            };
            emit(&cli.out, &rendered)
        }
        Command::Tables(args) => {
            let opts = commands::TablesOptions {
                which: args.which,
                statistics: parse_statistic_list(&args.stat, args.m.as_deref())?,
                ns: match &args.n {
                    Some(list) => parse_usize_list(list)?,
                    None => Vec::new(),
                },
                asymptotic: args.asymptotic,
                levels: parse_levels(&args.levels)?,
                alternative: args.alt.as_deref().map(str::parse::<TailModel>).transpose()?,
                level: args.level,
                reps: cli.reps.unwrap_or(match args.which {
                    TableKind::Critical => 50_000,
                    TableKind::Power => 10_000,
                }),
                table_reps: args.table_reps,
                critical_file: args.critical.clone(),
                min_tail: args.min_tail,
                seed: cli.seed,
            };
            let result = commands::run_tables(&opts)?;
            let rendered = match (cli.format, &result) {
                (Format::Json, TablesResult::Critical(t)) => pretty_json(&t.to_json()),
                (Format::Json, TablesResult::Power(t)) => pretty_json(&t.to_json()),
                (_, TablesResult::Critical(t)) => {
                    let mut buf = Vec::new();
                    t.to_csv(&mut buf)?;
                    String::from_utf8(buf).expect("csv output is utf-8")
                }
                (_, TablesResult::Power(t)) => {
                    let mut buf = Vec::new();
                    t.to_csv(&mut buf)?;
                    String::from_utf8(buf).expect("csv output is utf-8")
                }
            };
            emit(&cli.out, &rendered)
        }
        Command::FitGpd(args) => {
            let input = args.input.to_options(cli.seed)?;
            let report = commands::run_fit_gpd(&input, cli.seed)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            let rendered = match cli.format {
                Format::Json => report.to_json_string(),
                Format::Text => report.to_text(),
                Format::Csv => report.to_csv()?,
            };
            emit(&cli.out, &rendered)
        }
        Command::Returns(args) => {
            let raw = if args.input == "-" {
                RawInput::Stdin
            } else {
                RawInput::File(PathBuf::from(&args.input))
            };
            let summary = commands::run_returns(&raw)?;
            let parts = &summary.parts;
            eprintln!(
                "returns: {} total, {} positive, {} negative, {} zeros",
                summary.returns.len(),
                parts.positive.len(),
                parts.negative.len(),
                parts.zeros
            );
            let chosen: &[f64] = match args.part {
                Part::Raw => &summary.returns,
                Part::Pos => &parts.positive,
                Part::Neg => &parts.negative,
            };
            let rendered = match cli.format {
                Format::Json => pretty_json(&serde_json::json!({
                    "schema": "cvtail-returns/1",
                    "total": summary.returns.len(),
                    "positive_count": parts.positive.len(),
                    "negative_count": parts.negative.len(),
                    "zeros": parts.zeros,
                    "part": args.part.label(),
                    "values": chosen,
                })),
                Format::Text => {
                    let mut s = String::new();
                    for v in chosen {
                        s.push_str(&format!("{v}\n"));
                    }
                    s
                }
                Format::Csv => {
                    let mut s = String::from("value\n");
                    for v in chosen {
                        s.push_str(&format!("{v}\n"));
                    }
                    s
                }
            };
            emit(&cli.out, &rendered)
        }
    }
}

fn pretty_json(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json serialization");
    s.push('\n');
    s
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

/// Resolve `--stat`/`--m` into a statistic; `tm` needs `--m`, a literal
/// `t<k>` must not contradict it, and `cv`/`mw`/`su` take no order.
fn resolve_statistic(token: &str, m: Option<usize>) -> Result<Statistic> {
    if token.eq_ignore_ascii_case("tm") {
        let m = m.ok_or_else(|| Error::Config("--stat tm requires --m".into()))?;
        return Ok(Statistic::Tm(m));
    }
    let statistic: Statistic = token.parse()?;
    match (statistic, m) {
        (Statistic::Tm(k), Some(m)) if k != m => Err(Error::Config(format!(
            "--stat {token} conflicts with --m {m}"
        ))),
        (Statistic::Tm(_), _) => Ok(statistic),
        (other, Some(_)) => Err(Error::Config(format!(
            "--m does not apply to statistic {}",
            other.token()
        ))),
        (other, None) => Ok(other),
    }
}

fn parse_statistic_list(tokens: &str, m_list: Option<&str>) -> Result<Vec<Statistic>> {
    let mut out = Vec::new();
    for token in tokens.split(',').filter(|t| !t.trim().is_empty()) {
        let token = token.trim();
        if token.eq_ignore_ascii_case("tm") {
            let list = m_list
                .ok_or_else(|| Error::Config("--stat tm in a table needs --m, e.g. --m 0,1,2".into()))?;
            for m in parse_usize_list(list)? {
                out.push(Statistic::Tm(m));
            }
        } else {
            out.push(token.parse()?);
        }
    }
    if out.is_empty() {
        return Err(Error::Config("no statistics requested".into()));
    }
    Ok(out)
}

fn parse_usize_list(list: &str) -> Result<Vec<usize>> {
    list.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::invalid(format!("bad integer '{t}' in list")))
        })
        .collect()
}

/// Levels accept both percents (`95`) and probabilities (`0.95`).
fn parse_levels(list: &str) -> Result<Vec<f64>> {
    let levels: Vec<f64> = list
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| -> Result<f64> {
            let v: f64 = t
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("bad level '{t}'")))?;
            Ok(if v > 1.0 { v / 100.0 } else { v })
        })
        .collect::<Result<Vec<_>>>()?;
    if levels.is_empty() {
        return Err(Error::invalid("no levels given"));
    }
    Ok(levels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statistic_resolution() {
        assert_eq!(resolve_statistic("tm", Some(3)).unwrap(), Statistic::Tm(3));
        assert_eq!(resolve_statistic("t2", None).unwrap(), Statistic::Tm(2));
        assert_eq!(resolve_statistic("t2", Some(2)).unwrap(), Statistic::Tm(2));
        assert!(resolve_statistic("t2", Some(3)).is_err());
        assert!(resolve_statistic("tm", None).is_err());
        assert!(resolve_statistic("cv", Some(1)).is_err());
    }

    #[test]
    fn list_parsing() {
        assert_eq!(
            parse_statistic_list("t0,cv", None).unwrap(),
            vec![Statistic::Tm(0), Statistic::Cv]
        );
        assert_eq!(
            parse_statistic_list("tm", Some("0,2")).unwrap(),
            vec![Statistic::Tm(0), Statistic::Tm(2)]
        );
        assert!(parse_statistic_list("tm", None).is_err());
        assert_eq!(parse_levels("90,95").unwrap(), vec![0.9, 0.95]);
        assert_eq!(parse_levels("0.5").unwrap(), vec![0.5]);
        assert_eq!(parse_usize_list("50,100").unwrap(), vec![50, 100]);
    }

    #[test]
    fn clap_wiring_parses() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
