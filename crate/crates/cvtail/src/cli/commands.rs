//! Command implementations, callable in-process; the clap layer in the
//! parent module only parses flags and renders outputs.

use std::path::PathBuf;

use crate::asymptotics::{build_sigma, eigenvalues, moment_match, sample_asymptotic_t};
use crate::cli::input::{load_sample, log_returns, parse_prices, InputOptions, RawInput, SplitParts};
use crate::cli::report::{GpdFitSection, Report};
use crate::distributions::TailModel;
use crate::empirics::{cv_curve, statistic_t_m, Statistic, TestReport};
use crate::gpdfit::fit_gpd_ml;
use crate::montecarlo::{
    asymptotic_critical_row, cv_plot_bands, empirical_pvalue, power_estimate,
    simulate_critical_points, CriticalTable, PowerRow, PowerTable, SimConfig,
};
use crate::rng::RandomSource;
use crate::{Error, Result};

/// Sample sizes below which the large-sample p-value methods are flagged.
const LARGE_SAMPLE_N: usize = 500;

/// P-value back-end for the `test` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PMethod {
    /// Finite-sample Monte Carlo under the exponential null.
    Mc,
    /// Simulation of the asymptotic mixture law (T_m only).
    Asym,
    /// Analytic chi-square approximation (T_m only).
    Approx,
}

#[derive(Debug, Clone)]
pub struct TestOptions {
    pub statistic: Statistic,
    pub p_method: PMethod,
    pub reps: usize,
    pub min_tail: usize,
    pub seed: u64,
}

/// Run one exponentiality test and assemble the report.
pub fn run_test(input: &InputOptions, opts: &TestOptions) -> Result<Report> {
    let loaded = load_sample(input)?;
    let sample = &loaded.sample;
    let n = sample.n();
    let mut warnings = loaded.warnings;

    let mut test = match opts.statistic {
        Statistic::Tm(m) => {
            let tm = statistic_t_m(sample, m, opts.min_tail)?;
            TestReport::new(opts.statistic, tm.value, n).with_threshold_cvs(tm.threshold_cvs)
        }
        stat => TestReport::new(stat, stat.evaluate(sample, opts.min_tail)?, n),
    };

    let reps_used;
    match opts.p_method {
        PMethod::Mc => {
            let config = SimConfig::new(opts.statistic, n, opts.reps, opts.seed)
                .with_min_tail(opts.min_tail);
            let p = empirical_pvalue(&config, test.observed, opts.statistic.sidedness())?;
            test = test.with_p_value(p, crate::empirics::PValueMethod::MonteCarlo)?;
            reps_used = Some(opts.reps);
        }
        PMethod::Asym => {
            let m = require_tm(opts.statistic, "asym")?;
            if n < LARGE_SAMPLE_N {
                warnings.push(large_sample_warning(n));
            }
            let spectrum = eigenvalues(&build_sigma(m)?)?;
            let dist = sample_asymptotic_t(&spectrum, opts.reps, RandomSource::new(opts.seed), None)?;
            let p = (1.0 + dist.count_at_or_above(test.observed) as f64) / (opts.reps as f64 + 1.0);
            test = test.with_p_value(p, crate::empirics::PValueMethod::AsymptoticSim)?;
            reps_used = Some(opts.reps);
        }
        PMethod::Approx => {
            let m = require_tm(opts.statistic, "approx")?;
            if n < LARGE_SAMPLE_N {
                warnings.push(large_sample_warning(n));
            }
            let approx = moment_match(&eigenvalues(&build_sigma(m)?)?);
            let p = crate::asymptotics::approx_pvalue(test.observed, &approx);
            test = test.with_p_value(p, crate::empirics::PValueMethod::Chi2Approx)?;
            reps_used = None;
        }
    }

    let mut report = Report::new(opts.seed, reps_used, loaded.digest);
    report.tests.push(test);
    report.warnings = warnings;
    Ok(report)
}

fn require_tm(statistic: Statistic, method: &str) -> Result<usize> {
    match statistic {
        Statistic::Tm(m) => Ok(m),
        other => Err(Error::Config(format!(
            "p-method '{method}' is only available for T_m statistics, not {}",
            other.token()
        ))),
    }
}

fn large_sample_warning(n: usize) -> String {
    format!("large-sample approximation used for n={n} (< {LARGE_SAMPLE_N}); prefer the mc p-method")
}

#[derive(Debug, Clone)]
pub struct CvplotOptions {
    pub min_tail: usize,
    pub band_level: f64,
    pub band_reps: usize,
    pub seed: u64,
}

/// CV-plot data as CSV: `k,threshold,tail_count,cv,band_lo,band_hi`.
pub fn run_cvplot(input: &InputOptions, opts: &CvplotOptions) -> Result<String> {
    let loaded = load_sample(input)?;
    let mut curve = cv_curve(&loaded.sample, opts.min_tail)?;
    let bands = cv_plot_bands(
        loaded.sample.n(),
        opts.min_tail,
        opts.band_level,
        opts.band_reps,
        RandomSource::new(opts.seed),
        None,
    )?;
    curve.attach_bands(bands)?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "threshold", "tail_count", "cv", "band_lo", "band_hi"])
        .map_err(|e| Error::Config(format!("csv: {e}")))?;
    let bands = curve.bands.as_ref().expect("bands were just attached");
    for (entry, band) in curve.entries.iter().zip(&bands.entries) {
        w.write_record([
            entry.k.to_string(),
            format!("{}", entry.threshold),
            entry.tail_count.to_string(),
            format!("{}", entry.cv),
            format!("{}", band.1),
            format!("{}", band.2),
        ])
        .map_err(|e| Error::Config(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TableKind {
    Critical,
    Power,
}

#[derive(Debug, Clone)]
pub struct TablesOptions {
    pub which: TableKind,
    pub statistics: Vec<Statistic>,
    pub ns: Vec<usize>,
    /// Critical points of the large-sample mixture law instead of a
    /// finite n (T_m only).
    pub asymptotic: bool,
    /// Quantile levels for critical tables.
    pub levels: Vec<f64>,
    /// Alternative model for power tables.
    pub alternative: Option<TailModel>,
    /// Significance level for power tables.
    pub level: f64,
    pub reps: usize,
    /// Replicates for critical rows simulated on the fly in power mode.
    pub table_reps: usize,
    /// Reuse critical points from a CSV written by a previous run.
    pub critical_file: Option<PathBuf>,
    pub min_tail: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TablesResult {
    Critical(CriticalTable),
    Power(PowerTable),
}

pub fn run_tables(opts: &TablesOptions) -> Result<TablesResult> {
    match opts.which {
        TableKind::Critical => run_critical_tables(opts).map(TablesResult::Critical),
        TableKind::Power => run_power_tables(opts).map(TablesResult::Power),
    }
}

fn run_critical_tables(opts: &TablesOptions) -> Result<CriticalTable> {
    let mut table = CriticalTable::new();
    if opts.asymptotic {
        for &stat in &opts.statistics {
            let m = match stat {
                Statistic::Tm(m) => m,
                other => {
                    return Err(Error::Config(format!(
                        "asymptotic critical points exist only for T_m, not {}",
                        other.token()
                    )))
                }
            };
            table.push(asymptotic_critical_row(m, &opts.levels, opts.reps, opts.seed, None)?);
        }
        return Ok(table);
    }
    if opts.ns.is_empty() {
        return Err(Error::Config("critical tables need --n (or --asymptotic)".into()));
    }
    for &stat in &opts.statistics {
        for &n in &opts.ns {
            let config = SimConfig::new(stat, n, opts.reps, opts.seed).with_min_tail(opts.min_tail);
            table.push(simulate_critical_points(&config, &opts.levels)?);
        }
    }
    Ok(table)
}

fn run_power_tables(opts: &TablesOptions) -> Result<PowerTable> {
    let alternative = opts
        .alternative
        .as_ref()
        .ok_or_else(|| Error::Config("power tables need --alt, e.g. --alt gpd:xi=0.25".into()))?;
    if opts.ns.is_empty() {
        return Err(Error::Config("power tables need --n".into()));
    }
    let critical = match &opts.critical_file {
        Some(path) => {
            let file = std::fs::File::open(path)?;
            CriticalTable::from_csv(std::io::BufReader::new(file))?
        }
        None => {
            // one null table row per (statistic, n), covering both tails
            let levels = [
                opts.level / 2.0,
                1.0 - opts.level / 2.0,
                1.0 - opts.level,
            ];
            let mut table = CriticalTable::new();
            for &stat in &opts.statistics {
                for &n in &opts.ns {
                    let config = SimConfig::new(stat, n, opts.table_reps, opts.seed)
                        .with_min_tail(opts.min_tail);
                    table.push(simulate_critical_points(&config, &levels)?);
                }
            }
            table
        }
    };
    let mut table = PowerTable::new();
    for &stat in &opts.statistics {
        for &n in &opts.ns {
            let config = SimConfig::new(stat, n, opts.reps, opts.seed).with_min_tail(opts.min_tail);
            let est = power_estimate(&config, alternative, opts.level, &critical)?;
            table.push(PowerRow {
                alternative: alternative.to_string(),
                statistic: stat,
                n,
                level: opts.level,
                power: est.power,
                std_err: est.std_err,
                reps: est.reps,
                seed: opts.seed,
            })?;
        }
    }
    Ok(table)
}

/// Run the GPD maximum-likelihood fit; a boundary solution is reported
/// with a warning rather than failing the command.
pub fn run_fit_gpd(input: &InputOptions, seed: u64) -> Result<Report> {
    let loaded = load_sample(input)?;
    let mut warnings = loaded.warnings;
    let (fit, boundary) = match fit_gpd_ml(&loaded.sample) {
        Ok(fit) => (fit, false),
        Err(Error::BoundarySolution(fit)) => {
            warnings.push("profile likelihood peaked on the search boundary; estimates are the best edge fit".into());
            (*fit, true)
        }
        Err(e) => return Err(e),
    };
    if fit.is_non_regular() {
        warnings.push(format!(
            "fitted xi={} exceeds 1; maximum likelihood is non-regular in this region",
            fit.xi
        ));
    }
    let mut report = Report::new(seed, None, loaded.digest);
    report.gpd_fit = Some(GpdFitSection { fit, boundary });
    report.warnings = warnings;
    Ok(report)
}

/// Output of the `returns` command.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnsSummary {
    pub returns: Vec<f64>,
    pub parts: SplitParts,
}

/// Read a price series and split its log-returns.
pub fn run_returns(raw: &RawInput) -> Result<ReturnsSummary> {
    let series = match raw {
        RawInput::File(path) => {
            let file = std::fs::File::open(path)?;
            parse_prices(std::io::BufReader::new(file))?
        }
        RawInput::Stdin => parse_prices(std::io::BufReader::new(std::io::stdin()))?,
        _ => return Err(Error::Config("the returns command reads a price file".into())),
    };
    let returns = log_returns(&series);
    let parts = crate::cli::input::split_parts(&returns);
    Ok(ReturnsSummary { returns, parts })
}
