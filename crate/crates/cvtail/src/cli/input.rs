//! Input ingestion: raw sample files, price-series CSV, and the built-in
//! synthetic generators.
//!
//! Text inputs ignore blank lines and `#` comments; every malformed or
//! non-positive numeric line is reported with its line number.

use std::io::BufRead;
use std::path::PathBuf;

use crate::distributions::TailModel;
use crate::empirics::Sample;
use crate::rng::RandomSource;
use crate::{Error, Result};

/// Stream tag separating synthetic data draws from any simulation that
/// shares the same user seed.
const STREAM_TAG_SYNTHETIC: u64 = 0x5359_4e54;

/// An ordered series of positive prices with optional date labels.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    prices: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl PriceSeries {
    pub fn new(prices: Vec<f64>, labels: Option<Vec<String>>) -> Result<Self> {
        if prices.len() < 2 {
            return Err(Error::invalid("a price series needs at least 2 points"));
        }
        if let Some(labels) = &labels {
            if labels.len() != prices.len() {
                return Err(Error::invalid("price labels must match prices in length"));
            }
        }
        if let Some(p) = prices.iter().find(|p| !p.is_finite() || **p <= 0.0) {
            return Err(Error::invalid(format!("prices must be positive, got {p}")));
        }
        Ok(Self { prices, labels })
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }
}

/// Daily log-returns `x_k = ln(P_k) - ln(P_{k-1})`.
pub fn log_returns(series: &PriceSeries) -> Vec<f64> {
    series
        .prices()
        .windows(2)
        .map(|w| w[1].ln() - w[0].ln())
        .collect()
}

/// Signed returns split into positive part, negated negative part, and a
/// count of exact zeros (excluded from both parts).
#[derive(Debug, Clone, PartialEq)]
pub struct SplitParts {
    pub positive: Vec<f64>,
    pub negative: Vec<f64>,
    pub zeros: usize,
}

pub fn split_parts(returns: &[f64]) -> SplitParts {
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    let mut zeros = 0;
    for &x in returns {
        if x > 0.0 {
            positive.push(x);
        } else if x < 0.0 {
            negative.push(-x);
        } else {
            zeros += 1;
        }
    }
    SplitParts {
        positive,
        negative,
        zeros,
    }
}

/// Which part of the return series to work on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Part {
    /// Positive returns.
    Pos,
    /// Negated negative returns.
    Neg,
    /// The signed returns themselves (only for the `returns` command).
    Raw,
}

impl Part {
    pub fn label(&self) -> &'static str {
        match self {
            Part::Pos => "pos",
            Part::Neg => "neg",
            Part::Raw => "raw",
        }
    }
}

/// Parse a one-value-per-line sample file.
pub fn parse_values<R: BufRead>(reader: R) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let line_no = idx + 1;
        let v: f64 = trimmed.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("expected a number, got '{trimmed}'"),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("non-finite value {v}"),
            });
        }
        if v <= 0.0 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("sample values must be positive, got {v}"),
            });
        }
        values.push(v);
    }
    Ok(values)
}

/// Parse a two-column `date,price` CSV (an optional header row is
/// skipped; `#` comments and blank lines ignored).
pub fn parse_prices<R: BufRead>(reader: R) -> Result<PriceSeries> {
    let mut prices = Vec::new();
    let mut labels = Vec::new();
    let mut seen_data = false;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let line_no = idx + 1;
        let mut fields = trimmed.split(',');
        let date = fields.next().unwrap_or("").trim();
        let price_str = match fields.next() {
            Some(p) => p.trim(),
            None => {
                return Err(Error::Parse {
                    line: line_no,
                    message: "expected two columns: date,price".into(),
                })
            }
        };
        if fields.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: "expected exactly two columns: date,price".into(),
            });
        }
        let price: f64 = match price_str.parse() {
            Ok(p) => p,
            Err(_) if !seen_data => continue, // header row
            Err(_) => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected a price, got '{price_str}'"),
                })
            }
        };
        if !price.is_finite() || price <= 0.0 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("prices must be positive, got {price}"),
            });
        }
        seen_data = true;
        prices.push(price);
        labels.push(date.to_string());
    }
    PriceSeries::new(prices, Some(labels))
}

/// Where the working sample comes from.
#[derive(Debug, Clone)]
pub enum RawInput {
    File(PathBuf),
    Stdin,
    Synthetic { model: TailModel, n: usize },
    /// Directly supplied values (used by in-process callers).
    Values(Vec<f64>),
}

/// Everything needed to produce a working sample.
#[derive(Debug, Clone)]
pub struct InputOptions {
    pub raw: RawInput,
    /// Input is a `date,price` CSV; analyze log-returns of it.
    pub prices: bool,
    /// Return part to analyze when `prices` is set.
    pub part: Part,
    /// Keep only the largest K values.
    pub largest: Option<usize>,
    /// Seed for synthetic generation.
    pub seed: u64,
}

/// Summary of the data a report was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct InputDigest {
    pub source: String,
    pub n: usize,
    pub min: f64,
    pub max: f64,
    pub zeros_dropped: usize,
}

pub struct LoadedSample {
    pub sample: Sample,
    pub digest: InputDigest,
    pub warnings: Vec<String>,
}

/// Parse `kind:n=...,param=...` into a model plus sample size.
pub fn parse_synthetic(spec: &str) -> Result<(TailModel, usize)> {
    let (kind, rest) = match spec.split_once(':') {
        Some((k, r)) => (k, r),
        None => {
            return Err(Error::invalid(format!(
                "synthetic spec '{spec}' needs parameters, e.g. exp:n=2000"
            )))
        }
    };
    let mut n = None;
    let mut params = Vec::new();
    for pair in rest.split(',').filter(|p| !p.trim().is_empty()) {
        match pair.split_once('=') {
            Some((k, v)) if k.trim() == "n" => {
                n = Some(v.trim().parse::<usize>().map_err(|_| {
                    Error::invalid(format!("bad sample size in synthetic spec: '{pair}'"))
                })?);
            }
            _ => params.push(pair),
        }
    }
    let n = n.ok_or_else(|| Error::invalid(format!("synthetic spec '{spec}' must set n")))?;
    let model: TailModel = format!("{kind}:{}", params.join(",")).parse()?;
    Ok((model, n))
}

fn read_lines(raw: &RawInput) -> Result<Box<dyn BufRead>> {
    match raw {
        RawInput::File(path) => {
            let file = std::fs::File::open(path)?;
            Ok(Box::new(std::io::BufReader::new(file)))
        }
        RawInput::Stdin => Ok(Box::new(std::io::BufReader::new(std::io::stdin()))),
        _ => unreachable!("read_lines is only called for file/stdin inputs"),
    }
}

fn source_label(opts: &InputOptions) -> String {
    match &opts.raw {
        RawInput::File(path) => format!("file:{}", path.display()),
        RawInput::Stdin => "stdin".into(),
        RawInput::Synthetic { model, n } => format!("synthetic:{model},n={n},seed={}", opts.seed),
        RawInput::Values(_) => "values".into(),
    }
}

/// Load, validate, and trim the working sample.
pub fn load_sample(opts: &InputOptions) -> Result<LoadedSample> {
    let mut warnings = Vec::new();
    let mut zeros_dropped = 0usize;

    let values: Vec<f64> = match &opts.raw {
        RawInput::Synthetic { model, n } => {
            if opts.prices {
                return Err(Error::Config("--prices cannot be combined with --synthetic".into()));
            }
            let source = RandomSource::new(opts.seed).tagged(STREAM_TAG_SYNTHETIC);
            model.sample(*n, source)?.values().to_vec()
        }
        RawInput::Values(values) => values.clone(),
        file_or_stdin => {
            let reader = read_lines(file_or_stdin)?;
            if opts.prices {
                let series = parse_prices(reader)?;
                let returns = log_returns(&series);
                let parts = split_parts(&returns);
                zeros_dropped = parts.zeros;
                match opts.part {
                    Part::Pos => parts.positive,
                    Part::Neg => parts.negative,
                    Part::Raw => {
                        return Err(Error::Config(
                            "--part raw is only valid for the returns command".into(),
                        ))
                    }
                }
            } else {
                parse_values(reader)?
            }
        }
    };

    if values.is_empty() {
        return Err(Error::invalid("input produced no positive values"));
    }
    let mut sample = Sample::new(values)?;

    if let Some(k) = opts.largest {
        if k == 0 {
            return Err(Error::invalid("--largest must be at least 1"));
        }
        if k >= sample.n() {
            if k > sample.n() {
                warnings.push(format!(
                    "--largest {k} exceeds the sample size {}; using the full sample",
                    sample.n()
                ));
            }
        } else {
            sample = sample.largest(k)?;
        }
    }

    let digest = InputDigest {
        source: source_label(opts),
        n: sample.n(),
        min: sample.min(),
        max: sample.max(),
        zeros_dropped,
    };
    Ok(LoadedSample {
        sample,
        digest,
        warnings,
    })
}
