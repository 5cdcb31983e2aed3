//! Order statistics, the residual-CV curve, and the test statistics.
//!
//! Everything here is a pure function of an immutable [`Sample`]. The
//! empirical residual CV at a threshold `t` is the population-style
//! standard deviation of the excesses `X - t` over their mean, taken over
//! the strict exceedances `X > t`; it is exactly scale invariant, and at
//! `t = 0` it reduces to the plain sample coefficient of variation
//! (Greenwood form). The multi-threshold statistics aggregate squared
//! departures of the residual CV from 1 across dyadic sample quantiles.

use crate::{Error, Result};

/// Default smallest tail size shown on a CV-plot; smaller sub-samples
/// carry no relevant information.
pub const DEFAULT_MIN_TAIL: usize = 20;

/// Hard floor: a residual CV needs at least two exceedances.
pub const MIN_TAIL_FLOOR: usize = 2;

/// A validated sample: strictly positive, finite values, sorted ascending.
///
/// Order statistics are 1-based with the convention `x_(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    /// Validate and sort. Zeros, negatives and non-finite values are
    /// rejected; empty input is rejected.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("sample must not be empty"));
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::invalid(format!("non-finite sample value at position {i}: {v}")));
            }
            if *v <= 0.0 {
                return Err(Error::invalid(format!(
                    "sample values must be strictly positive; position {i} has {v}"
                )));
            }
        }
        values.sort_unstable_by(f64::total_cmp);
        Ok(Self { values })
    }

    /// Construction for sampler output, which is positive by construction.
    pub(crate) fn from_positive_unsorted(mut values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite() && *v > 0.0));
        values.sort_unstable_by(f64::total_cmp);
        Self { values }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Sorted values, ascending.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `x_(k)` for `k` in `0..=n`, with `x_(0) = 0`.
    pub fn order_stat(&self, k: usize) -> f64 {
        assert!(k <= self.n(), "order statistic index {k} out of range (n={})", self.n());
        if k == 0 {
            0.0
        } else {
            self.values[k - 1]
        }
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.n() - 1]
    }

    /// Sample median; for even `n` the midpoint of the two central order
    /// statistics.
    pub fn median(&self) -> f64 {
        let n = self.n();
        if n % 2 == 1 {
            self.values[n / 2]
        } else {
            0.5 * (self.values[n / 2 - 1] + self.values[n / 2])
        }
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.n() as f64
    }

    /// Number of strict exceedances `n(t) = #{x_j > t}`.
    pub fn count_exceeding(&self, t: f64) -> usize {
        self.n() - self.values.partition_point(|&x| x <= t)
    }

    /// Sub-sample of the `k` largest values.
    pub fn largest(&self, k: usize) -> Result<Sample> {
        if k == 0 || k > self.n() {
            return Err(Error::invalid(format!(
                "cannot take {k} largest values from a sample of size {}",
                self.n()
            )));
        }
        Ok(Sample {
            values: self.values[self.n() - k..].to_vec(),
        })
    }

    /// Scaled copy `lambda * sample`, `lambda > 0`.
    pub fn scaled(&self, lambda: f64) -> Result<Sample> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::invalid(format!("scale factor must be positive, got {lambda}")));
        }
        Ok(Sample {
            values: self.values.iter().map(|v| lambda * v).collect(),
        })
    }
}

/// Empirical residual coefficient of variation at threshold `t >= 0`.
///
/// Over the strict exceedances `x_j > t`, this is the divide-by-`n(t)`
/// standard deviation of the excesses `x_j - t` divided by their mean.
/// Requires at least two exceedances.
pub fn residual_cv(sample: &Sample, t: f64) -> Result<f64> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::invalid(format!("threshold must be nonnegative, got {t}")));
    }
    let values = sample.values();
    let start = values.partition_point(|&x| x <= t);
    let tail = &values[start..];
    let count = tail.len();
    if count < MIN_TAIL_FLOOR {
        return Err(Error::insufficient(
            format!("threshold {t} leaves {count} exceedances; need at least {MIN_TAIL_FLOOR}"),
            None,
        ));
    }
    // two-pass central moments on the excesses: stable at high thresholds
    let mean_excess = tail.iter().map(|x| x - t).sum::<f64>() / count as f64;
    let m2 = tail
        .iter()
        .map(|x| {
            let d = (x - t) - mean_excess;
            d * d
        })
        .sum::<f64>()
        / count as f64;
    Ok(m2.sqrt() / mean_excess)
}

/// One point of a CV-plot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvEntry {
    /// Order-statistic index of the threshold (`k = 0` is threshold 0).
    pub k: usize,
    /// Threshold `x_(k)`.
    pub threshold: f64,
    /// Strict exceedance count at this threshold (equals `n - k` when the
    /// sample values are distinct).
    pub tail_count: usize,
    /// Residual CV at the threshold.
    pub cv: f64,
}

/// Simulated pointwise null band, aligned with CV-plot entries by `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandTable {
    /// Two-sided coverage level of the band pair, e.g. 0.9.
    pub level: f64,
    /// `(k, lower, upper)` per plot entry.
    pub entries: Vec<(usize, f64, f64)>,
}

/// The CV-plot: residual CV at every order-statistic threshold down to a
/// minimum tail size, with optional simulated error bands.
#[derive(Debug, Clone, PartialEq)]
pub struct CvCurve {
    pub entries: Vec<CvEntry>,
    pub bands: Option<BandTable>,
}

impl CvCurve {
    /// Attach simulated bands; the band table must cover the same `k`
    /// indices as the curve.
    pub fn attach_bands(&mut self, bands: BandTable) -> Result<()> {
        if bands.entries.len() != self.entries.len()
            || bands
                .entries
                .iter()
                .zip(&self.entries)
                .any(|(b, e)| b.0 != e.k)
        {
            return Err(Error::Config(
                "band table does not align with CV-plot entries".into(),
            ));
        }
        self.bands = Some(bands);
        Ok(())
    }
}

/// CV-plot curve: one entry per `k = 0..=n - min_tail` with threshold
/// `x_(k)`. Exceedance is strict, so tied sample values produce duplicate
/// thresholds with shrinking tails.
pub fn cv_curve(sample: &Sample, min_tail: usize) -> Result<CvCurve> {
    if min_tail < 3 {
        return Err(Error::invalid(format!("CV-plot min_tail must be at least 3, got {min_tail}")));
    }
    let n = sample.n();
    if n < min_tail {
        return Err(Error::insufficient(
            format!("sample size {n} below min_tail {min_tail}"),
            None,
        ));
    }
    let mut entries = Vec::with_capacity(n - min_tail + 1);
    for k in 0..=n - min_tail {
        let threshold = sample.order_stat(k);
        let cv = residual_cv(sample, threshold)?;
        entries.push(CvEntry {
            k,
            threshold,
            tail_count: sample.count_exceeding(threshold),
            cv,
        });
    }
    Ok(CvCurve { entries, bands: None })
}

/// Residual CVs at every order-statistic threshold `k = 0..=n-min_tail`
/// in one O(n) pass: values are pushed largest-first into a running
/// Welford accumulator, so each suffix yields its central moments without
/// re-summing. Assumes distinct values (continuous simulated samples);
/// the band simulator uses this, production curves go through
/// [`residual_cv`].
pub(crate) fn cv_profile(sample: &Sample, min_tail: usize) -> Vec<f64> {
    let values = sample.values();
    let n = values.len();
    debug_assert!(min_tail >= MIN_TAIL_FLOOR && n >= min_tail);
    let entries = n - min_tail + 1;
    let mut out = vec![0.0; entries];

    let mut count = 0usize;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    let mut next = n; // next index to push is `next - 1`
    for k in (0..entries).rev() {
        // entry k needs the suffix values[k..]
        while next > k {
            let x = values[next - 1];
            count += 1;
            let delta = x - mean;
            mean += delta / count as f64;
            m2 += delta * (x - mean);
            next -= 1;
        }
        let t = if k == 0 { 0.0 } else { values[k - 1] };
        out[k] = (m2 / count as f64).sqrt() / (mean - t);
    }
    out
}

/// An ascending set of thresholds with their tail sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdGrid {
    thresholds: Vec<f64>,
    tail_counts: Vec<usize>,
}

impl ThresholdGrid {
    /// Grid over arbitrary strictly ascending thresholds; tail counts are
    /// the sample's strict exceedance counts, each at least 2.
    pub fn from_thresholds(sample: &Sample, thresholds: &[f64]) -> Result<Self> {
        if thresholds.is_empty() {
            return Err(Error::invalid("threshold grid must not be empty"));
        }
        if let Some(t) = thresholds.iter().find(|t| !t.is_finite()) {
            return Err(Error::invalid(format!("thresholds must be finite, got {t}")));
        }
        for pair in thresholds.windows(2) {
            if pair[0] >= pair[1] {
                return Err(Error::invalid(format!(
                    "thresholds must be strictly ascending, got {} then {}",
                    pair[0], pair[1]
                )));
            }
        }
        let tail_counts: Vec<usize> = thresholds.iter().map(|&t| sample.count_exceeding(t)).collect();
        if let Some((i, &c)) = tail_counts.iter().enumerate().find(|(_, &c)| c < MIN_TAIL_FLOOR) {
            return Err(Error::insufficient(
                format!(
                    "threshold {} leaves {c} exceedances; need at least {MIN_TAIL_FLOOR}",
                    thresholds[i]
                ),
                None,
            ));
        }
        Ok(Self {
            thresholds: thresholds.to_vec(),
            tail_counts,
        })
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn tail_counts(&self) -> &[usize] {
        &self.tail_counts
    }

    /// `m`: number of thresholds above the base one.
    pub fn order(&self) -> usize {
        self.thresholds.len() - 1
    }
}

/// Largest `m` such that `floor(n / 2^m) >= min_tail`, if any.
pub fn max_feasible_m(n: usize, min_tail: usize) -> Option<usize> {
    let min_tail = min_tail.max(MIN_TAIL_FLOOR);
    if n < min_tail {
        return None;
    }
    let mut m = 0;
    while n >> (m + 1) >= min_tail {
        m += 1;
    }
    Some(m)
}

/// Dyadic threshold grid: `t_k = x_(n - floor(n/2^k))` for `k = 0..=m`,
/// so each threshold halves the nominal tail; `t_0 = x_(0) = 0`. The
/// smallest sub-sample `floor(n/2^m)` must reach `min_tail`.
pub fn dyadic_thresholds(sample: &Sample, m: usize, min_tail: usize) -> Result<ThresholdGrid> {
    if min_tail < MIN_TAIL_FLOOR {
        return Err(Error::invalid(format!(
            "min_tail must be at least {MIN_TAIL_FLOOR}, got {min_tail}"
        )));
    }
    let n = sample.n();
    let smallest = if m < usize::BITS as usize { n >> m } else { 0 };
    if smallest < min_tail {
        let feasible = max_feasible_m(n, min_tail);
        return Err(Error::insufficient(
            format!(
                "m={m} leaves floor({n}/2^{m})={smallest} observations, below min_tail {min_tail}{}",
                match feasible {
                    Some(f) => format!("; maximal feasible m is {f}"),
                    None => String::new(),
                }
            ),
            feasible,
        ));
    }
    let mut thresholds = Vec::with_capacity(m + 1);
    let mut tail_counts = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let count = n >> k;
        thresholds.push(sample.order_stat(n - count));
        tail_counts.push(count);
    }
    for pair in thresholds.windows(2) {
        if pair[0] >= pair[1] {
            return Err(Error::DegenerateSample(format!(
                "tied sample values collapse dyadic thresholds {} and {}",
                pair[0], pair[1]
            )));
        }
    }
    Ok(ThresholdGrid { thresholds, tail_counts })
}

/// General multi-threshold statistic `T = sum_k n(t_k) (cv(t_k) - 1)^2`
/// with exact exceedance counts recomputed from the sample.
pub fn statistic_t_general(sample: &Sample, grid: &ThresholdGrid) -> Result<f64> {
    let mut total = 0.0;
    for &t in grid.thresholds() {
        let count = sample.count_exceeding(t);
        let d = residual_cv(sample, t)? - 1.0;
        total += count as f64 * d * d;
    }
    Ok(total)
}

/// The dyadic-threshold statistic and the residual CVs it aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct TmStatistic {
    pub value: f64,
    /// `cv(q_k)` for `k = 0..=m`, as reported alongside the test.
    pub threshold_cvs: Vec<f64>,
}

/// `T_m = n * sum_{k=0}^m 2^{-k} (cv(q_k) - 1)^2` over the dyadic
/// quantile thresholds. The weight is the idealized `n * 2^{-k}`, not the
/// realized count `floor(n/2^k)`; see [`statistic_t_general`] for the
/// realized-count variant.
pub fn statistic_t_m(sample: &Sample, m: usize, min_tail: usize) -> Result<TmStatistic> {
    let grid = dyadic_thresholds(sample, m, min_tail)?;
    let mut threshold_cvs = Vec::with_capacity(m + 1);
    let mut sum = 0.0;
    for (k, &t) in grid.thresholds().iter().enumerate() {
        let cv = residual_cv(sample, t)?;
        threshold_cvs.push(cv);
        let d = cv - 1.0;
        sum += 0.5f64.powi(k as i32) * (d * d);
    }
    Ok(TmStatistic {
        value: sample.n() as f64 * sum,
        threshold_cvs,
    })
}

/// Sample coefficient of variation: divide-by-`n` standard deviation over
/// the mean. Equals the residual CV at threshold 0. Used two-sided.
pub fn statistic_cv(sample: &Sample) -> Result<f64> {
    if sample.n() < 2 {
        return Err(Error::invalid("cv statistic needs at least 2 observations"));
    }
    residual_cv(sample, 0.0)
}

/// Maximum/median statistic.
pub fn statistic_mw(sample: &Sample) -> Result<f64> {
    if sample.n() < 2 {
        return Err(Error::invalid("MW statistic needs at least 2 observations"));
    }
    Ok(sample.max() / sample.median())
}

/// Standard deviation over mean absolute deviation from the median.
pub fn statistic_su(sample: &Sample) -> Result<f64> {
    let n = sample.n();
    if n < 2 {
        return Err(Error::invalid("SU statistic needs at least 2 observations"));
    }
    let mean = sample.mean();
    let median = sample.median();
    let sd = (sample.values().iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64).sqrt();
    let mad = sample.values().iter().map(|x| (x - median).abs()).sum::<f64>() / n as f64;
    if mad == 0.0 {
        return Err(Error::DegenerateSample(
            "all values equal the median; SU denominator is zero".into(),
        ));
    }
    Ok(sd / mad)
}

/// Which tail of the null distribution rejects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sidedness {
    UpperTail,
    TwoSided,
}

/// Identifier for the test statistics this crate simulates and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistic {
    /// Dyadic multi-threshold statistic of order `m`.
    Tm(usize),
    Cv,
    Mw,
    Su,
}

impl Statistic {
    /// Serialization token: `t0`, `t1`, ..., `cv`, `mw`, `su`.
    pub fn token(&self) -> String {
        match self {
            Statistic::Tm(m) => format!("t{m}"),
            Statistic::Cv => "cv".into(),
            Statistic::Mw => "mw".into(),
            Statistic::Su => "su".into(),
        }
    }

    /// Conventional sidedness: `T_m` rejects in the upper tail; `cv`,
    /// `MW`, and `SU` are two-sided (their critical-point tables carry
    /// symmetric quantile columns).
    pub fn sidedness(&self) -> Sidedness {
        match self {
            Statistic::Tm(_) => Sidedness::UpperTail,
            Statistic::Cv | Statistic::Mw | Statistic::Su => Sidedness::TwoSided,
        }
    }

    pub fn m(&self) -> Option<usize> {
        match self {
            Statistic::Tm(m) => Some(*m),
            _ => None,
        }
    }

    /// Evaluate on a sample. `min_tail` only constrains the dyadic grid of
    /// `T_m`; the other statistics ignore it.
    pub fn evaluate(&self, sample: &Sample, min_tail: usize) -> Result<f64> {
        match self {
            Statistic::Tm(m) => Ok(statistic_t_m(sample, *m, min_tail)?.value),
            Statistic::Cv => statistic_cv(sample),
            Statistic::Mw => statistic_mw(sample),
            Statistic::Su => statistic_su(sample),
        }
    }
}

impl std::fmt::Display for Statistic {
    /// Upper-case table name: `T3`, `CV`, `MW`, `SU`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Statistic::Tm(m) => write!(f, "T{m}"),
            Statistic::Cv => write!(f, "CV"),
            Statistic::Mw => write!(f, "MW"),
            Statistic::Su => write!(f, "SU"),
        }
    }
}

impl std::str::FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "cv" => Ok(Statistic::Cv),
            "mw" | "hw" => Ok(Statistic::Mw),
            "su" => Ok(Statistic::Su),
            _ => {
                if let Some(m) = lower.strip_prefix('t') {
                    let m: usize = m.parse().map_err(|_| {
                        Error::invalid(format!("bad statistic '{s}' (expected t<m>, cv, mw, or su)"))
                    })?;
                    Ok(Statistic::Tm(m))
                } else {
                    Err(Error::invalid(format!(
                        "bad statistic '{s}' (expected t<m>, cv, mw, or su)"
                    )))
                }
            }
        }
    }
}

/// How a p-value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PValueMethod {
    /// Finite-sample Monte Carlo under the exponential null.
    MonteCarlo,
    /// Simulation of the large-sample weighted chi-square mixture.
    AsymptoticSim,
    /// Analytic shifted-scaled chi-square approximation.
    Chi2Approx,
}

impl PValueMethod {
    pub fn token(&self) -> &'static str {
        match self {
            PValueMethod::MonteCarlo => "monte-carlo",
            PValueMethod::AsymptoticSim => "asymptotic-sim",
            PValueMethod::Chi2Approx => "chi2-approx",
        }
    }
}

/// Outcome of one test run.
#[derive(Debug, Clone, PartialEq)]
pub struct TestReport {
    pub statistic: Statistic,
    pub observed: f64,
    pub n: usize,
    pub m: Option<usize>,
    p_value: Option<f64>,
    p_method: Option<PValueMethod>,
    /// Residual CVs per dyadic threshold, length `m + 1` (for `T_m` only).
    pub threshold_cvs: Option<Vec<f64>>,
}

impl TestReport {
    pub fn new(statistic: Statistic, observed: f64, n: usize) -> Self {
        Self {
            statistic,
            observed,
            n,
            m: statistic.m(),
            p_value: None,
            p_method: None,
            threshold_cvs: None,
        }
    }

    /// A p-value is only stored together with the method that produced it.
    pub fn with_p_value(mut self, p: f64, method: PValueMethod) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("p-value out of [0,1]: {p}")));
        }
        self.p_value = Some(p);
        self.p_method = Some(method);
        Ok(self)
    }

    pub fn with_threshold_cvs(mut self, cvs: Vec<f64>) -> Self {
        self.threshold_cvs = Some(cvs);
        self
    }

    pub fn p_value(&self) -> Option<f64> {
        self.p_value
    }

    pub fn p_method(&self) -> Option<PValueMethod> {
        self.p_method
    }
}
