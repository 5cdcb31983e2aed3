//! Samplers and closed-form quantities for the exponential null and the
//! heavy-tailed alternatives (generalized Pareto, absolute Student-t).
//!
//! Exponential and GPD draws are inverse-CDF transforms of one uniform
//! stream, so the same [`RandomSource`] gives common random numbers across
//! the null and a Pareto alternative. Uniforms are taken on `[0,1)` and the
//! zero draw is rejected, keeping every sample value strictly positive.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::empirics::Sample;
use crate::rng::RandomSource;
use crate::{Error, Result};

/// Below this magnitude the GPD shape is treated as exactly zero
/// (exponential limit); avoids cancellation in `(1-u)^{-xi} - 1`.
pub const XI_ZERO_TOL: f64 = 1e-10;

/// Generalized Pareto parameters: shape `xi`, scale `beta > 0`.
///
/// `F(x) = 1 - (1 + xi*x/beta)^(-1/xi)` on `x > 0` for `xi >= 0`, and on
/// `0 < x < beta/|xi|` for `xi < 0`; `xi = 0` is the exponential limit.
/// Negative shapes are accepted for CDF/likelihood evaluation but not for
/// sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpdParams {
    pub xi: f64,
    pub beta: f64,
}

impl GpdParams {
    pub fn new(xi: f64, beta: f64) -> Result<Self> {
        if !xi.is_finite() {
            return Err(Error::invalid(format!("GPD shape must be finite, got {xi}")));
        }
        if !beta.is_finite() || beta <= 0.0 {
            return Err(Error::invalid(format!("GPD scale must be positive, got {beta}")));
        }
        Ok(Self { xi, beta })
    }
}

/// Student-t degrees of freedom `nu > 0`; the absolute value `|t_nu|` has
/// a polynomial tail with index `alpha = nu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudentParams {
    pub nu: f64,
}

impl StudentParams {
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu <= 0.0 {
            return Err(Error::invalid(format!(
                "Student degrees of freedom must be positive, got {nu}"
            )));
        }
        Ok(Self { nu })
    }
}

/// Uniform draw on the open interval (0,1); rejects the 0.0 atom so
/// inverse-CDF transforms stay strictly positive.
fn open_unit<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("sample size must be at least 1"));
    }
    Ok(())
}

/// Exponential quantile function, `u` in `[0,1)`: `x = -mu * ln(1-u)`.
pub fn exponential_quantile(mu: f64, u: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&u));
    // ln_1p keeps accuracy for u near 0 and never rounds 1-u up to 1.
    mu * -(-u).ln_1p()
}

/// GPD quantile function, `u` in `[0,1)`: `x = (beta/xi) * ((1-u)^{-xi} - 1)`.
///
/// Only defined for `xi >= 0` (the sampling branch); the shape below
/// [`XI_ZERO_TOL`] falls back to the exponential limit with mean `beta`.
pub fn gpd_quantile(params: &GpdParams, u: f64) -> Result<f64> {
    if params.xi < 0.0 {
        return Err(Error::UnsupportedAlternative(format!(
            "GPD sampling requires xi >= 0, got {}",
            params.xi
        )));
    }
    debug_assert!((0.0..1.0).contains(&u));
    if params.xi.abs() < XI_ZERO_TOL {
        return Ok(exponential_quantile(params.beta, u));
    }
    // (1-u)^{-xi} - 1 = expm1(-xi * ln(1-u)); dividing by xi before the
    // beta multiply keeps scale equivariance exact.
    Ok(params.beta * ((-params.xi * (-u).ln_1p()).exp_m1() / params.xi))
}

/// Exponential CDF with mean `mu`.
pub fn exponential_cdf(mu: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -(-x / mu).exp_m1()
    }
}

/// GPD CDF; handles the negative-shape compact-support branch as well.
pub fn gpd_cdf(params: &GpdParams, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if params.xi.abs() < XI_ZERO_TOL {
        return exponential_cdf(params.beta, x);
    }
    let z = 1.0 + params.xi * x / params.beta;
    if z <= 0.0 {
        // only reachable for xi < 0, beyond the upper endpoint
        return 1.0;
    }
    -((-1.0 / params.xi) * z.ln()).exp_m1()
}

/// `n` i.i.d. exponential draws with mean `mu`, sorted ascending.
pub fn sample_exponential(mu: f64, n: usize, source: RandomSource) -> Result<Sample> {
    if !mu.is_finite() || mu <= 0.0 {
        return Err(Error::invalid(format!("exponential mean must be positive, got {mu}")));
    }
    check_n(n)?;
    let mut rng = source.rng();
    let values = (0..n)
        .map(|_| exponential_quantile(mu, open_unit(&mut rng)))
        .collect();
    Ok(Sample::from_positive_unsorted(values))
}

/// `n` i.i.d. GPD draws by inverse CDF, sorted ascending.
pub fn sample_gpd(params: &GpdParams, n: usize, source: RandomSource) -> Result<Sample> {
    if params.xi < 0.0 {
        return Err(Error::UnsupportedAlternative(format!(
            "GPD sampling requires xi >= 0, got {}",
            params.xi
        )));
    }
    check_n(n)?;
    let mut rng = source.rng();
    let values = (0..n)
        .map(|_| gpd_quantile(params, open_unit(&mut rng)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Sample::from_positive_unsorted(values))
}

/// `n` i.i.d. draws of `|T|`, `T ~ t_nu`, generated as `Z / sqrt(V/nu)`
/// with `Z` standard normal and `V` chi-square(`nu`).
pub fn sample_abs_student(params: &StudentParams, n: usize, source: RandomSource) -> Result<Sample> {
    let chi2 = rand_distr::ChiSquared::new(params.nu)
        .map_err(|e| Error::invalid(format!("chi-square({}) sampler: {e}", params.nu)))?;
    check_n(n)?;
    let mut rng = source.rng();
    let values = (0..n)
        .map(|_| loop {
            let z: f64 = StandardNormal.sample(&mut rng);
            let v: f64 = chi2.sample(&mut rng);
            let t = (z / (v / params.nu).sqrt()).abs();
            if t > 0.0 && t.is_finite() {
                return t;
            }
        })
        .collect();
    Ok(Sample::from_positive_unsorted(values))
}

/// Conditional moments `mu_k(t) = E[X^k 1_{X>t}]`, `k = 0..4`, for an
/// exponential variable with mean `mu`; closed-form, exact up to rounding.
///
/// The unit-mean forms are polynomials times `e^{-t}`; general `mu` scales
/// as `mu_k(t) = mu^k * mu_k^1(t/mu)`.
pub fn exp_conditional_moments(t: f64, mu: f64) -> Result<[f64; 5]> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::invalid(format!("threshold must be nonnegative, got {t}")));
    }
    if !mu.is_finite() || mu <= 0.0 {
        return Err(Error::invalid(format!("mean must be positive, got {mu}")));
    }
    let s = t / mu;
    let e = (-s).exp();
    let unit = [
        e,
        e * (1.0 + s),
        e * (2.0 + s * (2.0 + s)),
        e * (6.0 + s * (6.0 + s * (3.0 + s))),
        e * (24.0 + s * (24.0 + s * (12.0 + s * (4.0 + s)))),
    ];
    let mut out = [0.0; 5];
    let mut scale = 1.0;
    for k in 0..5 {
        out[k] = scale * unit[k];
        scale *= mu;
    }
    Ok(out)
}

/// Residual coefficient of variation of a GPD: `1/sqrt(1-2*xi)`, constant
/// in the threshold. Requires `xi < 1/2` (finite variance).
pub fn gpd_residual_cv(xi: f64) -> Result<f64> {
    if !xi.is_finite() {
        return Err(Error::invalid(format!("shape must be finite, got {xi}")));
    }
    if xi >= 0.5 {
        return Err(Error::InfiniteVariance(format!(
            "GPD residual CV undefined for xi >= 1/2 (got {xi})"
        )));
    }
    Ok(1.0 / (1.0 - 2.0 * xi).sqrt())
}

/// A named sampling model: the null or one of the studied alternatives.
///
/// Parses from and prints to the compact `kind:key=value,...` syntax used
/// on the command line and in table files, e.g. `exp`, `exp:mu=2`,
/// `gpd:xi=0.3,beta=1`, `abst:nu=4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailModel {
    Exponential { mean: f64 },
    Gpd(GpdParams),
    AbsStudent(StudentParams),
}

impl TailModel {
    pub fn sample(&self, n: usize, source: RandomSource) -> Result<Sample> {
        match self {
            TailModel::Exponential { mean } => sample_exponential(*mean, n, source),
            TailModel::Gpd(p) => sample_gpd(p, n, source),
            TailModel::AbsStudent(p) => sample_abs_student(p, n, source),
        }
    }
}

impl std::fmt::Display for TailModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TailModel::Exponential { mean } => write!(f, "exp:mu={mean}"),
            TailModel::Gpd(p) => write!(f, "gpd:xi={},beta={}", p.xi, p.beta),
            TailModel::AbsStudent(p) => write!(f, "abst:nu={}", p.nu),
        }
    }
}

impl std::str::FromStr for TailModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = match s.split_once(':') {
            Some((k, r)) => (k.trim(), r),
            None => (s.trim(), ""),
        };
        let mut kv = std::collections::BTreeMap::new();
        for pair in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("expected key=value in model spec, got '{pair}'")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("bad numeric value in model spec: '{pair}'")))?;
            kv.insert(key.trim().to_string(), value);
        }
        let take = |kv: &mut std::collections::BTreeMap<String, f64>, key: &str| kv.remove(key);
        let model = match kind {
            "exp" => TailModel::Exponential {
                mean: take(&mut kv, "mu").unwrap_or(1.0),
            },
            "gpd" => {
                let xi = take(&mut kv, "xi")
                    .ok_or_else(|| Error::invalid("gpd model needs xi, e.g. gpd:xi=0.3"))?;
                let beta = take(&mut kv, "beta").unwrap_or(1.0);
                TailModel::Gpd(GpdParams::new(xi, beta)?)
            }
            "abst" => {
                let nu = take(&mut kv, "nu")
                    .ok_or_else(|| Error::invalid("abst model needs nu, e.g. abst:nu=4"))?;
                TailModel::AbsStudent(StudentParams::new(nu)?)
            }
            other => {
                return Err(Error::invalid(format!(
                    "unknown model kind '{other}' (expected exp, gpd, or abst)"
                )))
            }
        };
        if let Some(extra) = kv.keys().next() {
            return Err(Error::invalid(format!("unknown key '{extra}' for model '{kind}'")));
        }
        Ok(model)
    }
}
