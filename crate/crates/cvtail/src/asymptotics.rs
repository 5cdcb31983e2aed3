//! Large-sample machinery for the dyadic multi-threshold statistic.
//!
//! The vector of weighted CV departures at dyadic thresholds is
//! asymptotically Gaussian with covariance `Sigma_m = (2^{-|i-j|/2})`, so
//! the statistic converges to the weighted chi-square mixture
//! `sum lambda_i Z_i^2` over the eigenvalues of `Sigma_m`. This module
//! builds `Sigma_m`, extracts its spectrum with a cyclic Jacobi solver,
//! simulates the mixture, and moment-matches the shifted-scaled
//! chi-square approximation `a + b * chisq_nu` used for cheap p-values.

use crate::empirical::EmpiricalDistribution;
use crate::rng::RandomSource;
use crate::{exec, Error, Result};
use rand_distr::{Distribution, StandardNormal};

/// Largest supported order; the dyadic weights `2^-m` are useless long
/// before this.
pub const MAX_ORDER: usize = 32;

const STREAM_TAG_MIXTURE: u64 = 0x4d49_5854;

/// The `(m+1) x (m+1)` covariance matrix with entries `2^{-|i-j|/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    m: usize,
    /// Row-major, `(m+1)^2` entries.
    entries: Vec<f64>,
}

impl CovarianceMatrix {
    pub fn order(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.m + 1
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim() + j]
    }
}

/// Build `Sigma_m`. Entries with even index distance are exact powers of
/// two; odd distances carry one correctly rounded `1/sqrt(2)` factor.
pub fn build_sigma(m: usize) -> Result<CovarianceMatrix> {
    if m > MAX_ORDER {
        return Err(Error::invalid(format!("order m={m} exceeds the supported maximum {MAX_ORDER}")));
    }
    let dim = m + 1;
    let mut weights = Vec::with_capacity(dim);
    for d in 0..dim {
        let even = 0.5f64.powi((d / 2) as i32);
        weights.push(if d % 2 == 0 {
            even
        } else {
            even * std::f64::consts::FRAC_1_SQRT_2
        });
    }
    let mut entries = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            entries[i * dim + j] = weights[i.abs_diff(j)];
        }
    }
    Ok(CovarianceMatrix { m, entries })
}

/// Eigenvalues of `Sigma_m`, sorted descending; all strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSpectrum {
    lambdas: Vec<f64>,
}

impl EigenSpectrum {
    /// Wrap a positive spectrum (sorted descending internally).
    pub fn new(mut lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::invalid("spectrum must contain at least one eigenvalue"));
        }
        if lambdas.iter().any(|l| !l.is_finite() || *l <= 0.0) {
            return Err(Error::invalid("eigenvalues must be positive and finite"));
        }
        lambdas.sort_unstable_by(|a, b| b.total_cmp(a));
        Ok(Self { lambdas })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// Power sums `S_r = sum lambda_i^r` for `r = 1, 2, 3`.
    fn power_sums(&self) -> (f64, f64, f64) {
        let mut s = (0.0, 0.0, 0.0);
        for &l in &self.lambdas {
            s.0 += l;
            s.1 += l * l;
            s.2 += l * l * l;
        }
        s
    }
}

/// Cyclic Jacobi rotations on a symmetric matrix; returns eigenvalues and
/// the orthogonal eigenvector matrix (columns). Converged when every
/// off-diagonal magnitude drops below `1e-12`.
pub(crate) fn jacobi_eigen(matrix: &CovarianceMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    const OFF_DIAG_TOL: f64 = 1e-12;
    const MAX_SWEEPS: usize = 100;

    let n = matrix.dim();
    let mut a = matrix.entries.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    if n == 1 {
        return Ok((a, v));
    }

    for _ in 0..MAX_SWEEPS {
        let mut max_off = 0.0f64;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                max_off = max_off.max(apq.abs());
                if apq.abs() <= OFF_DIAG_TOL {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
        if max_off <= OFF_DIAG_TOL {
            let values: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
            return Ok((values, v));
        }
    }
    Err(Error::NumericalFailure(format!(
        "Jacobi rotations did not converge within {MAX_SWEEPS} sweeps"
    )))
}

/// Full spectrum of a covariance matrix, sorted descending.
pub fn eigenvalues(matrix: &CovarianceMatrix) -> Result<EigenSpectrum> {
    let (values, _) = jacobi_eigen(matrix)?;
    EigenSpectrum::new(values)
}

/// Moment-matched `a + b * chisq_nu` approximation to the mixture law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareApprox {
    pub a: f64,
    pub b: f64,
    pub nu: f64,
}

/// Match the first three moments of `sum lambda_i Z_i^2`:
/// `a + b*nu = S1`, `b^2*nu = S2`, `b^3*nu = S3`, solved in closed form
/// as `b = S3/S2`, `nu = S2^3/S3^2`, `a = S1 - S2^2/S3`.
pub fn moment_match(spectrum: &EigenSpectrum) -> ChiSquareApprox {
    let (s1, s2, s3) = spectrum.power_sums();
    let b = s3 / s2;
    let nu = s2 * s2 * s2 / (s3 * s3);
    let a = s1 - s2 * s2 / s3;
    ChiSquareApprox { a, b, nu }
}

/// Natural log of the gamma function (Lanczos, g = 7, 9 terms).
fn ln_gamma(z: f64) -> f64 {
    const G: f64 = 7.0;
    // published table, kept at full precision
    #[allow(clippy::excessive_precision)]
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if z < 0.5 {
        // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        let pi = std::f64::consts::PI;
        pi.ln() - (pi * z).sin().ln() - ln_gamma(1.0 - z)
    } else {
        let z = z - 1.0;
        let mut x = COEF[0];
        for (i, c) in COEF.iter().enumerate().skip(1) {
            x += c / (z + i as f64);
        }
        let t = z + G + 0.5;
        0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
    }
}

const GAMMA_MAX_ITER: usize = 500;

/// Regularized incomplete gamma pair `(P(a,x), Q(a,x))`: series expansion
/// for `x < a + 1`, Lentz continued fraction otherwise.
fn reg_gamma_pair(a: f64, x: f64) -> Result<(f64, f64)> {
    if x == 0.0 {
        return Ok((0.0, 1.0));
    }
    let log_prefactor = a * x.ln() - x - ln_gamma(a);
    let prefactor = log_prefactor.exp();

    if x < a + 1.0 {
        // P(a,x) = prefactor * sum x^k / (a (a+1) ... (a+k))
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..GAMMA_MAX_ITER {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * f64::EPSILON {
                let p = (prefactor * sum).clamp(0.0, 1.0);
                return Ok((p, 1.0 - p));
            }
        }
        Err(Error::NumericalFailure("incomplete gamma series did not converge".into()))
    } else {
        // modified Lentz continued fraction for Q(a,x)
        let tiny = 1e-300;
        let b0 = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / if b0.abs() < tiny { tiny } else { b0 };
        let mut h = d;
        for i in 1..=GAMMA_MAX_ITER {
            let an = -(i as f64) * (i as f64 - a);
            let bn = x + (2 * i + 1) as f64 - a;
            d = bn + an * d;
            if d.abs() < tiny {
                d = tiny;
            }
            c = bn + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < f64::EPSILON {
                let q = (prefactor * h).clamp(0.0, 1.0);
                return Ok((1.0 - q, q));
            }
        }
        Err(Error::NumericalFailure("incomplete gamma continued fraction did not converge".into()))
    }
}

/// Upper-tail probability of the chi-square distribution with `nu`
/// degrees of freedom (gamma with shape `nu/2`, scale 2).
pub fn chi2_sf(x: f64, nu: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::invalid(format!("chi-square argument must be nonnegative, got {x}")));
    }
    if !nu.is_finite() || nu <= 0.0 {
        return Err(Error::invalid(format!("degrees of freedom must be positive, got {nu}")));
    }
    let (_, q) = reg_gamma_pair(nu / 2.0, x / 2.0)?;
    Ok(q)
}

/// P-value from the moment-matched approximation:
/// `Pr{T > t} = Pr{chisq_nu > (t - a)/b}`, clamped to `[0,1]`;
/// `t <= a` maps to 1.
pub fn approx_pvalue(t_obs: f64, approx: &ChiSquareApprox) -> f64 {
    if t_obs <= approx.a {
        return 1.0;
    }
    let z = (t_obs - approx.a) / approx.b;
    chi2_sf(z, approx.nu).map(|p| p.clamp(0.0, 1.0)).unwrap_or(0.0)
}

/// Simulate `reps` draws of the mixture `sum lambda_i Z_i^2`.
///
/// Replicates derive their own child streams, so draws are identical for
/// any worker count.
pub fn sample_asymptotic_t(
    spectrum: &EigenSpectrum,
    reps: usize,
    source: RandomSource,
    workers: Option<usize>,
) -> Result<EmpiricalDistribution> {
    if reps == 0 {
        return Err(Error::invalid("mixture simulation needs at least one replicate"));
    }
    let base = source.tagged(STREAM_TAG_MIXTURE);
    let draws = exec::map_replicates(reps, workers, |i| {
        let mut rng = base.child(i as u64).rng();
        let mut total = 0.0;
        for &lambda in spectrum.lambdas() {
            let z: f64 = StandardNormal.sample(&mut rng);
            total += lambda * z * z;
        }
        Ok(total)
    })?;
    EmpiricalDistribution::new(draws)
}

/// Covariance function of the CV process for an exponential null:
/// `rho(s,t) = exp(min(s,t)/mu)`.
pub fn rho_exponential(s: f64, t: f64, mu: f64) -> Result<f64> {
    if s.is_nan() || t.is_nan() || s < 0.0 || t < 0.0 {
        return Err(Error::invalid("thresholds must be nonnegative"));
    }
    if mu.is_nan() || mu <= 0.0 {
        return Err(Error::invalid("mean must be positive"));
    }
    Ok((s.min(t) / mu).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_entries() {
        let s0 = build_sigma(0).unwrap();
        assert_eq!(s0.dim(), 1);
        assert_eq!(s0.entry(0, 0), 1.0);

        let s2 = build_sigma(2).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..3 {
            assert_eq!(s2.entry(i, i), 1.0);
        }
        assert_eq!(s2.entry(0, 1), r);
        assert_eq!(s2.entry(1, 0), r);
        assert_eq!(s2.entry(0, 2), 0.5);

        let s4 = build_sigma(4).unwrap();
        assert_eq!(s4.entry(0, 4), 0.25);

        assert!(build_sigma(MAX_ORDER).is_ok());
        assert!(build_sigma(MAX_ORDER + 1).is_err());
    }

    #[test]
    fn eigen_m2_closed_form() {
        let spec = eigenvalues(&build_sigma(2).unwrap()).unwrap();
        let sqrt17 = 17.0f64.sqrt();
        let expect = [(5.0 + sqrt17) / 4.0, 0.5, (5.0 - sqrt17) / 4.0];
        for (l, e) in spec.lambdas().iter().zip(expect) {
            assert!((l - e).abs() < 1e-10, "lambda={l} expected={e}");
        }
    }

    #[test]
    fn eigen_m1_closed_form() {
        let spec = eigenvalues(&build_sigma(1).unwrap()).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((spec.lambdas()[0] - (1.0 + r)).abs() < 1e-12);
        assert!((spec.lambdas()[1] - (1.0 - r)).abs() < 1e-12);
    }

    #[test]
    fn trace_identity() {
        for m in 0..=8 {
            let spec = eigenvalues(&build_sigma(m).unwrap()).unwrap();
            let trace: f64 = spec.lambdas().iter().sum();
            assert!((trace - (m as f64 + 1.0)).abs() < 1e-10, "m={m} trace={trace}");
        }
    }

    #[test]
    fn eigen_residuals_small() {
        for m in [1, 2, 4, 7] {
            let sigma = build_sigma(m).unwrap();
            let n = sigma.dim();
            let (values, vectors) = jacobi_eigen(&sigma).unwrap();
            for j in 0..n {
                let mut norm2 = 0.0;
                for i in 0..n {
                    let mut r = 0.0;
                    for k in 0..n {
                        r += sigma.entry(i, k) * vectors[k * n + j];
                    }
                    r -= values[j] * vectors[i * n + j];
                    norm2 += r * r;
                }
                assert!(norm2.sqrt() <= 1e-10, "m={m} residual={}", norm2.sqrt());
            }
        }
    }

    #[test]
    fn moment_match_m1_exact() {
        let spec = eigenvalues(&build_sigma(1).unwrap()).unwrap();
        let approx = moment_match(&spec);
        // S1=2, S2=3, S3=5 analytically
        assert!((approx.a - 0.2).abs() < 1e-12);
        assert!((approx.b - 5.0 / 3.0).abs() < 1e-12);
        assert!((approx.nu - 1.08).abs() < 1e-12);
    }

    #[test]
    fn moment_match_single_unit_eigenvalue() {
        let spec = EigenSpectrum::new(vec![1.0]).unwrap();
        let approx = moment_match(&spec);
        assert_eq!((approx.a, approx.b, approx.nu), (0.0, 1.0, 1.0));
    }

    #[test]
    fn moment_closure() {
        for m in 0..=8 {
            let spec = eigenvalues(&build_sigma(m).unwrap()).unwrap();
            let (s1, s2, s3) = spec.power_sums();
            let ChiSquareApprox { a, b, nu } = moment_match(&spec);
            assert!((a + b * nu - s1).abs() < 1e-10);
            assert!((b * b * nu - s2).abs() < 1e-10);
            assert!((b * b * b * nu - s3).abs() < 1e-10);
        }
    }

    #[test]
    fn chi2_sf_reference_points() {
        assert!((chi2_sf(3.84, 1.0).unwrap() - 0.05).abs() < 5e-4);
        assert!((chi2_sf(6.63, 1.0).unwrap() - 0.01).abs() < 5e-4);
        assert_eq!(chi2_sf(0.0, 2.5).unwrap(), 1.0);
        assert!(chi2_sf(-1.0, 1.0).is_err());
        assert!(chi2_sf(1.0, 0.0).is_err());
    }

    #[test]
    fn chi2_sf_matches_library_oracle() {
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        for &nu in &[0.3, 0.5, 1.0, 1.08, 1.3446, 2.0, 4.5, 10.0, 50.0] {
            let oracle = ChiSquared::new(nu).unwrap();
            for &x in &[1e-6, 0.1, 0.5, 1.0, 2.0, 3.84, 7.0, 15.0, 40.0, 90.0] {
                let ours = chi2_sf(x, nu).unwrap();
                let theirs = oracle.sf(x);
                assert!(
                    (ours - theirs).abs() <= 1e-10,
                    "nu={nu} x={x}: {ours} vs {theirs}"
                );
            }
        }
    }

    #[test]
    fn approx_pvalue_table_rows() {
        let spec1 = eigenvalues(&build_sigma(1).unwrap()).unwrap();
        let p1 = approx_pvalue(6.93, &moment_match(&spec1));
        assert!((p1 - 0.05).abs() < 1e-3, "p1={p1}");

        let spec3 = eigenvalues(&build_sigma(3).unwrap()).unwrap();
        let p3 = approx_pvalue(19.69, &moment_match(&spec3));
        assert!((p3 - 0.01).abs() < 1e-3, "p3={p3}");

        let approx = moment_match(&spec3);
        assert_eq!(approx_pvalue(approx.a, &approx), 1.0);
        assert_eq!(approx_pvalue(approx.a - 1.0, &approx), 1.0);
    }

    #[test]
    fn mixture_mean_and_determinism() {
        let spec = EigenSpectrum::new(vec![1.0]).unwrap();
        let source = RandomSource::new(11);
        let d = sample_asymptotic_t(&spec, 50_000, source, None).unwrap();
        assert!((d.mean() - 1.0).abs() < 0.02, "mean={}", d.mean());

        let d1 = sample_asymptotic_t(&spec, 2000, source, Some(1)).unwrap();
        let d2 = sample_asymptotic_t(&spec, 2000, source, Some(2)).unwrap();
        assert_eq!(d1.draws(), d2.draws());
    }

    #[test]
    fn rho_values() {
        assert_eq!(rho_exponential(0.0, 0.0, 1.0).unwrap(), 1.0);
        let ln2 = std::f64::consts::LN_2;
        assert!((rho_exponential(ln2, 2.0 * ln2, 1.0).unwrap() - 2.0).abs() < 1e-12);
        // normalized OU form at s=0, t=2 mu
        let mu = 1.3f64;
        let s = 0.0f64;
        let t = 2.0 * mu;
        let norm = (-(s / (2.0 * mu))).exp() * rho_exponential(s, t, mu).unwrap()
            * (-(t / (2.0 * mu))).exp();
        assert!((norm - (-1.0f64).exp()).abs() < 1e-12);
    }
}
