//! Seedable random streams and marginal-distribution machinery.
//!
//! Every estimator in the crate draws from [`RandomStream`]s, which wrap a
//! counter-based generator (ChaCha12). A stream is identified by
//! `(seed, stream_id)`; distinct stream ids yield independent sequences
//! without any shared state, so plan construction, bootstrap resampling, and
//! conditional sampling can each own a stream and stay reproducible no matter
//! how the surrounding code is parallelized.
//!
//! All factors are represented on a standard-normal scale; uniform marginals
//! are reached through the normal CDF `Φ`, so one sampling pipeline serves
//! every estimator.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::scalar::{half, two, Scalar};

/// A reproducible random stream: same `(seed, stream_id)` always yields the
/// identical sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream_id: 0 }
    }

    /// The same seed on a different substream.
    pub fn substream(&self, stream_id: u64) -> Self {
        Self { seed: self.seed, stream_id }
    }

    /// Instantiates the generator positioned at the start of the stream.
    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// `n` i.i.d. standard-normal draws.
    pub fn standard_normal<R: Scalar>(&self, n: usize) -> Vec<R> {
        let mut rng = self.rng();
        (0..n).map(|_| R::standard_normal(&mut rng)).collect()
    }
}

/// One-dimensional input distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Marginal<R> {
    Uniform { lo: R, hi: R },
    Normal { mean: R, sd: R },
    LogNormal { mu_log: R, sigma_log: R },
}

impl<R: Scalar> Marginal<R> {
    pub fn uniform(lo: R, hi: R) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidDistribution(format!(
                "uniform requires lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self::Uniform { lo, hi })
    }

    pub fn normal(mean: R, sd: R) -> Result<Self> {
        if !(sd > R::zero()) || !mean.is_finite() {
            return Err(Error::InvalidDistribution(format!(
                "normal requires sd > 0, got sd = {sd}"
            )));
        }
        Ok(Self::Normal { mean, sd })
    }

    pub fn lognormal(mu_log: R, sigma_log: R) -> Result<Self> {
        if !(sigma_log > R::zero()) || !mu_log.is_finite() {
            return Err(Error::InvalidDistribution(format!(
                "lognormal requires sigma_log > 0, got {sigma_log}"
            )));
        }
        Ok(Self::LogNormal { mu_log, sigma_log })
    }

    /// Lognormal parameterized by its arithmetic mean and coefficient of
    /// variation: `sigma_log = sqrt(ln(1 + cv²))`, `mu_log = ln(mean) − sigma_log²/2`.
    pub fn lognormal_from_mean_cv(mean: R, cv: R) -> Result<Self> {
        let (mu_log, sigma_log) = lognormal_params_from_mean_cv(mean, cv)?;
        Self::lognormal(mu_log, sigma_log)
    }

    /// Maps a standard-normal variate into this marginal.
    pub fn transform(&self, z: R) -> R {
        match *self {
            Marginal::Uniform { lo, hi } => lo + (hi - lo) * normal_cdf(z),
            Marginal::Normal { mean, sd } => mean + sd * z,
            Marginal::LogNormal { mu_log, sigma_log } => (mu_log + sigma_log * z).exp(),
        }
    }

    /// Analytic CDF, used by distributional tests.
    pub fn cdf(&self, x: R) -> R {
        match *self {
            Marginal::Uniform { lo, hi } => {
                if x <= lo {
                    R::zero()
                } else if x >= hi {
                    R::one()
                } else {
                    (x - lo) / (hi - lo)
                }
            }
            Marginal::Normal { mean, sd } => normal_cdf((x - mean) / sd),
            Marginal::LogNormal { mu_log, sigma_log } => {
                if x <= R::zero() {
                    R::zero()
                } else {
                    normal_cdf((x.ln() - mu_log) / sigma_log)
                }
            }
        }
    }
}

/// `(mu_log, sigma_log)` of the lognormal with the given arithmetic mean and CV.
pub fn lognormal_params_from_mean_cv<R: Scalar>(mean: R, cv: R) -> Result<(R, R)> {
    if !(mean > R::zero()) || !(cv > R::zero()) {
        return Err(Error::InvalidDistribution(format!(
            "lognormal mean/cv must be positive, got mean = {mean}, cv = {cv}"
        )));
    }
    let sigma_sq = (R::one() + cv * cv).ln();
    let sigma_log = sigma_sq.sqrt();
    let mu_log = mean.ln() - sigma_sq / two();
    Ok((mu_log, sigma_log))
}

/// Standard normal CDF `Φ(z) = erfc(−z/√2)/2`.
pub fn normal_cdf<R: Scalar>(z: R) -> R {
    half::<R>() * erfc(-z / two::<R>().sqrt())
}

/// Standard normal density.
pub fn normal_pdf<R: Scalar>(z: R) -> R {
    let two_pi = R::cast(std::f64::consts::TAU);
    (-z * z / two()).exp() / two_pi.sqrt()
}

/// Complementary error function.
///
/// Power series for small arguments, Lentz-evaluated continued fraction for
/// the tail; both branches carry well beyond f64 precision on their domains.
pub fn erfc<R: Scalar>(x: R) -> R {
    if x < R::zero() {
        return two::<R>() - erfc(-x);
    }
    if x < two() {
        R::one() - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

/// Error function `erf(x) = 1 − erfc(x)`.
pub fn erf<R: Scalar>(x: R) -> R {
    if x.abs() < two() {
        if x < R::zero() {
            -erf_series(-x)
        } else {
            erf_series(x)
        }
    } else {
        R::one() - erfc(x)
    }
}

/// Maclaurin series of erf, accurate to working precision for 0 <= x < 2.
fn erf_series<R: Scalar>(x: R) -> R {
    let x_sq = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 1u32;
    loop {
        let nf = R::from_u32(n).unwrap();
        // term_n = term_{n-1} * (-x²) / n ; contribution = term_n / (2n + 1)
        term = term * (-x_sq) / nf;
        let contribution = term / R::from_u32(2 * n + 1).unwrap();
        let next = sum + contribution;
        if next == sum || n > 200 {
            break;
        }
        sum = next;
        n += 1;
    }
    let sqrt_pi = R::cast(std::f64::consts::PI).sqrt();
    sum * two::<R>() / sqrt_pi
}

/// Continued fraction for erfc, valid for x >= 2:
/// `erfc(x) = exp(-x²)/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))`.
fn erfc_continued_fraction<R: Scalar>(x: R) -> R {
    let tiny = R::cast(1e-300).max(R::min_positive_value());
    let mut f = x;
    let mut c = x;
    let mut d = R::zero();
    let mut m = 1u32;
    loop {
        let a = R::from_u32(m).unwrap() / two();
        d = x + a * d;
        if d == R::zero() {
            d = tiny;
        }
        c = x + a / c;
        if c == R::zero() {
            c = tiny;
        }
        d = d.recip();
        let delta = c * d;
        f = f * delta;
        if (delta - R::one()).abs() < R::epsilon() || m > 300 {
            break;
        }
        m += 1;
    }
    let sqrt_pi = R::cast(std::f64::consts::PI).sqrt();
    (-x * x).exp() / (sqrt_pi * f)
}

/// Inverse of the standard normal CDF.
///
/// Abramowitz–Stegun 26.2.23 seed refined by Newton steps on `Φ`; the result
/// is accurate to working precision for p in (0, 1).
pub fn normal_quantile<R: Scalar>(p: R) -> R {
    assert!(
        p > R::zero() && p < R::one(),
        "normal quantile needs p strictly inside (0, 1)"
    );
    let (tail_p, sign) = if p < half() { (p, -R::one()) } else { (R::one() - p, R::one()) };
    let t = (-two::<R>() * tail_p.ln()).sqrt();
    let c0 = R::cast(2.515517);
    let c1 = R::cast(0.802853);
    let c2 = R::cast(0.010328);
    let d1 = R::cast(1.432788);
    let d2 = R::cast(0.189269);
    let d3 = R::cast(0.001308);
    let mut z = sign
        * (t - (c0 + t * (c1 + t * c2)) / (R::one() + t * (d1 + t * (d2 + t * d3))));
    for _ in 0..4 {
        let err = normal_cdf(z) - p;
        let step = err / normal_pdf(z);
        // Clamp to keep the tail iterations contractive.
        let limit = R::one();
        z = z - step.max(-limit).min(limit);
    }
    z
}

/// Base sequence used when filling sample matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SequenceKind {
    /// Pseudo-random Monte Carlo (default).
    #[default]
    PseudoRandom,
    /// Randomly shifted Halton sequence mapped through the normal quantile.
    Halton,
}

/// Fills an `n × k` standard-normal matrix, either pseudo-randomly or from a
/// Cranley–Patterson-shifted Halton sequence.
pub fn standard_normal_matrix<R: Scalar>(
    kind: SequenceKind,
    stream: RandomStream,
    n: usize,
    k: usize,
) -> Vec<Vec<R>> {
    match kind {
        SequenceKind::PseudoRandom => {
            let mut rng = stream.rng();
            (0..n)
                .map(|_| (0..k).map(|_| R::standard_normal(&mut rng)).collect())
                .collect()
        }
        SequenceKind::Halton => {
            let mut rng = stream.rng();
            let shift: Vec<R> = (0..k).map(|_| R::standard_uniform(&mut rng)).collect();
            (0..n)
                .map(|i| {
                    (0..k)
                        .map(|d| {
                            let u = halton(i as u64 + 1, HALTON_BASES[d % HALTON_BASES.len()]);
                            let mut shifted = R::cast(u) + shift[d];
                            if shifted >= R::one() {
                                shifted = shifted - R::one();
                            }
                            // Keep strictly inside (0, 1) for the quantile map.
                            let eps = R::cast(1e-12);
                            normal_quantile(shifted.max(eps).min(R::one() - eps))
                        })
                        .collect()
                })
                .collect()
        }
    }
}

const HALTON_BASES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Van der Corput radical inverse of `index` in the given base.
fn halton(mut index: u64, base: u64) -> f64 {
    let mut fraction = 1.0f64;
    let mut result = 0.0f64;
    while index > 0 {
        fraction /= base as f64;
        result += fraction * (index % base) as f64;
        index /= base;
    }
    result
}
