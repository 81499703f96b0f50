//! Synthetic series used as validation oracles.
//!
//! Fractional Gaussian noise is drawn by circulant embedding (Davies–Harte),
//! which reproduces the target autocovariance exactly. All randomness comes
//! from ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded with a `u64`, and normal
//! deviates from the ziggurat sampler in `rand_distr`, so a seed fixes the
//! output on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::fit_line;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FbmSpec {
    pub hurst: f64,
    /// Number of path points, including the zero start.
    pub length: usize,
    pub seed: u64,
}

impl FbmSpec {
    pub fn new(hurst: f64, length: usize, seed: u64) -> Result<Self> {
        let spec = Self {
            hurst,
            length,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if !(self.hurst > 0.0 && self.hurst < 1.0) {
            return Err(Error::InvalidHurst(self.hurst));
        }
        if self.length < 2 {
            return Err(Error::TooShort { len: self.length });
        }
        Ok(())
    }
}

/// Autocovariance of unit-variance fractional Gaussian noise at lag `k`.
pub fn fgn_autocovariance(hurst: f64, k: usize) -> f64 {
    let two_h = 2.0 * hurst;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).abs().powf(two_h))
}

/// `count` samples of unit-variance fractional Gaussian noise.
pub fn generate_fgn(hurst: f64, count: usize, seed: u64) -> Result<Vec<f64>> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(Error::InvalidHurst(hurst));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    let half = count.next_power_of_two();
    let m = 2 * half;

    // first row of the circulant embedding of the covariance matrix
    let mut row: Vec<Complex<f64>> = (0..m)
        .map(|j| {
            let lag = if j <= half { j } else { m - j };
            Complex::new(fgn_autocovariance(hurst, lag), 0.0)
        })
        .collect();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(m);
    fft.process(&mut row);
    let largest = row.iter().fold(0.0f64, |acc, c| acc.max(c.re.abs()));
    // fGn embeddings are non-negative definite; anything below is rounding
    debug_assert!(row.iter().all(|c| c.re >= -1e-9 * largest));

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let scale = 1.0 / m as f64;
    let mut buf: Vec<Complex<f64>> = row
        .iter()
        .map(|lambda| {
            let amp = (lambda.re.max(0.0) * scale).sqrt();
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex::new(amp * re, amp * im)
        })
        .collect();
    fft.process(&mut buf);
    Ok(buf[..count].iter().map(|c| c.re).collect())
}

/// Zero-start fractional Brownian motion: partial sums of fractional Gaussian noise.
pub fn generate_fbm<T: Scalar>(spec: &FbmSpec) -> Result<Vec<T>> {
    spec.validate()?;
    let increments = generate_fgn(spec.hurst, spec.length - 1, spec.seed)?;
    let mut path = Vec::with_capacity(spec.length);
    let mut level = 0.0;
    path.push(T::zero());
    for dx in increments {
        level += dx;
        path.push(T::of(level));
    }
    Ok(path)
}

/// Maps a path to strictly positive prices `base · exp(sigma · x)`.
pub fn geometric_prices<T: Scalar>(path: &[T], base: T, sigma: T) -> Vec<T> {
    path.iter().map(|&x| base * (sigma * x).exp()).collect()
}

/// Powers of two from 1 while at least 64 blocks fit in the series.
pub fn default_hurst_scales(len: usize) -> Vec<usize> {
    std::iter::successors(Some(1usize), |m| Some(m * 2))
        .take_while(|m| m * 64 < len)
        .collect()
}

/// Hurst exponent from the scaling of aggregated increments: for each scale
/// `m` the mean square of the non-overlapping increments `x[(k+1)m] − x[km]`
/// grows as `m^{2H}`, so `H` is half the log-log slope.
pub fn estimate_hurst_variance_method<T: Scalar>(x: &[T], scales: &[usize]) -> Result<f64> {
    let mut log_m = Vec::new();
    let mut log_v = Vec::new();
    for &m in scales {
        if m == 0 {
            continue;
        }
        let blocks = (x.len().saturating_sub(1)) / m;
        if blocks < 2 {
            continue;
        }
        let ms = (0..blocks)
            .map(|k| {
                let d = (x[(k + 1) * m] - x[k * m]).as_f64();
                d * d
            })
            .sum::<f64>()
            / blocks as f64;
        if ms > 0.0 {
            log_m.push((m as f64).ln());
            log_v.push(ms.ln());
        }
    }
    if log_m.len() < 4 {
        return Err(Error::InsufficientScales(log_m.len()));
    }
    let (slope, _, _) = fit_line(&log_m, &log_v).ok_or(Error::InsufficientScales(log_m.len()))?;
    Ok(slope / 2.0)
}

/// GARCH(1,1) log-return surrogate used to produce volatility series with
/// distinct clustering.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GarchSpec {
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
    pub length: usize,
    pub seed: u64,
}

/// Prices `p_0 · exp(Σ r)` driven by GARCH(1,1) log-returns
/// `r_t = σ_t ε_t`, `σ²_{t+1} = ω + α r_t² + β σ²_t`, started at the
/// unconditional variance.
pub fn generate_garch_prices<T: Scalar>(spec: &GarchSpec, initial_price: f64) -> Result<Vec<T>> {
    let GarchSpec {
        omega,
        alpha,
        beta,
        length,
        seed,
    } = *spec;
    if !(omega > 0.0 && alpha >= 0.0 && beta >= 0.0 && alpha + beta < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "GARCH parameters must satisfy omega > 0, alpha, beta >= 0, alpha + beta < 1 (got {omega}, {alpha}, {beta})"
        )));
    }
    if length < 2 {
        return Err(Error::TooShort { len: length });
    }
    if !(initial_price > 0.0) {
        return Err(Error::NonPositivePrice { row: 1 });
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut var = omega / (1.0 - alpha - beta);
    let mut log_price = initial_price.ln();
    let mut out = Vec::with_capacity(length);
    out.push(T::of(initial_price));
    for _ in 1..length {
        let eps: f64 = rng.sample(StandardNormal);
        let r = var.sqrt() * eps;
        log_price += r;
        out.push(T::of(log_price.exp()));
        var = omega + alpha * r * r + beta * var;
    }
    Ok(out)
}
