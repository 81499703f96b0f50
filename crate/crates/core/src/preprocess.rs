//! Returns and rolling volatility.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::PriceSeries;
use crate::scalar::{CompensatedSum, Scalar};

/// Volatility windows in minutes: half a business day, one to ten business
/// days and one business month.
pub const PAPER_VOL_WINDOWS: [usize; 12] = [
    330, 660, 1320, 1980, 2640, 3300, 3960, 4620, 5280, 5940, 6600, 13200,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReturnKind {
    Linear,
    #[serde(alias = "log")]
    Logarithmic,
}

/// Denominator of the window mean inside the volatility estimator.
///
/// `Paper` divides the window sum by `T − 1`, the default;
/// `Standard` uses the usual `T`. The variance itself is always
/// normalized by `T − 1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeanDenominator {
    #[default]
    Paper,
    Standard,
}

impl MeanDenominator {
    fn divisor(self, window: usize) -> usize {
        match self {
            MeanDenominator::Paper => window - 1,
            MeanDenominator::Standard => window,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReturnSeries<T> {
    pub label: String,
    pub kind: ReturnKind,
    pub horizon: usize,
    pub values: Vec<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VolatilitySeries<T> {
    pub label: String,
    pub window: usize,
    pub mean_denominator: MeanDenominator,
    pub values: Vec<T>,
}

fn check_horizon(horizon: usize, len: usize) -> Result<()> {
    if horizon == 0 || horizon >= len {
        return Err(Error::HorizonTooLarge { horizon, len });
    }
    Ok(())
}

/// `p[i+h] − p[i]`.
pub fn linear_returns<T: Scalar>(
    prices: &PriceSeries<T>,
    horizon: usize,
) -> Result<ReturnSeries<T>> {
    let p = prices.values();
    check_horizon(horizon, p.len())?;
    Ok(ReturnSeries {
        label: prices.label.clone(),
        kind: ReturnKind::Linear,
        horizon,
        values: p.iter().zip(&p[horizon..]).map(|(&a, &b)| b - a).collect(),
    })
}

/// `ln p[i+h] − ln p[i]`.
pub fn log_returns<T: Scalar>(prices: &PriceSeries<T>, horizon: usize) -> Result<ReturnSeries<T>> {
    let p = prices.values();
    check_horizon(horizon, p.len())?;
    if let Some(row) = p.iter().position(|&v| !(v > T::zero())) {
        return Err(Error::NonPositivePrice { row: row + 1 });
    }
    let logs: Vec<T> = p.iter().map(|v| v.ln()).collect();
    Ok(ReturnSeries {
        label: prices.label.clone(),
        kind: ReturnKind::Logarithmic,
        horizon,
        values: logs
            .iter()
            .zip(&logs[horizon..])
            .map(|(&a, &b)| b - a)
            .collect(),
    })
}

pub fn returns<T: Scalar>(
    prices: &PriceSeries<T>,
    kind: ReturnKind,
    horizon: usize,
) -> Result<ReturnSeries<T>> {
    match kind {
        ReturnKind::Linear => linear_returns(prices, horizon),
        ReturnKind::Logarithmic => log_returns(prices, horizon),
    }
}

pub fn rolling_volatility<T: Scalar>(
    returns: &ReturnSeries<T>,
    window: usize,
    mean_denominator: MeanDenominator,
) -> Result<VolatilitySeries<T>> {
    Ok(VolatilitySeries {
        label: returns.label.clone(),
        window,
        mean_denominator,
        values: rolling_volatility_values(&returns.values, window, mean_denominator)?,
    })
}

/// Sliding (stride 1) volatility over windows of `window` consecutive returns:
/// `sqrt(Σ (r − μ)² / (T − 1))` with `μ = Σ r / d`, `d` set by `mean_denominator`.
///
/// Window sums are maintained incrementally on returns shifted by their global
/// mean, which keeps the expanded sum of squares well conditioned.
pub fn rolling_volatility_values<T: Scalar>(
    returns: &[T],
    window: usize,
    mean_denominator: MeanDenominator,
) -> Result<Vec<T>> {
    if window < 2 {
        return Err(Error::WindowTooSmall { window, min: 2 });
    }
    if window > returns.len() {
        return Err(Error::WindowTooLarge {
            window,
            len: returns.len(),
        });
    }
    let shift = returns.iter().copied().sum::<T>() / T::of_usize(returns.len());
    let t = T::of_usize(window);
    let divisor = T::of_usize(mean_denominator.divisor(window));
    let var_divisor = T::of_usize(window - 1);

    let mut sum = CompensatedSum::new();
    let mut sum_sq = CompensatedSum::new();
    let mut out = Vec::with_capacity(returns.len() - window + 1);
    for (i, &r) in returns.iter().enumerate() {
        let s = r - shift;
        sum.add(s);
        sum_sq.add(s * s);
        if i >= window {
            let old = returns[i - window] - shift;
            sum.sub(old);
            sum_sq.sub(old * old);
        }
        if i + 1 >= window {
            let s1 = sum.value();
            // window mean, expressed relative to the shift
            let m = (s1 + t * shift) / divisor - shift;
            let centered = sum_sq.value() - (m + m) * s1 + t * m * m;
            out.push((centered.max(T::zero()) / var_divisor).sqrt());
        }
    }
    Ok(out)
}
