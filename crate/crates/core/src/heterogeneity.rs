//! Market heterogeneity index.
//!
//! `H_MIX(n)` is minus the trapezoidal integral of the entropy curve over its
//! observed support, from the smallest observed duration to the largest one
//! (`τ_max`). `MIX` integrates `H_MIX(n)` over the window grid and is reported
//! as an absolute value. Within a compared set the MIX values are min-max
//! rescaled to `[0, 1]`, and allocation weights are `1 − MIX` normalized to
//! one.

use serde::Serialize;

use crate::entropy::EntropyCurve;
use crate::error::{Error, Result};
use crate::quadrature::trapezoid;
use crate::scalar::Scalar;

pub const INTEGRATION_METHOD: &str = "trapezoid";
pub const WEIGHT_BASIS: &str = "rescaled";

pub fn hmix<T: Scalar>(curve: &EntropyCurve<T>) -> Result<T> {
    if curve.support.is_empty() {
        return Err(Error::EmptyCurve);
    }
    let taus: Vec<T> = curve.support.iter().map(|&t| T::of_usize(t)).collect();
    Ok(-trapezoid(&taus, &curve.values))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HMixCurve<T> {
    pub label: String,
    pub windows: Vec<usize>,
    pub values: Vec<T>,
    /// Upper integration limit used for each window.
    pub tau_max: Vec<usize>,
}

impl<T: Scalar> HMixCurve<T> {
    /// Evaluates `H_MIX` for each curve; the curves are sorted by window.
    pub fn from_curves(label: impl Into<String>, curves: &[EntropyCurve<T>]) -> Result<Self> {
        let mut order: Vec<&EntropyCurve<T>> = curves.iter().collect();
        order.sort_by_key(|c| c.window);
        if order.windows(2).any(|w| w[0].window == w[1].window) {
            return Err(Error::InvalidConfig(
                "duplicate moving-average window".into(),
            ));
        }
        let mut out = Self {
            label: label.into(),
            windows: Vec::with_capacity(order.len()),
            values: Vec::with_capacity(order.len()),
            tau_max: Vec::with_capacity(order.len()),
        };
        for c in order {
            out.windows.push(c.window);
            out.values.push(hmix(c)?);
            out.tau_max.push(c.support.last().copied().unwrap_or(0));
        }
        Ok(out)
    }
}

/// `|∫ H_MIX(n) dn|` over the windows lying in `[n_min, n_max]`.
pub fn mix<T: Scalar>(curve: &HMixCurve<T>, n_min: usize, n_max: usize) -> Result<T> {
    let (ns, hs): (Vec<T>, Vec<T>) = curve
        .windows
        .iter()
        .zip(&curve.values)
        .filter(|(&n, _)| n >= n_min && n <= n_max)
        .map(|(&n, &h)| (T::of_usize(n), h))
        .unzip();
    if ns.len() < 2 {
        return Err(Error::RangeTooNarrow { n_min, n_max });
    }
    Ok(trapezoid(&ns, &hs).abs())
}

/// Min-max rescaling over the compared set. A set without spread maps to zeros.
pub fn rescale_mix<T: Scalar>(raw: &[T]) -> Vec<T> {
    let lo = raw.iter().copied().fold(T::infinity(), T::min);
    let hi = raw.iter().copied().fold(T::neg_infinity(), T::max);
    let spread = hi - lo;
    raw.iter()
        .map(|&v| {
            if spread > T::zero() {
                (v - lo) / spread
            } else {
                T::zero()
            }
        })
        .collect()
}

/// `w_i = (1 − m_i) / Σ_j (1 − m_j)` on rescaled values `m`.
pub fn mix_weights<T: Scalar>(rescaled: &[T]) -> Result<Vec<T>> {
    if rescaled.is_empty() {
        return Err(Error::EmptySet);
    }
    let complement: Vec<T> = rescaled
        .iter()
        .map(|&m| (T::one() - m).max(T::zero()))
        .collect();
    let total: T = complement.iter().copied().sum();
    if total <= T::zero() {
        return Err(Error::AllMaximallyHeterogeneous);
    }
    Ok(complement.iter().map(|&c| c / total).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixReport<T> {
    pub labels: Vec<String>,
    pub raw_mix: Vec<T>,
    pub rescaled_mix: Vec<T>,
    pub weights: Vec<T>,
    pub n_range: (usize, usize),
    pub integration_method: String,
    pub weight_basis: String,
    /// Largest observed duration per series and window, aligned with `windows`.
    pub tau_max: Vec<Vec<usize>>,
    pub windows: Vec<Vec<usize>>,
}

pub fn mix_report<T: Scalar>(
    curves: &[HMixCurve<T>],
    n_min: usize,
    n_max: usize,
) -> Result<MixReport<T>> {
    if curves.is_empty() {
        return Err(Error::EmptySet);
    }
    let raw_mix = curves
        .iter()
        .map(|c| mix(c, n_min, n_max))
        .collect::<Result<Vec<T>>>()?;
    let rescaled_mix = rescale_mix(&raw_mix);
    let weights = mix_weights(&rescaled_mix)?;
    Ok(MixReport {
        labels: curves.iter().map(|c| c.label.clone()).collect(),
        raw_mix,
        rescaled_mix,
        weights,
        n_range: (n_min, n_max),
        integration_method: INTEGRATION_METHOD.to_string(),
        weight_basis: WEIGHT_BASIS.to_string(),
        tau_max: curves.iter().map(|c| c.tau_max.clone()).collect(),
        windows: curves.iter().map(|c| c.windows.clone()).collect(),
    })
}
