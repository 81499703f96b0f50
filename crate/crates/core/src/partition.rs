//! Partition of a series into clusters bounded by consecutive intersections
//! with its trailing moving average.
//!
//! Sign convention: `d_t = x_t − x̃_{t,n}` is evaluated from index `n − 1` on.
//! A value of `d_t` that is zero up to rounding belongs to the sign-run that
//! precedes it, and leading zeros are skipped. A crossing is the first index
//! of every sign-run after the first one; cluster durations are the gaps
//! between consecutive crossings. Samples before the first and after the last
//! crossing are censored and belong to no cluster.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{CompensatedSum, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct MovingAverageSeries<T> {
    pub window: usize,
    /// Parent index of `values[0]`, always `window − 1`.
    pub offset: usize,
    pub values: Vec<T>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClusterPartition {
    pub window: usize,
    pub durations: Vec<usize>,
    /// Parent indices at which a new sign-run starts.
    pub crossing_indices: Vec<usize>,
}

impl ClusterPartition {
    /// Number of samples covered by complete clusters.
    pub fn covered(&self) -> usize {
        match (self.crossing_indices.first(), self.crossing_indices.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0,
        }
    }
}

fn check_window(window: usize, len: usize) -> Result<()> {
    if window < 2 {
        return Err(Error::WindowTooSmall { window, min: 2 });
    }
    if window > len {
        return Err(Error::WindowTooLarge { window, len });
    }
    Ok(())
}

/// Visits every full trailing window as `(t, window_sum, window_abs_sum)`.
fn for_each_window<T: Scalar>(x: &[T], window: usize, mut f: impl FnMut(usize, T, T)) {
    let mut sum = CompensatedSum::new();
    let mut abs = CompensatedSum::new();
    for (t, &v) in x.iter().enumerate() {
        sum.add(v);
        abs.add(v.abs());
        if t >= window {
            sum.sub(x[t - window]);
            abs.sub(x[t - window].abs());
        }
        if t + 1 >= window {
            f(t, sum.value(), abs.value());
        }
    }
}

/// Causal moving average: the value at parent index `t ≥ n − 1` is the mean of `x[t−n+1..=t]`.
pub fn moving_average<T: Scalar>(x: &[T], window: usize) -> Result<MovingAverageSeries<T>> {
    check_window(window, x.len())?;
    let n = T::of_usize(window);
    let mut values = Vec::with_capacity(x.len() + 1 - window);
    for_each_window(x, window, |_, sum, _| values.push(sum / n));
    Ok(MovingAverageSeries {
        window,
        offset: window - 1,
        values,
    })
}

/// Sign of `x_t − x̃_{t,n}` for each `t ≥ n − 1`: `1`, `-1`, or `0` for a touch.
///
/// The comparison is made on `n·x_t − Σ window`; differences within a few
/// ulps of the magnitudes involved count as touches.
pub fn deviation_signs<T: Scalar>(x: &[T], window: usize) -> Result<Vec<i8>> {
    check_window(window, x.len())?;
    let n = T::of_usize(window);
    let slack = T::of(8.0) * T::epsilon();
    let mut signs = Vec::with_capacity(x.len() + 1 - window);
    for_each_window(x, window, |t, sum, abs| {
        let scaled = n * x[t];
        let diff = scaled - sum;
        let tol = slack * (scaled.abs() + abs);
        signs.push(if diff > tol {
            1
        } else if diff < -tol {
            -1
        } else {
            0
        });
    });
    Ok(signs)
}

pub fn detect_clusters<T: Scalar>(x: &[T], window: usize) -> Result<ClusterPartition> {
    let signs = deviation_signs(x, window)?;
    let offset = window - 1;
    let mut current = 0i8;
    let mut crossings = Vec::new();
    for (i, &s) in signs.iter().enumerate() {
        if s == 0 || s == current {
            continue;
        }
        if current != 0 {
            crossings.push(offset + i);
        }
        current = s;
    }
    if current == 0 {
        return Err(Error::DegenerateSeries);
    }
    let durations = crossings.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(ClusterPartition {
        window,
        durations,
        crossing_indices: crossings,
    })
}
