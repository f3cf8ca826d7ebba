//! Feasible-WLS weights from squared OLS residuals.
//!
//! Squared residuals are averaged over a window of neighbouring samples, where
//! "neighbouring" means adjacent in sampling index, or adjacent after sorting by
//! the value of the variable that drives the noise variance.

use crate::error::{Error, Result};
use crate::knowledge::HeteroSpec;
use crate::regression::{ols_fit, DesignMatrix};

/// Smoothing window length `λ` in samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window(usize);

impl Window {
    pub fn new(lambda: usize) -> Result<Self> {
        if lambda == 0 {
            return Err(Error::Config("window length must be at least 1".into()));
        }
        Ok(Self(lambda))
    }

    pub fn get(self) -> usize {
        self.0
    }

    fn half_width(self) -> usize {
        self.0 / 2
    }
}

/// Local mean of `r²` over `[i − ⌊λ/2⌋, i + ⌊λ/2⌋]` clipped to the sample,
/// divided by the number of terms actually in the window.
pub fn smooth_squared_residuals(r: &[f64], window: Window) -> Result<Vec<f64>> {
    let n = r.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for v in r {
        acc += v * v;
        prefix.push(acc);
    }
    let h = window.half_width();
    let mut out: Vec<f64> = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(h);
            let hi = (i + h).min(n - 1);
            (prefix[hi + 1] - prefix[lo]) / (hi + 1 - lo) as f64
        })
        .collect();
    apply_floor(&mut out);
    Ok(out)
}

fn apply_floor(var: &mut [f64]) {
    let max = var.iter().cloned().fold(0.0, f64::max);
    let floor = (1e-12 * max).max(1e-300);
    for v in var.iter_mut() {
        if !(*v >= floor) {
            *v = floor;
        }
    }
}

/// Estimated conditional noise variance `σ̂²_i` of `node` given `z`.
///
/// Residualizes `node` on `z` with OLS, then smooths the squared residuals in
/// sampling order or in ascending order of the driver values. Ties among driver
/// values keep their original relative order.
pub fn estimate_variance(
    node: &[f64],
    z: &DesignMatrix,
    spec: &HeteroSpec,
    driver: Option<&[f64]>,
    window: Window,
) -> Result<Vec<f64>> {
    let n = node.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let resid = if z.ncols() == 0 {
        if z.nrows() != n {
            return Err(Error::Dimension(format!("design has {} rows, node has {n}", z.nrows())));
        }
        node.to_vec()
    } else {
        ols_fit(z, node)?.residuals
    };

    match spec {
        HeteroSpec::NoneDeclared => Ok(vec![1.0; n]),
        HeteroSpec::SamplingIndex => smooth_squared_residuals(&resid, window),
        HeteroSpec::ParentDriven(name) => {
            let driver = driver.ok_or_else(|| Error::MissingDriver(name.clone()))?;
            if driver.len() != n {
                return Err(Error::Dimension(format!(
                    "driver `{name}` has {} values, node has {n}",
                    driver.len()
                )));
            }
            let mut order: Vec<usize> = (0..n).collect();
            // stable: equal driver values stay in index order
            order.sort_by(|&a, &b| driver[a].total_cmp(&driver[b]));
            let sorted: Vec<f64> = order.iter().map(|&i| resid[i]).collect();
            let smoothed = smooth_squared_residuals(&sorted, window)?;
            let mut out = vec![0.0; n];
            for (rank, &i) in order.iter().enumerate() {
                out[i] = smoothed[rank];
            }
            Ok(out)
        }
    }
}

/// WLS weights `1/σ̂²_i`. Returns unit weights for [`HeteroSpec::NoneDeclared`].
pub fn estimate_weights(
    node: &[f64],
    z: &DesignMatrix,
    spec: &HeteroSpec,
    driver: Option<&[f64]>,
    window: Window,
) -> Result<Vec<f64>> {
    let var = estimate_variance(node, z, spec, driver, window)?;
    Ok(var.into_iter().map(|v| 1.0 / v).collect())
}
