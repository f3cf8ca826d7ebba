//! Ordinary and weighted least squares.
//!
//! Both solvers run a Householder QR factorization of the √w-scaled design,
//! so the normal equations are never formed. Columns are used exactly as
//! given: there is no implicit intercept.

use crate::error::{Error, Result};

/// Reciprocal condition estimate below which a design is rejected.
pub const RCOND_THRESHOLD: f64 = 1e-12;

/// An `n × k` regressor matrix stored by column. `k` may be zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    n: usize,
    columns: Vec<Vec<f64>>,
    labels: Vec<String>,
}

impl DesignMatrix {
    /// A design with no regressors for `n` samples.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        Ok(Self {
            n,
            columns: Vec::new(),
            labels: Vec::new(),
        })
    }

    pub fn from_columns(columns: Vec<Vec<f64>>) -> Result<Self> {
        let labels = (0..columns.len()).map(|j| format!("x{j}")).collect();
        Self::with_labels(columns, labels)
    }

    pub fn with_labels(columns: Vec<Vec<f64>>, labels: Vec<String>) -> Result<Self> {
        let n = columns.first().map(Vec::len).ok_or(Error::EmptyInput)?;
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if labels.len() != columns.len() {
            return Err(Error::Dimension(format!(
                "{} labels for {} columns",
                labels.len(),
                columns.len()
            )));
        }
        for (j, c) in columns.iter().enumerate() {
            if c.len() != n {
                return Err(Error::Dimension(format!(
                    "column {j} has {} rows, expected {n}",
                    c.len()
                )));
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("design matrix"));
            }
        }
        Ok(Self { n, columns, labels })
    }

    /// Builds a design from row-major data.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.first().map(Vec::len).ok_or(Error::EmptyInput)?;
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        if k == 0 {
            return Self::empty(rows.len());
        }
        let columns = (0..k).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
        Self::from_columns(columns)
    }

    pub fn nrows(&self) -> usize {
        self.n
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// `X · beta`.
    pub fn mul_vec(&self, beta: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (col, b) in self.columns.iter().zip(beta) {
            for (o, x) in out.iter_mut().zip(col) {
                *o += x * b;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub beta: Vec<f64>,
    /// Unweighted residuals `y − X·beta`, also for weighted fits.
    pub residuals: Vec<f64>,
    pub weighted: bool,
}

/// Checks that every weight is positive and finite.
pub fn validate_weights(w: &[f64]) -> Result<()> {
    match w.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
        Some(index) => Err(Error::NonPositiveWeight { index, value: w[index] }),
        None => Ok(()),
    }
}

pub fn ols_fit(x: &DesignMatrix, y: &[f64]) -> Result<FitResult> {
    check_response(x, y)?;
    let beta = solve_scaled(x, y, None)?;
    Ok(finish(x, y, beta, false))
}

/// Minimizes `(y − Xb)ᵀ W (y − Xb)` with `W = diag(w)`.
pub fn wls_fit(x: &DesignMatrix, y: &[f64], w: &[f64]) -> Result<FitResult> {
    check_response(x, y)?;
    if w.len() != y.len() {
        return Err(Error::Dimension(format!("{} weights for {} samples", w.len(), y.len())));
    }
    validate_weights(w)?;
    let sqrt_w: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    let beta = solve_scaled(x, y, Some(&sqrt_w))?;
    Ok(finish(x, y, beta, true))
}

/// Element-wise `√w_i · r_i`; homoskedastic when `w` holds reciprocal error variances.
pub fn standardized_residuals(fit: &FitResult, w: &[f64]) -> Result<Vec<f64>> {
    if fit.residuals.len() != w.len() {
        return Err(Error::Dimension(format!(
            "{} weights for {} residuals",
            w.len(),
            fit.residuals.len()
        )));
    }
    validate_weights(w)?;
    Ok(fit.residuals.iter().zip(w).map(|(r, wi)| wi.sqrt() * r).collect())
}

fn check_response(x: &DesignMatrix, y: &[f64]) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(Error::Dimension(format!(
            "design has {} rows, response has {}",
            x.nrows(),
            y.len()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("response"));
    }
    Ok(())
}

fn finish(x: &DesignMatrix, y: &[f64], beta: Vec<f64>, weighted: bool) -> FitResult {
    let fitted = x.mul_vec(&beta);
    let residuals = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    FitResult {
        beta,
        residuals,
        weighted,
    }
}

/// Least-squares solution of `diag(s)·X b ≈ diag(s)·y` by Householder QR.
fn solve_scaled(x: &DesignMatrix, y: &[f64], scale: Option<&[f64]>) -> Result<Vec<f64>> {
    let n = x.nrows();
    let k = x.ncols();
    if k == 0 {
        return Ok(Vec::new());
    }
    if k > n {
        return Err(Error::SingularDesign { rcond: 0.0 });
    }

    let scaled = |v: &[f64]| -> Vec<f64> {
        match scale {
            Some(s) => v.iter().zip(s).map(|(a, b)| a * b).collect(),
            None => v.to_vec(),
        }
    };
    let mut a: Vec<Vec<f64>> = x.columns().iter().map(|c| scaled(c)).collect();
    let mut b = scaled(y);
    let mut diag = vec![0.0; k];

    for j in 0..k {
        let norm = a[j][j..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::SingularDesign { rcond: 0.0 });
        }
        let alpha = if a[j][j] > 0.0 { -norm } else { norm };
        // v = a_j[j..] - alpha·e_1, stored in place
        a[j][j] -= alpha;
        let vnorm2: f64 = a[j][j..].iter().map(|v| v * v).sum();
        diag[j] = alpha;
        if vnorm2 == 0.0 {
            continue;
        }
        let (head, tail) = a.split_at_mut(j + 1);
        let v = &head[j][j..];
        for col in tail.iter_mut() {
            reflect(v, vnorm2, &mut col[j..]);
        }
        reflect(v, vnorm2, &mut b[j..]);
    }

    let max_d = diag.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
    let min_d = diag.iter().fold(f64::INFINITY, |m, d| m.min(d.abs()));
    let rcond = if max_d > 0.0 { min_d / max_d } else { 0.0 };
    if !(rcond >= RCOND_THRESHOLD) {
        return Err(Error::SingularDesign { rcond });
    }

    // back substitution on R (diag holds R_jj, a[c][r] holds R_rc above the diagonal)
    let mut beta = vec![0.0; k];
    for r in (0..k).rev() {
        let mut acc = b[r];
        for c in r + 1..k {
            acc -= a[c][r] * beta[c];
        }
        beta[r] = acc / diag[r];
    }
    Ok(beta)
}

fn reflect(v: &[f64], vnorm2: f64, target: &mut [f64]) {
    let dot: f64 = v.iter().zip(target.iter()).map(|(a, b)| a * b).sum();
    let f = 2.0 * dot / vnorm2;
    for (t, vi) in target.iter_mut().zip(v) {
        *t -= f * vi;
    }
}
