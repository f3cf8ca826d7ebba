//! Partial-correlation conditional independence tests.
//!
//! `ParCorrOls` residualizes both variables on the conditioning set with OLS.
//! `ParCorrWls` does the same for homoskedastic variables, but for every tested
//! variable that the expert knowledge declares heteroskedastic it refits with
//! inverse-variance weights and correlates the √w-standardized residuals.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::knowledge::{ExpertKnowledge, HeteroSpec};
use crate::regression::{ols_fit, standardized_residuals, wls_fit, DesignMatrix};
use crate::stats::{student_t_quantile, two_sided_p_value};
use crate::variance::{estimate_weights, Window};
use serde::Serialize;
use std::collections::BTreeMap;

/// Per-variable true noise standard deviations, one entry per sample.
pub type NoiseScales = BTreeMap<String, Vec<f64>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Variant {
    ParCorrOls,
    ParCorrWls,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum WeightMode {
    /// Weights from smoothed squared residuals.
    Estimated,
    /// Weights `1/σ²` from known noise scales.
    GroundTruth,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CiTestSpec {
    pub variant: Variant,
    pub knowledge: ExpertKnowledge,
    pub window: Window,
    pub weight_mode: WeightMode,
    pub alpha: f64,
}

impl CiTestSpec {
    pub fn ols(alpha: f64) -> Self {
        Self {
            variant: Variant::ParCorrOls,
            knowledge: ExpertKnowledge::new(),
            window: Window::new(10).expect("nonzero"),
            weight_mode: WeightMode::Estimated,
            alpha,
        }
    }

    pub fn wls(knowledge: ExpertKnowledge, window: Window, weight_mode: WeightMode, alpha: f64) -> Self {
        Self {
            variant: Variant::ParCorrWls,
            knowledge,
            window,
            weight_mode,
            alpha,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CiTestResult {
    pub rho_hat: f64,
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub dependent: bool,
}

/// A conditional independence test over dataset column indices.
pub trait CiTest: Sync {
    fn test(&self, data: &Dataset, x: usize, y: usize, cond: &[usize]) -> Result<CiTestResult>;
}

/// Sample Pearson correlation of two residual vectors, clamped to [−1, 1].
pub fn partial_corr(rx: &[f64], ry: &[f64]) -> Result<f64> {
    if rx.len() != ry.len() {
        return Err(Error::Dimension(format!("{} vs {} residuals", rx.len(), ry.len())));
    }
    let n = rx.len();
    if n < 3 {
        return Err(Error::InsufficientSamples { n, k: 0 });
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n as f64;
    let (mx, my) = (mean(rx), mean(ry));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(ry) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// `T = ρ̂·√(n−2−k)/√(1−ρ̂²)` with its degrees of freedom `n − 2 − k`.
/// `|ρ̂| = 1` yields an infinite statistic.
pub fn studentize(rho_hat: f64, n: usize, k: usize) -> Result<(f64, usize)> {
    if n < k + 3 {
        return Err(Error::InsufficientSamples { n, k });
    }
    if !(rho_hat.abs() <= 1.0) {
        return Err(Error::Config(format!("correlation {rho_hat} outside [-1, 1]")));
    }
    let dof = n - 2 - k;
    let denom = (1.0 - rho_hat * rho_hat).sqrt();
    let stat = if denom == 0.0 {
        rho_hat.signum() * f64::INFINITY
    } else {
        rho_hat * (dof as f64).sqrt() / denom
    };
    Ok((stat, dof))
}

/// Two-sided rejection threshold `t(1 − α/2, dof)`.
pub fn critical_value(alpha: f64, dof: usize) -> Result<f64> {
    student_t_quantile(1.0 - alpha / 2.0, dof as f64)
}

/// The ParCorr-OLS / ParCorr-WLS test, optionally carrying true noise scales
/// for [`WeightMode::GroundTruth`].
#[derive(Debug, Clone)]
pub struct ParCorr {
    pub spec: CiTestSpec,
    pub noise_scales: Option<NoiseScales>,
}

impl ParCorr {
    pub fn new(spec: CiTestSpec) -> Self {
        Self {
            spec,
            noise_scales: None,
        }
    }

    pub fn with_noise_scales(spec: CiTestSpec, scales: NoiseScales) -> Self {
        Self {
            spec,
            noise_scales: Some(scales),
        }
    }

    /// Residuals of `node` after removing `cond`, standardized when the node is
    /// declared heteroskedastic and the variant is WLS.
    fn residuals(&self, data: &Dataset, node: usize, z: &DesignMatrix) -> Result<Vec<f64>> {
        let values = data.column(node);
        let name = &data.names()[node];
        let declared = match self.spec.variant {
            Variant::ParCorrOls => &HeteroSpec::NoneDeclared,
            Variant::ParCorrWls => self.spec.knowledge.get(name),
        };
        if matches!(declared, HeteroSpec::NoneDeclared) {
            return Ok(ols_fit(z, values)?.residuals);
        }

        let weights = match self.spec.weight_mode {
            WeightMode::GroundTruth => {
                let sigma = self
                    .noise_scales
                    .as_ref()
                    .and_then(|m| m.get(name))
                    .ok_or_else(|| Error::Config(format!("no true noise scales supplied for `{name}`")))?;
                if sigma.len() != values.len() {
                    return Err(Error::Dimension(format!("noise scales for `{name}` have wrong length")));
                }
                sigma.iter().map(|s| 1.0 / (s * s)).collect::<Vec<f64>>()
            }
            WeightMode::Estimated => {
                let driver = match declared {
                    HeteroSpec::ParentDriven(h) => Some(data.column_by_name(h)?),
                    _ => None,
                };
                estimate_weights(values, z, declared, driver, self.spec.window)?
            }
        };
        let fit = wls_fit(z, values, &weights)?;
        standardized_residuals(&fit, &weights)
    }
}

impl CiTest for ParCorr {
    fn test(&self, data: &Dataset, x: usize, y: usize, cond: &[usize]) -> Result<CiTestResult> {
        self.spec.validate()?;
        let d = data.n_vars();
        if x >= d || y >= d || cond.iter().any(|&c| c >= d) {
            return Err(Error::Dimension("variable index out of range".into()));
        }
        if x == y || cond.contains(&x) || cond.contains(&y) {
            return Err(Error::Config(
                "tested variables must be distinct and outside the conditioning set".into(),
            ));
        }
        let n = data.n_samples();
        let k = cond.len();
        if n < k + 3 {
            return Err(Error::InsufficientSamples { n, k });
        }
        let z = if k == 0 {
            DesignMatrix::empty(n)?
        } else {
            DesignMatrix::with_labels(
                cond.iter().map(|&c| data.column(c).to_vec()).collect(),
                cond.iter().map(|&c| data.names()[c].clone()).collect(),
            )?
        };
        let rx = self.residuals(data, x, &z)?;
        let ry = self.residuals(data, y, &z)?;
        let rho_hat = partial_corr(&rx, &ry)?;
        let (statistic, dof) = studentize(rho_hat, n, k)?;
        let p_value = two_sided_p_value(statistic, dof as f64)?;
        Ok(CiTestResult {
            rho_hat,
            statistic,
            dof,
            p_value,
            dependent: p_value < self.spec.alpha,
        })
    }
}

/// Runs the test on named variables.
pub fn run_ci_test(
    data: &Dataset,
    x: &str,
    y: &str,
    cond: &[&str],
    spec: &CiTestSpec,
    noise_scales: Option<&NoiseScales>,
) -> Result<CiTestResult> {
    spec.knowledge.validate(data.names())?;
    let xi = data.index_of(x)?;
    let yi = data.index_of(y)?;
    let ci = cond.iter().map(|c| data.index_of(c)).collect::<Result<Vec<_>>>()?;
    let test = ParCorr {
        spec: spec.clone(),
        noise_scales: noise_scales.cloned(),
    };
    test.test(data, xi, yi, &ci)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{rng_from_seed, sample_standard_normal};
    use approx::assert_abs_diff_eq;

    fn dataset(cols: Vec<(&str, Vec<f64>)>) -> Dataset {
        let (names, columns): (Vec<_>, Vec<_>) = cols.into_iter().map(|(n, c)| (n.to_string(), c)).unzip();
        Dataset::new(names, columns).unwrap()
    }

    #[test]
    fn correlation_examples() {
        let a = [1.0, 3.0, -2.0, 0.5];
        assert_abs_diff_eq!(partial_corr(&a, &a).unwrap(), 1.0, epsilon = 1e-15);
        let r = partial_corr(&[1.0, -1.0, 1.0, -1.0], &[-1.0, 1.0, -1.0, 1.0]).unwrap();
        assert_eq!(r, -1.0);
        assert!(matches!(partial_corr(&[1.0; 4], &a), Err(Error::ZeroVariance)));
        assert!(partial_corr(&[1.0, 2.0], &[2.0, 1.0]).is_err());
    }

    #[test]
    fn correlation_matches_covariance_formula() {
        let mut rng = rng_from_seed(10);
        let a = sample_standard_normal(&mut rng, 10);
        let b = sample_standard_normal(&mut rng, 10);
        let n = 10.0;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let cov = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / (n - 1.0);
        let va = a.iter().map(|x| (x - ma).powi(2)).sum::<f64>() / (n - 1.0);
        let vb = b.iter().map(|y| (y - mb).powi(2)).sum::<f64>() / (n - 1.0);
        assert_abs_diff_eq!(partial_corr(&a, &b).unwrap(), cov / (va * vb).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn studentize_examples() {
        assert_eq!(studentize(0.0, 50, 3).unwrap(), (0.0, 45));
        let (t, dof) = studentize(0.5, 102, 0).unwrap();
        assert_eq!(dof, 100);
        assert_abs_diff_eq!(t, 0.5 * 10.0 / 0.75f64.sqrt(), epsilon = 1e-12);
        assert_eq!(studentize(0.1, 500, 1).unwrap().1, 497);
        assert!(studentize(1.0, 10, 0).unwrap().0.is_infinite());
        assert!(matches!(studentize(0.1, 4, 2), Err(Error::InsufficientSamples { .. })));
    }

    #[test]
    fn identical_columns_are_maximally_dependent() {
        let v = sample_standard_normal(&mut rng_from_seed(1), 50);
        let d = dataset(vec![("X", v.clone()), ("Y", v)]);
        let r = run_ci_test(&d, "X", "Y", &[], &CiTestSpec::ols(0.05), None).unwrap();
        assert_abs_diff_eq!(r.rho_hat, 1.0, epsilon = 1e-12);
        assert!(r.p_value < 1e-12);
        assert!(r.dependent);
    }

    #[test]
    fn decision_matches_critical_value() {
        let mut rng = rng_from_seed(8);
        for _ in 0..50 {
            let z = sample_standard_normal(&mut rng, 40);
            let e = sample_standard_normal(&mut rng, 40);
            let x: Vec<f64> = z.iter().zip(&e).map(|(a, b)| a + b).collect();
            let y: Vec<f64> = z
                .iter()
                .zip(&sample_standard_normal(&mut rng, 40))
                .map(|(a, b)| a + 0.2 * e[0] * b)
                .collect();
            let d = dataset(vec![("X", x), ("Y", y), ("Z", z)]);
            let r = run_ci_test(&d, "X", "Y", &["Z"], &CiTestSpec::ols(0.1), None).unwrap();
            assert_eq!(r.dependent, r.statistic.abs() > critical_value(0.1, r.dof).unwrap());
        }
    }

    #[test]
    fn affine_invariance_for_ols() {
        let mut rng = rng_from_seed(21);
        let z = sample_standard_normal(&mut rng, 200);
        let x: Vec<f64> = z
            .iter()
            .zip(sample_standard_normal(&mut rng, 200))
            .map(|(a, b)| a + b)
            .collect();
        let y: Vec<f64> = x
            .iter()
            .zip(sample_standard_normal(&mut rng, 200))
            .map(|(a, b)| 0.1 * a + b)
            .collect();
        let scaled: Vec<f64> = x.iter().map(|v| 7.5 * v).collect();
        let d1 = dataset(vec![("X", x), ("Y", y.clone()), ("Z", z.clone())]);
        let d2 = dataset(vec![("X", scaled), ("Y", y), ("Z", z)]);
        let spec = CiTestSpec::ols(0.05);
        let a = run_ci_test(&d1, "X", "Y", &["Z"], &spec, None).unwrap();
        let b = run_ci_test(&d2, "X", "Y", &["Z"], &spec, None).unwrap();
        assert_abs_diff_eq!(a.rho_hat, b.rho_hat, epsilon = 1e-10);
        assert_abs_diff_eq!(a.statistic, b.statistic, epsilon = 1e-10);
        assert_abs_diff_eq!(a.p_value, b.p_value, epsilon = 1e-10);
    }

    #[test]
    fn ground_truth_requires_scales() {
        let v = sample_standard_normal(&mut rng_from_seed(2), 30);
        let w = sample_standard_normal(&mut rng_from_seed(3), 30);
        let d = dataset(vec![("X", v), ("Y", w)]);
        let k = ExpertKnowledge::new().with("X", HeteroSpec::SamplingIndex);
        let spec = CiTestSpec::wls(k, Window::new(5).unwrap(), WeightMode::GroundTruth, 0.05);
        assert!(run_ci_test(&d, "X", "Y", &[], &spec, None).is_err());
        let mut scales = NoiseScales::new();
        scales.insert("X".into(), vec![2.0; 30]);
        // constant true scale: weighting changes nothing
        let wls = run_ci_test(&d, "X", "Y", &[], &spec, Some(&scales)).unwrap();
        let ols = run_ci_test(&d, "X", "Y", &[], &CiTestSpec::ols(0.05), None).unwrap();
        assert_abs_diff_eq!(wls.p_value, ols.p_value, epsilon = 1e-12);
    }

    #[test]
    fn invalid_requests() {
        let v = sample_standard_normal(&mut rng_from_seed(2), 30);
        let d = dataset(vec![("X", v.clone()), ("Y", v)]);
        let spec = CiTestSpec::ols(0.05);
        assert!(matches!(
            run_ci_test(&d, "X", "Q", &[], &spec, None),
            Err(Error::UnknownVariable(_))
        ));
        assert!(run_ci_test(&d, "X", "X", &[], &spec, None).is_err());
        assert!(run_ci_test(&d, "X", "Y", &["X"], &spec, None).is_err());
        assert!(run_ci_test(&d, "X", "Y", &[], &CiTestSpec::ols(1.5), None).is_err());
    }
}
