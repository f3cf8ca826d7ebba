//! Student-t distribution, p-value summaries and seeded random streams.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

/// The random generator used everywhere in the crate.
pub type SimRng = ChaCha8Rng;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Regularized incomplete beta `I_x(a, b)`; `y` must equal `1 − x` and is passed
/// separately so callers can supply it without cancellation.
fn inc_beta(x: f64, y: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    let front = (a * x.ln() + b * y.ln() - ln_beta(a, b)).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(x, a, b) / a
    } else {
        1.0 - front * beta_cf(y, b, a) / b
    }
}

/// Continued fraction for the incomplete beta, modified Lentz evaluation.
fn beta_cf(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    const MAX_ITER: usize = 20_000;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

fn check_dof(dof: f64) -> Result<()> {
    if dof.is_finite() && dof > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidDof(dof))
    }
}

/// Upper tail `P(T > |x|)` of Student's t.
fn t_tail(x: f64, dof: f64) -> f64 {
    if x.is_infinite() {
        return 0.0;
    }
    let x2 = x * x;
    let denom = dof + x2;
    0.5 * inc_beta(dof / denom, x2 / denom, 0.5 * dof, 0.5)
}

pub fn student_t_cdf(x: f64, dof: f64) -> Result<f64> {
    check_dof(dof)?;
    if x.is_nan() {
        return Err(Error::NonFinite("t statistic"));
    }
    let tail = t_tail(x, dof);
    Ok(if x > 0.0 { 1.0 - tail } else { tail })
}

pub fn student_t_pdf(x: f64, dof: f64) -> Result<f64> {
    check_dof(dof)?;
    let ln_norm = ln_gamma(0.5 * (dof + 1.0)) - ln_gamma(0.5 * dof) - 0.5 * (dof * PI).ln();
    Ok((ln_norm - 0.5 * (dof + 1.0) * (x * x / dof).ln_1p()).exp())
}

/// Two-sided p-value `2·P(T > |t|)`.
pub fn two_sided_p_value(t: f64, dof: f64) -> Result<f64> {
    check_dof(dof)?;
    if t.is_nan() {
        return Err(Error::NonFinite("t statistic"));
    }
    Ok((2.0 * t_tail(t, dof)).clamp(0.0, 1.0))
}

/// Inverse of [`student_t_cdf`] by safeguarded Newton iteration.
pub fn student_t_quantile(q: f64, dof: f64) -> Result<f64> {
    check_dof(dof)?;
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidQuantile(q));
    }
    if q == 0.5 {
        return Ok(0.0);
    }
    // solve in the lower tail, where the cdf is representable with full relative precision
    let target = q.min(1.0 - q);
    let f = |x: f64| t_tail(x, dof) - target; // for x ≤ 0, cdf(x) = tail(x)

    let mut lo = -1.0;
    while f(lo) > 0.0 {
        lo *= 2.0;
        if lo < -1e300 {
            break;
        }
    }
    let mut hi = 0.0;
    let mut x = 0.5 * lo;
    for _ in 0..200 {
        let fx = f(x);
        if fx == 0.0 {
            break;
        }
        if fx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let pdf = student_t_pdf(x, dof)?;
        let mut next = x - fx / pdf;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * x.abs().max(1.0) {
            x = next;
            break;
        }
        x = next;
    }
    Ok(if q > 0.5 { -x } else { x })
}

/// Sup-distance between the empirical CDF of `p` and the uniform CDF on [0, 1].
pub fn ks_uniform(p: &[f64]) -> Result<f64> {
    check_p_values(p)?;
    let mut sorted = p.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    Ok(sorted
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let above = (i + 1) as f64 / m - v;
            let below = v - i as f64 / m;
            above.max(below)
        })
        .fold(0.0, f64::max))
}

/// Area under the empirical power curve, `1 − mean(p)`.
pub fn aupc(p: &[f64]) -> Result<f64> {
    check_p_values(p)?;
    Ok(1.0 - p.iter().sum::<f64>() / p.len() as f64)
}

fn check_p_values(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::EmptyInput);
    }
    if p.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::Config("p-values must lie in [0, 1]".into()));
    }
    Ok(())
}

pub fn sample_standard_normal<R: Rng + ?Sized>(rng: &mut R, count: usize) -> Vec<f64> {
    (0..count).map(|_| StandardNormal.sample(rng)).collect()
}

/// Mixes a master seed with a path of indices into an independent stream seed.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    let mut h = splitmix64(master ^ 0x6a09_e667_f3bc_c908);
    for &p in path {
        h = splitmix64(h ^ splitmix64(p.wrapping_add(0x9e37_79b9_7f4a_7c15)));
    }
    h
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Bootstrap standard error of `statistic` over `resamples` resamples drawn
/// with replacement.
pub fn bootstrap_stderr<F>(values: &[f64], resamples: usize, seed: u64, statistic: F) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    if values.len() < 2 || resamples < 2 {
        return f64::NAN;
    }
    let mut rng = rng_from_seed(seed);
    let mut buf = vec![0.0; values.len()];
    let stats: Vec<f64> = (0..resamples)
        .map(|_| {
            for b in buf.iter_mut() {
                *b = values[rng.random_range(0..values.len())];
            }
            statistic(&buf)
        })
        .collect();
    let m = stats.iter().sum::<f64>() / stats.len() as f64;
    (stats.iter().map(|s| (s - m).powi(2)).sum::<f64>() / (stats.len() - 1) as f64).sqrt()
}

/// Standard normal CDF via the t limit; only used by diagnostics and tests.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

// Complementary error function, W. J. Cody's rational Chebyshev approximation
// as given in Numerical Recipes (erfcc), relative error below 1.2e-7.
fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let r = t
        * (-z * z - 1.265_512_23
            + t * (1.000_023_68
                + t * (0.374_091_96
                    + t * (0.096_784_18
                        + t * (-0.186_288_06
                            + t * (0.278_868_07
                                + t * (-1.135_203_98
                                    + t * (1.488_515_87 + t * (-0.822_152_23 + t * 0.170_872_77)))))))))
            .exp();
    if x >= 0.0 {
        r
    } else {
        2.0 - r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;

    /// Adaptive Simpson quadrature of the t density from 0 to |x|.
    fn cdf_by_quadrature(x: f64, dof: f64) -> f64 {
        fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
            (b - a) / 6.0 * (fa + 4.0 * fm + fb)
        }
        fn adapt(
            f: &dyn Fn(f64) -> f64,
            a: f64,
            b: f64,
            fa: f64,
            fm: f64,
            fb: f64,
            whole: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = simpson(a, m, fa, flm, fm);
            let right = simpson(m, b, fm, frm, fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                return left + right + (left + right - whole) / 15.0;
            }
            adapt(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + adapt(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
        let pdf = move |t: f64| student_t_pdf(t, dof).unwrap();
        let b = x.abs();
        let (fa, fm, fb) = (pdf(0.0), pdf(0.5 * b), pdf(b));
        let whole = simpson(0.0, b, fa, fm, fb);
        let half = adapt(&pdf, 0.0, b, fa, fm, fb, whole, 1e-13, 40);
        if x >= 0.0 {
            0.5 + half
        } else {
            0.5 - half
        }
    }

    #[test]
    fn ln_gamma_known_values() {
        assert_abs_diff_eq!(ln_gamma(1.0), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ln_gamma(0.5), PI.sqrt().ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(ln_gamma(10.0), 362_880f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn cdf_symmetry() {
        for dof in [1.0, 2.0, 7.0, 100.0] {
            assert_eq!(student_t_cdf(0.0, dof).unwrap(), 0.5);
            for x in [0.1, 1.0, 2.5, 10.0] {
                let s = student_t_cdf(x, dof).unwrap() + student_t_cdf(-x, dof).unwrap();
                assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn cdf_matches_quadrature() {
        let v = student_t_cdf(1.476, 5.0).unwrap();
        assert_abs_diff_eq!(v, cdf_by_quadrature(1.476, 5.0), epsilon = 1e-8);
        assert_abs_diff_eq!(v, 0.9, epsilon = 1e-3);
        // closed form for one degree of freedom (Cauchy)
        for x in [-5.0, -0.3, 2.0] {
            let cauchy = 0.5 + f64::atan(x) / PI;
            assert_abs_diff_eq!(student_t_cdf(x, 1.0).unwrap(), cauchy, epsilon = 1e-13);
        }
    }

    #[test]
    fn quantile_roundtrip_and_limits() {
        assert_eq!(student_t_quantile(0.5, 4.0).unwrap(), 0.0);
        for dof in [3.0, 30.0, 497.0] {
            for x in [-3.0, -1.0, 0.5, 4.0] {
                let q = student_t_cdf(x, dof).unwrap();
                assert_abs_diff_eq!(student_t_quantile(q, dof).unwrap(), x, epsilon = 1e-8);
            }
        }
        let z = student_t_quantile(0.975, 1e6).unwrap();
        assert_abs_diff_eq!(z, 1.959_96, epsilon = 1e-4);
        // table value t(0.975, 10)
        assert_abs_diff_eq!(student_t_quantile(0.975, 10.0).unwrap(), 2.228_138_85, epsilon = 1e-7);
        assert!(student_t_quantile(1.0, 3.0).is_err());
        assert!(student_t_quantile(0.0, 3.0).is_err());
        assert!(student_t_cdf(1.0, 0.0).is_err());
    }

    #[test]
    fn ks_examples() {
        assert_eq!(ks_uniform(&[0.0; 7]).unwrap(), 1.0);
        let m = 40;
        let grid: Vec<f64> = (1..=m).map(|i| (i as f64 - 0.5) / m as f64).collect();
        assert_abs_diff_eq!(ks_uniform(&grid).unwrap(), 0.5 / m as f64, epsilon = 1e-15);
        assert!(matches!(ks_uniform(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn ks_matches_brute_force() {
        let mut rng = rng_from_seed(100);
        let p: Vec<f64> = (0..100).map(|_| rng.random::<f64>()).collect();
        // evaluate |ECDF(x) − x| just left and right of each sample point
        let ecdf =
            |x: f64, strict: bool| p.iter().filter(|&&v| if strict { v < x } else { v <= x }).count() as f64 / 100.0;
        let brute = p
            .iter()
            .map(|&x| (ecdf(x, false) - x).abs().max((ecdf(x, true) - x).abs()))
            .fold(0.0, f64::max);
        assert_abs_diff_eq!(ks_uniform(&p).unwrap(), brute, epsilon = 1e-15);
    }

    #[test]
    fn aupc_examples() {
        assert_eq!(aupc(&[0.0; 5]).unwrap(), 1.0);
        let m = 50;
        let grid: Vec<f64> = (0..m).map(|i| i as f64 / m as f64).collect();
        assert_abs_diff_eq!(aupc(&grid).unwrap(), 0.5 + 0.5 / m as f64, epsilon = 1e-12);

        let mut rng = rng_from_seed(5);
        let p: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
        let steps = 10_000;
        let power = |a: f64| p.iter().filter(|&&v| v <= a).count() as f64 / m as f64;
        let trap: f64 = (0..steps)
            .map(|i| {
                let (a, b) = (i as f64 / steps as f64, (i + 1) as f64 / steps as f64);
                0.5 * (power(a) + power(b)) * (b - a)
            })
            .sum();
        assert_abs_diff_eq!(aupc(&p).unwrap(), trap, epsilon = 1e-3);
    }

    #[test]
    fn normal_sampling() {
        let a = sample_standard_normal(&mut rng_from_seed(1), 4);
        let b = sample_standard_normal(&mut rng_from_seed(1), 4);
        assert_eq!(a, b);

        let s = sample_standard_normal(&mut rng_from_seed(2), 100_000);
        let m = s.iter().sum::<f64>() / s.len() as f64;
        let v = s.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (s.len() - 1) as f64;
        assert!(m.abs() < 0.02 && (0.97..1.03).contains(&v), "{m} {v}");

        let u: Vec<f64> = sample_standard_normal(&mut rng_from_seed(3), 10_000)
            .into_iter()
            .map(normal_cdf)
            .collect();
        assert!(ks_uniform(&u).unwrap() < 0.02);
    }

    #[test]
    fn derived_seeds_differ() {
        let a = derive_seed(7, &[0, 1]);
        assert_eq!(a, derive_seed(7, &[0, 1]));
        assert_ne!(a, derive_seed(7, &[1, 0]));
        assert_ne!(a, derive_seed(8, &[0, 1]));
    }

    proptest! {
        #[test]
        fn cdf_monotone(x in -20.0f64..20.0, dx in 0.0f64..3.0, dof in 1u32..600) {
            let d = dof as f64;
            prop_assert!(student_t_cdf(x, d).unwrap() <= student_t_cdf(x + dx, d).unwrap() + 1e-15);
        }

        #[test]
        fn ks_permutation_invariant(mut p in proptest::collection::vec(0.0f64..=1.0, 1..50)) {
            let a = ks_uniform(&p).unwrap();
            p.reverse();
            prop_assert_eq!(a, ks_uniform(&p).unwrap());
        }

        #[test]
        fn aupc_is_one_minus_mean(p in proptest::collection::vec(0.0f64..=1.0, 1..50)) {
            let mean = p.iter().sum::<f64>() / p.len() as f64;
            prop_assert_eq!(aupc(&p).unwrap(), 1.0 - mean);
        }
    }
}
