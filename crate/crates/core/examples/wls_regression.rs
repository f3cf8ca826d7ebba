// Ordinary vs weighted least squares on data whose noise grows with x.

use hetcd::{ols_fit, standardized_residuals, wls_fit, DesignMatrix};
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

pub fn run_example() -> hetcd::Result<()> {
    let n = 400;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    let x: Vec<f64> = (0..n).map(|i| i as f64 / n as f64 * 4.0).collect();
    let sd: Vec<f64> = x.iter().map(|v| 0.2 + v).collect();
    let y: Vec<f64> = (0..n)
        .map(|i| 1.5 * x[i] + sd[i] * Distribution::<f64>::sample(&StandardNormal, &mut rng))
        .collect();

    let design = DesignMatrix::from_columns(vec![x])?;
    let weights: Vec<f64> = sd.iter().map(|s| 1.0 / (s * s)).collect();
    let ols = ols_fit(&design, &y)?;
    let wls = wls_fit(&design, &y, &weights)?;
    println!("true slope 1.5, OLS {:.4}, WLS {:.4}", ols.beta[0], wls.beta[0]);

    let z = standardized_residuals(&wls, &weights)?;
    let spread = |r: &[f64]| (r.iter().map(|v| v * v).sum::<f64>() / r.len() as f64).sqrt();
    println!(
        "standardized residual RMS: first half {:.3}, second half {:.3}",
        spread(&z[..n / 2]),
        spread(&z[n / 2..])
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}
