// Student-t probabilities and quantiles, and p-value summaries.

use hetcd::stats::{aupc, ks_uniform, student_t_cdf, student_t_quantile, two_sided_p_value};

pub fn run_example() -> hetcd::Result<()> {
    for dof in [1.0, 5.0, 30.0, 497.0] {
        let q = student_t_quantile(0.975, dof)?;
        println!(
            "dof {dof:>5}: t(0.975) = {q:.6}, F(2) = {:.6}, p(|T| ≥ 2) = {:.6}",
            student_t_cdf(2.0, dof)?,
            two_sided_p_value(2.0, dof)?
        );
    }
    let uniform: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
    let skewed: Vec<f64> = uniform.iter().map(|p| p * p * p).collect();
    println!(
        "evenly spread p-values: KS = {:.3}, AUPC = {:.3}",
        ks_uniform(&uniform)?,
        aupc(&uniform)?
    );
    println!(
        "small p-values:         KS = {:.3}, AUPC = {:.3}",
        ks_uniform(&skewed)?,
        aupc(&skewed)?
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
