// Windowed variance estimates for parent-driven and index-driven noise.

use hetcd::scm::sampling_index_value;
use hetcd::{estimate_variance, BivariateModel, DesignMatrix, Driver, HeteroSpec, NoiseScaling, Shape, Window};

pub fn run_example() -> hetcd::Result<()> {
    let n = 1000;
    let window = Window::new(10)?;

    let model = BivariateModel {
        c: 0.0,
        hx: Some(NoiseScaling::new(Shape::Linear, 3.0, Driver::ParentValue("Z".into()))),
        ..BivariateModel::default()
    };
    let sim = hetcd::simulate_bivariate(&model, n, 11)?;
    let z = sim.data.column_by_name("Z")?;
    let design = DesignMatrix::from_columns(vec![z.to_vec()])?;
    let spec = HeteroSpec::ParentDriven("Z".into());
    let var = estimate_variance(sim.data.column_by_name("X")?, &design, &spec, Some(z), window)?;
    let truth = &sim.true_sigma["X"];
    for i in [0, n / 4, n / 2, 3 * n / 4, n - 1] {
        println!(
            "z = {:+.2}  true σ² = {:7.3}  estimate = {:7.3}",
            z[i],
            truth[i] * truth[i],
            var[i]
        );
    }

    let scale: Vec<f64> = (1..=n)
        .map(|t| 1.0 + 2.0 * (sampling_index_value(t, n) + 3.0) / 6.0)
        .collect();
    let noise = hetcd::stats::sample_standard_normal(&mut hetcd::stats::rng_from_seed(5), n);
    let series: Vec<f64> = noise.iter().zip(&scale).map(|(e, s)| e * s).collect();
    let var = estimate_variance(
        &series,
        &DesignMatrix::empty(n)?,
        &HeteroSpec::SamplingIndex,
        None,
        Window::new(50)?,
    )?;
    println!(
        "index-driven: σ² at start {:.2} (true 1.0), at end {:.2} (true 9.0)",
        var[25],
        var[n - 26]
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
