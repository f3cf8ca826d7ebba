// ParCorr-OLS and ParCorr-WLS on the confounded three-variable model.

use hetcd::{
    run_ci_test, simulate_bivariate, BivariateModel, CiTestSpec, Driver, ExpertKnowledge, NoiseScaling, Shape,
    WeightMode, Window,
};

pub fn run_example() -> hetcd::Result<()> {
    let knowledge = ExpertKnowledge::from_json_str(r#"{"X": {"parent": "Z"}, "Y": "none"}"#)?;
    let hx = NoiseScaling::new(Shape::Linear, 5.0, Driver::ParentValue("Z".into()));
    for c in [0.0, 0.5] {
        let model = BivariateModel {
            c,
            hx: Some(hx.clone()),
            ..BivariateModel::default()
        };
        let sim = simulate_bivariate(&model, 500, 21)?;
        let specs = [
            ("OLS", CiTestSpec::ols(0.05)),
            (
                "WLS estimated",
                CiTestSpec::wls(knowledge.clone(), Window::new(10)?, WeightMode::Estimated, 0.05),
            ),
            (
                "WLS true",
                CiTestSpec::wls(knowledge.clone(), Window::new(10)?, WeightMode::GroundTruth, 0.05),
            ),
        ];
        for (label, spec) in specs {
            let r = run_ci_test(&sim.data, "X", "Y", &["Z"], &spec, Some(&sim.true_sigma))?;
            println!(
                "c = {c}  {label:<14} rho = {:+.3}  t = {:+.2}  p = {:.4}  dependent = {}",
                r.rho_hat, r.statistic, r.p_value, r.dependent
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}
