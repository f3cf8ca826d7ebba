use hetcd::stats::{aupc, derive_seed, ks_uniform, student_t_cdf};
use hetcd::{
    run_ci_test, simulate_bivariate, BivariateModel, CiTestSpec, Driver, ExpertKnowledge, HeteroSpec, NoiseScaling,
    Shape, WeightMode, Window,
};

fn hx(s: f64) -> Option<NoiseScaling> {
    Some(NoiseScaling::new(Shape::Linear, s, Driver::ParentValue("Z".into())))
}

fn wls(mode: WeightMode) -> CiTestSpec {
    let k = ExpertKnowledge::new().with("X", HeteroSpec::ParentDriven("Z".into()));
    CiTestSpec::wls(k, Window::new(10).unwrap(), mode, 0.05)
}

fn results(model: &BivariateModel, spec: &CiTestSpec, reps: u64, stream: u64) -> Vec<hetcd::CiTestResult> {
    (0..reps)
        .map(|r| {
            let sim = simulate_bivariate(model, 500, derive_seed(stream, &[r])).unwrap();
            run_ci_test(&sim.data, "X", "Y", &["Z"], spec, Some(&sim.true_sigma)).unwrap()
        })
        .collect()
}

#[test]
fn homoskedastic_null_rejection_rate() {
    let model = BivariateModel {
        c: 0.0,
        ..BivariateModel::default()
    };
    for spec in [CiTestSpec::ols(0.05), wls(WeightMode::Estimated)] {
        let rate = results(&model, &spec, 100, 51).iter().filter(|r| r.dependent).count() as f64 / 100.0;
        assert!((0.01..=0.10).contains(&rate), "{:?}: {rate}", spec.variant);
    }
}

#[test]
fn homoskedastic_power_is_comparable() {
    let model = BivariateModel::default();
    let p = |spec| {
        results(&model, &spec, 100, 52)
            .iter()
            .map(|r| r.p_value)
            .collect::<Vec<_>>()
    };
    let ols = aupc(&p(CiTestSpec::ols(0.05))).unwrap();
    let est = aupc(&p(wls(WeightMode::Estimated))).unwrap();
    assert!((ols - est).abs() < 0.02, "{ols} vs {est}");
}

#[test]
fn one_sided_heteroskedasticity_keeps_null_distribution() {
    let model = BivariateModel {
        c: 0.0,
        hx: hx(5.0),
        ..BivariateModel::default()
    };
    let rs = results(&model, &CiTestSpec::ols(0.05), 600, 53);
    let u: Vec<f64> = rs.iter().map(|r| student_t_cdf(r.statistic, 497.0).unwrap()).collect();
    let d = ks_uniform(&u).unwrap();
    // asymptotic 1% critical value
    let crit = 1.628 / (u.len() as f64).sqrt();
    assert!(d < crit, "KS {d} ≥ {crit}");
}

#[test]
fn heteroskedasticity_costs_ols_power() {
    let model = BivariateModel {
        hx: hx(5.0),
        ..BivariateModel::default()
    };
    let p = |spec| {
        results(&model, &spec, 100, 54)
            .iter()
            .map(|r| r.p_value)
            .collect::<Vec<_>>()
    };
    let ols = aupc(&p(CiTestSpec::ols(0.05))).unwrap();
    let truth = aupc(&p(wls(WeightMode::GroundTruth))).unwrap();
    assert!(truth > ols, "{truth} vs {ols}");
}

#[test]
fn swapping_tested_variables() {
    let model = BivariateModel {
        hx: hx(3.0),
        ..BivariateModel::default()
    };
    let sim = simulate_bivariate(&model, 400, 55).unwrap();
    let k = ExpertKnowledge::new().with("X", HeteroSpec::ParentDriven("Z".into()));
    let spec = CiTestSpec::wls(k, Window::new(10).unwrap(), WeightMode::Estimated, 0.05);
    let a = run_ci_test(&sim.data, "X", "Y", &["Z"], &spec, None).unwrap();
    let b = run_ci_test(&sim.data, "Y", "X", &["Z"], &spec, None).unwrap();
    assert_eq!(a.p_value, b.p_value);
    assert_eq!(a.statistic, b.statistic);

    // same data with the variable names exchanged
    let swapped = sim.data.select(&[1, 0, 2]);
    let renamed = hetcd::Dataset::new(vec!["X".into(), "Y".into(), "Z".into()], swapped.columns().to_vec()).unwrap();
    let k2 = ExpertKnowledge::new().with("Y", HeteroSpec::ParentDriven("Z".into()));
    let spec2 = CiTestSpec::wls(k2, Window::new(10).unwrap(), WeightMode::Estimated, 0.05);
    let c = run_ci_test(&renamed, "Y", "X", &["Z"], &spec2, None).unwrap();
    assert_eq!(c.p_value, a.p_value);
}
