// PC-stable on simulated heteroskedastic data, with the OLS and WLS tests.

use hetcd::commands::RandomScm;
use hetcd::{adjacency_scores, cpdag_of, pc_stable, simulate, CiTestSpec, ParCorr, PcConfig, WeightMode, Window};

pub fn run_example() -> hetcd::Result<()> {
    let spec = RandomScm {
        d: 8,
        m: 9,
        strength: 5.0,
        ..RandomScm::default()
    }
    .build(17)?;
    println!("{}", serde_json::to_string(&spec.to_json())?);
    let sim = simulate(&spec, 500, 18)?;
    let truth = cpdag_of(&spec.graph);

    let tests = [
        ("OLS", ParCorr::new(CiTestSpec::ols(0.05))),
        (
            "WLS",
            ParCorr::new(CiTestSpec::wls(
                spec.expert_knowledge(),
                Window::new(5)?,
                WeightMode::Estimated,
                0.05,
            )),
        ),
    ];
    for (label, test) in tests {
        let out = pc_stable(&sim.data, &test, &PcConfig::default())?;
        let s = adjacency_scores(&out.graph, &truth)?;
        println!(
            "{label}: {} edges, {} tests, TPR {:?}, FPR {:?}",
            out.graph.n_edges(),
            out.n_tests,
            s.tpr,
            s.fpr
        );
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
