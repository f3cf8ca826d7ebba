// A reduced CI-test calibration and power benchmark, printed as CSV.

use hetcd::bench::{run_citest_bench, write_results_csv, ExperimentConfig, Placement};

pub fn run_example() -> hetcd::Result<()> {
    let cfg = ExperimentConfig {
        strengths: vec![0.0, 5.0],
        replications: 40,
        placement: Placement::Both,
        bootstrap: 200,
        ..ExperimentConfig::citest()
    };
    let rows = run_citest_bench(&cfg)?;
    write_results_csv(std::io::stdout().lock(), &rows)
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}
