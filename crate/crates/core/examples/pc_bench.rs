// A reduced PC graph-recovery benchmark, printed as CSV.

use hetcd::bench::{run_pc_bench, write_results_csv, ExperimentConfig};

pub fn run_example() -> hetcd::Result<()> {
    let cfg = ExperimentConfig {
        strengths: vec![0.0, 5.0],
        replications: 20,
        d: 6,
        m: 6,
        bootstrap: 200,
        ..ExperimentConfig::pc()
    };
    let rows = run_pc_bench(&cfg)?;
    write_results_csv(std::io::stdout().lock(), &rows)
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}
