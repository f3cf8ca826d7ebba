// d-separation queries and the CPDAG of a small DAG.

use hetcd::{cpdag_of, Dag};

pub fn run_example() -> hetcd::Result<()> {
    let names: Vec<String> = ["A", "B", "C", "D", "E"].iter().map(|s| s.to_string()).collect();
    let dag = Dag::from_named_edges(names, &[("A", "C"), ("B", "C"), ("C", "D"), ("D", "E")])?;
    for (x, y, z) in [("A", "B", vec![]), ("A", "B", vec!["D"]), ("A", "E", vec!["C"])] {
        let sep = dag.d_separated_by_name(x, y, &z)?;
        println!("{x} ⟂ {y} | {z:?}: {sep}");
    }
    let cpdag = cpdag_of(&dag);
    println!("{}", serde_json::to_string_pretty(&cpdag.to_json())?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}
