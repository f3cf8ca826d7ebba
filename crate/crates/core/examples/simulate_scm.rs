// Builds an SCM by hand, samples it and writes data and noise scales as CSV.

use hetcd::{simulate, Dag, Driver, NoiseScaling, ScmSpec, Shape};

pub fn run_example() -> hetcd::Result<()> {
    let names: Vec<String> = ["Z", "X", "Y"].iter().map(|s| s.to_string()).collect();
    let dag = Dag::from_named_edges(names, &[("Z", "X"), ("X", "Y")])?;
    let mut spec = ScmSpec::with_uniform_coefficient(dag, 0.5);
    spec.hetero.insert(
        "X".into(),
        NoiseScaling::new(Shape::Periodic, 2.0, Driver::ParentValue("Z".into())),
    );
    spec.hetero
        .insert("Y".into(), NoiseScaling::new(Shape::Linear, 1.0, Driver::SamplingIndex));
    spec.validate()?;

    let out = simulate(&spec, 8, 1)?;
    let mut data = Vec::new();
    out.data.write_csv(&mut data)?;
    let mut sigma = Vec::new();
    out.write_sigma_csv(&mut sigma)?;
    println!("data:\n{}", String::from_utf8_lossy(&data));
    println!("noise scales:\n{}", String::from_utf8_lossy(&sigma));
    println!("expert knowledge: {}", out_knowledge(&spec));
    Ok(())
}

fn out_knowledge(spec: &ScmSpec) -> serde_json::Value {
    spec.expert_knowledge().to_json_value()
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}
