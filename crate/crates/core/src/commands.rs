//! File-level entry points behind the command-line tool: simulation export,
//! single CI tests on CSV data, and a quick self-check.

use crate::bench::{DriverSetting, ShapeSetting};
use crate::citest::{run_ci_test, CiTestResult, CiTestSpec, WeightMode};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::graph::random_dag;
use crate::knowledge::ExpertKnowledge;
use crate::scm::{assign_heteroskedasticity, simulate, ScmJson, ScmSpec, SimOutput};
use crate::stats::{derive_seed, rng_from_seed};
use crate::variance::Window;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic<F>(path: &Path, fill: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut w = std::io::BufWriter::new(tmp.as_file_mut());
        fill(&mut w)?;
        w.flush()?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Parameters of a random heteroskedastic SCM.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomScm {
    pub d: usize,
    pub m: usize,
    pub hetero_fraction: f64,
    pub strength: f64,
    pub shape: ShapeSetting,
    pub driver: DriverSetting,
    pub coefficient: f64,
}

impl Default for RandomScm {
    fn default() -> Self {
        Self {
            d: 10,
            m: 10,
            hetero_fraction: 0.3,
            strength: 0.0,
            shape: ShapeSetting::Random,
            driver: DriverSetting::Random,
            coefficient: 0.5,
        }
    }
}

impl RandomScm {
    pub fn build(&self, seed: u64) -> Result<ScmSpec> {
        let mut rng = rng_from_seed(seed);
        let dag = random_dag(self.d, self.m, &mut rng)?;
        let hetero = assign_heteroskedasticity(
            &dag,
            self.hetero_fraction,
            self.strength,
            self.shape.choice(),
            self.driver.choice(),
            &mut rng,
        );
        let mut spec = ScmSpec::with_uniform_coefficient(dag, self.coefficient);
        spec.hetero = hetero;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScmSource {
    File(PathBuf),
    Random(RandomScm),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateRequest {
    pub source: ScmSource,
    pub n: usize,
    pub seed: u64,
    pub data_out: PathBuf,
    pub sigma_out: Option<PathBuf>,
    pub spec_out: Option<PathBuf>,
}

pub fn load_scm(path: &Path) -> Result<ScmSpec> {
    let text = std::fs::read_to_string(path)?;
    let json: ScmJson = serde_json::from_str(&text)?;
    ScmSpec::from_json(&json)
}

/// Samples the SCM and writes the data (and optionally the true noise scales
/// and the SCM itself).
pub fn run_simulate(req: &SimulateRequest) -> Result<SimOutput> {
    let spec = match &req.source {
        ScmSource::File(p) => load_scm(p)?,
        ScmSource::Random(r) => r.build(derive_seed(req.seed, &[0]))?,
    };
    let out = simulate(&spec, req.n, derive_seed(req.seed, &[1]))?;
    write_atomic(&req.data_out, |w| out.data.write_csv(w))?;
    if let Some(p) = &req.sigma_out {
        write_atomic(p, |w| out.write_sigma_csv(w))?;
    }
    if let Some(p) = &req.spec_out {
        write_atomic(p, |w| {
            serde_json::to_writer_pretty(&mut *w, &spec.to_json())?;
            writeln!(w)?;
            Ok(())
        })?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CiSingleRequest {
    pub data: PathBuf,
    pub x: String,
    pub y: String,
    pub cond: Vec<String>,
    /// Without knowledge the OLS variant runs.
    pub knowledge: Option<PathBuf>,
    pub lambda: usize,
    pub alpha: f64,
}

pub fn load_knowledge(path: &Path) -> Result<ExpertKnowledge> {
    ExpertKnowledge::from_json_str(&std::fs::read_to_string(path)?)
}

pub fn run_ci_single(req: &CiSingleRequest) -> Result<CiTestResult> {
    let data = Dataset::from_csv_path(&req.data)?;
    let spec = match &req.knowledge {
        None => CiTestSpec::ols(req.alpha),
        Some(p) => CiTestSpec::wls(
            load_knowledge(p)?,
            Window::new(req.lambda)?,
            WeightMode::Estimated,
            req.alpha,
        ),
    };
    let cond: Vec<&str> = req.cond.iter().map(String::as_str).collect();
    run_ci_test(&data, &req.x, &req.y, &cond, &spec, None)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Fast sanity checks over every module.
pub fn selftest() -> Vec<SelfCheck> {
    let mut out = Vec::new();
    let mut check = |name: &'static str, r: Result<(bool, String)>| {
        let (passed, detail) = r.unwrap_or_else(|e| (false, e.to_string()));
        out.push(SelfCheck { name, passed, detail });
    };

    check(
        "t quantile",
        (|| {
            let q = crate::stats::student_t_quantile(0.975, 10.0)?;
            Ok(((q - 2.228_138_85).abs() < 1e-7, format!("t(0.975, 10) = {q:.8}")))
        })(),
    );

    check(
        "wls exact fit",
        (|| {
            use crate::regression::{wls_fit, DesignMatrix};
            let x = DesignMatrix::from_columns(vec![vec![1.0, 1.0, 1.0, 1.0], vec![0.0, 1.0, 2.0, 3.0]])?;
            let y = [1.0, 3.0, 5.0, 7.0];
            let fit = wls_fit(&x, &y, &[1.0, 2.0, 0.5, 4.0])?;
            let err = (fit.beta[0] - 1.0).abs().max((fit.beta[1] - 2.0).abs());
            Ok((err < 1e-10, format!("max coefficient error {err:.1e}")))
        })(),
    );

    check(
        "d-separation",
        (|| {
            let names: Vec<String> = ["X", "Z", "Y"].iter().map(|s| s.to_string()).collect();
            let g = crate::graph::Dag::from_named_edges(names, &[("X", "Z"), ("Y", "Z")])?;
            let ok = g.d_separated(0, 2, &[])? && !g.d_separated(0, 2, &[1])?;
            Ok((ok, "collider blocks, conditioning opens".into()))
        })(),
    );

    check(
        "pc oracle",
        (|| {
            use crate::pc::{pc_stable, DSeparationOracle, PcConfig};
            let mut rng = rng_from_seed(7);
            let dag = random_dag(6, 7, &mut rng)?;
            let data = Dataset::new(dag.names().to_vec(), vec![vec![0.0; 20]; 6])?;
            let est = pc_stable(&data, &DSeparationOracle { dag: dag.clone() }, &PcConfig::default())?.graph;
            Ok((
                est == crate::graph::cpdag_of(&dag),
                "oracle PC equals the true CPDAG".into(),
            ))
        })(),
    );

    check(
        "ci test",
        (|| {
            let spec = RandomScm {
                d: 3,
                m: 0,
                ..RandomScm::default()
            }
            .build(1)?;
            let sim = simulate(&spec, 500, 2)?;
            let names = sim.data.names();
            let r = run_ci_test(&sim.data, &names[0], &names[1], &[], &CiTestSpec::ols(0.05), None)?;
            Ok((
                r.p_value.is_finite() && (0.0..=1.0).contains(&r.p_value),
                format!("p = {:.3}", r.p_value),
            ))
        })(),
    );

    out
}
