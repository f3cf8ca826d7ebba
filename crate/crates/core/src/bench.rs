//! Monte-Carlo benchmark harness for CI-test calibration/power and PC graph
//! recovery.
//!
//! Every replication draws from its own seed, derived from the master seed and
//! the (cell, replication) indices, and results are reduced in index order, so
//! the output does not depend on the number of worker threads.

use crate::citest::{CiTest, CiTestSpec, ParCorr, WeightMode};
use crate::error::{Error, Result};
use crate::graph::{cpdag_of, random_dag};
use crate::metrics::{adjacency_scores, edgemark_scores, mean_defined};
use crate::pc::{pc_stable, PcConfig};
use crate::scm::{
    assign_heteroskedasticity, simulate, simulate_bivariate, BivariateModel, Choice, Driver, DriverKind, NoiseScaling,
    ScmSpec, Shape,
};
use crate::stats::{aupc, bootstrap_stderr, derive_seed, ks_uniform, rng_from_seed};
use crate::variance::Window;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    CitestBench,
    PcBench,
    Simulate,
    CiSingle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchVariant {
    Ols,
    WlsEstimated,
    WlsGroundtruth,
}

impl BenchVariant {
    pub const ALL: [BenchVariant; 3] = [Self::Ols, Self::WlsEstimated, Self::WlsGroundtruth];

    pub fn label(self) -> &'static str {
        match self {
            Self::Ols => "ols",
            Self::WlsEstimated => "wls-estimated",
            Self::WlsGroundtruth => "wls-groundtruth",
        }
    }
}

/// Which variables carry heteroskedastic noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Placement {
    XOnly,
    Both,
    RandomGraph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeSetting {
    Linear,
    Periodic,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriverSetting {
    Parent,
    SamplingIndex,
    Random,
}

impl ShapeSetting {
    pub(crate) fn choice(self) -> Choice<Shape> {
        match self {
            Self::Linear => Choice::Fixed(Shape::Linear),
            Self::Periodic => Choice::Fixed(Shape::Periodic),
            Self::Random => Choice::Random,
        }
    }
}

impl DriverSetting {
    pub(crate) fn choice(self) -> Choice<DriverKind> {
        match self {
            Self::Parent => Choice::Fixed(DriverKind::Parent),
            Self::SamplingIndex => Choice::Fixed(DriverKind::SamplingIndex),
            Self::Random => Choice::Random,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub strengths: Vec<f64>,
    pub replications: usize,
    pub n: usize,
    pub alpha: f64,
    pub lambda: usize,
    pub variants: Vec<BenchVariant>,
    pub placement: Placement,
    pub shape: ShapeSetting,
    pub driver: DriverSetting,
    /// Nodes and edges of the random graph (PC benchmark).
    pub d: usize,
    pub m: usize,
    /// Share of heteroskedastic nodes in the random graph.
    pub hetero_fraction: f64,
    pub coefficient: f64,
    /// Confounding strength under the alternative (CI benchmark).
    pub dependence: f64,
    pub bootstrap: usize,
    pub master_seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::citest()
    }
}

impl ExperimentConfig {
    /// CI-test calibration/power defaults: 100 replications of 500 samples,
    /// linear Z-driven noise on X, window 10.
    pub fn citest() -> Self {
        Self {
            kind: ExperimentKind::CitestBench,
            strengths: vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0],
            replications: 100,
            n: 500,
            alpha: 0.05,
            lambda: 10,
            variants: BenchVariant::ALL.to_vec(),
            placement: Placement::XOnly,
            shape: ShapeSetting::Linear,
            driver: DriverSetting::Parent,
            d: 10,
            m: 10,
            hetero_fraction: 0.3,
            coefficient: 0.5,
            dependence: 0.5,
            bootstrap: 1000,
            master_seed: 0,
            output: None,
        }
    }

    /// PC benchmark defaults: 10 nodes, 10 edges, 500 samples, 500
    /// replications, window 5, mixed shapes and drivers.
    pub fn pc() -> Self {
        Self {
            kind: ExperimentKind::PcBench,
            replications: 500,
            lambda: 5,
            placement: Placement::RandomGraph,
            shape: ShapeSetting::Random,
            driver: DriverSetting::Random,
            ..Self::citest()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if self.replications == 0 {
            return fail("replications must be at least 1");
        }
        if self.strengths.is_empty() || self.strengths.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return fail("strengths must be a non-empty list of finite non-negative numbers");
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return fail("alpha must lie in (0, 1)");
        }
        if self.lambda == 0 {
            return fail("lambda must be at least 1");
        }
        if self.n < 10 {
            return fail("n must be at least 10");
        }
        if self.variants.is_empty() {
            return fail("at least one variant is required");
        }
        if !(0.0..=1.0).contains(&self.hetero_fraction) {
            return fail("hetero_fraction must lie in [0, 1]");
        }
        if self.m > self.d * self.d.saturating_sub(1) / 2 {
            return fail("m exceeds the number of node pairs");
        }
        match (self.kind, self.placement) {
            (ExperimentKind::CitestBench, Placement::RandomGraph) => {
                fail("citest-bench placement must be x-only or both")
            }
            (ExperimentKind::PcBench, p) if p != Placement::RandomGraph => {
                fail("pc-bench placement must be random-graph")
            }
            _ => Ok(()),
        }
    }

    /// FNV-1a hash of the JSON form, output path excluded.
    pub fn config_hash(&self) -> String {
        let mut c = self.clone();
        c.output = None;
        let text = serde_json::to_string(&c).expect("config serializes");
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in text.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{h:016x}")
    }
}

/// One line of the tidy results table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub experiment: String,
    pub variant: String,
    pub strength: f64,
    pub metric: String,
    /// `None` when the metric is undefined in every replication.
    pub value: Option<f64>,
    pub stderr: Option<f64>,
    pub n: usize,
    pub reps: usize,
    /// Seed of the (strength) cell; replication seeds derive from it.
    pub seed: u64,
    pub config_hash: String,
    pub master_seed: u64,
}

pub const CSV_HEADER: [&str; 11] = [
    "experiment",
    "variant",
    "strength",
    "metric",
    "value",
    "stderr",
    "n",
    "reps",
    "seed",
    "config_hash",
    "master_seed",
];

pub fn write_results_csv<W: Write>(w: W, rows: &[ResultRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    let num = |v: Option<f64>| {
        v.filter(|x| x.is_finite())
            .map(|x| format!("{x:?}"))
            .unwrap_or_default()
    };
    for r in rows {
        out.write_record([
            r.experiment.clone(),
            r.variant.clone(),
            format!("{:?}", r.strength),
            r.metric.clone(),
            num(r.value),
            num(r.stderr),
            r.n.to_string(),
            r.reps.to_string(),
            r.seed.to_string(),
            r.config_hash.clone(),
            r.master_seed.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Thread pool bounded by `HETCD_THREADS` when set.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("HETCD_THREADS") {
        let t: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|t| *t > 0)
            .ok_or_else(|| Error::Config(format!("HETCD_THREADS must be a positive integer, got `{v}`")))?;
        b = b.num_threads(t);
    }
    b.build().map_err(|e| Error::Config(e.to_string()))
}

fn ci_spec_for(
    variant: BenchVariant,
    knowledge: crate::knowledge::ExpertKnowledge,
    window: Window,
    alpha: f64,
) -> CiTestSpec {
    match variant {
        BenchVariant::Ols => CiTestSpec::ols(alpha),
        BenchVariant::WlsEstimated => CiTestSpec::wls(knowledge, window, WeightMode::Estimated, alpha),
        BenchVariant::WlsGroundtruth => CiTestSpec::wls(knowledge, window, WeightMode::GroundTruth, alpha),
    }
}

/// p-values of `X ⟂ Y | Z` for one draw of the confounded model, one per variant.
fn bivariate_p_values(cfg: &ExperimentConfig, model: &BivariateModel, seed: u64) -> Result<Vec<f64>> {
    let sim = simulate_bivariate(model, cfg.n, seed)?;
    let knowledge = model.expert_knowledge();
    let window = Window::new(cfg.lambda)?;
    cfg.variants
        .iter()
        .map(|&v| {
            let test = ParCorr::with_noise_scales(
                ci_spec_for(v, knowledge.clone(), window, cfg.alpha),
                sim.true_sigma.clone(),
            );
            Ok(test.test(&sim.data, 0, 1, &[2])?.p_value)
        })
        .collect()
}

/// KS (under `c = 0`) and AUPC (under `c = dependence`) per strength and variant.
pub fn run_citest_bench(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let pool = thread_pool()?;
    let hash = cfg.config_hash();
    let mut rows = Vec::new();

    for (si, &s) in cfg.strengths.iter().enumerate() {
        let cell_seed = derive_seed(cfg.master_seed, &[si as u64]);
        let per_rep: Vec<(Vec<f64>, Vec<f64>)> = pool.install(|| {
            (0..cfg.replications)
                .into_par_iter()
                .map(|rep| {
                    let rep_seed = derive_seed(cell_seed, &[rep as u64]);
                    let mut rng = rng_from_seed(derive_seed(rep_seed, &[2]));
                    let shape = match cfg.shape.choice() {
                        Choice::Fixed(sh) => sh,
                        Choice::Random => [Shape::Linear, Shape::Periodic][rand::Rng::random_range(&mut rng, 0..2)],
                    };
                    let kind = match cfg.driver.choice() {
                        Choice::Fixed(k) => k,
                        Choice::Random => {
                            [DriverKind::Parent, DriverKind::SamplingIndex][rand::Rng::random_range(&mut rng, 0..2)]
                        }
                    };
                    let driver = match kind {
                        DriverKind::Parent => Driver::ParentValue("Z".into()),
                        DriverKind::SamplingIndex => Driver::SamplingIndex,
                    };
                    let ns = NoiseScaling::new(shape, s, driver);
                    let hy = (cfg.placement == Placement::Both).then(|| ns.clone());
                    let null = BivariateModel {
                        a: cfg.coefficient,
                        b: cfg.coefficient,
                        c: 0.0,
                        hx: Some(ns.clone()),
                        hy: hy.clone(),
                    };
                    let alt = BivariateModel {
                        c: cfg.dependence,
                        ..null.clone()
                    };
                    Ok((
                        bivariate_p_values(cfg, &null, derive_seed(rep_seed, &[0]))?,
                        bivariate_p_values(cfg, &alt, derive_seed(rep_seed, &[1]))?,
                    ))
                })
                .collect::<Result<Vec<_>>>()
        })?;

        for (vi, &variant) in cfg.variants.iter().enumerate() {
            let null_p: Vec<f64> = per_rep.iter().map(|(n, _)| n[vi]).collect();
            let alt_p: Vec<f64> = per_rep.iter().map(|(_, a)| a[vi]).collect();
            let ks = ks_uniform(&null_p)?;
            let ks_se = bootstrap_stderr(&null_p, cfg.bootstrap, derive_seed(cell_seed, &[vi as u64, 0]), |p| {
                ks_uniform(p).unwrap_or(f64::NAN)
            });
            let power = aupc(&alt_p)?;
            let power_se = bootstrap_stderr(&alt_p, cfg.bootstrap, derive_seed(cell_seed, &[vi as u64, 1]), |p| {
                aupc(p).unwrap_or(f64::NAN)
            });
            for (metric, value, se) in [("ks", ks, ks_se), ("aupc", power, power_se)] {
                rows.push(ResultRow {
                    experiment: "citest-bench".into(),
                    variant: variant.label().into(),
                    strength: s,
                    metric: metric.into(),
                    value: Some(value),
                    stderr: Some(se).filter(|v| v.is_finite()),
                    n: cfg.n,
                    reps: cfg.replications,
                    seed: cell_seed,
                    config_hash: hash.clone(),
                    master_seed: cfg.master_seed,
                });
            }
        }
    }
    Ok(rows)
}

pub const PC_METRICS: [&str; 5] = ["tpr", "fpr", "precision", "edgemark_precision", "edgemark_recall"];

/// Graph-recovery scores of one PC run, in [`PC_METRICS`] order.
fn pc_scores(est: &crate::graph::Cpdag, truth: &crate::graph::Cpdag) -> Result<[Option<f64>; 5]> {
    let a = adjacency_scores(est, truth)?;
    let e = edgemark_scores(est, truth)?;
    Ok([a.tpr, a.fpr, a.precision, e.precision, e.recall])
}

/// PC-stable with each variant on random heteroskedastic SCMs.
pub fn run_pc_bench(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let pool = thread_pool()?;
    let hash = cfg.config_hash();
    let window = Window::new(cfg.lambda)?;
    let mut rows = Vec::new();

    for (si, &s) in cfg.strengths.iter().enumerate() {
        let cell_seed = derive_seed(cfg.master_seed, &[si as u64]);
        let per_rep: Vec<Vec<[Option<f64>; 5]>> = pool.install(|| {
            (0..cfg.replications)
                .into_par_iter()
                .map(|rep| {
                    let rep_seed = derive_seed(cell_seed, &[rep as u64]);
                    let mut rng = rng_from_seed(derive_seed(rep_seed, &[0]));
                    let dag = random_dag(cfg.d, cfg.m, &mut rng)?;
                    let hetero = assign_heteroskedasticity(
                        &dag,
                        cfg.hetero_fraction,
                        s,
                        cfg.shape.choice(),
                        cfg.driver.choice(),
                        &mut rng,
                    );
                    let mut spec = ScmSpec::with_uniform_coefficient(dag, cfg.coefficient);
                    spec.hetero = hetero;
                    let sim = simulate(&spec, cfg.n, derive_seed(rep_seed, &[1]))?;
                    let truth = cpdag_of(&spec.graph);
                    let knowledge = spec.expert_knowledge();
                    cfg.variants
                        .iter()
                        .map(|&v| {
                            let test = ParCorr::with_noise_scales(
                                ci_spec_for(v, knowledge.clone(), window, cfg.alpha),
                                sim.true_sigma.clone(),
                            );
                            let out = pc_stable(&sim.data, &test, &PcConfig::default())?;
                            pc_scores(&out.graph, &truth)
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
        })?;

        for (vi, &variant) in cfg.variants.iter().enumerate() {
            for (mi, metric) in PC_METRICS.iter().enumerate() {
                let values: Vec<Option<f64>> = per_rep.iter().map(|r| r[vi][mi]).collect();
                let defined: Vec<f64> = values.iter().flatten().copied().collect();
                let se = bootstrap_stderr(
                    &defined,
                    cfg.bootstrap,
                    derive_seed(cell_seed, &[vi as u64, mi as u64]),
                    |v| v.iter().sum::<f64>() / v.len() as f64,
                );
                rows.push(ResultRow {
                    experiment: "pc-bench".into(),
                    variant: variant.label().into(),
                    strength: s,
                    metric: metric.to_string(),
                    value: mean_defined(&values),
                    stderr: Some(se).filter(|v| v.is_finite()),
                    n: cfg.n,
                    reps: cfg.replications,
                    seed: cell_seed,
                    config_hash: hash.clone(),
                    master_seed: cfg.master_seed,
                });
            }
        }
    }
    Ok(rows)
}

/// Looks up the value of `(variant, strength, metric)` in a results table.
pub fn lookup(rows: &[ResultRow], variant: BenchVariant, strength: f64, metric: &str) -> Option<f64> {
    rows.iter()
        .find(|r| r.variant == variant.label() && r.strength == strength && r.metric == metric)
        .and_then(|r| r.value)
}
