//! Linear structural causal models with multiplicative noise scaling.
//!
//! Every node is generated as `Σ coeff·parent + h(driver)·N` with `N` standard
//! normal. The scale `h` is linear (`1 + s·u·[u ≥ 0]`) or periodic
//! (`1 + s·sin(u) + s`) in a driver `u`, which is either a parent's value or the
//! sampling index mapped onto `[−3, 3]`.

use crate::citest::NoiseScales;
use crate::data::{write_columns_csv, Dataset};
use crate::error::{Error, Result};
use crate::graph::{Dag, GraphJson};
use crate::knowledge::{ExpertKnowledge, HeteroSpec};
use crate::stats::{rng_from_seed, sample_standard_normal};
use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Linear,
    Periodic,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Driver {
    #[serde(rename = "parent")]
    ParentValue(String),
    SamplingIndex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseScaling {
    pub shape: Shape,
    pub strength: f64,
    pub driver: Driver,
}

impl NoiseScaling {
    pub fn new(shape: Shape, strength: f64, driver: Driver) -> Self {
        Self {
            shape,
            strength,
            driver,
        }
    }

    /// `h(u)`, never negative for `strength ≥ 0`.
    pub fn value(&self, u: f64) -> f64 {
        scaling_value(self.shape, self.strength, u)
    }
}

pub fn scaling_value(shape: Shape, strength: f64, u: f64) -> f64 {
    match shape {
        Shape::Linear => {
            if u >= 0.0 {
                1.0 + strength * u
            } else {
                1.0
            }
        }
        Shape::Periodic => 1.0 + strength * u.sin() + strength,
    }
}

/// Sampling index `t ∈ {1, …, n}` mapped to `6t/n − 3`.
pub fn sampling_index_value(t: usize, n: usize) -> f64 {
    6.0 * t as f64 / n as f64 - 3.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScmSpec {
    pub graph: Dag,
    /// Keyed by `(parent, child)` names.
    pub coefficients: BTreeMap<(String, String), f64>,
    /// Nodes absent from the map are homoskedastic.
    pub hetero: BTreeMap<String, NoiseScaling>,
}

impl ScmSpec {
    /// Every edge gets coefficient `c`, every node homoskedastic noise.
    pub fn with_uniform_coefficient(graph: Dag, c: f64) -> Self {
        let coefficients = graph
            .edges()
            .into_iter()
            .map(|(a, b)| ((graph.names()[a].clone(), graph.names()[b].clone()), c))
            .collect();
        Self {
            graph,
            coefficients,
            hetero: BTreeMap::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let names = self.graph.names();
        for (a, b) in self.graph.edges() {
            let key = (names[a].clone(), names[b].clone());
            match self.coefficients.get(&key) {
                Some(c) if c.is_finite() => {}
                Some(_) => {
                    return Err(Error::InvalidSpec(format!(
                        "non-finite coefficient on {} -> {}",
                        key.0, key.1
                    )))
                }
                None => {
                    return Err(Error::InvalidSpec(format!(
                        "missing coefficient for {} -> {}",
                        key.0, key.1
                    )))
                }
            }
        }
        if self.coefficients.len() != self.graph.n_edges() {
            return Err(Error::InvalidSpec(
                "coefficient map names edges that are not in the graph".into(),
            ));
        }
        for (node, ns) in &self.hetero {
            let i = self
                .graph
                .index_of(node)
                .map_err(|_| Error::InvalidSpec(format!("heteroskedastic node `{node}` is not in the graph")))?;
            if !(ns.strength.is_finite() && ns.strength >= 0.0) {
                return Err(Error::InvalidSpec(format!(
                    "strength of `{node}` must be finite and non-negative"
                )));
            }
            if let Driver::ParentValue(p) = &ns.driver {
                let is_parent = self.graph.index_of(p).is_ok_and(|pi| self.graph.has_edge(pi, i));
                if !is_parent {
                    return Err(Error::InvalidSpec(format!("driver `{p}` of `{node}` is not a parent")));
                }
            }
        }
        Ok(())
    }

    /// Expert knowledge matching this model's heteroskedasticity exactly.
    pub fn expert_knowledge(&self) -> ExpertKnowledge {
        let mut k = ExpertKnowledge::new();
        for (node, ns) in &self.hetero {
            let spec = match &ns.driver {
                Driver::SamplingIndex => HeteroSpec::SamplingIndex,
                Driver::ParentValue(p) => HeteroSpec::ParentDriven(p.clone()),
            };
            k.insert(node.clone(), spec);
        }
        k
    }

    pub fn to_json(&self) -> ScmJson {
        ScmJson {
            graph: self.graph.to_json(),
            coefficients: self
                .coefficients
                .iter()
                .map(|((a, b), c)| (a.clone(), b.clone(), *c))
                .collect(),
            hetero: self.hetero.clone(),
        }
    }

    pub fn from_json(j: &ScmJson) -> Result<Self> {
        let spec = Self {
            graph: Dag::from_json(&j.graph)?,
            coefficients: j
                .coefficients
                .iter()
                .map(|(a, b, c)| ((a.clone(), b.clone()), *c))
                .collect(),
            hetero: j.hetero.clone(),
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScmJson {
    pub graph: GraphJson,
    pub coefficients: Vec<(String, String, f64)>,
    #[serde(default)]
    pub hetero: BTreeMap<String, NoiseScaling>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    pub data: Dataset,
    /// True noise standard deviation of every node at every sample.
    pub true_sigma: NoiseScales,
}

impl SimOutput {
    pub fn write_sigma_csv<W: Write>(&self, w: W) -> Result<()> {
        let names = self.data.names();
        let cols: Vec<Vec<f64>> = names.iter().map(|n| self.true_sigma[n].clone()).collect();
        write_columns_csv(w, names, &cols)
    }
}

/// Draws `n` samples. Noise is drawn node by node in index order, so the
/// draws do not depend on the heteroskedasticity settings.
pub fn simulate(spec: &ScmSpec, n: usize, seed: u64) -> Result<SimOutput> {
    if n == 0 {
        return Err(Error::InvalidSpec("sample size must be at least 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    let noise: Vec<Vec<f64>> = (0..spec.graph.n_nodes())
        .map(|_| sample_standard_normal(&mut rng, n))
        .collect();
    simulate_from_noise(spec, &noise)
}

/// Deterministic part of [`simulate`] given the standard-normal noise of each node.
pub fn simulate_from_noise(spec: &ScmSpec, noise: &[Vec<f64>]) -> Result<SimOutput> {
    spec.validate()?;
    let g = &spec.graph;
    let d = g.n_nodes();
    if noise.len() != d {
        return Err(Error::Dimension(format!("{} noise vectors for {d} nodes", noise.len())));
    }
    let n = noise.first().map(Vec::len).unwrap_or(0);
    if n == 0 || noise.iter().any(|v| v.len() != n) {
        return Err(Error::Dimension("noise vectors must share a positive length".into()));
    }
    let names = g.names();
    let mut values = vec![Vec::new(); d];
    let mut sigma = vec![Vec::new(); d];

    for i in g.topological_order() {
        let mut col = vec![0.0; n];
        for &p in g.parents(i) {
            let c = spec.coefficients[&(names[p].clone(), names[i].clone())];
            for (v, x) in col.iter_mut().zip(&values[p]) {
                *v += c * x;
            }
        }
        let s: Vec<f64> = match spec.hetero.get(&names[i]) {
            None => vec![1.0; n],
            Some(ns) => match &ns.driver {
                Driver::SamplingIndex => (1..=n).map(|t| ns.value(sampling_index_value(t, n))).collect(),
                Driver::ParentValue(p) => {
                    let pi = g.index_of(p)?;
                    values[pi].iter().map(|&u| ns.value(u)).collect()
                }
            },
        };
        for ((v, e), h) in col.iter_mut().zip(&noise[i]).zip(&s) {
            *v += h * e;
        }
        values[i] = col;
        sigma[i] = s;
    }

    let true_sigma = names.iter().cloned().zip(sigma).collect();
    Ok(SimOutput {
        data: Dataset::new(names.to_vec(), values)?,
        true_sigma,
    })
}

/// Parameters of the confounded three-variable model
/// `X = aZ + cE + h_X·N_X`, `Y = bZ + cE + h_Y·N_Y` with latent `E`.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateModel {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Scaling for X; a `ParentValue` driver must name `"Z"`.
    pub hx: Option<NoiseScaling>,
    pub hy: Option<NoiseScaling>,
}

impl Default for BivariateModel {
    fn default() -> Self {
        Self {
            a: 0.5,
            b: 0.5,
            c: 0.5,
            hx: None,
            hy: None,
        }
    }
}

impl BivariateModel {
    /// Expert knowledge matching `hx`/`hy`.
    pub fn expert_knowledge(&self) -> ExpertKnowledge {
        let mut k = ExpertKnowledge::new();
        for (name, h) in [("X", &self.hx), ("Y", &self.hy)] {
            if let Some(ns) = h {
                let spec = match &ns.driver {
                    Driver::SamplingIndex => HeteroSpec::SamplingIndex,
                    Driver::ParentValue(p) => HeteroSpec::ParentDriven(p.clone()),
                };
                k.insert(name, spec);
            }
        }
        k
    }
}

/// Samples `X`, `Y`, `Z`; the confounder `E` is not returned. `c = 0` makes
/// `X ⟂ Y | Z`.
pub fn simulate_bivariate(model: &BivariateModel, n: usize, seed: u64) -> Result<SimOutput> {
    if n == 0 {
        return Err(Error::InvalidSpec("sample size must be at least 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    let z = sample_standard_normal(&mut rng, n);
    let e = sample_standard_normal(&mut rng, n);
    let nx = sample_standard_normal(&mut rng, n);
    let ny = sample_standard_normal(&mut rng, n);

    let scales = |h: &Option<NoiseScaling>| -> Result<Vec<f64>> {
        match h {
            None => Ok(vec![1.0; n]),
            Some(ns) => match &ns.driver {
                Driver::SamplingIndex => Ok((1..=n).map(|t| ns.value(sampling_index_value(t, n))).collect()),
                Driver::ParentValue(p) if p == "Z" => Ok(z.iter().map(|&u| ns.value(u)).collect()),
                Driver::ParentValue(p) => Err(Error::InvalidSpec(format!("driver `{p}` is not Z"))),
            },
        }
    };
    let sx = scales(&model.hx)?;
    let sy = scales(&model.hy)?;
    let x: Vec<f64> = (0..n)
        .map(|t| model.a * z[t] + model.c * e[t] + sx[t] * nx[t])
        .collect();
    let y: Vec<f64> = (0..n)
        .map(|t| model.b * z[t] + model.c * e[t] + sy[t] * ny[t])
        .collect();

    let names: Vec<String> = ["X", "Y", "Z"].iter().map(|s| s.to_string()).collect();
    let mut true_sigma = NoiseScales::new();
    true_sigma.insert("X".into(), sx);
    true_sigma.insert("Y".into(), sy);
    true_sigma.insert("Z".into(), vec![1.0; n]);
    Ok(SimOutput {
        data: Dataset::new(names, vec![x, y, z])?,
        true_sigma,
    })
}

/// How the benchmark protocol picks scaling shapes and drivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Choice<T> {
    Fixed(T),
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriverKind {
    Parent,
    SamplingIndex,
}

/// Marks `round(fraction·d)` nodes, chosen uniformly, as heteroskedastic with
/// strength `s`. Shape and driver kind are drawn with probability ½ each unless
/// fixed. Parent drivers are a uniformly chosen parent; a node without parents
/// falls back to the sampling index.
pub fn assign_heteroskedasticity<R: Rng + ?Sized>(
    graph: &Dag,
    fraction: f64,
    strength: f64,
    shape: Choice<Shape>,
    driver: Choice<DriverKind>,
    rng: &mut R,
) -> BTreeMap<String, NoiseScaling> {
    let d = graph.n_nodes();
    let k = ((fraction * d as f64).round() as usize).min(d);
    let mut chosen = rand::seq::index::sample(rng, d, k).into_vec();
    chosen.sort_unstable();
    let mut out = BTreeMap::new();
    for i in chosen {
        let shape = match shape {
            Choice::Fixed(s) => s,
            Choice::Random => {
                if rng.random_bool(0.5) {
                    Shape::Linear
                } else {
                    Shape::Periodic
                }
            }
        };
        let kind = match driver {
            Choice::Fixed(k) => k,
            Choice::Random => {
                if rng.random_bool(0.5) {
                    DriverKind::Parent
                } else {
                    DriverKind::SamplingIndex
                }
            }
        };
        let driver = match (kind, graph.parents(i).choose(rng)) {
            (DriverKind::Parent, Some(&p)) => Driver::ParentValue(graph.names()[p].clone()),
            _ => Driver::SamplingIndex,
        };
        out.insert(graph.names()[i].clone(), NoiseScaling::new(shape, strength, driver));
    }
    out
}
