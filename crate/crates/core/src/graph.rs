//! DAGs, CPDAGs, d-separation and Markov equivalence classes.
//!
//! Graphs serialize as an edge list:
//!
//! ```json
//! {"nodes": ["A", "B", "C"], "edges": [["A", "B", "->"], ["B", "C", "--"]]}
//! ```

use crate::error::{Error, Result};
use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    names: Vec<String>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

impl Dag {
    /// Builds a DAG from `(from, to)` index pairs, rejecting self-loops,
    /// duplicates and cycles.
    pub fn new(names: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        let d = names.len();
        check_unique(&names)?;
        let mut parents = vec![Vec::new(); d];
        let mut children = vec![Vec::new(); d];
        for &(a, b) in edges {
            if a >= d || b >= d {
                return Err(Error::InvalidGraph(format!("edge ({a}, {b}) out of range")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop on `{}`", names[a])));
            }
            if parents[b].contains(&a) || parents[a].contains(&b) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge between `{}` and `{}`",
                    names[a], names[b]
                )));
            }
            parents[b].push(a);
            children[a].push(b);
        }
        for v in parents.iter_mut().chain(children.iter_mut()) {
            v.sort_unstable();
        }
        let dag = Self {
            names,
            parents,
            children,
        };
        if dag.topological_order().len() != d {
            return Err(Error::InvalidGraph("graph contains a directed cycle".into()));
        }
        Ok(dag)
    }

    /// A DAG on nodes `X0, X1, …` with no edges.
    pub fn empty(d: usize) -> Self {
        Self {
            names: default_names(d),
            parents: vec![Vec::new(); d],
            children: vec![Vec::new(); d],
        }
    }

    pub fn from_named_edges(names: Vec<String>, edges: &[(&str, &str)]) -> Result<Self> {
        let idx = |s: &str| {
            names
                .iter()
                .position(|n| n == s)
                .ok_or_else(|| Error::UnknownNode(s.to_string()))
        };
        let pairs = edges
            .iter()
            .map(|(a, b)| Ok((idx(a)?, idx(b)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(names, &pairs)
    }

    pub fn n_nodes(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn parents(&self, i: usize) -> &[usize] {
        &self.parents[i]
    }

    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.children[from].binary_search(&to).is_ok()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.has_edge(a, b) || self.has_edge(b, a)
    }

    /// All edges, sorted by `(from, to)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = (0..self.n_nodes())
            .flat_map(|a| self.children[a].iter().map(move |&b| (a, b)))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn n_edges(&self) -> usize {
        self.children.iter().map(Vec::len).sum()
    }

    /// Kahn's algorithm, smallest available index first. Shorter than
    /// `n_nodes()` iff the graph has a cycle.
    pub fn topological_order(&self) -> Vec<usize> {
        let d = self.n_nodes();
        let mut indeg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: std::collections::BTreeSet<usize> = (0..d).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(d);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &c in &self.children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        order
    }

    /// Nodes in `seeds` together with all their ancestors.
    pub fn ancestral_set(&self, seeds: &[usize]) -> Vec<bool> {
        let mut mark = vec![false; self.n_nodes()];
        let mut stack: Vec<usize> = seeds.to_vec();
        while let Some(v) = stack.pop() {
            if !mark[v] {
                mark[v] = true;
                stack.extend(self.parents[v].iter().copied());
            }
        }
        mark
    }

    /// True iff `x` and `y` are d-separated by `z`.
    pub fn d_separated(&self, x: usize, y: usize, z: &[usize]) -> Result<bool> {
        let d = self.n_nodes();
        if x >= d || y >= d || z.iter().any(|&v| v >= d) {
            return Err(Error::UnknownNode(format!("index out of range for {d} nodes")));
        }
        if x == y || z.contains(&x) || z.contains(&y) {
            return Err(Error::InvalidGraph(
                "d-separation query needs distinct endpoints outside the conditioning set".into(),
            ));
        }
        let mut in_z = vec![false; d];
        for &v in z {
            in_z[v] = true;
        }
        let anc_z = self.ancestral_set(z);

        // reachability over (node, arrived-from-child) states
        let mut seen = vec![[false; 2]; d];
        let mut queue = VecDeque::new();
        queue.push_back((x, true));
        while let Some((v, up)) = queue.pop_front() {
            if seen[v][up as usize] {
                continue;
            }
            seen[v][up as usize] = true;
            if v == y {
                return Ok(false);
            }
            if up {
                if !in_z[v] {
                    queue.extend(self.parents[v].iter().map(|&p| (p, true)));
                    queue.extend(self.children[v].iter().map(|&c| (c, false)));
                }
            } else {
                if !in_z[v] {
                    queue.extend(self.children[v].iter().map(|&c| (c, false)));
                }
                if anc_z[v] {
                    queue.extend(self.parents[v].iter().map(|&p| (p, true)));
                }
            }
        }
        Ok(true)
    }

    pub fn d_separated_by_name(&self, x: &str, y: &str, z: &[&str]) -> Result<bool> {
        let zi = z.iter().map(|n| self.index_of(n)).collect::<Result<Vec<_>>>()?;
        self.d_separated(self.index_of(x)?, self.index_of(y)?, &zi)
    }

    /// Unshielded colliders `a → c ← b` with `a < b`, as `(a, c, b)`.
    pub fn v_structures(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for c in 0..self.n_nodes() {
            let pa = &self.parents[c];
            for (i, &a) in pa.iter().enumerate() {
                for &b in &pa[i + 1..] {
                    if !self.adjacent(a, b) {
                        out.push((a, c, b));
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// The CPDAG of this DAG's Markov equivalence class.
    pub fn cpdag(&self) -> Cpdag {
        cpdag_of(self)
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            nodes: self.names.clone(),
            edges: self
                .edges()
                .into_iter()
                .map(|(a, b)| (self.names[a].clone(), self.names[b].clone(), "->".into()))
                .collect(),
        }
    }

    pub fn from_json(g: &GraphJson) -> Result<Self> {
        let mut pairs = Vec::with_capacity(g.edges.len());
        for (a, b, mark) in &g.edges {
            if mark != "->" {
                return Err(Error::InvalidGraph(format!(
                    "DAG edge `{a} {mark} {b}` must be directed"
                )));
            }
            pairs.push((a.as_str(), b.as_str()));
        }
        Self::from_named_edges(g.nodes.clone(), &pairs)
    }
}

/// Edge-list form shared by [`Dag`] and [`Cpdag`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String, String)>,
}

/// Mark at one end of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeMark {
    Tail,
    Arrow,
}

/// A partially directed graph. `a → b` is stored as `m[a][b] && !m[b][a]`,
/// `a — b` as `m[a][b] && m[b][a]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cpdag {
    names: Vec<String>,
    m: Vec<Vec<bool>>,
}

impl Cpdag {
    /// Undirected graph on `names` without edges.
    pub fn empty(names: Vec<String>) -> Self {
        let d = names.len();
        Self {
            names,
            m: vec![vec![false; d]; d],
        }
    }

    /// Complete undirected graph.
    pub fn complete(names: Vec<String>) -> Self {
        let d = names.len();
        let mut m = vec![vec![true; d]; d];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = false;
        }
        Self { names, m }
    }

    pub fn n_nodes(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.m[a][b] || self.m[b][a]
    }

    pub fn is_directed(&self, from: usize, to: usize) -> bool {
        self.m[from][to] && !self.m[to][from]
    }

    pub fn is_undirected(&self, a: usize, b: usize) -> bool {
        self.m[a][b] && self.m[b][a]
    }

    /// Mark at `at` on the edge between `other` and `at`, if adjacent.
    pub fn mark(&self, other: usize, at: usize) -> Option<EdgeMark> {
        if !self.adjacent(other, at) {
            None
        } else if self.is_directed(other, at) {
            Some(EdgeMark::Arrow)
        } else {
            Some(EdgeMark::Tail)
        }
    }

    pub fn neighbors(&self, a: usize) -> Vec<usize> {
        (0..self.n_nodes()).filter(|&b| self.adjacent(a, b)).collect()
    }

    pub fn add_undirected(&mut self, a: usize, b: usize) {
        self.m[a][b] = true;
        self.m[b][a] = true;
    }

    pub fn add_directed(&mut self, from: usize, to: usize) {
        self.m[from][to] = true;
        self.m[to][from] = false;
    }

    pub fn remove_edge(&mut self, a: usize, b: usize) {
        self.m[a][b] = false;
        self.m[b][a] = false;
    }

    /// Unordered adjacent pairs `(a, b)` with `a < b`.
    pub fn skeleton(&self) -> Vec<(usize, usize)> {
        let d = self.n_nodes();
        (0..d)
            .flat_map(|a| (a + 1..d).map(move |b| (a, b)))
            .filter(|&(a, b)| self.adjacent(a, b))
            .collect()
    }

    pub fn n_edges(&self) -> usize {
        self.skeleton().len()
    }

    /// Moves node `i` to position `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let d = self.n_nodes();
        let mut names = vec![String::new(); d];
        let mut m = vec![vec![false; d]; d];
        for i in 0..d {
            names[perm[i]] = self.names[i].clone();
            for j in 0..d {
                m[perm[i]][perm[j]] = self.m[i][j];
            }
        }
        Self { names, m }
    }

    /// Applies Meek's rules 1–4 until none fires.
    pub fn apply_meek_rules(&mut self) {
        while self.meek_sweep() {}
    }

    /// True if some Meek rule could still orient an undirected edge.
    pub fn meek_applicable(&self) -> bool {
        let d = self.n_nodes();
        (0..d).any(|a| (0..d).any(|b| a != b && self.is_undirected(a, b) && self.meek_orients(a, b)))
    }

    fn meek_sweep(&mut self) -> bool {
        let d = self.n_nodes();
        let mut changed = false;
        for a in 0..d {
            for b in 0..d {
                if a != b && self.is_undirected(a, b) && self.meek_orients(a, b) {
                    self.add_directed(a, b);
                    changed = true;
                }
            }
        }
        changed
    }

    /// Whether any rule forces the undirected edge `a — b` into `a → b`.
    fn meek_orients(&self, a: usize, b: usize) -> bool {
        let d = self.n_nodes();
        // R1: c → a — b, c and b non-adjacent
        if (0..d).any(|c| c != b && self.is_directed(c, a) && !self.adjacent(c, b)) {
            return true;
        }
        // R2: a → c → b
        if (0..d).any(|c| self.is_directed(a, c) && self.is_directed(c, b)) {
            return true;
        }
        // R3: a — c → b, a — e → b, c and e non-adjacent
        let kites: Vec<usize> = (0..d)
            .filter(|&c| self.is_undirected(a, c) && self.is_directed(c, b))
            .collect();
        for (i, &c) in kites.iter().enumerate() {
            if kites[i + 1..].iter().any(|&e| !self.adjacent(c, e)) {
                return true;
            }
        }
        // R4: a — e → c → b, a adjacent to c, e and b non-adjacent
        for c in 0..d {
            if c == a || !self.is_directed(c, b) || !self.adjacent(a, c) {
                continue;
            }
            if (0..d).any(|e| e != b && self.is_undirected(a, e) && self.is_directed(e, c) && !self.adjacent(e, b)) {
                return true;
            }
        }
        false
    }

    pub fn to_json(&self) -> GraphJson {
        let mut edges = Vec::new();
        for (a, b) in self.skeleton() {
            let (from, to, mark) = if self.is_directed(b, a) {
                (b, a, "->")
            } else if self.is_directed(a, b) {
                (a, b, "->")
            } else {
                (a, b, "--")
            };
            edges.push((self.names[from].clone(), self.names[to].clone(), mark.to_string()));
        }
        GraphJson {
            nodes: self.names.clone(),
            edges,
        }
    }

    pub fn from_json(g: &GraphJson) -> Result<Self> {
        check_unique(&g.nodes)?;
        let mut out = Self::empty(g.nodes.clone());
        let idx = |s: &str| {
            g.nodes
                .iter()
                .position(|n| n == s)
                .ok_or_else(|| Error::UnknownNode(s.to_string()))
        };
        for (a, b, mark) in &g.edges {
            let (ia, ib) = (idx(a)?, idx(b)?);
            if ia == ib {
                return Err(Error::InvalidGraph(format!("self-loop on `{a}`")));
            }
            if out.adjacent(ia, ib) {
                return Err(Error::InvalidGraph(format!("duplicate edge between `{a}` and `{b}`")));
            }
            match mark.as_str() {
                "->" => out.add_directed(ia, ib),
                "--" => out.add_undirected(ia, ib),
                other => return Err(Error::InvalidGraph(format!("unknown edge mark `{other}`"))),
            }
        }
        Ok(out)
    }
}

/// Skeleton of `g`, its v-structures oriented, closed under Meek's rules.
pub fn cpdag_of(g: &Dag) -> Cpdag {
    let mut out = Cpdag::empty(g.names().to_vec());
    for (a, b) in g.edges() {
        out.add_undirected(a, b);
    }
    for (a, c, b) in g.v_structures() {
        out.add_directed(a, c);
        out.add_directed(b, c);
    }
    out.apply_meek_rules();
    out
}

/// Random DAG: uniform random node order, then `m` of the `d(d−1)/2`
/// order-respecting pairs drawn without replacement.
pub fn random_dag<R: Rng + ?Sized>(d: usize, m: usize, rng: &mut R) -> Result<Dag> {
    let total = d * d.saturating_sub(1) / 2;
    if m > total {
        return Err(Error::TooManyEdges { d, m });
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.shuffle(rng);
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
    let edges: Vec<(usize, usize)> = index::sample(rng, total, m)
        .into_iter()
        .map(|k| {
            let (i, j) = pairs[k];
            (order[i], order[j])
        })
        .collect();
    Dag::new(default_names(d), &edges)
}

pub fn default_names(d: usize) -> Vec<String> {
    (0..d).map(|i| format!("X{i}")).collect()
}

fn check_unique(names: &[String]) -> Result<()> {
    for (i, a) in names.iter().enumerate() {
        if names[..i].contains(a) {
            return Err(Error::InvalidGraph(format!("duplicate node name `{a}`")));
        }
    }
    Ok(())
}
