#![allow(dead_code)]

use hetcd::graph::default_names;
use hetcd::{Cpdag, Dag};
use std::collections::BTreeSet;

/// Separation in the moralized ancestral graph of `{x, y} ∪ z`.
pub fn moral_separated(g: &Dag, x: usize, y: usize, z: &[usize]) -> bool {
    let d = g.n_nodes();
    let mut keep = vec![false; d];
    let mut stack: Vec<usize> = vec![x, y];
    stack.extend_from_slice(z);
    while let Some(v) = stack.pop() {
        if !keep[v] {
            keep[v] = true;
            stack.extend_from_slice(g.parents(v));
        }
    }
    let mut adj = vec![vec![false; d]; d];
    for v in (0..d).filter(|&v| keep[v]) {
        let ps = g.parents(v);
        for &p in ps {
            adj[p][v] = true;
            adj[v][p] = true;
        }
        for &a in ps {
            for &b in ps {
                if a != b {
                    adj[a][b] = true;
                }
            }
        }
    }
    let mut seen = vec![false; d];
    for &c in z {
        seen[c] = true;
    }
    let mut stack = vec![x];
    seen[x] = true;
    while let Some(v) = stack.pop() {
        if v == y {
            return false;
        }
        for u in 0..d {
            if keep[u] && adj[v][u] && !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    true
}

pub fn is_acyclic(d: usize, edges: &[(usize, usize)]) -> bool {
    let mut indeg = vec![0; d];
    for &(_, b) in edges {
        indeg[b] += 1;
    }
    let mut ready: Vec<usize> = (0..d).filter(|&v| indeg[v] == 0).collect();
    let mut count = 0;
    while let Some(v) = ready.pop() {
        count += 1;
        for &(a, b) in edges {
            if a == v {
                indeg[b] -= 1;
                if indeg[b] == 0 {
                    ready.push(b);
                }
            }
        }
    }
    count == d
}

/// Every DAG on `d` labelled nodes, as edge lists.
pub fn all_dags(d: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|a| (a + 1..d).map(move |b| (a, b))).collect();
    let total = 3usize.pow(pairs.len() as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let mut edges = Vec::new();
        for &(a, b) in &pairs {
            match c % 3 {
                1 => edges.push((a, b)),
                2 => edges.push((b, a)),
                _ => {}
            }
            c /= 3;
        }
        if is_acyclic(d, &edges) {
            out.push(edges);
        }
    }
    out
}

pub type Skeleton = BTreeSet<(usize, usize)>;
pub type VStructures = BTreeSet<(usize, usize, usize)>;

pub fn skeleton_of(edges: &[(usize, usize)]) -> Skeleton {
    edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect()
}

/// `(a, c, b)` with `a < b`, both into `c`, `a` and `b` not adjacent.
pub fn v_structures_of(edges: &[(usize, usize)]) -> VStructures {
    let skel = skeleton_of(edges);
    let mut out = BTreeSet::new();
    for &(a, c) in edges {
        for &(b, c2) in edges {
            if c == c2 && a < b && !skel.contains(&(a, b)) {
                out.insert((a, c, b));
            }
        }
    }
    out
}

/// The CPDAG of an equivalence class given its members: edges oriented the
/// same way in every member stay directed.
pub fn cpdag_from_members(d: usize, members: &[&Vec<(usize, usize)>]) -> Cpdag {
    let mut g = Cpdag::empty(default_names(d));
    for &(a, b) in &skeleton_of(members[0]) {
        let ab = members.iter().all(|m| m.contains(&(a, b)));
        let ba = members.iter().all(|m| m.contains(&(b, a)));
        match (ab, ba) {
            (true, _) => g.add_directed(a, b),
            (_, true) => g.add_directed(b, a),
            _ => g.add_undirected(a, b),
        }
    }
    g
}

pub fn dag(d: usize, edges: &[(usize, usize)]) -> Dag {
    Dag::new(default_names(d), edges).expect("acyclic")
}

pub fn names(s: &[&str]) -> Vec<String> {
    s.iter().map(|v| v.to_string()).collect()
}

pub type Classes<'a> = std::collections::BTreeMap<(Skeleton, VStructures), Vec<&'a Vec<(usize, usize)>>>;

/// Groups DAGs by skeleton and v-structures.
pub fn equivalence_classes(dags: &[Vec<(usize, usize)>]) -> Classes<'_> {
    let mut classes = Classes::new();
    for e in dags {
        classes.entry((skeleton_of(e), v_structures_of(e))).or_default().push(e);
    }
    classes
}
