//! Scores of an estimated CPDAG against the true one.
//!
//! Undefined ratios (zero denominator) are `None` and must be left out of
//! averages rather than counted as 0 or 1.

use crate::error::{Error, Result};
use crate::graph::Cpdag;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjacencyScores {
    pub counts: Confusion,
    pub tpr: Option<f64>,
    pub fpr: Option<f64>,
    pub precision: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgemarkScores {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

fn check_nodes(est: &Cpdag, truth: &Cpdag) -> Result<()> {
    if est.names() != truth.names() {
        return Err(Error::NodeSetMismatch);
    }
    Ok(())
}

pub fn adjacency_scores(est: &Cpdag, truth: &Cpdag) -> Result<AdjacencyScores> {
    check_nodes(est, truth)?;
    let d = est.n_nodes();
    let mut c = Confusion::default();
    for a in 0..d {
        for b in a + 1..d {
            match (est.adjacent(a, b), truth.adjacent(a, b)) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, true) => c.fn_ += 1,
                (false, false) => c.tn += 1,
            }
        }
    }
    Ok(AdjacencyScores {
        counts: c,
        tpr: ratio(c.tp, c.tp + c.fn_),
        fpr: ratio(c.fp, c.fp + c.tn),
        precision: ratio(c.tp, c.tp + c.fp),
    })
}

/// Every adjacent pair contributes one mark per endpoint: an arrowhead where
/// an edge points in, a tail otherwise (including both ends of `—`).
pub fn edgemark_scores(est: &Cpdag, truth: &Cpdag) -> Result<EdgemarkScores> {
    check_nodes(est, truth)?;
    let d = est.n_nodes();
    let (mut est_marks, mut truth_marks, mut matched) = (0, 0, 0);
    for a in 0..d {
        for b in 0..d {
            if a == b {
                continue;
            }
            let (e, t) = (est.mark(a, b), truth.mark(a, b));
            est_marks += e.is_some() as usize;
            truth_marks += t.is_some() as usize;
            if e.is_some() && e == t {
                matched += 1;
            }
        }
    }
    Ok(EdgemarkScores {
        precision: ratio(matched, est_marks),
        recall: ratio(matched, truth_marks),
    })
}

/// Mean of the defined values, `None` if there are none.
pub fn mean_defined(values: &[Option<f64>]) -> Option<f64> {
    let defined: Vec<f64> = values.iter().flatten().copied().collect();
    (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
}
