use hetcd::graph::{default_names, random_dag};
use hetcd::stats::rng_from_seed;
use hetcd::{adjacency_scores, cpdag_of, edgemark_scores, Cpdag};
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::BTreeSet;

fn random_cpdag(d: usize, rng: &mut impl Rng) -> Cpdag {
    let mut g = Cpdag::empty(default_names(d));
    for a in 0..d {
        for b in a + 1..d {
            match rng.random_range(0..4) {
                1 => g.add_undirected(a, b),
                2 => g.add_directed(a, b),
                3 => g.add_directed(b, a),
                _ => {}
            }
        }
    }
    g
}

#[test]
fn adjacency_scores_match_pair_enumeration() {
    let mut rng = rng_from_seed(61);
    for _ in 0..300 {
        let d = rng.random_range(2..=6);
        let (est, truth) = (random_cpdag(d, &mut rng), random_cpdag(d, &mut rng));
        let e: BTreeSet<_> = est.skeleton().into_iter().collect();
        let t: BTreeSet<_> = truth.skeleton().into_iter().collect();
        let tp = e.intersection(&t).count();
        let fp = e.difference(&t).count();
        let fn_ = t.difference(&e).count();
        let tn = d * (d - 1) / 2 - tp - fp - fn_;
        let s = adjacency_scores(&est, &truth).unwrap();
        assert_eq!((s.counts.tp, s.counts.fp, s.counts.fn_, s.counts.tn), (tp, fp, fn_, tn));
        let ratio = |a: usize, b: usize| (b > 0).then(|| a as f64 / b as f64);
        assert_eq!(s.precision, ratio(tp, tp + fp));
        assert_eq!(s.tpr, ratio(tp, tp + fn_));
        assert_eq!(s.fpr, ratio(fp, fp + tn));
        for v in [s.tpr, s.fpr, s.precision] {
            assert!(v.is_none_or(|v| (0.0..=1.0).contains(&v)));
        }
    }
}

#[test]
fn scores_invariant_under_relabeling() {
    let mut rng = rng_from_seed(62);
    for _ in 0..100 {
        let truth = cpdag_of(&random_dag(6, 7, &mut rng).unwrap());
        let est = random_cpdag(6, &mut rng);
        let mut perm: Vec<usize> = (0..6).collect();
        perm.shuffle(&mut rng);
        let mut a = adjacency_scores(&est, &truth).unwrap();
        let mut b = adjacency_scores(&est.relabel(&perm), &truth.relabel(&perm)).unwrap();
        assert_eq!(a.tpr, b.tpr);
        assert_eq!(a.fpr, b.fpr);
        a.counts = b.counts;
        b.precision = a.precision;
        assert_eq!(a, b);
        assert_eq!(
            edgemark_scores(&est, &truth).unwrap(),
            edgemark_scores(&est.relabel(&perm), &truth.relabel(&perm)).unwrap()
        );
    }
}
