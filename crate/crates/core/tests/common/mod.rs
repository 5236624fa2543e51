#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relprop::{build_graph, KernelParams, MatchGraph, MatchRecord};

pub fn vid(i: usize) -> String {
    format!("v{i:04}")
}

/// Random undirected records over `n` vertices with pair probability
/// `density`; counts span both sides of the default threshold.
pub fn random_records(n: usize, density: f64, rng: &mut ChaCha8Rng) -> Vec<MatchRecord> {
    let mut records = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                records.push(MatchRecord::new(vid(i), vid(j), rng.gen_range(0..80)));
            }
        }
    }
    // every vertex appears at least once
    for i in 0..n {
        let mentioned = records.iter().any(|r| r.u == vid(i) || r.v == vid(i));
        if !mentioned {
            let j = (i + 1) % n;
            let (a, b) = (i.min(j), i.max(j));
            records.push(MatchRecord::new(vid(a), vid(b), rng.gen_range(0..80)));
        }
    }
    records
}

pub fn random_graph(n: usize, density: f64, seed: u64) -> (MatchGraph, Vec<MatchRecord>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let records = random_records(n, density, &mut rng);
    (build_graph(&records, &KernelParams::default()).unwrap(), records)
}

/// Non-negative vector with a few positive entries, normalized to sum 1.
pub fn random_bias(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut d = vec![0.0; n];
    let k = rng.gen_range(1..=n.min(8));
    for _ in 0..k {
        d[rng.gen_range(0..n)] = rng.gen_range(0.05..1.0);
    }
    let total: f64 = d.iter().sum();
    d.iter_mut().for_each(|x| *x /= total);
    d
}

/// Neighbor sets derived straight from the records.
pub fn neighbor_sets(records: &[MatchRecord], graph: &MatchGraph) -> Vec<BTreeSet<usize>> {
    let theta = graph.kernel().theta;
    let mut sets = vec![BTreeSet::new(); graph.vertex_count()];
    for r in records {
        if r.inliers >= theta && r.inliers > 0 {
            let u = graph.index_of(&r.u).unwrap();
            let v = graph.index_of(&r.v).unwrap();
            sets[u].insert(v);
            sets[v].insert(u);
        }
    }
    sets
}

/// Optimal-subgraph expansion exactly as written: grow V* by the neighbors
/// of every vertex of V_t, then set V_t to V*, M times.
pub fn naive_expand(neighbors: &[BTreeSet<usize>], roots: &[usize], depth: usize) -> BTreeSet<usize> {
    let mut v_star: BTreeSet<usize> = roots.iter().copied().collect();
    let mut v_t = v_star.clone();
    for _ in 0..depth {
        for v in &v_t {
            v_star.extend(neighbors[*v].iter().copied());
        }
        v_t = v_star.clone();
    }
    v_star
}

/// Dense row-normalized adjacency computed from the raw weights.
pub fn dense_operator(graph: &MatchGraph) -> Vec<Vec<f64>> {
    let n = graph.vertex_count();
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        let total: f64 = (0..n).map(|j| graph.weight(i, j)).sum();
        if total > 0.0 {
            for j in 0..n {
                a[i][j] = graph.weight(i, j) / total;
            }
        }
    }
    a
}

/// `iters` dense damped steps from τ = d.
pub fn dense_iterate(a: &[Vec<f64>], d: &[f64], alpha: f64, iters: usize) -> Vec<f64> {
    let n = d.len();
    let mut tau = d.to_vec();
    for _ in 0..iters {
        let mut next = vec![0.0; n];
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += a[i][j] * tau[j];
            }
            next[i] = alpha * acc + (1.0 - alpha) * d[i];
        }
        tau = next;
    }
    tau
}

/// Solves (I − αA)τ = (1 − α)d by LU.
pub fn dense_fixed_point(a: &[Vec<f64>], d: &[f64], alpha: f64) -> Vec<f64> {
    let n = d.len();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        let identity = if i == j { 1.0 } else { 0.0 };
        identity - alpha * a[i][j]
    });
    let rhs = nalgebra::DVector::from_iterator(n, d.iter().map(|x| (1.0 - alpha) * x));
    let sol = m.lu().solve(&rhs).expect("I - αA is non-singular for α < 1");
    sol.iter().copied().collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn counts(pairs: &[(&str, u64)]) -> BTreeMap<String, u64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}
