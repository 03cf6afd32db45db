#![allow(dead_code)]

use num_bigint::BigInt;
use persuade_core::graph::WeightedGraph;
use persuade_core::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

pub fn qi(a: i64) -> BigRational {
    q(a, 1)
}

pub const WEIGHTS: [(i64, i64); 4] = [(1, 1), (1, 2), (2, 3), (3, 4)];

/// Random graph with edge probability `density`; unit weights unless `weighted`.
pub fn random_graph(rng: &mut impl Rng, n: usize, density: f64, weighted: bool) -> WeightedGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density) {
                let (a, b) = if weighted { WEIGHTS[rng.gen_range(0..WEIGHTS.len())] } else { (1, 1) };
                edges.push((u, v, q(a, b)));
            }
        }
    }
    WeightedGraph::new(n, edges).unwrap()
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

prop_compose! {
    pub fn arb_graph(max_n: usize, weighted: bool)(n in 1..=max_n, seed in any::<u64>(), density in 0.0..1.0f64) -> WeightedGraph {
        random_graph(&mut seeded(seed), n, density, weighted)
    }
}

/// Weight between two vertices by scanning the edge list, with the unit diagonal.
pub fn w_oracle(g: &WeightedGraph, u: usize, v: usize) -> BigRational {
    if u == v {
        return qi(1);
    }
    g.edges()
        .iter()
        .find(|e| (e.u == u && e.v == v) || (e.u == v && e.v == u))
        .map(|e| e.w.clone())
        .unwrap_or_else(|| qi(0))
}

/// `Σ_{u,v ∈ S} W_uv` over ordered pairs, diagonal included.
pub fn induced_oracle(g: &WeightedGraph, s: &[usize]) -> BigRational {
    let mut total = qi(0);
    for &u in s {
        for &v in s {
            total += w_oracle(g, u, v);
        }
    }
    total
}

pub fn cut_oracle(g: &WeightedGraph, s: &[usize]) -> BigRational {
    let mut total = qi(0);
    for &u in s {
        for v in (0..g.n()).filter(|v| !s.contains(v)) {
            total += w_oracle(g, u, v);
        }
    }
    total
}

/// `(Wx)_v` by the edge-scan oracle.
pub fn load_oracle(g: &WeightedGraph, x: &[BigRational]) -> Vec<BigRational> {
    (0..g.n())
        .map(|v| (0..g.n()).fold(qi(0), |acc, u| acc + w_oracle(g, u, v) * x[u].clone()))
        .collect()
}
