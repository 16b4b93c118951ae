//! Inputs shared by the benchmarks.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thdist_core::network::{ClusterNetwork, EdgeLabel, EdgeStatus, Mode};
use thdist_core::{FiniteModel, Language};

/// A model over `P/1`, `R/2` with random facts.
pub fn random_pr_model(size: usize, vars: usize, seed: u64) -> FiniteModel {
    let lang = Arc::new(Language::new("PR", [("P", 1usize), ("R", 2usize)], vars).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = FiniteModel::empty(lang, size).unwrap();
    for a in 0..size {
        m.set("P", &[a], rng.gen()).unwrap();
        for b in 0..size {
            m.set("R", &[a, b], rng.gen()).unwrap();
        }
    }
    m
}

/// `n` nodes, about `n/4` equivalence edges and `2n` random steps.
pub fn random_network(n: usize, seed: u64, mode: Mode) -> ClusterNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net = ClusterNetwork::new("bench", (0..n).map(|i| format!("x{i}")), mode);
    for _ in 0..n / 4 {
        net.add_equiv(rng.gen_range(0..n), rng.gen_range(0..n), EdgeLabel::derived("equiv", EdgeStatus::Exact));
    }
    for _ in 0..2 * n {
        net.add_step(rng.gen_range(0..n), rng.gen_range(0..n), EdgeLabel::derived("step", EdgeStatus::Exact));
    }
    net
}
