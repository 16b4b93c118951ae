mod common;

use proptest::prelude::*;

use common::{sentential, theory_of_mask};
use thdist_core::network::{sentential_cd_solve, ClusterNetwork, EdgeLabel, EdgeStatus, ExtNat, LowerBound, Mode};

#[derive(Debug, Clone)]
struct Graph {
    n: usize,
    equiv: Vec<(usize, usize)>,
    steps: Vec<(usize, usize)>,
}

fn graph() -> impl Strategy<Value = Graph> {
    (1usize..=14).prop_flat_map(|n| {
        (
            Just(n),
            proptest::collection::vec((0..n, 0..n), 0..=n / 2),
            proptest::collection::vec((0..n, 0..n), 0..=2 * n),
        )
            .prop_map(|(n, equiv, steps)| Graph { n, equiv, steps })
    })
}

fn build(g: &Graph, mode: Mode, keep: impl Fn(usize) -> bool) -> ClusterNetwork {
    let mut net = ClusterNetwork::new("g", (0..g.n).map(|i| format!("x{i}")), mode);
    for &(a, b) in &g.equiv {
        net.add_equiv(a, b, EdgeLabel::derived("equiv", EdgeStatus::Exact));
    }
    for (i, &(a, b)) in g.steps.iter().enumerate() {
        if keep(i) {
            net.add_step(a, b, EdgeLabel::derived("step", EdgeStatus::Exact));
        }
    }
    net
}

/// Directed shortest paths with equivalence edges in both directions at
/// cost 0 and steps one way at cost 1.
fn directed_oracle(g: &Graph) -> Vec<Vec<Option<u64>>> {
    let mut d = vec![vec![None::<u64>; g.n]; g.n];
    let relax = |d: &mut Vec<Vec<Option<u64>>>, a: usize, b: usize, w: u64| {
        if d[a][b].is_none_or(|x| w < x) {
            d[a][b] = Some(w);
        }
    };
    for i in 0..g.n {
        relax(&mut d, i, i, 0);
    }
    for &(a, b) in &g.steps {
        relax(&mut d, a, b, 1);
    }
    for &(a, b) in &g.equiv {
        relax(&mut d, a, b, 0);
        relax(&mut d, b, a, 0);
    }
    for k in 0..g.n {
        for i in 0..g.n {
            for j in 0..g.n {
                if let (Some(x), Some(y)) = (d[i][k], d[k][j]) {
                    relax(&mut d, i, j, x + y);
                }
            }
        }
    }
    d
}

fn distances(net: &ClusterNetwork, n: usize) -> Vec<Vec<ExtNat>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let r = net.step_distance(&format!("x{i}"), &format!("x{j}")).unwrap();
                    if let Some(w) = &r.witness {
                        assert!(net.verify_witness(w));
                        assert_eq!(ExtNat::Finite(w.len()), r.value);
                    }
                    r.value
                })
                .collect()
        })
        .collect()
}

/// Whether the equivalence edges alone connect `a` and `b`.
fn equivalent(g: &Graph, a: usize, b: usize) -> bool {
    let mut seen = vec![false; g.n];
    let mut stack = vec![a];
    while let Some(x) = stack.pop() {
        if std::mem::replace(&mut seen[x], true) {
            continue;
        }
        for &(p, q) in &g.equiv {
            if p == x {
                stack.push(q);
            }
            if q == x {
                stack.push(p);
            }
        }
    }
    seen[b]
}

proptest! {
    #[test]
    fn directed_distance_matches_oracle(g in graph()) {
        let net = build(&g, Mode::Directed, |_| true);
        let d = distances(&net, g.n);
        let oracle = directed_oracle(&g);
        for i in 0..g.n {
            for j in 0..g.n {
                prop_assert_eq!(d[i][j], oracle[i][j].map_or(ExtNat::Infinity, ExtNat::Finite));
                prop_assert_eq!(d[i][j] == ExtNat::Finite(0), equivalent(&g, i, j));
                for k in 0..g.n {
                    prop_assert!(d[i][j] <= d[i][k] + d[k][j]);
                }
            }
        }
    }

    /// Dropping step edges never shortens a distance.
    #[test]
    fn sub_networks_are_no_closer(g in graph(), keep in any::<u64>(), directed in any::<bool>()) {
        let mode = if directed { Mode::Directed } else { Mode::Symmetric };
        let full = distances(&build(&g, mode, |_| true), g.n);
        let part = distances(&build(&g, mode, |i| keep >> (i % 64) & 1 == 1), g.n);
        for i in 0..g.n {
            for j in 0..g.n {
                prop_assert!(part[i][j] >= full[i][j]);
            }
        }
    }

    #[test]
    fn sentential_cd_lower_bound_is_tight(a in 1u64..256, b in 1u64..=15) {
        let t1 = theory_of_mask("T1", &sentential("ABC", &["A", "B", "C"]), a);
        let t2 = theory_of_mask("T2", &sentential("PQ", &["P", "Q"]), b);
        let solved = sentential_cd_solve(&t1, &t2).unwrap();
        let r = &solved.result;
        prop_assert_eq!(r.lower_bound.as_ref().map(LowerBound::value), Some(r.value));
        // count moves go from c to anything in [ceil(c/2), 2c]
        let (mut lo, mut hi, mut d) = (a.count_ones() as u64, a.count_ones() as u64, 0u64);
        let target = b.count_ones() as u64;
        while !(lo <= target && target <= hi) {
            lo = lo.div_ceil(2);
            hi *= 2;
            d += 1;
        }
        prop_assert_eq!(r.value, ExtNat::Finite(d));
        prop_assert!(solved.certificates.iter().all(|c| c.status.is_verified()));
        prop_assert_eq!(solved.chain.len() as u64, d);
    }
}
