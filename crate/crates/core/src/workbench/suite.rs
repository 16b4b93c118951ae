use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::catalog::Catalog;
use super::verify::verify_all;
use crate::concepts::{check_defeq, check_interpretation, cz_sentential, sentential_defeq_witness};
use crate::error::Result;
use crate::network::{
    classify_ad, sentential_cd_solve, ClusterNetwork, DistanceStatus, EdgeLabel, EdgeStatus, ExtNat, LowerBound,
    Mode, TheoryClass,
};
use crate::relations::{axiom_add_exists, growth_checks, AxiomAddExists, CertKind};
use crate::semantics::{enumerate_models, is_true, Exactness, Policy, SatSet, Theory, Witness};
use crate::syntax::{make_pairing, Formula, Language, Translation};

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: &'static str,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    pub millis: u128,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub results: Vec<CriterionResult>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "pass": self.all_pass(),
            "criteria": self.results.iter().map(|r| json!({
                "id": r.id,
                "title": r.title,
                "pass": r.pass,
                "detail": r.detail,
            })).collect::<Vec<_>>(),
        })
    }

    /// One `ID PASS|FAIL title: detail` line per criterion.
    pub fn to_human(&self) -> String {
        self.results
            .iter()
            .map(|r| {
                format!(
                    "{} {} {}: {} ({} ms)\n",
                    r.id,
                    if r.pass { "PASS" } else { "FAIL" },
                    r.title,
                    r.detail,
                    r.millis
                )
            })
            .collect()
    }
}

type Outcome = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

pub const CRITERIA: &[(&str, &str)] = &[
    ("A1", "step distance is a pseudo-metric"),
    ("A2", "axiomatic distance classification"),
    ("A3", "conceptual distance ladder"),
    ("A4", "spectrum obstruction"),
    ("A5", "growth bound on concept additions"),
    ("A6", "conceptual size laws"),
    ("A7", "pairing translations"),
    ("A8", "partial orders vs equivalence relations"),
    ("A9", "conditional distance through an asserted edge"),
    ("A10", "bi-directed asymmetry"),
    ("A11", "strict and non-strict partial orders"),
];

/// Runs one criterion by id.
pub fn run_criterion(id: &str) -> Option<CriterionResult> {
    let &(id, title) = CRITERIA.iter().find(|(i, _)| *i == id)?;
    let start = Instant::now();
    let outcome = match id {
        "A1" => a1(),
        "A2" => a2(),
        "A3" => a3(),
        "A4" => a4(),
        "A5" => a5(),
        "A6" => a6(),
        "A7" => a7(),
        "A8" => a8(),
        "A9" => a9(),
        "A10" => a10(),
        _ => a11(),
    };
    let (pass, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Some(CriterionResult {
        id,
        title,
        pass,
        detail,
        millis: start.elapsed().as_millis(),
    })
}

/// Runs every criterion in order.
pub fn run_paper_suite() -> SuiteReport {
    SuiteReport {
        results: CRITERIA.iter().filter_map(|(id, _)| run_criterion(id)).collect(),
    }
}

/// A seeded random network: `n ≤ max_nodes` nodes, some equivalence
/// edges, some steps.
pub fn random_network(seed: u64, max_nodes: usize, mode: Mode) -> ClusterNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_nodes);
    let mut net = ClusterNetwork::new(format!("random{seed}"), (0..n).map(|i| format!("n{i}")), mode);
    for _ in 0..rng.gen_range(0..=n / 2) {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        net.add_equiv(a, b, EdgeLabel::derived("equiv", EdgeStatus::Exact));
    }
    for _ in 0..rng.gen_range(0..=n + n / 2) {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        net.add_step(a, b, EdgeLabel::derived("step", EdgeStatus::Exact));
    }
    net
}

/// Equivalence-class representative of every node.
fn components(net: &ClusterNetwork) -> Vec<usize> {
    let n = net.nodes().len();
    let mut class: Vec<usize> = (0..n).collect();
    fn root(c: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while c[r] != r {
            r = c[r];
        }
        c[x] = r;
        r
    }
    for e in net.equiv_edges() {
        let (a, b) = (root(&mut class, e.from), root(&mut class, e.to));
        class[a] = b;
    }
    (0..n).map(|i| root(&mut class, i)).collect()
}

/// All-pairs distances over the graph with equivalence classes merged.
fn contracted_floyd_warshall(net: &ClusterNetwork) -> Vec<Vec<ExtNat>> {
    let n = net.nodes().len();
    let comp = components(net);
    const INF: u64 = u64::MAX / 4;
    let mut c = vec![vec![INF; n]; n];
    for i in 0..n {
        c[comp[i]][comp[i]] = 0;
    }
    for e in net.step_edges() {
        let (a, b) = (comp[e.from], comp[e.to]);
        c[a][b] = c[a][b].min(1);
        if net.mode == Mode::Symmetric {
            c[b][a] = c[b][a].min(1);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = c[i][k] + c[k][j];
                if via < c[i][j] {
                    c[i][j] = via;
                }
            }
        }
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match c[comp[i]][comp[j]] {
                    x if x >= INF => ExtNat::Infinity,
                    x => ExtNat::Finite(x),
                })
                .collect()
        })
        .collect()
}

fn a1() -> Outcome {
    let mut pairs = 0usize;
    for seed in 0..200 {
        let net = random_network(seed, 40, Mode::Symmetric);
        let oracle = contracted_floyd_warshall(&net);
        let comp = components(&net);
        let names = net.nodes().to_vec();
        let n = names.len();
        let mut d = vec![vec![ExtNat::Infinity; n]; n];
        for i in 0..n {
            for j in 0..n {
                let r = run(net.step_distance(&names[i], &names[j]))?;
                if let Some(w) = &r.witness {
                    ensure(net.verify_witness(w) && ExtNat::Finite(w.len()) == r.value, || {
                        format!("network {seed}: bad witness {} -> {}", names[i], names[j])
                    })?;
                }
                ensure((r.value == ExtNat::Finite(0)) == (comp[i] == comp[j]), || {
                    format!("network {seed}: d({}, {}) = {} disagrees with the equivalence classes", names[i], names[j], r.value)
                })?;
                ensure(r.value == oracle[i][j], || {
                    format!("network {seed}: d({}, {}) = {}, oracle {}", names[i], names[j], r.value, oracle[i][j])
                })?;
                d[i][j] = r.value;
                pairs += 1;
            }
        }
        for i in 0..n {
            ensure(d[i][i] == ExtNat::Finite(0), || format!("network {seed}: d(x, x) ≠ 0"))?;
            for j in 0..n {
                ensure(d[i][j] == d[j][i], || format!("network {seed}: asymmetric at {i}, {j}"))?;
                for k in 0..n {
                    ensure(d[i][j] <= d[i][k] + d[k][j], || {
                        format!("network {seed}: triangle fails at {i}, {k}, {j}")
                    })?;
                }
            }
        }
    }
    Ok(format!("200 networks, {pairs} pairs agree with Floyd-Warshall"))
}

/// All sixteen theories over two constants, named `S{mask}` where bit `v`
/// of the mask says valuation `v` is a model.
pub fn two_constant_universe(constants: [&str; 2], prefix: &str) -> Vec<Theory> {
    let lang = Arc::new(
        Language::sentential(format!("{}{}", constants[0], constants[1]), constants).expect("valid constants"),
    );
    (0u32..16)
        .map(|mask| {
            let sat = SatSet::new(
                constants.iter().map(|c| c.to_string()).collect(),
                (0..4).filter(|v| mask >> v & 1 == 1),
            );
            Theory::new(format!("{prefix}{mask}"), lang.clone(), vec![sat.dnf(&lang).expect("dnf")])
                .expect("dnf is well formed")
        })
        .collect()
}

fn a2() -> Outcome {
    let mut theories = two_constant_universe(["P", "Q"], "S");
    let other = Arc::new(run(Language::sentential("PR", ["P", "R"]))?);
    theories.push(Theory::empty("Other", other));
    let class = run(TheoryClass::new(theories, Vec::new(), 1, Policy::default()))?;
    let universe: Vec<String> = (0..16).map(|m| format!("S{m}")).collect();
    let sub = run(class.restrict(&universe))?;
    let net = run(class.axiomatic_network(Mode::Symmetric))?;
    let mut checked = 0;
    for a in 1u32..16 {
        for b in 1u32..16 {
            let expected = if a == b {
                0
            } else if a & b == a || a & b == b {
                1
            } else {
                2
            };
            let r = run(net.step_distance(&format!("S{a}"), &format!("S{b}")))?;
            ensure(r.value == ExtNat::Finite(expected), || {
                format!("Ad(S{a}, S{b}) = {}, expected {expected}", r.value)
            })?;
            let c = run(classify_ad(&sub, &format!("S{a}"), &format!("S{b}"), false))?;
            ensure(c.value() == r.value, || format!("classification of S{a}, S{b} gives {c}"))?;
            checked += 1;
        }
        let r = run(net.step_distance(&format!("S{a}"), "S0"))?;
        ensure(r.value == ExtNat::Finite(1), || format!("Ad(S{a}, bottom) = {}", r.value))?;
        let r = run(net.step_distance(&format!("S{a}"), "Other"))?;
        ensure(r.value == ExtNat::Infinity, || format!("cross-language Ad(S{a}, Other) = {}", r.value))?;
    }
    Ok(format!("{checked} consistent pairs match the 0/1/2 pattern; bottom at 1; cross-language at ∞"))
}

fn a3() -> Outcome {
    let cat = Catalog::paper_examples();
    let class = run(cat.network_class("ladder"))?;
    let mut values = Vec::new();
    for n in 1..=4u64 {
        let target = format!("T{n}star");
        let r = run(class.conceptual_distance("T0star", &target))?;
        ensure(r.value == ExtNat::Finite(n), || format!("Cd(T0*, T{n}*) = {}", r.value))?;
        ensure(r.status == DistanceStatus::Exact, || format!("Cd(T0*, T{n}*) is {}", r.status))?;
        let lb = r.lower_bound.as_ref().map(LowerBound::value);
        ensure(lb == Some(ExtNat::Finite(n)), || format!("lower bound {lb:?} for T{n}*"))?;
        let solved = run(sentential_cd_solve(run(cat.theory("T0star"))?, run(cat.theory(&target))?))?;
        ensure(solved.result.value == ExtNat::Finite(n), || format!("solver gives {}", solved.result.value))?;
        ensure(solved.chain.len() == n as usize, || format!("chain to T{n}* has {} theories", solved.chain.len()))?;
        let count = run(enumerate_models(run(cat.theory(&target))?, 1, &cat.policy))?.len();
        ensure(count == 1 << n, || format!("I(T{n}*, 1) = {count}"))?;
        values.push(n.to_string());
    }
    Ok(format!("Cd(T0*, Tn*) = {} with matching growth bounds", values.join(", ")))
}

fn a4() -> Outcome {
    let cat = Catalog::paper_examples();
    let r = run(cat.distance("sizes", "ThA", "ThB", false))?;
    ensure(r.value == ExtNat::Infinity, || format!("Cd(ThA, ThB) = {}", r.value))?;
    match r.lower_bound {
        Some(LowerBound::SpectrumObstruction { size, counts }) => {
            Ok(format!("∞, obstruction at size {size} with counts {counts:?}"))
        }
        other => Err(format!("lower bound {other:?}")),
    }
}

fn a5() -> Outcome {
    let cat = Catalog::paper_examples();
    let report = verify_all(&cat, cat.policy.bound);
    let mut edges = 0;
    for e in &report.entries {
        let c = &e.certificate;
        if !matches!(c.kind, CertKind::ConceptAdd { .. }) || !c.status.is_verified() {
            continue;
        }
        let (t, t2) = (run(cat.theory(&c.from))?, run(cat.theory(&c.to))?);
        for g in run(growth_checks(t, t2, 3, &cat.policy))? {
            ensure(g.holds(), || {
                format!("{}: I = {} exceeds {} at size {}", c.label(), g.extended, g.limit, g.size)
            })?;
        }
        edges += 1;
    }
    ensure(edges > 0, || "no verified concept additions".into())?;
    Ok(format!("{edges} verified concept additions respect the bound for k ≤ 3"))
}

/// Truth tables over `n` constants reached by formulas of depth at most
/// `depth` built from the constants with ¬, ∧, ∨.
fn tables_by_depth(n: usize, depth: usize) -> Vec<u64> {
    let rows = 1u32 << n;
    let full = if rows == 64 { u64::MAX } else { (1u64 << rows) - 1 };
    let mut seen: std::collections::BTreeSet<u64> = (0..n)
        .map(|i| (0..rows).filter(|v| v >> i & 1 == 1).fold(0u64, |t, v| t | 1 << v))
        .collect();
    for _ in 0..depth {
        let cur: Vec<u64> = seen.iter().copied().collect();
        for &a in &cur {
            seen.insert(!a & full);
            for &b in &cur {
                seen.insert(a & b);
                seen.insert(a | b);
            }
        }
    }
    seen.into_iter().collect()
}

fn a6() -> Outcome {
    let tables = tables_by_depth(2, 4);
    let pq = two_constant_universe(["P", "Q"], "S");
    let rs = two_constant_universe(["R", "S"], "U");
    let policy = Policy::default();
    for t in &pq {
        let sat = run(SatSet::of(t))?;
        let mask = sat.iter().fold(0u64, |m, v| m | 1 << v);
        let classes: std::collections::BTreeSet<u64> = tables.iter().map(|x| x & mask).collect();
        let cz = run(cz_sentential(t))?.value;
        ensure(cz == BigUint::from(classes.len()), || {
            format!("Cz({}) = {cz}, enumeration finds {}", t.name(), classes.len())
        })?;
    }
    let mut defeq = 0;
    for t1 in &pq[1..] {
        for t2 in &rs[1..] {
            if let Some((tr12, tr21)) = run(sentential_defeq_witness(t1, t2))? {
                let c = run(check_defeq(&tr12, &tr21, t1, t2, 1, &policy))?;
                ensure(c.holds, || format!("witness for {} and {} does not check", t1.name(), t2.name()))?;
                ensure(run(cz_sentential(t1))?.value == run(cz_sentential(t2))?.value, || {
                    format!("Cz differs across {} and {}", t1.name(), t2.name())
                })?;
                defeq += 1;
            }
        }
    }
    let lang = pq[0].lang().clone();
    let functions: Vec<Formula> = pq
        .iter()
        .map(|t| t.axioms()[0].clone())
        .collect();
    let mut faithful = 0;
    for f in &functions {
        for g in &functions {
            let tr = run(Translation::new(
                lang.clone(),
                lang.clone(),
                BTreeMap::from([("P".to_string(), f.clone()), ("Q".to_string(), g.clone())]),
            ))?;
            for t1 in &pq {
                for t2 in &pq {
                    if run(check_interpretation(&tr, t1, t2, 1, &policy))?.is_faithful() {
                        ensure(run(cz_sentential(t1))?.value <= run(cz_sentential(t2))?.value, || {
                            format!("faithful {} -> {} shrinks Cz", t1.name(), t2.name())
                        })?;
                        faithful += 1;
                    }
                }
            }
        }
    }
    Ok(format!(
        "Cz = 2^|Sat| on 16 theories; {defeq} defeq pairs keep Cz; {faithful} faithful pairs are monotone"
    ))
}

fn a7() -> Outcome {
    let base = Arc::new(run(Language::new("RS", [("R", 1usize), ("S", 1usize)], 5))?);
    let p = run(make_pairing(("R", 1), ("S", 1), "B", &base))?;
    let r_back = run(p.tr_prime.image("R").cloned().ok_or_else(|| crate::error::Error::Precondition("no R".into())))?;
    let s_back = run(p.tr_prime.image("S").cloned().ok_or_else(|| crate::error::Error::Precondition("no S".into())))?;
    let r_trip = Formula::iff(Formula::atom("R", vec![0]), r_back);
    let s_trip = Formula::iff(Formula::atom("S", vec![0]), s_back);
    let b_trip = Formula::iff(
        Formula::atom("B", (0..p.l).collect()),
        run(p.tr_prime.apply(&p.psi))?,
    );
    let empty = Theory::empty("RS", base.clone());
    let policy = Policy::default();
    let mut models = 0;
    for k in 2..=3 {
        for m in run(enumerate_models(&empty, k, &policy))?.iter() {
            let x = run(p.extend(m))?;
            for (name, f) in [("R", &r_trip), ("S", &s_trip), ("B", &b_trip)] {
                ensure(run(is_true(&x, f))?, || format!("{name} round trip fails on a size-{k} model"))?;
            }
            models += 1;
        }
    }
    let mut size_one_failure = false;
    for m in run(enumerate_models(&empty, 1, &policy))?.iter() {
        let x = run(p.extend(m))?;
        size_one_failure |= !run(is_true(&x, &s_trip))?;
    }
    ensure(size_one_failure, || "the S round trip survives every size-1 model".into())?;
    Ok(format!("round trips hold on {models} models of sizes 2 and 3; the S round trip fails at size 1"))
}

fn a8() -> Outcome {
    let cat = Catalog::paper_examples();
    let r = run(cat.distance("binrel", "TP", "TE", false))?;
    ensure(r.value == ExtNat::Finite(2), || format!("Ad(TP, TE) = {}", r.value))?;
    let via = r.witness.as_ref().map(|w| w.nodes.clone()).unwrap_or_default();
    ensure(via.iter().any(|n| n == "Bempty"), || format!("path {via:?} avoids the empty theory"))?;
    let (tp, te) = (run(cat.theory("TP"))?, run(cat.theory("TE"))?);
    let mut sizes = Vec::new();
    for (a, b) in [(tp, te), (te, tp)] {
        match run(axiom_add_exists(a, b, cat.policy.bound, &cat.policy))? {
            AxiomAddExists::No {
                witness: Witness::Model { model, .. },
            } => sizes.push(model.size()),
            other => return Err(format!("{} ← {} is not refuted: {:?}", a.name(), b.name(), other.to_json())),
        }
    }
    ensure(sizes.iter().all(|&s| s == 2), || format!("countermodels have sizes {sizes:?}"))?;
    Ok(format!("Ad(TP, TE) = 2 via {}; both one-axiom directions refuted at size 2", via.join(" ")))
}

fn a9() -> Outcome {
    let cat = Catalog::paper_examples();
    let r = run(cat.distance("kinematics", "Kin0", "ClassicalKin", false))?;
    ensure(r.value == ExtNat::Finite(1), || format!("Cd = {}", r.value))?;
    ensure(r.status == DistanceStatus::Conditional, || format!("status {}", r.status))?;
    ensure(r.asserted.iter().any(|a| a.starts_with("defeq")), || format!("asserted {:?}", r.asserted))?;
    Ok(format!("Cd(Kin0, ClassicalKin) = 1, conditional on {}", r.asserted.join(", ")))
}

fn a10() -> Outcome {
    let cat = Catalog::paper_examples();
    let fwd = run(cat.distance("removal", "T2star", "T4star", true))?;
    let back = run(cat.distance("removal", "T4star", "T2star", true))?;
    ensure(fwd.value == ExtNat::Finite(2) && back.value == ExtNat::Finite(1), || {
        format!("forward {}, backward {}", fwd.value, back.value)
    })?;
    ensure(fwd.status == DistanceStatus::Exact && back.status == DistanceStatus::Exact, || {
        format!("statuses {} and {}", fwd.status, back.status)
    })?;
    Ok("forward 2, backward 1".into())
}

fn a11() -> Outcome {
    let cat = Catalog::paper_examples();
    let (po, spo) = (run(cat.theory("PO"))?, run(cat.theory("SPO"))?);
    let cert = cat
        .certificates
        .iter()
        .find(|c| c.from == "PO" && c.to == "SPO" && matches!(c.kind, CertKind::DefEq { .. }))
        .ok_or("no defeq certificate between PO and SPO")?;
    let CertKind::DefEq { tr12, tr21 } = &cert.kind else {
        unreachable!()
    };
    let policy = cat.policy;
    let c = run(check_defeq(tr12, tr21, po, spo, 4, &policy))?;
    ensure(c.holds, || format!("defeq fails: {:?}", c.failure.as_ref().map(|f| &f.reason)))?;
    ensure(c.exactness == Exactness::Bounded(4), || format!("exactness {:?}", c.exactness))?;
    let f = run(check_interpretation(tr12, po, spo, 4, &policy))?;
    let g = run(check_interpretation(tr21, spo, po, 4, &policy))?;
    ensure(f.is_faithful() && g.is_faithful(), || "a direction is not faithful".into())?;
    Ok("defeq and both faithful interpretations hold, bounded(4)".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floyd_warshall_on_a_small_network() {
        let mut net = ClusterNetwork::new("n", ["a", "b", "c", "d"], Mode::Symmetric);
        net.add_equiv(0, 1, EdgeLabel::derived("equiv", EdgeStatus::Exact));
        net.add_step(1, 2, EdgeLabel::derived("step", EdgeStatus::Exact));
        let d = contracted_floyd_warshall(&net);
        assert_eq!(d[0][2], ExtNat::Finite(1));
        assert_eq!(d[0][1], ExtNat::Finite(0));
        assert_eq!(d[3][0], ExtNat::Infinity);
    }

    #[test]
    fn depth_four_reaches_all_two_constant_tables() {
        assert_eq!(tables_by_depth(2, 4).len(), 16);
    }
}
