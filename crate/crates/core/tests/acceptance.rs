//! Acceptance criteria A1..A11. Each criterion compares the library against
//! an oracle written here and prints one PASS/FAIL line.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use thdist_core::concepts::{check_defeq, check_interpretation, cz_sentential, sentential_defeq_witness};
use thdist_core::network::{
    sentential_cd_solve, ClusterNetwork, DistanceStatus, EdgeLabel, EdgeStatus, ExtNat, LowerBound, Mode,
    TheoryClass,
};
use thdist_core::relations::{axiom_add_exists, AxiomAddExists, CertKind};
use thdist_core::semantics::{is_true, Exactness};
use thdist_core::syntax::make_pairing;
use thdist_core::workbench::{verify_all, Catalog};
use thdist_core::{enumerate_models, spectrum, FiniteModel, Formula, Language, Policy, SatSet, Theory, Translation};

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

macro_rules! check {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

// A1

struct RandomNet {
    n: usize,
    equiv: Vec<(usize, usize)>,
    steps: Vec<(usize, usize)>,
}

fn random_net(rng: &mut ChaCha8Rng) -> RandomNet {
    let n = rng.gen_range(1..=40);
    let ne = rng.gen_range(0..=n / 2);
    let ns = rng.gen_range(0..=2 * n);
    RandomNet {
        n,
        equiv: (0..ne).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect(),
        steps: (0..ns).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect(),
    }
}

fn find(parent: &mut Vec<usize>, x: usize) -> usize {
    if parent[x] != x {
        let r = find(parent, parent[x]);
        parent[x] = r;
    }
    parent[x]
}

/// Floyd-Warshall on the graph whose nodes are the equivalence classes.
fn oracle_distances(g: &RandomNet) -> (Vec<usize>, Vec<Vec<Option<u64>>>) {
    let mut parent: Vec<usize> = (0..g.n).collect();
    for &(a, b) in &g.equiv {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let class: Vec<usize> = (0..g.n).map(|i| find(&mut parent, i)).collect();
    let mut d = vec![vec![None::<u64>; g.n]; g.n];
    for (c, row) in d.iter_mut().enumerate() {
        row[c] = Some(0);
    }
    for &(a, b) in &g.steps {
        let (ca, cb) = (class[a], class[b]);
        if ca != cb {
            d[ca][cb] = Some(1);
            d[cb][ca] = Some(1);
        }
    }
    for k in 0..g.n {
        for i in 0..g.n {
            for j in 0..g.n {
                if let (Some(x), Some(y)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|z| x + y < z) {
                        d[i][j] = Some(x + y);
                    }
                }
            }
        }
    }
    let full = (0..g.n)
        .map(|i| (0..g.n).map(|j| d[class[i]][class[j]]).collect())
        .collect();
    (class, full)
}

fn as_ext(x: Option<u64>) -> ExtNat {
    x.map_or(ExtNat::Infinity, ExtNat::Finite)
}

fn a1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA1);
    let mut pairs = 0;
    for round in 0..200 {
        let g = random_net(&mut rng);
        let mut net = ClusterNetwork::new("random", (0..g.n).map(|i| format!("x{i}")), Mode::Symmetric);
        for &(a, b) in &g.equiv {
            net.add_equiv(a, b, EdgeLabel::derived("equiv", EdgeStatus::Exact));
        }
        for &(a, b) in &g.steps {
            net.add_step(a, b, EdgeLabel::derived("step", EdgeStatus::Exact));
        }
        let (class, oracle) = oracle_distances(&g);
        let name = |i: usize| format!("x{i}");
        let mut d = vec![vec![ExtNat::Infinity; g.n]; g.n];
        for i in 0..g.n {
            for j in 0..g.n {
                let r = ok(net.step_distance(&name(i), &name(j)))?;
                check!(r.value == as_ext(oracle[i][j]), "round {round}: d(x{i}, x{j}) = {}, oracle {:?}", r.value, oracle[i][j]);
                check!((r.value == ExtNat::Finite(0)) == (class[i] == class[j]), "round {round}: zero distance off the equivalence closure at x{i}, x{j}");
                if let Some(w) = &r.witness {
                    check!(net.verify_witness(w) && ExtNat::Finite(w.len()) == r.value, "round {round}: witness for x{i}, x{j} does not re-verify");
                }
                d[i][j] = r.value;
                pairs += 1;
            }
        }
        for i in 0..g.n {
            for j in 0..g.n {
                check!(d[i][j] == d[j][i], "round {round}: asymmetric at x{i}, x{j}");
                for k in 0..g.n {
                    check!(d[i][j] <= d[i][k] + d[k][j], "round {round}: triangle fails at x{i}, x{k}, x{j}");
                }
            }
        }
    }
    Ok(format!("200 random networks, {pairs} ordered pairs match Floyd-Warshall"))
}

// A2

/// DNF text for the theory whose models are the valuations in `mask`
/// (valuation `v`: P is bit 0, Q is bit 1).
fn dnf_text(mask: u32) -> String {
    let lit = |name: &str, on: bool| if on { name.to_string() } else { format!("(not {name})") };
    let terms: Vec<String> = (0..4)
        .filter(|v| mask >> v & 1 == 1)
        .map(|v| format!("(and {} {})", lit("P", v & 1 == 1), lit("Q", v & 2 == 2)))
        .collect();
    match terms.len() {
        0 => "(and P (not P))".into(),
        1 => terms[0].clone(),
        _ => format!("(or {})", terms.join(" ")),
    }
}

fn a2() -> Outcome {
    let pq = Arc::new(ok(Language::sentential("PQ", ["P", "Q"]))?);
    let mut theories: Vec<Theory> = (0u32..16)
        .map(|m| ok(Theory::parse(format!("S{m}"), pq.clone(), &[dnf_text(m).as_str()])))
        .collect::<Result<_, _>>()?;
    let pr = Arc::new(ok(Language::sentential("PR", ["P", "R"]))?);
    theories.push(Theory::empty("Elsewhere", pr));
    let class = ok(TheoryClass::new(theories, Vec::new(), 1, Policy::default()))?;
    let net = ok(class.axiomatic_network(Mode::Symmetric))?;
    let mut pattern = BTreeMap::new();
    for a in 1u32..16 {
        for b in 1u32..16 {
            // one axiom relates model sets exactly when one contains the other
            let expected = if a == b {
                0
            } else if a & b == a || a & b == b {
                1
            } else {
                2
            };
            let r = ok(net.step_distance(&format!("S{a}"), &format!("S{b}")))?;
            check!(r.value == ExtNat::Finite(expected), "Ad(S{a}, S{b}) = {}, expected {expected}", r.value);
            check!(r.status == DistanceStatus::Exact, "Ad(S{a}, S{b}) is {}", r.status);
            *pattern.entry(expected).or_insert(0) += 1;
        }
        let bot = ok(net.step_distance(&format!("S{a}"), "S0"))?;
        check!(bot.value == ExtNat::Finite(1), "Ad(S{a}, bottom) = {}", bot.value);
        let far = ok(net.step_distance(&format!("S{a}"), "Elsewhere"))?;
        check!(far.value == ExtNat::Infinity, "cross-language Ad(S{a}, Elsewhere) = {}", far.value);
    }
    Ok(format!("pattern counts {pattern:?} over consistent pairs; Ad(T, bottom) = 1; cross-language ∞"))
}

// A3

/// Fewest moves from count `a` to count `b` when a move goes from `c` to
/// anything in `[ceil(c/2), 2c]`, by breadth-first search over counts.
fn count_bfs(a: u64, b: u64, limit: u64) -> Option<u64> {
    let mut dist = BTreeMap::from([(a, 0u64)]);
    let mut queue = VecDeque::from([a]);
    while let Some(c) = queue.pop_front() {
        if c == b {
            return Some(dist[&c]);
        }
        let here = dist[&c];
        for next in c.div_ceil(2)..=(2 * c).min(limit) {
            if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(next) {
                e.insert(here + 1);
                queue.push_back(next);
            }
        }
    }
    None
}

fn a3() -> Outcome {
    let start = Instant::now();
    let cat = Catalog::paper_examples();
    let class = ok(cat.network_class("ladder"))?;
    for n in 1..=4u64 {
        let target = format!("T{n}star");
        let t = ok(cat.theory(&target))?;
        let models = ok(enumerate_models(t, 1, &cat.policy))?.len() as u64;
        check!(models == 1 << n, "I(T{n}*, 1) = {models}, expected {}", 1u64 << n);
        let oracle = count_bfs(1, models, 64).ok_or("count search failed")?;
        let r = ok(class.conceptual_distance("T0star", &target))?;
        check!(r.value == ExtNat::Finite(oracle), "Cd(T0*, T{n}*) = {}, count search {oracle}", r.value);
        check!(oracle == n, "count search gives {oracle} for T{n}*");
        let lower = r.lower_bound.as_ref().map(LowerBound::value);
        check!(lower == Some(ExtNat::Finite(n)), "growth lower bound {lower:?} for T{n}*");
        let solved = ok(sentential_cd_solve(ok(cat.theory("T0star"))?, t))?;
        check!(solved.result.value == ExtNat::Finite(n), "chain solver gives {}", solved.result.value);
        check!(solved.certificates.iter().all(|c| c.status.is_verified()), "unverified chain certificate");
        let w = solved.result.witness.as_ref().ok_or("solver gave no witness")?;
        check!(w.len() == n, "materialized chain has {} steps", w.len());
    }
    let took = start.elapsed();
    check!(took < Duration::from_secs(10), "took {took:?}");
    Ok(format!("Cd(T0*, Tn*) = n for n = 1..4, chains and growth bounds agree, {took:?}"))
}

// A4

fn a4() -> Outcome {
    let cat = Catalog::paper_examples();
    let (a, b) = (ok(cat.theory("ThA"))?, ok(cat.theory("ThB"))?);
    let spectra = |t: &Theory| (1..=3).map(|k| spectrum(t, k, &cat.policy)).collect::<Result<Vec<_>, _>>();
    let (sa, sb) = (ok(spectra(a))?, ok(spectra(b))?);
    // a pure set has one model per size; each theory pins down its size
    check!(sa == vec![0, 1, 0] && sb == vec![0, 0, 1], "spectra {sa:?} and {sb:?}");
    let r = ok(cat.distance("sizes", "ThA", "ThB", false))?;
    check!(r.value == ExtNat::Infinity, "Cd(ThA, ThB) = {}", r.value);
    match r.lower_bound {
        Some(LowerBound::SpectrumObstruction { size: 2, counts: (1, 0) }) => {}
        other => return Err(format!("lower bound {other:?}")),
    }
    check!(r.status == DistanceStatus::Exact, "status {}", r.status);
    Ok("Cd(ThA, ThB) = ∞ with a spectrum obstruction at size 2".into())
}

// A5

fn a5() -> Outcome {
    let cat = Catalog::paper_examples();
    let report = verify_all(&cat, cat.policy.bound);
    let mut checked = 0;
    for e in &report.entries {
        let c = &e.certificate;
        if !matches!(c.kind, CertKind::ConceptAdd { .. }) {
            continue;
        }
        check!(c.status.is_verified(), "{} is {}", c.label(), c.status);
        let (t, t2) = (ok(cat.theory(&c.from))?, ok(cat.theory(&c.to))?);
        let old: BTreeSet<(&str, usize)> = t.lang().symbols().collect();
        let added: Vec<(&str, usize)> = t2.lang().symbols().filter(|s| !old.contains(s)).collect();
        check!(added.len() == 1, "{} adds {added:?}", c.label());
        let m = added[0].1 as u32;
        for k in 1..=3usize {
            let (i, i2) = (ok(spectrum(t, k, &cat.policy))?, ok(spectrum(t2, k, &cat.policy))?);
            let limit = (BigUint::from(1u32) << k.pow(m)) * BigUint::from(i);
            check!(BigUint::from(i2) <= limit, "{}: I = {i2} > {limit} at k = {k}", c.label());
        }
        checked += 1;
    }
    check!(checked >= 5, "only {checked} concept additions");
    Ok(format!("{checked} verified concept additions satisfy I(T′,k) ≤ 2^(k^m)·I(T,k) for k ≤ 3"))
}

// A6

/// Meanings (truth tables over four valuations) of all formulas in P, Q of
/// depth at most `depth`, built with ¬, ∧, ∨.
fn meanings(depth: usize) -> BTreeSet<u8> {
    let p: u8 = 0b1010;
    let q: u8 = 0b1100;
    let mut level: BTreeSet<u8> = BTreeSet::from([p, q]);
    for _ in 0..depth {
        let prev: Vec<u8> = level.iter().copied().collect();
        for &a in &prev {
            level.insert(!a & 0xF);
            for &b in &prev {
                level.insert(a & b);
                level.insert(a | b);
            }
        }
    }
    level
}

fn a6() -> Outcome {
    let pq = Arc::new(ok(Language::sentential("PQ", ["P", "Q"]))?);
    let rs = Arc::new(ok(Language::sentential("RS", ["R", "S"]))?);
    let universe = |lang: &Arc<Language>, prefix: &str| -> Result<Vec<Theory>, String> {
        (0u32..16)
            .map(|m| {
                let text = dnf_text(m)
                    .replace('P', lang.constants()[0])
                    .replace('Q', lang.constants()[1]);
                ok(Theory::parse(format!("{prefix}{m}"), lang.clone(), &[text.as_str()]))
            })
            .collect()
    };
    let (ts, us) = (universe(&pq, "S")?, universe(&rs, "U")?);
    let tables = meanings(4);
    let cz = |t: &Theory| ok(cz_sentential(t)).map(|c| c.value);
    for (m, t) in ts.iter().enumerate() {
        let classes: BTreeSet<u8> = tables.iter().map(|x| x & m as u8).collect();
        check!(cz(t)? == BigUint::from(classes.len()), "Cz(S{m}) = {}, enumeration {}", cz(t)?, classes.len());
    }
    let policy = Policy::default();
    let mut defeq = 0;
    for (a, t) in ts.iter().enumerate().skip(1) {
        for (b, u) in us.iter().enumerate().skip(1) {
            let expected = (a as u32).count_ones() == (b as u32).count_ones();
            let got = ok(sentential_defeq_witness(t, u))?;
            check!(got.is_some() == expected, "defeq of S{a} and U{b}: {}, expected {expected}", got.is_some());
            if let Some((f, g)) = got {
                let c = ok(check_defeq(&f, &g, t, u, 1, &policy))?;
                check!(c.holds && c.exactness == Exactness::Exact, "witness for S{a}, U{b} fails");
                check!(cz(t)? == cz(u)?, "Cz differs on defeq S{a}, U{b}");
                defeq += 1;
            }
        }
    }
    // faithful: the induced valuation map carries Sat(T2) onto Sat(T1)
    let mut faithful = 0;
    for f in 0u8..16 {
        for g in 0u8..16 {
            let image = |w: u8| (f >> w & 1) | (g >> w & 1) << 1;
            let tr = ok(Translation::new(
                pq.clone(),
                pq.clone(),
                BTreeMap::from([
                    ("P".to_string(), ts[f as usize].axioms()[0].clone()),
                    ("Q".to_string(), ts[g as usize].axioms()[0].clone()),
                ]),
            ))?;
            for (m1, t1) in ts.iter().enumerate() {
                for (m2, t2) in ts.iter().enumerate() {
                    let mapped = (0..4u8).filter(|w| m2 >> w & 1 == 1).fold(0usize, |acc, w| acc | 1 << image(w));
                    let expected = mapped == m1;
                    let got = ok(check_interpretation(&tr, t1, t2, 1, &policy))?.is_faithful();
                    check!(got == expected, "faithful S{m1} -> S{m2} under ({f}, {g}): {got}, expected {expected}");
                    if got {
                        check!(cz(t1)? <= cz(t2)?, "Cz shrinks along faithful S{m1} -> S{m2}");
                        faithful += 1;
                    }
                }
            }
        }
    }
    Ok(format!("Cz = 2^|Sat| on all 16 theories; {defeq} defeq pairs, {faithful} faithful pairs checked"))
}

// A7

fn a7() -> Outcome {
    let base = Arc::new(ok(Language::new("RS", [("R", 1usize), ("S", 1usize)], 5))?);
    let p = ok(make_pairing(("R", 1), ("S", 1), "B", &base))?;
    check!(p.l == 3, "B has rank {}", p.l);
    let image = |s: &str| p.tr_prime.image(s).cloned().ok_or(format!("no image for {s}"));
    let r_trip = Formula::iff(Formula::atom("R", vec![0]), image("R")?);
    let s_trip = Formula::iff(Formula::atom("S", vec![0]), image("S")?);
    let b_trip = Formula::iff(Formula::atom("B", vec![0, 1, 2]), ok(p.tr_prime.apply(&p.psi))?);
    // R(a) iff B(a,b,b) for some b; S(a) iff B(a,b,c) for some c ≠ b
    let direct = |x: &FiniteModel, sym: &str, tag_equal: bool| -> Result<bool, String> {
        let k = x.size();
        for a in 0..k {
            for b in 0..k {
                let mut found = false;
                for c in 0..k {
                    found |= (b == c) == tag_equal && ok(x.holds("B", &[a, b, c]))?;
                }
                if ok(x.holds(sym, &[a]))? != found {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    };
    let empty = Theory::empty("RS", base.clone());
    let policy = Policy::default();
    let mut count = 0;
    for k in 2..=3 {
        for m in ok(enumerate_models(&empty, k, &policy))?.iter() {
            let x = ok(p.extend(m))?;
            for (f, what) in [(&r_trip, "R"), (&s_trip, "S"), (&b_trip, "B")] {
                check!(ok(is_true(&x, f))?, "{what} round trip fails at size {k}");
            }
            check!(direct(&x, "R", true)? && direct(&x, "S", false)?, "direct decoding fails at size {k}");
            count += 1;
        }
    }
    let mut failures = 0;
    for m in ok(enumerate_models(&empty, 1, &policy))?.iter() {
        let x = ok(p.extend(m))?;
        let lib = ok(is_true(&x, &s_trip))?;
        check!(lib == direct(&x, "S", false)?, "evaluator and direct decoding disagree at size 1");
        check!(lib == !ok(x.holds("S", &[0]))?, "size-1 failure is not where S holds");
        failures += usize::from(!lib);
    }
    check!(failures > 0, "the S round trip never fails at size 1");
    Ok(format!("round trips hold on all {count} models of sizes 2, 3; S round trip fails on {failures} size-1 model(s)"))
}

// A8

fn a8() -> Outcome {
    let cat = Catalog::paper_examples();
    let r = ok(cat.distance("binrel", "TP", "TE", false))?;
    check!(r.value == ExtNat::Finite(2), "Ad(TP, TE) = {}", r.value);
    let w = r.witness.as_ref().ok_or("no witness")?;
    check!(w.nodes.iter().any(|n| n == "Bempty"), "witness {:?} avoids the empty theory", w.nodes);
    // relations on {0, 1}: bit 2a+b says (a, b) is in R
    let rel = |bits: u8, a: usize, b: usize| bits >> (2 * a + b) & 1 == 1;
    let refl = |x: u8| (0..2).all(|a| rel(x, a, a));
    let antisym = |x: u8| (0..2).all(|a| (0..2).all(|b| a == b || !(rel(x, a, b) && rel(x, b, a))));
    let sym = |x: u8| (0..2).all(|a| (0..2).all(|b| rel(x, a, b) == rel(x, b, a)));
    // every relation on two points is transitive once reflexive
    let po: Vec<u8> = (0..16).filter(|&x| refl(x) && antisym(x)).collect();
    let er: Vec<u8> = (0..16).filter(|&x| refl(x) && sym(x)).collect();
    check!(po.iter().any(|x| !er.contains(x)), "no two-point order that is not an equivalence");
    check!(er.iter().any(|x| !po.contains(x)), "no two-point equivalence that is not an order");
    let (tp, te) = (ok(cat.theory("TP"))?, ok(cat.theory("TE"))?);
    for (a, b) in [(tp, te), (te, tp)] {
        match ok(axiom_add_exists(a, b, cat.policy.bound, &cat.policy))? {
            AxiomAddExists::No { witness } => {
                let size = witness.to_json()["model"]["size"].as_u64();
                check!(size == Some(2), "{} ← {} refuted at size {size:?}", a.name(), b.name());
            }
            other => return Err(format!("{} ← {} not refuted: {}", a.name(), b.name(), other.to_json())),
        }
    }
    Ok(format!("Ad(TP, TE) = 2 via {}; size-2 countermodels refute both one-axiom directions", w.nodes.join(" ")))
}

// A9

fn a9() -> Outcome {
    let cat = Catalog::paper_examples();
    let asserted: Vec<String> = cat
        .certificates
        .iter()
        .filter(|c| c.status == thdist_core::relations::Status::Asserted)
        .map(|c| c.label())
        .collect();
    let r = ok(cat.distance("kinematics", "Kin0", "ClassicalKin", false))?;
    check!(r.value == ExtNat::Finite(1), "Cd(Kin0, ClassicalKin) = {}", r.value);
    check!(r.status == DistanceStatus::Conditional, "status {}", r.status);
    check!(r.to_json()["status"] == "conditional", "JSON status {}", r.to_json()["status"]);
    check!(!r.asserted.is_empty() && r.asserted.iter().all(|a| asserted.contains(a)), "asserted list {:?}", r.asserted);
    let w = r.witness.as_ref().ok_or("no witness")?;
    check!(w.edges.iter().any(|e| e.status == EdgeStatus::Asserted), "witness uses no asserted edge");
    Ok(format!("Cd(Kin0, ClassicalKin) = 1, conditional on {}", r.asserted.join(", ")))
}

// A10

fn a10() -> Outcome {
    let cat = Catalog::paper_examples();
    let count = |n: &str| -> Result<usize, String> { ok(SatSet::of(ok(cat.theory(n))?)).map(|s| s.len()) };
    check!(count("T4minus")? == count("T2star")?, "T4minus and T2* differ in model count");
    let fwd = ok(cat.distance("removal", "T2star", "T4star", true))?;
    let back = ok(cat.distance("removal", "T4star", "T2star", true))?;
    check!(fwd.value == ExtNat::Finite(2), "forward {}", fwd.value);
    check!(back.value == ExtNat::Finite(1), "backward {}", back.value);
    check!(fwd.status == DistanceStatus::Exact && back.status == DistanceStatus::Exact, "statuses {} / {}", fwd.status, back.status);
    Ok("forward 2, backward 1".into())
}

// A11

fn a11() -> Outcome {
    let cat = Catalog::paper_examples();
    let (po, spo) = (ok(cat.theory("PO"))?, ok(cat.theory("SPO"))?);
    let cert = cat
        .certificates
        .iter()
        .find(|c| c.from == "PO" && c.to == "SPO" && c.kind.tag() == "defeq")
        .ok_or("no defeq certificate")?;
    let CertKind::DefEq { tr12, tr21 } = &cert.kind else {
        return Err("wrong kind".into());
    };
    let c = ok(check_defeq(tr12, tr21, po, spo, 4, &cat.policy))?;
    check!(c.holds, "defeq refuted: {:?}", c.failure.map(|f| f.reason));
    check!(c.exactness == Exactness::Bounded(4), "exactness {}", c.exactness);
    let f = ok(check_interpretation(tr12, po, spo, 4, &cat.policy))?;
    let g = ok(check_interpretation(tr21, spo, po, 4, &cat.policy))?;
    check!(f.is_faithful() && g.is_faithful(), "faithful: {} / {}", f.is_faithful(), g.is_faithful());
    check!(f.exactness == Exactness::Bounded(4) && g.exactness == Exactness::Bounded(4), "interpretations claim exactness");

    // on every relation up to size 4: ≤ ↦ ≤ minus the diagonal is a bijection
    // from partial orders onto strict partial orders
    let mut orders = 0;
    for k in 1..=4usize {
        let n = k * k;
        let at = |x: u32, a: usize, b: usize| x >> (a * k + b) & 1 == 1;
        let trans = |x: u32| {
            (0..k).all(|a| (0..k).all(|b| (0..k).all(|c| !(at(x, a, b) && at(x, b, c)) || at(x, a, c))))
        };
        let is_po = |x: u32| {
            trans(x) && (0..k).all(|a| at(x, a, a)) && (0..k).all(|a| (0..k).all(|b| a == b || !(at(x, a, b) && at(x, b, a))))
        };
        let is_spo = |x: u32| trans(x) && (0..k).all(|a| !at(x, a, a));
        let diag: u32 = (0..k).fold(0, |d, a| d | 1 << (a * k + a));
        let (mut pos, mut spos) = (BTreeSet::new(), BTreeSet::new());
        for x in 0..1u32 << n {
            if is_po(x) {
                pos.insert(x);
            }
            if is_spo(x) {
                spos.insert(x);
            }
        }
        let strict: BTreeSet<u32> = pos.iter().map(|x| x & !diag).collect();
        check!(strict == spos, "size {k}: strict parts of orders are not the strict orders");
        check!(spos.iter().all(|x| pos.contains(&(x | diag))), "size {k}: reflexive closure leaves the orders");
        check!(ok(spectrum(po, k, &cat.policy))? == ok(spectrum(spo, k, &cat.policy))?, "spectra differ at size {k}");
        orders += pos.len();
    }
    Ok(format!("defeq and both faithful directions hold, bounded(4); {orders} labeled orders up to size 4 agree"))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 11] = [
        ("A1", a1),
        ("A2", a2),
        ("A3", a3),
        ("A4", a4),
        ("A5", a5),
        ("A6", a6),
        ("A7", a7),
        ("A8", a8),
        ("A9", a9),
        ("A10", a10),
        ("A11", a11),
    ];
    let mut failed = 0;
    for (id, f) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("{id} PASS {detail} ({ms} ms)"),
            Err(why) => {
                failed += 1;
                println!("{id} FAIL {why} ({ms} ms)");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
