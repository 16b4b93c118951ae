#![allow(dead_code)]

use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use thdist_core::{FiniteModel, Formula, Language, SatSet, Theory};

/// `P/1` and `R/2` with `vars` variables.
pub fn pr_language(vars: usize) -> Arc<Language> {
    Arc::new(Language::new("PR", [("P", 1usize), ("R", 2usize)], vars).unwrap())
}

pub fn sentential(name: &str, constants: &[&str]) -> Arc<Language> {
    Arc::new(Language::sentential(name, constants.iter().copied()).unwrap())
}

/// Formulas over `P/1`, `R/2` using variables below `vars`.
pub fn pr_formula(vars: usize) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        (0..vars, 0..vars).prop_map(|(i, j)| Formula::equals(i, j)),
        (0..vars).prop_map(|i| Formula::atom("P", vec![i])),
        (0..vars, 0..vars).prop_map(|(i, j)| Formula::atom("R", vec![i, j])),
    ];
    leaf.prop_recursive(4, 24, 2, move |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            inner.clone().prop_map(Formula::not),
            (0..vars, inner).prop_map(|(i, a)| Formula::exists(i, a)),
        ]
    })
}

/// Sentences over `P/1`, `R/2`: a random formula with its free variables
/// closed off by `∀` or `∃`.
pub fn pr_sentence(vars: usize) -> impl Strategy<Value = Formula> {
    (pr_formula(vars), any::<u8>()).prop_map(move |(f, quant)| close(f, vars, quant))
}

pub fn close(f: Formula, vars: usize, quant: u8) -> Formula {
    (0..vars).fold(f, |g, i| {
        if g.free_vars() >> i & 1 == 0 {
            g
        } else if quant >> i & 1 == 1 {
            Formula::forall(i, g)
        } else {
            Formula::exists(i, g)
        }
    })
}

/// Formulas over the given constants.
pub fn constant_formula(constants: &'static [&'static str]) -> impl Strategy<Value = Formula> {
    let leaf = (0..constants.len()).prop_map(move |i| Formula::atom(constants[i], Vec::new()));
    leaf.prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            inner.prop_map(Formula::not),
        ]
    })
}

/// All tuples in `{0..k}^r`, lexicographically.
pub fn tuples(k: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..k).map(move |a| {
                    let mut t = t.clone();
                    t.push(a);
                    t
                })
            })
            .collect();
    }
    out
}

/// The model whose facts are read off `bits` in symbol order, tuples in
/// lexicographic order.
pub fn model_from_bits(lang: &Arc<Language>, k: usize, bits: u64) -> FiniteModel {
    let mut m = FiniteModel::empty(lang.clone(), k).unwrap();
    let mut i = 0;
    for (s, r) in lang.symbols() {
        for t in tuples(k, r) {
            m.set(s, &t, bits >> i & 1 == 1).unwrap();
            i += 1;
        }
    }
    m
}

pub fn fact_count(lang: &Language, k: usize) -> usize {
    lang.symbols().map(|(_, r)| k.pow(r as u32)).sum()
}

pub fn random_model(lang: &Arc<Language>, k: usize, seed: u64) -> FiniteModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = FiniteModel::empty(lang.clone(), k).unwrap();
    for (s, r) in lang.symbols() {
        for t in tuples(k, r) {
            m.set(s, &t, rng.gen()).unwrap();
        }
    }
    m
}

/// The sentential theory whose satisfying valuations are the bits of `mask`.
pub fn theory_of_mask(name: &str, lang: &Arc<Language>, mask: u64) -> Theory {
    let constants = lang.constants().iter().map(|c| c.to_string()).collect();
    let sat = SatSet::new(constants, (0..64).filter(|v| mask >> v & 1 == 1));
    Theory::new(name, lang.clone(), vec![sat.dnf(lang).unwrap()]).unwrap()
}

pub fn mask_of(t: &Theory) -> u64 {
    SatSet::of(t).unwrap().iter().fold(0, |m, v| m | 1 << v)
}
