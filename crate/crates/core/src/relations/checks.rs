use num_bigint::BigUint;
use serde_json::{json, Value};

use super::certificate::{CertKind, EdgeCertificate, Refutation, Status};
use crate::concepts::{check_defeq, check_interpretation};
use crate::error::{Error, Result};
use crate::semantics::{
    bounded_consequence, conservative_extension, enumerate_models, logically_equivalent,
    require_sentential, Consequence, Conservativity, Equivalence, Evaluator, Exactness, Policy,
    SatSet, Theory, Witness,
};
use crate::syntax::Formula;

fn same_language(t: &Theory, u: &Theory) -> Result<()> {
    if t.lang().same_signature(u.lang()) {
        Ok(())
    } else {
        Err(Error::LanguageMismatch(format!(
            "{} is over {}, {} is over {}",
            t.name(),
            t.lang(),
            u.name(),
            u.lang()
        )))
    }
}

fn from_equivalence(eq: Equivalence) -> Status {
    match eq {
        Equivalence::Exact => Status::VerifiedExact,
        Equivalence::UpTo(k) => Status::VerifiedBounded(k),
        Equivalence::Distinguished { reason, witness } => Status::refuted(Refutation {
            reason,
            formula: None,
            witness,
        }),
    }
}

/// A sentential theory whose models are exactly `sat`, axiomatized by its
/// canonical DNF.
pub fn sentential_theory(name: impl Into<String>, t: &Theory, sat: &SatSet) -> Result<Theory> {
    Theory::new(name, t.lang().clone(), vec![sat.dnf(t.lang())?])
}

/// `T ← T′` by `φ`: `T ∪ {φ} ≡ T′`.
pub fn check_axiom_add(t: &Theory, t2: &Theory, phi: &Formula, bound: usize, policy: &Policy) -> Result<Status> {
    same_language(t, t2)?;
    phi.check(t.lang())?;
    let extended = t.with_axiom(format!("{}+", t.name()), phi.clone())?;
    Ok(from_equivalence(logically_equivalent(&extended, t2, bound, policy)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomAddExists {
    /// `T ∪ {axiom} ≡ T′`.
    Yes { axiom: Formula },
    /// A model of `T′` that is not a model of `T`.
    No { witness: Witness },
    /// Every model of `T′` up to size `bound` is a model of `T`.
    UnknownBounded { candidate: Formula, bound: usize },
}

impl AxiomAddExists {
    pub fn is_yes(&self) -> bool {
        matches!(self, AxiomAddExists::Yes { .. })
    }

    pub fn to_json(&self) -> Value {
        match self {
            AxiomAddExists::Yes { axiom } => json!({"yes": axiom.to_string()}),
            AxiomAddExists::No { witness } => json!({"no": witness.to_json()}),
            AxiomAddExists::UnknownBounded { candidate, bound } => {
                json!({"unknown-bounded": {"candidate": candidate.to_string(), "bound": bound}})
            }
        }
    }
}

/// Whether one axiom turns `T` into `T′`. This is the case exactly when every
/// model of `T′` is a model of `T`; the axiom is then the canonical DNF of
/// `Sat(T′)`, or the conjunction of the axioms of `T′`.
pub fn axiom_add_exists(t: &Theory, t2: &Theory, bound: usize, policy: &Policy) -> Result<AxiomAddExists> {
    same_language(t, t2)?;
    if t.is_sentential() {
        let (s, s2) = (SatSet::of(t)?, SatSet::of(t2)?);
        return Ok(match s2.iter().find(|&v| !s.contains(v)) {
            Some(v) => AxiomAddExists::No {
                witness: Witness::valuation(&s2, v),
            },
            None => AxiomAddExists::Yes {
                axiom: s2.dnf(t.lang())?,
            },
        });
    }
    let candidate = t2.conjunction()?;
    let mut exactness = Exactness::Exact;
    for ax in t.axioms() {
        match bounded_consequence(t2, ax, bound, policy)? {
            Consequence::Refuted(witness) => return Ok(AxiomAddExists::No { witness }),
            Consequence::Holds(e) => exactness = exactness.meet(e),
        }
    }
    Ok(match exactness {
        Exactness::Exact => AxiomAddExists::Yes { axiom: candidate },
        Exactness::Bounded(bound) => AxiomAddExists::UnknownBounded { candidate, bound },
    })
}

fn one_symbol_extension(t: &Theory, t2: &Theory) -> Result<(String, usize)> {
    let (small, big) = (t.lang(), t2.lang());
    let extra = big.extra_symbols(small);
    if !big.includes(small) || extra.len() != 1 || big.var_bound() != small.var_bound() {
        return Err(Error::LanguageMismatch(format!(
            "{} is not {} plus exactly one symbol",
            big, small
        )));
    }
    Ok((extra[0].0.to_string(), extra[0].1))
}

/// `T ⤳ T′`: the language of `T′` adds one symbol, and `T′` is a
/// conservative extension of `T`.
pub fn check_concept_add(t: &Theory, t2: &Theory, bound: usize, policy: &Policy) -> Result<Status> {
    one_symbol_extension(t, t2)?;
    Ok(match conservative_extension(t, t2, bound, policy)? {
        Conservativity::Exact => Status::VerifiedExact,
        Conservativity::UpTo(k) => Status::VerifiedBounded(k),
        Conservativity::Refuted {
            reason,
            formula,
            witness,
        } => Status::refuted(Refutation {
            reason: format!("not conservative: {reason}"),
            formula,
            witness: Some(witness),
        }),
    })
}

/// `T ∼ T′`: `T ⤳ T′` or `T′ ⤳ T`. `None` when neither language is the
/// other plus one symbol.
pub fn check_concept_step(t: &Theory, t2: &Theory, bound: usize, policy: &Policy) -> Result<Option<Status>> {
    if one_symbol_extension(t, t2).is_ok() {
        return check_concept_add(t, t2, bound, policy).map(Some);
    }
    if one_symbol_extension(t2, t).is_ok() {
        return check_concept_add(t2, t, bound, policy).map(Some);
    }
    Ok(None)
}

fn consistent_sat(t: &Theory) -> Result<SatSet> {
    require_sentential(t.lang())?;
    let sat = SatSet::of(t)?;
    if sat.is_empty() {
        return Err(Error::Precondition(format!("{} is inconsistent", t.name())));
    }
    Ok(sat)
}

fn falsifiers(t: &Theory, phi: &Formula) -> Result<Vec<u64>> {
    let e = Evaluator::new(phi, t.lang())?;
    Ok((0..1u64 << t.lang().symbol_count())
        .filter(|&v| !e.eval_valuation(v))
        .collect())
}

/// The `Sat` sets of the concept removals of `φ` from a consistent
/// sentential theory, paired with the valuation added to reach a maximal
/// subtheory (`None` when `T ⊭ φ` and `Cn(T)` itself is that subtheory).
pub fn concept_removal_sets(t: &Theory, phi: &Formula) -> Result<Vec<(Option<u64>, SatSet)>> {
    let sat = consistent_sat(t)?;
    let not_phi = SatSet::of_formula(&Formula::not(phi.clone()), t.lang())?;
    let outside = sat.intersection(&not_phi);
    if !outside.is_empty() {
        return Ok(vec![(None, outside)]);
    }
    let ms = falsifiers(t, phi)?;
    if ms.is_empty() {
        return Err(Error::Precondition(format!("{phi} has no falsifying valuation")));
    }
    Ok(ms
        .into_iter()
        .map(|m| (Some(m), sat.union(&SatSet::new(sat.constants().to_vec(), [m])).intersection(&not_phi)))
        .collect())
}

/// `T ⋗ T⁻`: `T⁻ = T_m ∪ {¬φ}` for a maximal subtheory `T_m` of `Cn(T)`
/// not proving `φ`, ordered by inclusion of consequence sets.
pub fn concept_removals(t: &Theory, phi: &Formula) -> Result<Vec<Theory>> {
    concept_removal_sets(t, phi)?
        .into_iter()
        .map(|(m, s)| {
            let name = match m {
                Some(m) => format!("{}-rm{}", t.name(), s.valuation_string(m)),
                None => format!("{}-rm", t.name()),
            };
            sentential_theory(name, t, &s)
        })
        .collect()
}

/// The `Sat` sets of the maximal subtheories of `Cn(T)` that do not prove
/// `φ`, each with the valuation it adds.
pub fn theorem_removal_sets(t: &Theory, phi: &Formula) -> Result<Vec<(u64, SatSet)>> {
    let sat = consistent_sat(t)?;
    if !sat.is_subset(&SatSet::of_formula(phi, t.lang())?) {
        return Err(Error::Precondition(format!("{} does not prove {phi}", t.name())));
    }
    let ms = falsifiers(t, phi)?;
    if ms.is_empty() {
        return Err(Error::Precondition(format!("{phi} has no falsifying valuation")));
    }
    Ok(ms
        .into_iter()
        .map(|m| (m, sat.union(&SatSet::new(sat.constants().to_vec(), [m]))))
        .collect())
}

pub fn theorem_removals(t: &Theory, phi: &Formula) -> Result<Vec<Theory>> {
    theorem_removal_sets(t, phi)?
        .into_iter()
        .map(|(m, s)| sentential_theory(format!("{}-drop{}", t.name(), s.valuation_string(m)), t, &s))
        .collect()
}

fn check_removal(
    t2: &Theory,
    candidates: Vec<(Option<u64>, SatSet)>,
    extra: Option<u64>,
) -> Result<Status> {
    let target = SatSet::of(t2)?;
    let chosen: Vec<&(Option<u64>, SatSet)> = candidates
        .iter()
        .filter(|(m, _)| extra.is_none() || *m == extra)
        .collect();
    if chosen.iter().any(|(_, s)| *s == target) {
        return Ok(Status::VerifiedExact);
    }
    let mut r = Refutation::new(format!("{} is not among the {} candidate removals", t2.name(), chosen.len()));
    if let Some((_, s)) = chosen.first() {
        let diff = s
            .iter()
            .find(|&v| !target.contains(v))
            .or_else(|| target.iter().find(|&v| !s.contains(v)));
        if let Some(v) = diff {
            r = r.with_witness(Witness::valuation(&target, v));
        }
    }
    Ok(Status::refuted(r))
}

/// Checks `T ⋗ T⁻` for sentential theories. First-order removals are only
/// ever asserted.
pub fn check_concept_remove(t: &Theory, t2: &Theory, phi: &Formula, extra: Option<u64>) -> Result<Status> {
    same_language(t, t2)?;
    check_removal(t2, concept_removal_sets(t, phi)?, extra)
}

pub fn check_theorem_remove(t: &Theory, t2: &Theory, phi: &Formula, extra: Option<u64>) -> Result<Status> {
    same_language(t, t2)?;
    let sets = theorem_removal_sets(t, phi)?
        .into_iter()
        .map(|(m, s)| (Some(m), s))
        .collect();
    check_removal(t2, sets, extra)
}

/// `T ∪ {φ ↔ ψ}`: identifying two concepts is adding one axiom.
pub fn collapse_concepts(t: &Theory, phi: &Formula, psi: &Formula) -> Result<Theory> {
    t.with_axiom(format!("{}/collapsed", t.name()), Formula::iff(phi.clone(), psi.clone()))
}

/// One size of a spectrum growth comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthCheck {
    pub size: usize,
    /// `I(T′, k)`.
    pub extended: usize,
    /// `2^(k^m) · I(T, k)`.
    pub limit: BigUint,
}

impl GrowthCheck {
    pub fn holds(&self) -> bool {
        BigUint::from(self.extended) <= self.limit
    }
}

/// For `T ⤳ T′` adding a symbol of rank `m`: `I(T′,k) ≤ 2^(k^m)·I(T,k)` for
/// `k = 1..=max_size`.
pub fn growth_checks(t: &Theory, t2: &Theory, max_size: usize, policy: &Policy) -> Result<Vec<GrowthCheck>> {
    let (_, m) = one_symbol_extension(t, t2)?;
    (1..=max_size)
        .map(|k| {
            let base = enumerate_models(t, k, policy)?.len();
            let extended = enumerate_models(t2, k, policy)?.len();
            let exp = k.checked_pow(m as u32).ok_or_else(|| Error::CapExceeded("growth exponent".into()))?;
            Ok(GrowthCheck {
                size: k,
                extended,
                limit: (BigUint::from(1u32) << exp) * BigUint::from(base),
            })
        })
        .collect()
}

/// Verifies a certificate against its resolved endpoints. Asserted
/// certificates stay asserted; first-order removals cannot be verified
/// and are an error unless asserted.
pub fn verify_certificate(
    cert: &EdgeCertificate,
    from: &Theory,
    to: &Theory,
    bound: usize,
    policy: &Policy,
) -> Result<Status> {
    if cert.status == Status::Asserted {
        return Ok(Status::Asserted);
    }
    match &cert.kind {
        CertKind::Equiv => Ok(from_equivalence(logically_equivalent(from, to, bound, policy)?)),
        CertKind::DefEq { tr12, tr21 } => {
            let c = check_defeq(tr12, tr21, from, to, bound, policy)?;
            Ok(if c.holds {
                Status::verified(c.exactness)
            } else {
                let f = c.failure.expect("failed checks carry a failure");
                Status::refuted(Refutation {
                    reason: f.reason,
                    formula: Some(f.formula),
                    witness: Some(f.witness),
                })
            })
        }
        CertKind::AxiomAdd { axiom } => check_axiom_add(from, to, axiom, bound, policy),
        CertKind::ConceptAdd { symbol } => {
            let (extra, _) = one_symbol_extension(from, to)?;
            if let Some(s) = symbol.as_ref().filter(|s| **s != extra) {
                return Ok(Status::refuted(Refutation::new(format!(
                    "the added symbol is `{extra}`, not `{s}`"
                ))));
            }
            check_concept_add(from, to, bound, policy)
        }
        CertKind::ConceptRemove { formula, extra } | CertKind::TheoremRemove { formula, extra }
            if !from.is_sentential() =>
        {
            let _ = (formula, extra);
            Err(Error::Precondition(format!(
                "{}: first-order removals can only be asserted",
                cert.label()
            )))
        }
        CertKind::ConceptRemove { formula, extra } => check_concept_remove(from, to, formula, *extra),
        CertKind::TheoremRemove { formula, extra } => check_theorem_remove(from, to, formula, *extra),
        CertKind::Collapse { phi, psi } => {
            check_axiom_add(from, to, &Formula::iff(phi.clone(), psi.clone()), bound, policy)
        }
        CertKind::FaithfulInterp { tr } => {
            let c = check_interpretation(tr, from, to, bound, policy)?;
            Ok(if c.is_faithful() {
                Status::verified(c.exactness)
            } else {
                let f = c.failure.expect("unfaithful checks carry a failure");
                Status::refuted(Refutation {
                    reason: f.reason,
                    formula: Some(f.formula),
                    witness: Some(f.witness),
                })
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::syntax::{parse_formula, Language};

    fn pq() -> Arc<Language> {
        Arc::new(Language::sentential("S", ["P", "Q"]).unwrap())
    }

    fn th(name: &str, axioms: &[&str]) -> Theory {
        Theory::parse(name, pq(), axioms).unwrap()
    }

    fn f(s: &str) -> Formula {
        parse_formula(s, &pq()).unwrap()
    }

    fn sat(t: &Theory) -> Vec<String> {
        SatSet::of(t).unwrap().strings()
    }

    #[test]
    fn axiom_add_examples() {
        let p = Policy::default();
        let empty = th("E", &[]);
        assert_eq!(check_axiom_add(&empty, &th("T", &["P"]), &f("P"), 1, &p).unwrap(), Status::VerifiedExact);
        let bot = th("B", &["P", "(not P)"]);
        assert!(check_axiom_add(&th("T", &["P"]), &bot, &f("(and Q (not Q))"), 1, &p)
            .unwrap()
            .is_verified());
        assert!(check_axiom_add(&th("T", &["P"]), &th("U", &["Q"]), &f("Q"), 1, &p)
            .unwrap()
            .is_refuted());
    }

    #[test]
    fn axiom_add_exists_sentential() {
        let p = Policy::default();
        assert!(!axiom_add_exists(&th("T", &["P"]), &th("U", &["(or P Q)"]), 1, &p).unwrap().is_yes());
        let yes = axiom_add_exists(&th("T", &["(or P Q)"]), &th("U", &["P"]), 1, &p).unwrap();
        let AxiomAddExists::Yes { axiom } = yes else { panic!() };
        let t = th("T", &["(or P Q)"]);
        assert!(check_axiom_add(&t, &th("U", &["P"]), &axiom, 1, &p).unwrap().is_verified());
    }

    #[test]
    fn concept_removal_examples() {
        let t = th("T", &["P", "Q"]);
        let rs = concept_removals(&t, &f("P")).unwrap();
        let sets: Vec<Vec<String>> = rs.iter().map(sat).collect();
        assert_eq!(sets, vec![vec!["00".to_string()], vec!["01".to_string()]]);
        let full = th("E", &[]);
        assert!(concept_removals(&full, &f("(or P (not P))")).is_err());
        // T ⊭ φ: the single removal is T ∪ {¬φ}
        let rs = concept_removals(&full, &f("P")).unwrap();
        assert_eq!(rs.len(), 1);
        assert_eq!(sat(&rs[0]), vec!["00", "01"]);
    }

    #[test]
    fn theorem_removal_examples() {
        let t = th("T", &["P", "Q"]);
        let rs = theorem_removals(&t, &f("P")).unwrap();
        let sets: Vec<Vec<String>> = rs.iter().map(sat).collect();
        assert_eq!(sets, vec![vec!["00", "11"], vec!["01", "11"]]);
        assert!(theorem_removals(&t, &f("(not P)")).is_err());
        for r in &rs {
            let back = r.with_axiom("B", f("P")).unwrap();
            assert_eq!(SatSet::of(&back).unwrap(), SatSet::of(&t).unwrap());
        }
    }

    #[test]
    fn collapse_with_theorem_is_adding() {
        let t = th("T", &["Q"]);
        let c = collapse_concepts(&t, &f("P"), &f("Q")).unwrap();
        let added = t.with_axiom("A", f("P")).unwrap();
        assert!(logically_equivalent(&c, &added, 1, &Policy::default()).unwrap().holds());
        let same = collapse_concepts(&t, &f("P"), &f("P")).unwrap();
        assert!(logically_equivalent(&same, &t, 1, &Policy::default()).unwrap().holds());
    }

    #[test]
    fn concept_add_examples() {
        let l1 = Arc::new(Language::sentential("A", ["P"]).unwrap());
        let p = Policy::default();
        let t = Theory::empty("T", l1.clone());
        assert_eq!(check_concept_add(&t, &Theory::empty("U", pq()), 1, &p).unwrap(), Status::VerifiedExact);
        assert!(check_concept_add(&t, &th("U", &["(not P)", "Q"]), 1, &p).unwrap().is_refuted());
        assert!(check_concept_add(&t, &t, 1, &p).is_err());
        let g = growth_checks(&t, &Theory::empty("U", pq()), 3, &p).unwrap();
        assert!(g.iter().all(GrowthCheck::holds));
    }
}
