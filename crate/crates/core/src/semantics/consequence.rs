use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use serde_json::{json, Value};

use super::canon::canonical_form;
use super::enumerate::{enumerate_models, Policy};
use super::eval::Evaluator;
use super::model::FiniteModel;
use super::sentential::{characteristic, SatSet};
use super::theory::Theory;
use crate::error::{Error, Result};
use crate::syntax::{make_psi_n, Formula};

/// Provenance of a semantic answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Exactness {
    Exact,
    /// Established on all models of size at most `K`.
    Bounded(usize),
}

impl Exactness {
    /// The weaker of two provenances.
    pub fn meet(self, other: Exactness) -> Exactness {
        match (self, other) {
            (Exactness::Exact, e) | (e, Exactness::Exact) => e,
            (Exactness::Bounded(a), Exactness::Bounded(b)) => Exactness::Bounded(a.min(b)),
        }
    }

    pub fn is_exact(self) -> bool {
        self == Exactness::Exact
    }
}

impl fmt::Display for Exactness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exactness::Exact => write!(f, "exact"),
            Exactness::Bounded(k) => write!(f, "bounded({k})"),
        }
    }
}

impl Serialize for Exactness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A concrete semantic witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// A sentential valuation, printed as a bit string over `constants`.
    Valuation { constants: Vec<String>, valuation: u64 },
    /// A finite model and an assignment (empty when the formula is a sentence).
    Model { model: FiniteModel, assignment: Vec<usize> },
}

impl Witness {
    pub fn valuation(sat: &SatSet, v: u64) -> Witness {
        Witness::Valuation {
            constants: sat.constants().to_vec(),
            valuation: v,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Witness::Valuation {
                constants,
                valuation,
            } => json!({
                "constants": constants,
                "valuation": super::sentential::valuation_string(*valuation, constants.len()),
            }),
            Witness::Model { model, assignment } => json!({
                "model": model.to_json(),
                "assignment": assignment,
            }),
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

impl Serialize for Witness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Consequence {
    Holds(Exactness),
    Refuted(Witness),
}

impl Consequence {
    pub fn holds(&self) -> bool {
        matches!(self, Consequence::Holds(_))
    }
}

/// Whether `T ⊨ φ`: exact for sentential theories, otherwise checked on
/// every model of size at most `bound`.
pub fn bounded_consequence(
    theory: &Theory,
    phi: &Formula,
    bound: usize,
    policy: &Policy,
) -> Result<Consequence> {
    phi.check(theory.lang())?;
    if theory.is_sentential() {
        let sat = SatSet::of(theory)?;
        let e = Evaluator::new(phi, theory.lang())?;
        return Ok(match sat.iter().find(|&v| !e.eval_valuation(v)) {
            Some(v) => Consequence::Refuted(Witness::valuation(&sat, v)),
            None => Consequence::Holds(Exactness::Exact),
        });
    }
    if theory.axioms().contains(phi) {
        return Ok(Consequence::Holds(Exactness::Exact));
    }
    let e = Evaluator::new(phi, theory.lang())?;
    for k in 1..=bound {
        for m in enumerate_models(theory, k, policy)?.iter() {
            if let Some(assignment) = e.falsifying_assignment(m) {
                return Ok(Consequence::Refuted(Witness::Model {
                    model: m.clone(),
                    assignment,
                }));
            }
        }
    }
    Ok(Consequence::Holds(Exactness::Bounded(bound)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    Exact,
    UpTo(usize),
    Distinguished {
        reason: String,
        witness: Option<Witness>,
    },
}

impl Equivalence {
    pub fn holds(&self) -> bool {
        !matches!(self, Equivalence::Distinguished { .. })
    }

    pub fn exactness(&self) -> Option<Exactness> {
        match self {
            Equivalence::Exact => Some(Exactness::Exact),
            Equivalence::UpTo(k) => Some(Exactness::Bounded(*k)),
            Equivalence::Distinguished { .. } => None,
        }
    }
}

/// `T1 ≡ T2`: same consequences. Theories over different signatures are
/// never equivalent.
pub fn logically_equivalent(t1: &Theory, t2: &Theory, bound: usize, policy: &Policy) -> Result<Equivalence> {
    if !t1.lang().same_signature(t2.lang()) {
        return Ok(Equivalence::Distinguished {
            reason: format!(
                "language mismatch: {} is over {}, {} is over {}",
                t1.name(),
                t1.lang(),
                t2.name(),
                t2.lang()
            ),
            witness: None,
        });
    }
    if t1.is_sentential() {
        let (s1, s2) = (SatSet::of(t1)?, SatSet::of(t2)?);
        if s1 == s2 {
            return Ok(Equivalence::Exact);
        }
        let v = s1
            .iter()
            .find(|&v| !s2.contains(v))
            .map(|v| (v, t1, t2))
            .or_else(|| s2.iter().find(|&v| !s1.contains(v)).map(|v| (v, t2, t1)))
            .expect("sets differ");
        return Ok(Equivalence::Distinguished {
            reason: format!("valuation satisfies {} but not {}", v.1.name(), v.2.name()),
            witness: Some(Witness::valuation(&s1, v.0)),
        });
    }
    let a1: BTreeSet<&Formula> = t1.axioms().iter().collect();
    let a2: BTreeSet<&Formula> = t2.axioms().iter().collect();
    if a1 == a2 {
        return Ok(Equivalence::Exact);
    }
    for (from, to) in [(t1, t2), (t2, t1)] {
        for ax in to.axioms() {
            if let Consequence::Refuted(w) = bounded_consequence(from, ax, bound, policy)? {
                return Ok(Equivalence::Distinguished {
                    reason: format!("{} does not prove the axiom {ax} of {}", from.name(), to.name()),
                    witness: Some(w),
                });
            }
        }
    }
    Ok(Equivalence::UpTo(bound))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Conservativity {
    Exact,
    UpTo(usize),
    Refuted {
        reason: String,
        /// A formula of the smaller language on which the theories disagree,
        /// when one could be named.
        formula: Option<Formula>,
        witness: Witness,
    },
}

impl Conservativity {
    pub fn holds(&self) -> bool {
        !matches!(self, Conservativity::Refuted { .. })
    }

    pub fn exactness(&self) -> Option<Exactness> {
        match self {
            Conservativity::Exact => Some(Exactness::Exact),
            Conservativity::UpTo(k) => Some(Exactness::Bounded(*k)),
            Conservativity::Refuted { .. } => None,
        }
    }
}

/// `T1 ⊑ T2`: `T2` is a conservative extension of `T1`.
///
/// Sentential: the projection of `Sat(T2)` onto the constants of `T1` is
/// `Sat(T1)`. First order: at every size up to `bound`, the reducts of the
/// models of `T2` are, up to isomorphism, exactly the models of `T1`.
pub fn conservative_extension(t1: &Theory, t2: &Theory, bound: usize, policy: &Policy) -> Result<Conservativity> {
    if !t2.lang().includes(t1.lang()) || t1.is_sentential() != t2.is_sentential() {
        return Err(Error::LanguageMismatch(format!(
            "{} is not included in {}",
            t1.lang(),
            t2.lang()
        )));
    }
    if t1.is_sentential() {
        let s1 = SatSet::of(t1)?;
        let proj = SatSet::of(t2)?.project(s1.constants())?;
        if proj == s1 {
            return Ok(Conservativity::Exact);
        }
        let (v, reason) = match proj.iter().find(|&v| !s1.contains(v)) {
            Some(v) => (v, format!("{} proves it, {} does not", t1.name(), t2.name())),
            None => (
                s1.iter().find(|&v| !proj.contains(v)).expect("sets differ"),
                format!("{} proves it, {} does not", t2.name(), t1.name()),
            ),
        };
        return Ok(Conservativity::Refuted {
            reason,
            formula: Some(Formula::not(characteristic(v, t1.lang())?)),
            witness: Witness::valuation(&s1, v),
        });
    }
    let axioms1 = t1
        .axioms()
        .iter()
        .map(|a| Ok((a, Evaluator::new(a, t1.lang())?)))
        .collect::<Result<Vec<_>>>()?;
    for k in 1..=bound {
        let mut reducts = BTreeSet::new();
        for m in enumerate_models(t2, k, policy)?.iter() {
            let r = m.reduct(t1.lang().clone())?;
            for (ax, e) in &axioms1 {
                if let Some(assignment) = e.falsifying_assignment(&r) {
                    return Ok(Conservativity::Refuted {
                        reason: format!("{} proves it, {} does not", t1.name(), t2.name()),
                        formula: Some((*ax).clone()),
                        witness: Witness::Model { model: r, assignment },
                    });
                }
            }
            reducts.insert(canonical_form(&r)?);
        }
        for m in enumerate_models(t1, k, policy)?.iter() {
            if !reducts.contains(&canonical_form(m)?) {
                let formula = if reducts.is_empty() {
                    make_psi_n(k, t1.lang()).ok().map(Formula::not)
                } else {
                    None
                };
                return Ok(Conservativity::Refuted {
                    reason: format!(
                        "a size-{k} model of {} has no expansion to a model of {}",
                        t1.name(),
                        t2.name()
                    ),
                    formula,
                    witness: Witness::Model {
                        model: m.clone(),
                        assignment: Vec::new(),
                    },
                });
            }
        }
    }
    Ok(Conservativity::UpTo(bound))
}
