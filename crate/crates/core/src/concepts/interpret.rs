//! Interpretations, faithfulness and definitional equivalence.
//!
//! Between sentential theories everything is decided exactly through the
//! map a translation induces on valuations: a valuation `w` of the target
//! language is sent to the source valuation whose `i`-th bit is the value
//! of `tr(P_i)` at `w`. Between first-order theories the checks run a
//! battery of formulas over all models up to a size bound.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::semantics::{
    characteristic, enumerate_models, require_sentential, Evaluator, Exactness, FiniteModel, Policy,
    SatSet, Theory, Witness,
};
use crate::syntax::{make_psi_n, Formula, Language, Translation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterpVerdict {
    /// Theorems are preserved and reflected.
    Faithful,
    /// Theorems are preserved but not reflected.
    Interpretation,
    /// Some theorem of the source is not mapped to a theorem.
    Refuted,
}

#[derive(Debug, Clone)]
pub struct Failure {
    pub reason: String,
    pub formula: Formula,
    pub witness: Witness,
}

impl Failure {
    pub fn to_json(&self) -> Value {
        json!({
            "reason": self.reason,
            "formula": self.formula.to_string(),
            "witness": self.witness.to_json(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct InterpretationCheck {
    pub verdict: InterpVerdict,
    pub exactness: Exactness,
    /// Why the verdict is not `Faithful`.
    pub failure: Option<Failure>,
    pub battery_size: usize,
    /// Battery formulas whose translation exceeded the variable budget.
    pub skipped: usize,
}

impl InterpretationCheck {
    pub fn is_interpretation(&self) -> bool {
        self.verdict != InterpVerdict::Refuted
    }

    pub fn is_faithful(&self) -> bool {
        self.verdict == InterpVerdict::Faithful
    }

    pub fn to_json(&self) -> Value {
        json!({
            "verdict": match self.verdict {
                InterpVerdict::Faithful => "faithful",
                InterpVerdict::Interpretation => "interpretation",
                InterpVerdict::Refuted => "refuted",
            },
            "exactness": self.exactness,
            "failure": self.failure.as_ref().map(Failure::to_json),
            "battery_size": self.battery_size,
            "skipped": self.skipped,
        })
    }
}

fn check_endpoints(tr: &Translation, t1: &Theory, t2: &Theory) -> Result<()> {
    if !tr.source().same_signature(t1.lang()) || !tr.target().same_signature(t2.lang()) {
        return Err(Error::LanguageMismatch(format!(
            "translation {} -> {} does not connect {} and {}",
            tr.source().name(),
            tr.target().name(),
            t1.name(),
            t2.name()
        )));
    }
    Ok(())
}

/// The valuation map `w ↦ (value of tr(P_i) at w)_i`, on every target valuation.
fn induced_map(tr: &Translation) -> Result<Vec<u64>> {
    require_sentential(tr.source())?;
    require_sentential(tr.target())?;
    let evals = tr
        .source()
        .constants()
        .into_iter()
        .map(|c| Evaluator::new(tr.image(c).expect("total"), tr.target()))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..1u64 << tr.target().symbol_count())
        .map(|w| {
            evals
                .iter()
                .enumerate()
                .fold(0u64, |acc, (i, e)| acc | (e.eval_valuation(w) as u64) << i)
        })
        .collect())
}

fn both_sentential(t1: &Theory, t2: &Theory) -> bool {
    t1.is_sentential() && t2.is_sentential()
}

/// Checks `tr` as an interpretation of `t1` in `t2`, and whether it is faithful:
/// `T1 ⊨ φ ⟹ T2 ⊨ tr(φ)`, and conversely for faithfulness.
pub fn check_interpretation(
    tr: &Translation,
    t1: &Theory,
    t2: &Theory,
    bound: usize,
    policy: &Policy,
) -> Result<InterpretationCheck> {
    check_endpoints(tr, t1, t2)?;
    if both_sentential(t1, t2) {
        return sentential_interpretation(tr, t1, t2);
    }
    bounded_interpretation(tr, t1, t2, bound, policy)
}

fn sentential_interpretation(tr: &Translation, t1: &Theory, t2: &Theory) -> Result<InterpretationCheck> {
    let f = induced_map(tr)?;
    let (s1, s2) = (SatSet::of(t1)?, SatSet::of(t2)?);
    let image: BTreeSet<u64> = s2.iter().map(|w| f[w as usize]).collect();
    let done = |verdict, failure| InterpretationCheck {
        verdict,
        exactness: Exactness::Exact,
        failure,
        battery_size: 0,
        skipped: 0,
    };
    // T1 ⊨ ¬χ_v for every v ∉ Sat1, so an image point outside Sat1 breaks preservation.
    if let Some(w) = s2.iter().find(|&w| !s1.contains(f[w as usize])) {
        let v = f[w as usize];
        return Ok(done(
            InterpVerdict::Refuted,
            Some(Failure {
                reason: format!("{} proves the formula, {} does not prove its translation", t1.name(), t2.name()),
                formula: Formula::not(characteristic(v, t1.lang())?),
                witness: Witness::valuation(&s2, w),
            }),
        ));
    }
    if let Some(v) = s1.iter().find(|v| !image.contains(v)) {
        return Ok(done(
            InterpVerdict::Interpretation,
            Some(Failure {
                reason: format!("{} proves the translation, {} does not prove the formula", t2.name(), t1.name()),
                formula: Formula::not(characteristic(v, t1.lang())?),
                witness: Witness::valuation(&s1, v),
            }),
        ));
    }
    Ok(done(InterpVerdict::Faithful, None))
}

/// Axioms, their subformulas, every atom over the available variables, and
/// `Ψ(1) … Ψ(K)` when the variables allow.
pub fn battery(theory: &Theory, bound: usize) -> Vec<Formula> {
    let lang = theory.lang();
    let mut out = BTreeSet::new();
    for a in theory.axioms() {
        out.extend(a.subformulas());
    }
    let n = lang.var_bound();
    for (s, r) in lang.symbols() {
        let count = if r == 0 { 1 } else { n.pow(r as u32) };
        for code in 0..count {
            let mut args = vec![0; r];
            let mut c = code;
            for slot in args.iter_mut().rev() {
                *slot = c % n;
                c /= n;
            }
            out.insert(Formula::atom(s, args));
        }
    }
    for k in 1..=bound {
        if let Ok(psi) = make_psi_n(k, lang) {
            out.insert(psi);
        }
    }
    out.into_iter().collect()
}

struct ModelSet {
    lang: Arc<Language>,
    models: Vec<FiniteModel>,
}

impl ModelSet {
    fn of(theory: &Theory, bound: usize, policy: &Policy) -> Result<ModelSet> {
        let mut models = Vec::new();
        for k in 1..=bound {
            models.extend(enumerate_models(theory, k, policy)?.iter().cloned());
        }
        Ok(ModelSet {
            lang: theory.lang().clone(),
            models,
        })
    }

    /// A model and assignment where `phi` fails, if any.
    fn counterexample(&self, phi: &Formula) -> Result<Option<Witness>> {
        let e = Evaluator::new(phi, &self.lang)?;
        Ok(self.models.iter().find_map(|m| {
            e.falsifying_assignment(m).map(|assignment| Witness::Model {
                model: m.clone(),
                assignment,
            })
        }))
    }
}

fn translate_or_skip(tr: &Translation, phi: &Formula, skipped: &mut usize) -> Result<Option<Formula>> {
    match tr.apply(phi) {
        Ok(f) => Ok(Some(f)),
        Err(Error::VariableBudget { .. }) => {
            *skipped += 1;
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn bounded_interpretation(
    tr: &Translation,
    t1: &Theory,
    t2: &Theory,
    bound: usize,
    policy: &Policy,
) -> Result<InterpretationCheck> {
    let m1 = ModelSet::of(t1, bound, policy)?;
    let m2 = ModelSet::of(t2, bound, policy)?;
    let items = battery(t1, bound);
    let mut skipped = 0;
    let mut not_reflected = None;
    for phi in &items {
        let Some(image) = translate_or_skip(tr, phi, &mut skipped)? else {
            continue;
        };
        let source_fails = m1.counterexample(phi)?;
        let target_fails = m2.counterexample(&image)?;
        match (source_fails, target_fails) {
            (None, Some(w)) => {
                return Ok(InterpretationCheck {
                    verdict: InterpVerdict::Refuted,
                    exactness: Exactness::Bounded(bound),
                    failure: Some(Failure {
                        reason: format!(
                            "{} proves the formula up to size {bound}, {} does not prove its translation",
                            t1.name(),
                            t2.name()
                        ),
                        formula: phi.clone(),
                        witness: w,
                    }),
                    battery_size: items.len(),
                    skipped,
                });
            }
            (Some(w), None) if not_reflected.is_none() => {
                not_reflected = Some(Failure {
                    reason: format!(
                        "{} proves the translation up to size {bound}, {} does not prove the formula",
                        t2.name(),
                        t1.name()
                    ),
                    formula: phi.clone(),
                    witness: w,
                });
            }
            _ => {}
        }
    }
    Ok(InterpretationCheck {
        verdict: if not_reflected.is_some() {
            InterpVerdict::Interpretation
        } else {
            InterpVerdict::Faithful
        },
        exactness: Exactness::Bounded(bound),
        failure: not_reflected,
        battery_size: items.len(),
        skipped,
    })
}

#[derive(Debug, Clone)]
pub struct DefEqCheck {
    pub holds: bool,
    pub exactness: Exactness,
    pub failure: Option<Failure>,
    pub forward: InterpretationCheck,
    pub backward: InterpretationCheck,
    pub skipped: usize,
}

impl DefEqCheck {
    pub fn to_json(&self) -> Value {
        json!({
            "holds": self.holds,
            "exactness": self.exactness,
            "failure": self.failure.as_ref().map(Failure::to_json),
            "forward": self.forward.to_json(),
            "backward": self.backward.to_json(),
            "skipped": self.skipped,
        })
    }
}

/// Definitional equivalence witnessed by `tr12: L1 → L2` and `tr21: L2 → L1`:
/// both are interpretations and both round trips are provable biconditionals.
pub fn check_defeq(
    tr12: &Translation,
    tr21: &Translation,
    t1: &Theory,
    t2: &Theory,
    bound: usize,
    policy: &Policy,
) -> Result<DefEqCheck> {
    let forward = check_interpretation(tr12, t1, t2, bound, policy)?;
    let backward = check_interpretation(tr21, t2, t1, bound, policy)?;
    let exactness = forward.exactness.meet(backward.exactness);
    let mut result = DefEqCheck {
        holds: false,
        exactness,
        failure: None,
        skipped: forward.skipped + backward.skipped,
        forward,
        backward,
    };
    let refuted = [(&result.forward, t1.name()), (&result.backward, t2.name())]
        .into_iter()
        .find(|(check, _)| !check.is_interpretation())
        .map(|(check, name)| {
            let mut f = check.failure.clone().expect("refuted checks carry a failure");
            f.reason = format!("translation from {name} is not an interpretation: {}", f.reason);
            f
        });
    if refuted.is_some() {
        result.failure = refuted;
        return Ok(result);
    }
    let failure = if both_sentential(t1, t2) {
        sentential_round_trips(tr12, tr21, t1, t2)?
    } else {
        bounded_round_trips(tr12, tr21, t1, t2, bound, policy, &mut result.skipped)?
    };
    result.holds = failure.is_none();
    result.failure = failure;
    Ok(result)
}

fn sentential_round_trips(
    tr12: &Translation,
    tr21: &Translation,
    t1: &Theory,
    t2: &Theory,
) -> Result<Option<Failure>> {
    let g12 = induced_map(tr12)?; // valuations of L2 -> L1
    let g21 = induced_map(tr21)?; // valuations of L1 -> L2
    for (sat, there, back, theory) in [
        (SatSet::of(t1)?, &g21, &g12, t1),
        (SatSet::of(t2)?, &g12, &g21, t2),
    ] {
        for v in sat.iter() {
            let round = back[there[v as usize] as usize];
            if round != v {
                let i = (round ^ v).trailing_zeros() as usize;
                let c = theory.lang().constants()[i];
                let p = Formula::atom(c, Vec::new());
                let (a, b) = if std::ptr::eq(theory, t1) { (tr12, tr21) } else { (tr21, tr12) };
                return Ok(Some(Failure {
                    reason: format!("round trip of `{c}` is not equivalent to it in {}", theory.name()),
                    formula: Formula::iff(b.apply(&a.apply(&p)?)?, p),
                    witness: Witness::valuation(&sat, v),
                }));
            }
        }
    }
    Ok(None)
}

fn bounded_round_trips(
    tr12: &Translation,
    tr21: &Translation,
    t1: &Theory,
    t2: &Theory,
    bound: usize,
    policy: &Policy,
    skipped: &mut usize,
) -> Result<Option<Failure>> {
    for (theory, a, b) in [(t1, tr12, tr21), (t2, tr21, tr12)] {
        let models = ModelSet::of(theory, bound, policy)?;
        for phi in battery(theory, bound) {
            let Some(there) = translate_or_skip(a, &phi, skipped)? else {
                continue;
            };
            let Some(back) = translate_or_skip(b, &there, skipped)? else {
                continue;
            };
            let round = Formula::iff(back, phi.clone());
            if let Some(w) = models.counterexample(&round)? {
                return Ok(Some(Failure {
                    reason: format!("round trip of {phi} is not equivalent to it in {}", theory.name()),
                    formula: round,
                    witness: w,
                }));
            }
        }
    }
    Ok(None)
}

/// A verified definitional equivalence between consistent sentential
/// theories with equally many satisfying valuations, built from the
/// order-preserving bijection of the sorted `Sat` sets. `None` when the
/// counts differ.
pub fn sentential_defeq_witness(
    t1: &Theory,
    t2: &Theory,
) -> Result<Option<(Translation, Translation)>> {
    require_sentential(t1.lang())?;
    require_sentential(t2.lang())?;
    let (s1, s2) = (SatSet::of(t1)?, SatSet::of(t2)?);
    if s1.is_empty() || s2.is_empty() {
        return Err(Error::Precondition("defeq witnesses need consistent theories".into()));
    }
    if s1.len() != s2.len() {
        return Ok(None);
    }
    let (l1, l2) = (t1.lang().clone(), t2.lang().clone());
    let pair = if l1.same_signature(&l2) && s1 == s2 {
        (
            Translation::identity(l1.clone(), l2.clone())?,
            Translation::identity(l2.clone(), l1.clone())?,
        )
    } else {
        let forward: Vec<(u64, u64)> = s1.iter().zip(s2.iter()).collect();
        // tr12(P) holds at w ∈ Sat2 iff P holds at the Sat1 partner of w
        let images = |from: &Language, to: &Language, pairs: &[(u64, u64)]| -> Result<BTreeMap<String, Formula>> {
            from.constants()
                .into_iter()
                .enumerate()
                .map(|(i, c)| {
                    let disjuncts = pairs
                        .iter()
                        .filter(|(src, _)| src >> i & 1 == 1)
                        .map(|(_, dst)| characteristic(*dst, to))
                        .collect::<Result<Vec<_>>>()?;
                    Ok((c.to_string(), Formula::disjunction(disjuncts, to)?))
                })
                .collect()
        };
        let backward: Vec<(u64, u64)> = forward.iter().map(|&(a, b)| (b, a)).collect();
        (
            Translation::new(l1.clone(), l2.clone(), images(&l1, &l2, &forward)?)?,
            Translation::new(l2.clone(), l1.clone(), images(&l2, &l1, &backward)?)?,
        )
    };
    let check = check_defeq(&pair.0, &pair.1, t1, t2, 1, &Policy::default())?;
    Ok(check.holds.then_some(pair))
}
