use std::collections::BTreeMap;
use std::sync::Arc;

use super::formula::Formula;
use super::language::Language;
use super::translation::Translation;
use crate::error::{Error, Result};
use crate::semantics::{Evaluator, FiniteModel};

/// The sentence saying there are exactly `n` elements:
/// `∃v0 … ∃v{n-1} (⋀_{i≠j} vi≠vj ∧ ∀vn ⋁_i vn=vi)`.
///
/// The inequalities run over ordered pairs `(i, j)`, `i ≠ j`, in
/// lexicographic order. For `n = 1` that conjunction is empty.
pub fn make_psi_n(n: usize, lang: &Language) -> Result<Formula> {
    if n == 0 {
        return Err(Error::Precondition("Ψ(n) needs n ≥ 1".into()));
    }
    if lang.var_bound() < n + 1 {
        return Err(Error::VariableBudget {
            needed: n + 1,
            available: lang.var_bound(),
        });
    }
    let distinct = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| Formula::not_equals(i, j));
    let distinct = Formula::conjunction(distinct, lang)?;
    let cover = Formula::disjunction((0..n).map(|i| Formula::equals(n, i)), lang)?;
    let mut body = Formula::and(distinct, Formula::forall(n, cover));
    for i in (0..n).rev() {
        body = Formula::exists(i, body);
    }
    Ok(body)
}

/// Coding two relation symbols `R/n` and `S/m` by one symbol `B` of rank
/// `l = max(n, m) + 2`, using whether the last two arguments coincide.
#[derive(Debug, Clone)]
pub struct Pairing {
    pub l: usize,
    /// `ψ(v0..v{l-1}) = (R(v0..) ∧ v{l-2}=v{l-1}) ∨ (S(v0..) ∧ v{l-2}≠v{l-1})`
    pub psi: Formula,
    /// Language with `R` and `S`.
    pub base: Arc<Language>,
    /// `base` with `R`, `S` replaced by `B`.
    pub paired: Arc<Language>,
    /// `base` plus `B`; extended models live here.
    pub joint: Arc<Language>,
    /// `B ↦ ψ`, from `paired` to `base`.
    pub tr: Translation,
    /// `R ↦ ∃v{l-1}(B(..) ∧ v{l-2}=v{l-1})`, `S ↦ ∃v{l-1}(B(..) ∧ v{l-2}≠v{l-1})`.
    pub tr_prime: Translation,
    pub r: String,
    pub s: String,
    pub b: String,
}

pub fn make_pairing(
    r: (&str, usize),
    s: (&str, usize),
    b: &str,
    base: &Arc<Language>,
) -> Result<Pairing> {
    let (r_name, n) = r;
    let (s_name, m) = s;
    for (name, rank) in [r, s] {
        match base.rank(name) {
            Some(k) if k == rank => {}
            Some(k) => {
                return Err(Error::ArityMismatch {
                    symbol: name.into(),
                    expected: k,
                    found: rank,
                    pos: Default::default(),
                })
            }
            None => {
                return Err(Error::UnknownSymbol {
                    name: name.into(),
                    pos: Default::default(),
                })
            }
        }
    }
    if r_name == s_name {
        return Err(Error::Precondition("pairing needs two distinct symbols".into()));
    }
    let l = n.max(m) + 2;
    if base.var_bound() < l {
        return Err(Error::VariableBudget {
            needed: l,
            available: base.var_bound(),
        });
    }
    let paired_name = format!("{}_{b}", base.name());
    let paired = Arc::new(
        base.without_symbols(paired_name.clone(), &[r_name, s_name])?
            .with_symbol(paired_name, b, l)?,
    );
    let joint = Arc::new(base.with_symbol(format!("{}+{b}", base.name()), b, l)?);

    let tag_eq = Formula::equals(l - 2, l - 1);
    let psi = Formula::or(
        Formula::and(Formula::atom(r_name, (0..n).collect()), tag_eq.clone()),
        Formula::and(Formula::atom(s_name, (0..m).collect()), Formula::not(tag_eq.clone())),
    );
    let b_atom = Formula::atom(b, (0..l).collect());

    let identity_on = |lang: &Language, skip: &[&str]| -> BTreeMap<String, Formula> {
        lang.symbols()
            .filter(|(sym, _)| !skip.contains(sym))
            .map(|(sym, rank)| (sym.to_string(), Formula::atom(sym, (0..rank).collect())))
            .collect()
    };

    let mut tr_map = identity_on(&paired, &[b]);
    tr_map.insert(b.to_string(), psi.clone());
    let tr = Translation::new(paired.clone(), base.clone(), tr_map)?;

    let mut back = identity_on(base, &[r_name, s_name]);
    back.insert(
        r_name.to_string(),
        Formula::exists(l - 1, Formula::and(b_atom.clone(), tag_eq.clone())),
    );
    back.insert(
        s_name.to_string(),
        Formula::exists(l - 1, Formula::and(b_atom, Formula::not(tag_eq))),
    );
    let tr_prime = Translation::new(base.clone(), paired.clone(), back)?;

    Ok(Pairing {
        l,
        psi,
        base: base.clone(),
        paired,
        joint,
        tr,
        tr_prime,
        r: r_name.into(),
        s: s_name.into(),
        b: b.into(),
    })
}

impl Pairing {
    /// Expands a model of the base language by `B := ψ`.
    pub fn extend(&self, model: &FiniteModel) -> Result<FiniteModel> {
        if !model.lang().same_signature(&self.base) {
            return Err(Error::LanguageMismatch(format!(
                "model is over {}, pairing expects {}",
                model.lang().name(),
                self.base.name()
            )));
        }
        let mut out = model.expand(self.joint.clone())?;
        let psi = Evaluator::new(&self.psi, &self.base)?;
        let k = model.size();
        let mut tuple = vec![0usize; self.l];
        let mut asg = vec![0usize; self.base.var_bound()];
        for code in 0..k.pow(self.l as u32) {
            let mut c = code;
            for slot in tuple.iter_mut().rev() {
                *slot = c % k;
                c /= k;
            }
            asg[..self.l].copy_from_slice(&tuple);
            if psi.eval(model, &mut asg) {
                out.set(&self.b, &tuple, true)?;
            }
        }
        Ok(out)
    }
}
