use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use serde_json::{json, Value};

use super::closure::{atom_count, Space};
use crate::error::{Error, Result};
use crate::semantics::{enumerate_models, require_sentential, Evaluator, FiniteModel, Policy, SatSet, Theory};
use crate::syntax::Formula;

/// How a conceptual size was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CzMethod {
    /// `2^|Sat(T)|`, exact.
    SententialExact,
    /// Exact for the complete theory of one finite model, relative to the
    /// `vars`-variable fragment.
    ClosureExact { size: usize, vars: usize },
    /// Distinct concepts found among formulas of depth at most `depth`,
    /// told apart on the models of size at most `bound`.
    EnumerationLowerBound { depth: usize, bound: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CzValue {
    pub value: BigUint,
    pub method: CzMethod,
}

impl CzValue {
    pub fn is_exact(&self) -> bool {
        !matches!(self.method, CzMethod::EnumerationLowerBound { .. })
    }

    pub fn to_json(&self) -> Value {
        let method = match &self.method {
            CzMethod::SententialExact => json!("sentential-exact"),
            CzMethod::ClosureExact { size, vars } => {
                json!({"closure-exact": {"size": size, "vars": vars}})
            }
            CzMethod::EnumerationLowerBound { depth, bound } => {
                json!({"enumeration-lower-bound": {"depth": depth, "bound": bound}})
            }
        };
        json!({
            "value": self.value.to_string(),
            "exact": self.is_exact(),
            "method": method,
        })
    }
}

impl fmt::Display for CzValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.value)
        } else {
            write!(f, "≥ {}", self.value)
        }
    }
}

/// Conceptual size of a sentential theory: the concepts are exactly the
/// subsets of `Sat(T)`, so there are `2^|Sat(T)|` of them.
pub fn cz_sentential(theory: &Theory) -> Result<CzValue> {
    require_sentential(theory.lang())?;
    let sat = SatSet::of(theory)?;
    Ok(CzValue {
        value: BigUint::from(1u32) << sat.len(),
        method: CzMethod::SententialExact,
    })
}

/// Conceptual size of `Th(m)` in the `n`-variable fragment: the number of
/// relations definable in `m`.
pub fn cz_of_model(m: &FiniteModel, n: usize) -> Result<CzValue> {
    let atoms = atom_count(m, n)?;
    Ok(CzValue {
        value: BigUint::from(1u32) << atoms,
        method: CzMethod::ClosureExact { size: m.size(), vars: n },
    })
}

/// Most concept classes tracked by [`cz_lower_bound`].
pub const MAX_CLASSES: usize = 4096;

type Signature = Vec<Vec<u64>>;

/// A lower bound on the number of concepts of `T`: formulas up to `depth`
/// connectives deep, grouped by their meaning on every model of `T` of size
/// at most `bound`. Formulas with different meanings on some model are not
/// `T`-equivalent, so the number of groups never exceeds `Cz(T)`.
pub fn cz_lower_bound(theory: &Theory, depth: usize, bound: usize, policy: &Policy) -> Result<CzValue> {
    let lang = theory.lang();
    let n = lang.var_bound();
    let mut models = Vec::new();
    for k in 1..=bound {
        models.extend(enumerate_models(theory, k, policy)?.iter().cloned());
    }
    let spaces = models
        .iter()
        .map(|m| Space::new(m, n))
        .collect::<Result<Vec<_>>>()?;
    let signature = |phi: &Formula| -> Result<Signature> {
        let e = Evaluator::new(phi, lang)?;
        Ok(models
            .iter()
            .zip(&spaces)
            .map(|(m, sp)| {
                let mut bits = vec![0u64; sp.points.div_ceil(64).max(1)];
                let mut asg = vec![0usize; n.max(1)];
                for p in 0..sp.points {
                    let mut rest = p;
                    for v in (0..n).rev() {
                        asg[v] = rest % m.size();
                        rest /= m.size();
                    }
                    if e.eval(m, &mut asg) {
                        bits[p / 64] |= 1 << (p % 64);
                    }
                }
                bits
            })
            .collect())
    };
    let mut classes: HashMap<Signature, Formula> = HashMap::new();
    let mut order: Vec<Signature> = Vec::new();
    let mut basics = Vec::new();
    for i in 0..n {
        for j in i..n {
            basics.push(Formula::equals(i, j));
        }
    }
    for (s, r) in lang.symbols() {
        for code in 0..n.pow(r as u32).max(1) {
            let mut args = vec![0; r];
            let mut c = code;
            for slot in args.iter_mut().rev() {
                *slot = c % n;
                c /= n;
            }
            basics.push(Formula::atom(s, args));
        }
    }
    let insert = |sig: Signature, f: Formula, classes: &mut HashMap<Signature, Formula>, order: &mut Vec<Signature>| {
        if classes.len() < MAX_CLASSES && !classes.contains_key(&sig) {
            order.push(sig.clone());
            classes.insert(sig, f);
        }
    };
    for f in basics {
        let sig = signature(&f)?;
        insert(sig, f, &mut classes, &mut order);
    }
    if classes.is_empty() {
        return Err(Error::InvalidLanguage(format!("{} has no basic formulas", lang.name())));
    }
    for _ in 0..depth {
        let current: Vec<Signature> = order.clone();
        for sig in &current {
            let f = classes[sig].clone();
            let neg: Signature = sig
                .iter()
                .zip(&spaces)
                .map(|(b, sp)| sp.complement(b))
                .collect();
            insert(neg, Formula::not(f.clone()), &mut classes, &mut order);
            for var in 0..n {
                let cyl: Signature = sig
                    .iter()
                    .zip(&spaces)
                    .map(|(b, sp)| sp.cylindrify(b, var))
                    .collect();
                insert(cyl, Formula::exists(var, f.clone()), &mut classes, &mut order);
            }
        }
        for (a, sa) in current.iter().enumerate() {
            for sb in &current[..a] {
                let meet: Signature = sa
                    .iter()
                    .zip(sb)
                    .zip(&spaces)
                    .map(|((x, y), sp)| sp.intersection(x, y))
                    .collect();
                let f = Formula::and(classes[sa].clone(), classes[sb].clone());
                insert(meet, f, &mut classes, &mut order);
            }
        }
        if classes.len() >= MAX_CLASSES {
            break;
        }
    }
    Ok(CzValue {
        value: BigUint::from(classes.len()),
        method: CzMethod::EnumerationLowerBound { depth, bound },
    })
}
