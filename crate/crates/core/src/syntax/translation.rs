use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::formula::Formula;
use super::language::Language;
use crate::error::{Error, Result};

/// A translation between languages, given by the image of each relation
/// symbol applied to its canonical variable tuple `v0 .. v{rank-1}`.
///
/// The image of an arbitrary formula is never stored; [`Translation::apply`]
/// recomputes it homomorphically.
#[derive(Clone, PartialEq, Eq)]
pub struct Translation {
    source: Arc<Language>,
    target: Arc<Language>,
    basic: BTreeMap<String, Formula>,
}

impl Translation {
    pub fn new(
        source: Arc<Language>,
        target: Arc<Language>,
        basic: BTreeMap<String, Formula>,
    ) -> Result<Self> {
        for (sym, _) in source.symbols() {
            let image = basic.get(sym).ok_or_else(|| {
                Error::Precondition(format!("translation has no image for `{sym}`"))
            })?;
            image.check(&target)?;
        }
        if let Some(extra) = basic.keys().find(|k| source.rank(k).is_none()) {
            return Err(Error::UnknownSymbol {
                name: extra.clone(),
                pos: Default::default(),
            });
        }
        Ok(Translation {
            source,
            target,
            basic,
        })
    }

    /// The identity translation from `source` into a language that includes it.
    pub fn identity(source: Arc<Language>, target: Arc<Language>) -> Result<Self> {
        if !target.includes(&source) {
            return Err(Error::LanguageMismatch(format!(
                "{} is not included in {}",
                source.name(),
                target.name()
            )));
        }
        let basic = source
            .symbols()
            .map(|(s, r)| (s.to_string(), Formula::atom(s, (0..r).collect())))
            .collect();
        Translation::new(source, target, basic)
    }

    pub fn source(&self) -> &Arc<Language> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Language> {
        &self.target
    }

    pub fn image(&self, symbol: &str) -> Option<&Formula> {
        self.basic.get(symbol)
    }

    pub fn images(&self) -> impl Iterator<Item = (&str, &Formula)> {
        self.basic.iter().map(|(s, f)| (s.as_str(), f))
    }

    /// Homomorphic image of `phi`.
    ///
    /// Equalities are fixed and `and`, `not`, `exists` are preserved. An
    /// atom whose arguments are not the canonical tuple is rewritten with
    /// Tarski's substitution chain: the actual arguments are first copied
    /// into fresh variables `y1 .. ym` (indices above every variable the
    /// atom or its image mentions), then copied into `v0 .. v{m-1}`, and
    /// the canonical image is evaluated there.
    pub fn apply(&self, phi: &Formula) -> Result<Formula> {
        match phi {
            Formula::Equals(i, j) => Ok(Formula::equals(*i, *j)),
            Formula::And(a, b) => Ok(Formula::and(self.apply(a)?, self.apply(b)?)),
            Formula::Not(a) => Ok(Formula::not(self.apply(a)?)),
            Formula::Exists(i, a) => Ok(Formula::exists(*i, self.apply(a)?)),
            Formula::Atom(sym, args) => {
                let image = self.basic.get(&**sym).ok_or_else(|| Error::UnknownSymbol {
                    name: sym.to_string(),
                    pos: Default::default(),
                })?;
                if args.iter().enumerate().all(|(k, &a)| a == k) {
                    return Ok(image.clone());
                }
                substitution_chain(image, args, self.target.var_bound())
            }
        }
    }
}

/// `∃y1(y1=v_{i1} ∧ … ∃ym(ym=v_{im} ∧ ∃v0(v0=y1 ∧ … ∃v_{m-1}(v_{m-1}=ym ∧ image))))`
fn substitution_chain(image: &Formula, args: &[usize], var_bound: usize) -> Result<Formula> {
    let m = args.len();
    let free_top = {
        let fv = image.free_vars();
        if fv == 0 {
            0
        } else {
            63 - fv.leading_zeros() as usize
        }
    };
    let l = args
        .iter()
        .copied()
        .chain(std::iter::once(m.saturating_sub(1)))
        .chain(std::iter::once(free_top))
        .max()
        .unwrap_or(0);
    let needed = l + m + 1;
    if needed > var_bound {
        return Err(Error::VariableBudget {
            needed,
            available: var_bound,
        });
    }
    let y = |j: usize| l + 1 + j; // y_{j+1}
    let mut body = image.clone();
    for j in (0..m).rev() {
        body = Formula::exists(j, Formula::and(Formula::equals(j, y(j)), body));
    }
    for j in (0..m).rev() {
        body = Formula::exists(y(j), Formula::and(Formula::equals(y(j), args[j]), body));
    }
    Ok(body)
}

impl fmt::Debug for Translation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Translation({} -> {}", self.source.name(), self.target.name())?;
        for (s, img) in &self.basic {
            write!(f, "; {s} ↦ {img}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for Translation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let images: BTreeMap<&str, String> = self
            .basic
            .iter()
            .map(|(k, v)| (k.as_str(), v.to_string()))
            .collect();
        let mut st = s.serialize_struct("Translation", 3)?;
        st.serialize_field("source", self.source.name())?;
        st.serialize_field("target", self.target.name())?;
        st.serialize_field("images", &images)?;
        st.end()
    }
}
