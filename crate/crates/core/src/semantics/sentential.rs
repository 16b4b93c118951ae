use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::eval::Evaluator;
use super::theory::Theory;
use crate::error::{Error, Result};
use crate::syntax::{Formula, Language};

/// Most constants a sentential language may have for exact computations.
pub const MAX_CONSTANTS: usize = 20;

/// The exact set of satisfying valuations of a sentential theory.
///
/// A valuation is a bit vector: bit `i` is the value of the `i`-th constant
/// in alphabetical order. Printed, valuation strings list those bits left
/// to right, so over `{P, Q}` the string `01` means `P = 0, Q = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SatSet {
    constants: Vec<String>,
    members: BTreeSet<u64>,
}

pub(crate) fn require_sentential(lang: &Language) -> Result<()> {
    if !lang.is_sentential() {
        return Err(Error::NotSentential(format!(
            "{} has variables; only sentential languages are supported here",
            lang.name()
        )));
    }
    if lang.symbol_count() > MAX_CONSTANTS {
        return Err(Error::CapExceeded(format!(
            "{} has {} constants (cap {MAX_CONSTANTS})",
            lang.name(),
            lang.symbol_count()
        )));
    }
    Ok(())
}

impl SatSet {
    pub fn new(constants: Vec<String>, members: impl IntoIterator<Item = u64>) -> Self {
        SatSet {
            constants,
            members: members.into_iter().collect(),
        }
    }

    /// `Sat(T)` by truth-table enumeration.
    pub fn of(theory: &Theory) -> Result<SatSet> {
        require_sentential(theory.lang())?;
        let evals = theory
            .axioms()
            .iter()
            .map(|a| Evaluator::new(a, theory.lang()))
            .collect::<Result<Vec<_>>>()?;
        let n = theory.lang().symbol_count();
        let members = (0..1u64 << n).filter(|&v| evals.iter().all(|e| e.eval_valuation(v)));
        Ok(SatSet::new(constants_of(theory.lang()), members))
    }

    /// `Sat(φ)` over `lang`.
    pub fn of_formula(phi: &Formula, lang: &Language) -> Result<SatSet> {
        require_sentential(lang)?;
        let e = Evaluator::new(phi, lang)?;
        let n = lang.symbol_count();
        Ok(SatSet::new(
            constants_of(lang),
            (0..1u64 << n).filter(|&v| e.eval_valuation(v)),
        ))
    }

    /// Every valuation.
    pub fn full(lang: &Language) -> Result<SatSet> {
        require_sentential(lang)?;
        Ok(SatSet::new(constants_of(lang), 0..1u64 << lang.symbol_count()))
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: u64) -> bool {
        self.members.contains(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.members.iter().copied()
    }

    pub fn universe_size(&self) -> u64 {
        1u64 << self.constants.len()
    }

    pub fn is_subset(&self, other: &SatSet) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn intersection(&self, other: &SatSet) -> SatSet {
        SatSet::new(self.constants.clone(), self.members.intersection(&other.members).copied())
    }

    pub fn union(&self, other: &SatSet) -> SatSet {
        SatSet::new(self.constants.clone(), self.members.union(&other.members).copied())
    }

    pub fn complement(&self) -> SatSet {
        SatSet::new(
            self.constants.clone(),
            (0..self.universe_size()).filter(|v| !self.members.contains(v)),
        )
    }

    /// Restriction of every valuation to `onto` (which must be a subset of
    /// our constants).
    pub fn project(&self, onto: &[String]) -> Result<SatSet> {
        let positions = onto
            .iter()
            .map(|c| {
                self.constants.iter().position(|d| d == c).ok_or_else(|| {
                    Error::LanguageMismatch(format!("constant `{c}` is not in the larger language"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SatSet::new(
            onto.to_vec(),
            self.members.iter().map(|&v| {
                positions
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (i, &p)| acc | ((v >> p & 1) << i))
            }),
        ))
    }

    pub fn valuation_string(&self, v: u64) -> String {
        valuation_string(v, self.constants.len())
    }

    pub fn strings(&self) -> Vec<String> {
        self.iter().map(|v| self.valuation_string(v)).collect()
    }

    /// The canonical DNF: the disjunction of characteristic conjunctions of
    /// the members, in increasing valuation order.
    pub fn dnf(&self, lang: &Language) -> Result<Formula> {
        Formula::disjunction(
            self.iter().map(|v| characteristic(v, lang)).collect::<Result<Vec<_>>>()?,
            lang,
        )
    }
}

fn constants_of(lang: &Language) -> Vec<String> {
    lang.constants().into_iter().map(String::from).collect()
}

pub fn valuation_string(v: u64, n: usize) -> String {
    (0..n).map(|i| if v >> i & 1 == 1 { '1' } else { '0' }).collect()
}

/// Parses a valuation string such as `01`.
pub fn parse_valuation(s: &str) -> Option<u64> {
    s.chars().enumerate().try_fold(0u64, |acc, (i, c)| match c {
        '0' => Some(acc),
        '1' => Some(acc | 1 << i),
        _ => None,
    })
}

/// The conjunction of literals true exactly at valuation `v`.
pub fn characteristic(v: u64, lang: &Language) -> Result<Formula> {
    let lits = lang.constants().into_iter().enumerate().map(|(i, c)| {
        let a = Formula::atom(c, Vec::new());
        if v >> i & 1 == 1 {
            a
        } else {
            Formula::not(a)
        }
    });
    Formula::conjunction(lits, lang)
}

impl fmt::Display for SatSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.strings().join(","))
    }
}

impl Serialize for SatSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SatSet", 2)?;
        st.serialize_field("constants", &self.constants)?;
        st.serialize_field("valuations", &self.strings())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;

    fn pq() -> Arc<Language> {
        Arc::new(Language::sentential("S", ["P", "Q"]).unwrap())
    }

    #[test]
    fn sat_of_disjunction() {
        let t = Theory::parse("T", pq(), &["(or P Q)"]).unwrap();
        let s = SatSet::of(&t).unwrap();
        assert_eq!(s.strings(), vec!["10", "01", "11"]);
        assert_eq!(s.to_string(), "{10,01,11}");
    }

    #[test]
    fn dnf_defines_the_set() {
        let t = Theory::parse("T", pq(), &["(iff P Q)"]).unwrap();
        let s = SatSet::of(&t).unwrap();
        let back = SatSet::of_formula(&s.dnf(&pq()).unwrap(), &pq()).unwrap();
        assert_eq!(back, s);
        let none = SatSet::new(s.constants().to_vec(), []);
        assert!(SatSet::of_formula(&none.dnf(&pq()).unwrap(), &pq()).unwrap().is_empty());
    }

    #[test]
    fn projection_drops_constants() {
        let t = Theory::parse("T", pq(), &["(not P)"]).unwrap();
        let s = SatSet::of(&t).unwrap();
        let p = s.project(&["Q".to_string()]).unwrap();
        assert_eq!(p.strings(), vec!["0", "1"]);
        let p = s.project(&["P".to_string()]).unwrap();
        assert_eq!(p.strings(), vec!["0"]);
    }

    #[test]
    fn valuation_strings_round_trip() {
        for v in 0..16 {
            assert_eq!(parse_valuation(&valuation_string(v, 4)), Some(v));
        }
        assert_eq!(parse_valuation("2"), None);
    }

    #[test]
    fn first_order_rejected() {
        let l = Arc::new(Language::new("L", [("R", 1)], 1).unwrap());
        assert!(matches!(SatSet::of(&Theory::empty("T", l)), Err(Error::NotSentential(_))));
    }
}
