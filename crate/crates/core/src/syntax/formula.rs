use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use super::language::Language;
use crate::error::{Error, Pos, Result};

pub type Symbol = Arc<str>;

/// Formula AST over the primitive connectives `=`, atoms, `and`, `not`, `exists`.
///
/// Derived connectives never appear here: the constructors for `or`,
/// `implies`, `iff` and `forall` build their primitive expansions.
/// Children are reference counted so shared subformulas are cheap.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Equals(usize, usize),
    Atom(Symbol, Vec<usize>),
    And(Arc<Formula>, Arc<Formula>),
    Not(Arc<Formula>),
    Exists(usize, Arc<Formula>),
}

impl Formula {
    pub fn equals(i: usize, j: usize) -> Self {
        Formula::Equals(i, j)
    }

    pub fn atom(symbol: &str, args: Vec<usize>) -> Self {
        Formula::Atom(Arc::from(symbol), args)
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Self {
        Formula::Not(Arc::new(a))
    }

    pub fn exists(i: usize, a: Formula) -> Self {
        Formula::Exists(i, Arc::new(a))
    }

    /// `a ∨ b := ¬(¬a ∧ ¬b)`
    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    /// `a → b := ¬(a ∧ ¬b)`
    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    /// `a ↔ b := (a → b) ∧ (b → a)`
    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    /// `∀vi a := ¬∃vi ¬a`
    pub fn forall(i: usize, a: Formula) -> Self {
        Formula::not(Formula::exists(i, Formula::not(a)))
    }

    pub fn not_equals(i: usize, j: usize) -> Self {
        Formula::not(Formula::equals(i, j))
    }

    /// Grouped conjunction, nested to the left. The empty conjunction is
    /// `φ ∨ ¬φ` for the language's first basic formula `φ`.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>, lang: &Language) -> Result<Self> {
        let mut it = items.into_iter();
        match it.next() {
            Some(first) => Ok(it.fold(first, Formula::and)),
            None => {
                let phi = empty_connective_base(lang)?;
                Ok(Formula::or(phi.clone(), Formula::not(phi)))
            }
        }
    }

    /// Grouped disjunction, nested to the left. The empty disjunction is
    /// `φ ∧ ¬φ` for the language's first basic formula `φ`.
    pub fn disjunction(items: impl IntoIterator<Item = Formula>, lang: &Language) -> Result<Self> {
        let mut it = items.into_iter();
        match it.next() {
            Some(first) => Ok(it.fold(first, Formula::or)),
            None => {
                let phi = empty_connective_base(lang)?;
                Ok(Formula::and(phi.clone(), Formula::not(phi)))
            }
        }
    }

    /// Bitmask of free variables (bit `i` for `vi`).
    pub fn free_vars(&self) -> u64 {
        match self {
            Formula::Equals(i, j) => bit(*i) | bit(*j),
            Formula::Atom(_, args) => args.iter().fold(0, |m, &a| m | bit(a)),
            Formula::And(a, b) => a.free_vars() | b.free_vars(),
            Formula::Not(a) => a.free_vars(),
            Formula::Exists(i, a) => a.free_vars() & !bit(*i),
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars() == 0
    }

    /// Largest variable index occurring anywhere (free or bound).
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Formula::Equals(i, j) => Some(*i.max(j)),
            Formula::Atom(_, args) => args.iter().copied().max(),
            Formula::And(a, b) => a.max_var().max(b.max_var()),
            Formula::Not(a) => a.max_var(),
            Formula::Exists(i, a) => Some(a.max_var().map_or(*i, |m| m.max(*i))),
        }
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Formula::Equals(..) => {}
            Formula::Atom(s, _) => {
                out.insert(s.clone());
            }
            Formula::And(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
            Formula::Not(a) | Formula::Exists(_, a) => a.collect_symbols(out),
        }
    }

    /// All distinct subformulas, including `self`, in first-visit order.
    pub fn subformulas(&self) -> Vec<Formula> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut stack = vec![self.clone()];
        while let Some(f) = stack.pop() {
            if !seen.insert(f.clone()) {
                continue;
            }
            match &f {
                Formula::And(a, b) => {
                    stack.push((**b).clone());
                    stack.push((**a).clone());
                }
                Formula::Not(a) | Formula::Exists(_, a) => stack.push((**a).clone()),
                _ => {}
            }
            out.push(f);
        }
        out
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Equals(..) | Formula::Atom(..) => 1,
            Formula::And(a, b) => 1 + a.size() + b.size(),
            Formula::Not(a) | Formula::Exists(_, a) => 1 + a.size(),
        }
    }

    /// Checks that the formula is well formed over `lang`.
    pub fn check(&self, lang: &Language) -> Result<()> {
        let var = |i: usize| {
            if i < lang.var_bound() {
                Ok(())
            } else {
                Err(Error::VariableOutOfRange {
                    index: i,
                    bound: lang.var_bound(),
                    pos: Pos::default(),
                })
            }
        };
        match self {
            Formula::Equals(i, j) => {
                var(*i)?;
                var(*j)
            }
            Formula::Atom(s, args) => {
                let rank = lang.rank(s).ok_or_else(|| Error::UnknownSymbol {
                    name: s.to_string(),
                    pos: Pos::default(),
                })?;
                if rank != args.len() {
                    return Err(Error::ArityMismatch {
                        symbol: s.to_string(),
                        expected: rank,
                        found: args.len(),
                        pos: Pos::default(),
                    });
                }
                args.iter().try_for_each(|&a| var(a))
            }
            Formula::And(a, b) => {
                a.check(lang)?;
                b.check(lang)
            }
            Formula::Not(a) => a.check(lang),
            Formula::Exists(i, a) => {
                var(*i)?;
                a.check(lang)
            }
        }
    }
}

fn bit(i: usize) -> u64 {
    debug_assert!(i < 64, "variable index {i} exceeds 64");
    1u64 << i
}

fn empty_connective_base(lang: &Language) -> Result<Formula> {
    lang.first_basic_formula().ok_or_else(|| {
        Error::InvalidLanguage(format!(
            "{} has no basic formula, so the empty conjunction/disjunction is undefined",
            lang.name()
        ))
    })
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Equals(i, j) => write!(f, "(= v{i} v{j})"),
            Formula::Atom(s, args) if args.is_empty() => write!(f, "{s}"),
            Formula::Atom(s, args) => {
                write!(f, "({s}")?;
                for a in args {
                    write!(f, " v{a}")?;
                }
                write!(f, ")")
            }
            Formula::And(a, b) => write!(f, "(and {a} {b})"),
            Formula::Not(a) => write!(f, "(not {a})"),
            Formula::Exists(i, a) => write!(f, "(exists v{i} {a})"),
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl serde::Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Hash-consing table: structurally equal subformulas come back as the same `Arc`.
#[derive(Debug, Default)]
pub struct Interner {
    table: HashSet<Arc<Formula>>,
}

impl Interner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn intern(&mut self, f: Formula) -> Arc<Formula> {
        if let Some(existing) = self.table.get(&f) {
            return existing.clone();
        }
        let rebuilt = match f {
            Formula::And(a, b) => {
                let a = self.intern_arc(a);
                let b = self.intern_arc(b);
                Formula::And(a, b)
            }
            Formula::Not(a) => Formula::Not(self.intern_arc(a)),
            Formula::Exists(i, a) => Formula::Exists(i, self.intern_arc(a)),
            leaf => leaf,
        };
        let arc = Arc::new(rebuilt);
        self.table.insert(arc.clone());
        arc
    }

    fn intern_arc(&mut self, f: Arc<Formula>) -> Arc<Formula> {
        if let Some(existing) = self.table.get(&*f) {
            return existing.clone();
        }
        self.intern(Arc::unwrap_or_clone(f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_variables() {
        let f = Formula::exists(0, Formula::atom("R", vec![0, 1]));
        assert_eq!(f.free_vars(), 0b10);
        assert!(!f.is_sentence());
        assert!(Formula::forall(1, f.clone()).is_sentence());
        assert_eq!(f.max_var(), Some(1));
    }

    #[test]
    fn printing_uses_primitive_forms() {
        let f = Formula::or(Formula::atom("P", vec![]), Formula::equals(0, 1));
        assert_eq!(f.to_string(), "(not (and (not P) (not (= v0 v1))))");
    }

    #[test]
    fn empty_grouped_connectives() {
        let lang = Language::new("L", [("R", 1)], 1).unwrap();
        let t = Formula::conjunction([], &lang).unwrap();
        let e = Formula::equals(0, 0);
        assert_eq!(t, Formula::or(e.clone(), Formula::not(e.clone())));
        let f = Formula::disjunction([], &lang).unwrap();
        assert_eq!(f, Formula::and(e.clone(), Formula::not(e)));
        let a = Formula::atom("R", vec![0]);
        assert_eq!(Formula::conjunction([a.clone()], &lang).unwrap(), a);
    }

    #[test]
    fn interner_shares_equal_subtrees() {
        let a = Formula::atom("R", vec![0]);
        let f = Formula::iff(a.clone(), Formula::not(a.clone()));
        let mut int = Interner::new();
        let shared = int.intern(f.clone());
        assert_eq!(*shared, f);
        let again = int.intern(Formula::not(a.clone()));
        // `¬R(v0)` already exists inside `f`, so no new node is added.
        let before = int.len();
        assert_eq!(*again, Formula::not(a));
        assert_eq!(int.len(), before);
    }

    #[test]
    fn check_catches_bad_atoms() {
        let lang = Language::new("L", [("R", 2)], 2).unwrap();
        assert!(Formula::atom("R", vec![0, 1]).check(&lang).is_ok());
        assert!(matches!(
            Formula::atom("R", vec![0]).check(&lang),
            Err(Error::ArityMismatch { .. })
        ));
        assert!(matches!(
            Formula::atom("S", vec![0]).check(&lang),
            Err(Error::UnknownSymbol { .. })
        ));
        assert!(matches!(
            Formula::equals(0, 2).check(&lang),
            Err(Error::VariableOutOfRange { .. })
        ));
    }
}
