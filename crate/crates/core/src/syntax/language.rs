use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::formula::Formula;
use crate::error::{Error, Result};

pub(crate) const KEYWORDS: &[&str] = &[
    "and", "or", "not", "implies", "iff", "exists", "forall", "true", "false",
];

pub(crate) fn is_variable_token(s: &str) -> bool {
    s.len() > 1 && s.starts_with('v') && s[1..].bytes().all(|b| b.is_ascii_digit())
}

pub(crate) fn is_symbol_name(s: &str) -> bool {
    let mut bytes = s.bytes();
    matches!(bytes.next(), Some(b) if b.is_ascii_alphabetic())
        && bytes.all(|b| b.is_ascii_alphanumeric() || b == b'_')
        && !KEYWORDS.contains(&s)
        && !is_variable_token(s)
}

/// A relational language over the variables `v0 .. v{var_bound-1}`.
///
/// `var_bound == 0` is sentential logic: every symbol is a constant of rank 0.
/// Otherwise every rank is at most `var_bound`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Language {
    name: String,
    symbols: BTreeMap<String, usize>,
    var_bound: usize,
}

impl Language {
    pub fn new<I, S>(name: impl Into<String>, symbols: I, var_bound: usize) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let name = name.into();
        let mut map = BTreeMap::new();
        for (sym, rank) in symbols {
            let sym = sym.into();
            if !is_symbol_name(&sym) {
                return Err(Error::InvalidLanguage(format!(
                    "`{sym}` is not a valid relation symbol name"
                )));
            }
            if map.insert(sym.clone(), rank).is_some() {
                return Err(Error::InvalidLanguage(format!("duplicate symbol `{sym}`")));
            }
        }
        let lang = Language {
            name,
            symbols: map,
            var_bound,
        };
        for (sym, &rank) in &lang.symbols {
            if rank >= lang.rank_bound() {
                return Err(Error::InvalidLanguage(format!(
                    "symbol `{sym}` has rank {rank}, but ranks must be below {} in {}",
                    lang.rank_bound(),
                    lang.name
                )));
            }
        }
        Ok(lang)
    }

    /// A sentential language with the given constants.
    pub fn sentential<S: Into<String>>(
        name: impl Into<String>,
        constants: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        Language::new(name, constants.into_iter().map(|c| (c, 0)), 0)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn var_bound(&self) -> usize {
        self.var_bound
    }

    /// Strict upper bound on ranks: `var_bound + 1`, or `1` in sentential logic.
    pub fn rank_bound(&self) -> usize {
        if self.var_bound == 0 {
            1
        } else {
            self.var_bound + 1
        }
    }

    pub fn is_sentential(&self) -> bool {
        self.var_bound == 0
    }

    pub fn rank(&self, symbol: &str) -> Option<usize> {
        self.symbols.get(symbol).copied()
    }

    /// Symbols with their ranks, in alphabetical order.
    pub fn symbols(&self) -> impl Iterator<Item = (&str, usize)> + '_ {
        self.symbols.iter().map(|(s, &r)| (s.as_str(), r))
    }

    pub fn symbol_count(&self) -> usize {
        self.symbols.len()
    }

    pub fn max_rank(&self) -> usize {
        self.symbols.values().copied().max().unwrap_or(0)
    }

    /// Rank-0 symbols in alphabetical order.
    pub fn constants(&self) -> Vec<&str> {
        self.symbols
            .iter()
            .filter(|(_, &r)| r == 0)
            .map(|(s, _)| s.as_str())
            .collect()
    }

    /// Same symbols, ranks and variable bound; the name is a label only.
    pub fn same_signature(&self, other: &Language) -> bool {
        self.var_bound == other.var_bound && self.symbols == other.symbols
    }

    /// Whether every formula of `sub` is a formula of `self`.
    pub fn includes(&self, sub: &Language) -> bool {
        sub.var_bound <= self.var_bound
            && sub
                .symbols
                .iter()
                .all(|(s, r)| self.symbols.get(s) == Some(r))
    }

    /// Symbols of `self` that are missing from `sub` (assumes `self.includes(sub)`).
    pub fn extra_symbols(&self, sub: &Language) -> Vec<(&str, usize)> {
        self.symbols()
            .filter(|(s, _)| !sub.symbols.contains_key(*s))
            .collect()
    }

    pub fn with_symbol(&self, name: impl Into<String>, symbol: &str, rank: usize) -> Result<Self> {
        let mut symbols = self.symbols.clone();
        if symbols.insert(symbol.to_string(), rank).is_some() {
            return Err(Error::InvalidLanguage(format!(
                "symbol `{symbol}` already in {}",
                self.name
            )));
        }
        Language::new(name, symbols, self.var_bound)
    }

    pub fn without_symbols(&self, name: impl Into<String>, drop: &[&str]) -> Result<Self> {
        let symbols = self
            .symbols
            .iter()
            .filter(|(s, _)| !drop.contains(&s.as_str()))
            .map(|(s, &r)| (s.clone(), r));
        Language::new(name, symbols, self.var_bound)
    }

    pub fn with_var_bound(&self, var_bound: usize) -> Result<Self> {
        Language::new(self.name.clone(), self.symbols.clone(), var_bound)
    }

    /// The lexicographically first basic formula, by printed form.
    ///
    /// `(= v0 v0)` sorts before every atom, so it is chosen whenever there is
    /// at least one variable; in sentential logic it is the first constant.
    /// Used as the fixed formula in the empty conjunction/disjunction.
    pub fn first_basic_formula(&self) -> Option<Formula> {
        if self.var_bound > 0 {
            return Some(Formula::equals(0, 0));
        }
        self.constants()
            .first()
            .map(|c| Formula::atom(c, Vec::new()))
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(language {}", self.name)?;
        for (s, r) in &self.symbols {
            write!(f, " ({s} {r})")?;
        }
        write!(f, " :vars {})", self.var_bound)
    }
}
