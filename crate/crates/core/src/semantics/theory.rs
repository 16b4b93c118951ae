use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::syntax::{parse_formula, Formula, Language};

/// A named, finite set of axioms over a language.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Theory {
    name: String,
    #[serde(serialize_with = "language_name")]
    lang: Arc<Language>,
    axioms: Vec<Formula>,
}

fn language_name<S: serde::Serializer>(l: &Arc<Language>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(l.name())
}

impl Theory {
    pub fn new(name: impl Into<String>, lang: Arc<Language>, axioms: Vec<Formula>) -> Result<Self> {
        for a in &axioms {
            a.check(&lang)?;
        }
        Ok(Theory {
            name: name.into(),
            lang,
            axioms,
        })
    }

    /// The theory with no axioms.
    pub fn empty(name: impl Into<String>, lang: Arc<Language>) -> Self {
        Theory {
            name: name.into(),
            lang,
            axioms: Vec::new(),
        }
    }

    /// Parses each axiom with the formula grammar.
    pub fn parse(name: impl Into<String>, lang: Arc<Language>, axioms: &[&str]) -> Result<Self> {
        let axioms = axioms
            .iter()
            .map(|a| parse_formula(a, &lang))
            .collect::<Result<Vec<_>>>()?;
        Theory::new(name, lang, axioms)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lang(&self) -> &Arc<Language> {
        &self.lang
    }

    pub fn axioms(&self) -> &[Formula] {
        &self.axioms
    }

    pub fn is_sentential(&self) -> bool {
        self.lang.is_sentential()
    }

    pub fn renamed(&self, name: impl Into<String>) -> Theory {
        Theory {
            name: name.into(),
            ..self.clone()
        }
    }

    /// `T ∪ {φ}`.
    pub fn with_axiom(&self, name: impl Into<String>, phi: Formula) -> Result<Theory> {
        let mut axioms = self.axioms.clone();
        axioms.push(phi);
        Theory::new(name, self.lang.clone(), axioms)
    }

    /// The same axioms read in a language that includes ours.
    pub fn in_language(&self, name: impl Into<String>, lang: Arc<Language>) -> Result<Theory> {
        if !lang.includes(&self.lang) {
            return Err(Error::LanguageMismatch(format!(
                "{} does not include {}",
                lang.name(),
                self.lang.name()
            )));
        }
        Theory::new(name, lang, self.axioms.clone())
    }

    /// The conjunction of the axioms (the empty conjunction if there are none).
    pub fn conjunction(&self) -> Result<Formula> {
        Formula::conjunction(self.axioms.iter().cloned(), &self.lang)
    }

    /// Content hash of the signature and the axioms. Names are not included,
    /// so renaming a theory or its language keeps the hash.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("vars {}\n", self.lang.var_bound()));
        for (s, r) in self.lang.symbols() {
            h.update(format!("sym {s} {r}\n"));
        }
        for a in &self.axioms {
            h.update(format!("ax {a}\n"));
        }
        hex::encode(h.finalize())
    }
}

impl fmt::Debug for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Theory {} over {} {{", self.name, self.lang.name())?;
        for (i, a) in self.axioms.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, " {a}")?;
        }
        write!(f, " }}")
    }
}
