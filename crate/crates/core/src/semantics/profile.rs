use std::sync::Arc;

use serde_json::{json, Value};

use super::consequence::Exactness;
use super::enumerate::{enumerate_models, Policy};
use super::model::FiniteModel;
use super::sentential::SatSet;
use super::theory::Theory;
use crate::error::Result;

/// Everything brute force knows about a theory up to a size bound.
#[derive(Debug, Clone)]
pub struct SemanticProfile {
    pub theory: String,
    pub hash: String,
    pub bound: usize,
    /// `models[k-1]`: the size-`k` models up to isomorphism.
    pub models: Vec<Arc<Vec<FiniteModel>>>,
    pub sat: Option<SatSet>,
    pub exactness: Exactness,
}

impl SemanticProfile {
    /// `I(T, k)` for `k = 1..=bound`.
    pub fn spectrum(&self) -> Vec<usize> {
        self.models.iter().map(|m| m.len()).collect()
    }

    pub fn count(&self, size: usize) -> Option<usize> {
        self.models.get(size.checked_sub(1)?).map(|m| m.len())
    }

    /// Has a model at every size up to the bound; the finite stand-in for
    /// "has arbitrarily large models".
    pub fn models_at_every_size(&self) -> bool {
        self.models.iter().all(|m| !m.is_empty())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "theory": self.theory,
            "bound": self.bound,
            "spectrum": self.spectrum(),
            "sat": self.sat,
            "exactness": self.exactness,
            "models_at_every_size": self.models_at_every_size(),
        })
    }
}

pub fn semantic_profile(theory: &Theory, bound: usize, policy: &Policy) -> Result<SemanticProfile> {
    let models = (1..=bound)
        .map(|k| enumerate_models(theory, k, policy))
        .collect::<Result<Vec<_>>>()?;
    let sat = if theory.is_sentential() {
        Some(SatSet::of(theory)?)
    } else {
        None
    };
    Ok(SemanticProfile {
        theory: theory.name().to_string(),
        hash: theory.content_hash(),
        bound,
        models,
        exactness: if sat.is_some() {
            Exactness::Exact
        } else {
            Exactness::Bounded(bound)
        },
        sat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Language;

    #[test]
    fn sentential_profile_is_exact_and_flat() {
        let l = Arc::new(Language::sentential("S", ["P", "Q"]).unwrap());
        let t = Theory::parse("T", l, &["(or P Q)"]).unwrap();
        let p = semantic_profile(&t, 3, &Policy::default()).unwrap();
        assert_eq!(p.spectrum(), vec![3, 3, 3]);
        assert_eq!(p.exactness, Exactness::Exact);
        assert_eq!(p.sat.as_ref().unwrap().len(), 3);
        assert!(p.models_at_every_size());
    }
}
