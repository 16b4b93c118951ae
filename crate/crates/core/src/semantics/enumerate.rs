use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::canon::{canonical_labeling, CanonicalForm, CANON_SIZE_CAP};
use super::eval::Evaluator;
use super::model::FiniteModel;
use super::theory::Theory;
use crate::error::{Error, Result};

/// Resource caps for brute-force semantics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Policy {
    /// Largest universe enumerated.
    pub size_cap: usize,
    /// Largest relation rank admitted in catalog languages.
    pub rank_cap: usize,
    /// Largest variable bound admitted in catalog languages.
    pub var_cap: usize,
    /// Largest number of interpretation bits `Σ size^rank` enumerated raw.
    pub max_interp_bits: usize,
    /// Default bound `K` for bounded first-order checks.
    pub bound: usize,
}

impl Default for Policy {
    fn default() -> Self {
        Policy {
            size_cap: 6,
            rank_cap: 3,
            var_cap: 8,
            max_interp_bits: 20,
            bound: 4,
        }
    }
}

impl Policy {
    pub fn interp_bits(theory: &Theory, size: usize) -> Option<usize> {
        theory
            .lang()
            .symbols()
            .try_fold(0usize, |acc, (_, r)| acc.checked_add(size.checked_pow(r as u32)?))
    }

    pub fn admits(&self, theory: &Theory, size: usize) -> Result<()> {
        if size == 0 {
            return Err(Error::Precondition("model sizes start at 1".into()));
        }
        if size > self.size_cap.min(CANON_SIZE_CAP) {
            return Err(Error::CapExceeded(format!(
                "size {size} exceeds the size cap {}",
                self.size_cap
            )));
        }
        match Policy::interp_bits(theory, size) {
            Some(b) if b <= self.max_interp_bits => Ok(()),
            b => Err(Error::CapExceeded(format!(
                "{} at size {size} has {} interpretation bits (cap {})",
                theory.name(),
                b.map_or("too many".to_string(), |b| b.to_string()),
                self.max_interp_bits
            ))),
        }
    }
}

type ModelList = Arc<Vec<FiniteModel>>;

fn cache() -> &'static RwLock<HashMap<(String, usize), ModelList>> {
    static CACHE: OnceLock<RwLock<HashMap<(String, usize), ModelList>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Looks up a memoized model list (keyed by content hash and size).
pub(crate) fn cached_models(theory: &Theory, size: usize) -> Option<ModelList> {
    cache()
        .read()
        .expect("model cache poisoned")
        .get(&(theory.content_hash(), size))
        .cloned()
}

/// Publishes a model list computed elsewhere (the disk cache).
pub(crate) fn publish_models(theory: &Theory, size: usize, models: ModelList) {
    cache()
        .write()
        .expect("model cache poisoned")
        .insert((theory.content_hash(), size), models);
}

/// The size-`k` models of `theory` up to isomorphism: one canonical
/// representative per class, sorted by canonical form.
///
/// Results are memoized process-wide; the lists for equal-content theories
/// are shared.
pub fn enumerate_models(theory: &Theory, size: usize, policy: &Policy) -> Result<ModelList> {
    policy.admits(theory, size)?;
    if let Some(hit) = cached_models(theory, size) {
        return Ok(hit);
    }
    let models = Arc::new(enumerate_uncached(theory, size)?);
    publish_models(theory, size, models.clone());
    Ok(models)
}

/// [`enumerate_models`] without the memo: always enumerates, never publishes.
pub fn enumerate_models_uncached(theory: &Theory, size: usize, policy: &Policy) -> Result<Vec<FiniteModel>> {
    policy.admits(theory, size)?;
    enumerate_uncached(theory, size)
}

fn enumerate_uncached(theory: &Theory, size: usize) -> Result<Vec<FiniteModel>> {
    let bits = Policy::interp_bits(theory, size).expect("checked by admits");
    let axioms = theory
        .axioms()
        .iter()
        .map(|a| Evaluator::new(a, theory.lang()))
        .collect::<Result<Vec<_>>>()?;
    let lang = theory.lang().clone();
    let total: u64 = 1 << bits;
    let chunk = 1u64 << 10;
    let found: BTreeMap<CanonicalForm, FiniteModel> = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut local = BTreeMap::new();
            for code in c * chunk..((c + 1) * chunk).min(total) {
                let m = FiniteModel::from_code(lang.clone(), size, code);
                if axioms.iter().all(|a| a.is_true(&m)) {
                    let (form, label) = canonical_labeling(&m).expect("size checked");
                    local.entry(form).or_insert_with(|| m.permute(&label));
                }
            }
            local
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                a.entry(k).or_insert(v);
            }
            a
        });
    Ok(found.into_values().collect())
}

/// `I(T, k)`: the number of size-`k` models up to isomorphism.
pub fn spectrum(theory: &Theory, size: usize, policy: &Policy) -> Result<usize> {
    Ok(enumerate_models(theory, size, policy)?.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Language;

    #[test]
    fn pure_sets_have_one_model_per_size() {
        let l = Arc::new(Language::new("E", Vec::<(String, usize)>::new(), 2).unwrap());
        let t = Theory::empty("T", l);
        for k in 1..=5 {
            assert_eq!(spectrum(&t, k, &Policy::default()).unwrap(), 1);
        }
    }

    #[test]
    fn unary_predicate_on_two_points() {
        let l = Arc::new(Language::new("U", [("P", 1)], 1).unwrap());
        assert_eq!(spectrum(&Theory::empty("T", l), 2, &Policy::default()).unwrap(), 3);
    }

    #[test]
    fn sentential_counts_are_valuations() {
        let l = Arc::new(Language::sentential("S", ["P1", "P2", "P3"]).unwrap());
        assert_eq!(spectrum(&Theory::empty("T", l.clone()), 1, &Policy::default()).unwrap(), 8);
        let bot = Theory::parse("B", l, &["(and P1 (not P1))"]).unwrap();
        assert_eq!(spectrum(&bot, 2, &Policy::default()).unwrap(), 0);
    }

    #[test]
    fn caps_are_enforced() {
        let l = Arc::new(Language::new("L", [("R", 3)], 3).unwrap());
        let t = Theory::empty("T", l);
        let err = enumerate_models(&t, 3, &Policy::default()).unwrap_err();
        assert!(err.is_cap());
        assert!(enumerate_models(&t, 0, &Policy::default()).is_err());
    }
}
