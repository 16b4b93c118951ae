//! Finite-model semantics: evaluation, enumeration up to isomorphism,
//! spectra, and bounded consequence.

mod canon;
mod consequence;
mod enumerate;
mod eval;
mod model;
mod profile;
mod sentential;
mod theory;

pub use canon::{canonical_form, canonical_labeling, canonical_model, CanonicalForm, CANON_SIZE_CAP};
pub use consequence::{
    bounded_consequence, conservative_extension, logically_equivalent, Consequence, Conservativity,
    Equivalence, Exactness, Witness,
};
pub use enumerate::{enumerate_models, enumerate_models_uncached, spectrum, Policy};
pub(crate) use enumerate::{cached_models, publish_models};
pub use eval::{eval, is_true, Evaluator};
pub use model::FiniteModel;
pub(crate) use model::{get_bit, set_bit};
pub use profile::{semantic_profile, SemanticProfile};
pub use sentential::{characteristic, parse_valuation, valuation_string, SatSet, MAX_CONSTANTS};
pub(crate) use sentential::require_sentential;
pub use theory::Theory;
