//! Concepts: conceptual size, definable-relation closures, and
//! interpretation / definitional-equivalence checking.

mod closure;
mod cz;
mod interpret;

pub use closure::{atom_count, concept_closure, ConceptClosure, Generation, MAX_CONCEPTS, MAX_POINTS};
pub use cz::{cz_lower_bound, cz_of_model, cz_sentential, CzMethod, CzValue, MAX_CLASSES};
pub use interpret::{
    battery, check_defeq, check_interpretation, sentential_defeq_witness, DefEqCheck, Failure,
    InterpVerdict, InterpretationCheck,
};
