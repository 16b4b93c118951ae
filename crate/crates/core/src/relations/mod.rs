//! One-step relations between theories, as checkable edge certificates.

mod certificate;
mod checks;

pub use certificate::{CertKind, Direction, EdgeCertificate, Refutation, Status};
pub use checks::{
    axiom_add_exists, check_axiom_add, check_concept_add, check_concept_remove, check_concept_step,
    check_theorem_remove, collapse_concepts, concept_removal_sets, concept_removals, growth_checks,
    sentential_theory, theorem_removal_sets, theorem_removals, verify_certificate, AxiomAddExists,
    GrowthCheck,
};
