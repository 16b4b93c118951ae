//! Distances between logical theories over finite fragments.
//!
//! Theories live in sentential logic or in first-order logic with finitely
//! many variables, evaluated on small finite models. On top of the
//! semantics sit the concept machinery (conceptual size, definable-relation
//! closures, interpretations), the one-step relations between theories as
//! checkable certificates, and cluster networks whose shortest paths give
//! axiomatic, conceptual and related distances.

pub mod concepts;
pub mod error;
pub mod network;
pub mod relations;
pub mod semantics;
pub mod sexpr;
pub mod syntax;
pub mod workbench;

pub use error::{Error, Result};
pub use network::{ClusterNetwork, DistanceResult, DistanceStatus, ExtNat, Mode, PathWitness, TheoryClass};
pub use relations::{CertKind, EdgeCertificate, Status};
pub use semantics::{
    enumerate_models, spectrum, Exactness, FiniteModel, Policy, SatSet, Theory, Witness,
};
pub use syntax::{parse_formula, Formula, Language, Translation};
pub use workbench::Catalog;
