//! Cluster networks and the distances they induce.

mod amalgam;
mod class;
mod graph;
mod lower;
mod sentential;

pub use amalgam::{axiom_add_matrix, check_amalgamation, classify_ad, AdClass, AmalgamationReport, Pattern};
pub use class::{StepKind, TheoryClass};
pub use graph::{
    ClusterNetwork, DistanceResult, DistanceStatus, Edge, EdgeLabel, EdgeStatus, ExtNat, LowerBound, Mode,
    PathWitness,
};
pub use lower::{lower_bound_certificates, LowerBounds};
pub use sentential::{sentential_cd_solve, SententialCd};
