//! Catalog files, certificate verification, the on-disk model cache and
//! the built-in regression suite.

mod cache;
mod catalog;
mod suite;
mod verify;

pub use cache::{DiskCache, CACHE_ENV, CACHE_VERSION};
pub use catalog::{load_catalog, Catalog, EquivKind, NetworkDecl, PAPER_EXAMPLES};
pub use suite::{random_network, run_criterion, run_paper_suite, two_constant_universe, CriterionResult, SuiteReport, CRITERIA};
pub use verify::{verify_all, verify_each, VerifyEntry, VerifyReport};
