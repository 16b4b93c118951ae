//! Languages, formulas, the concrete syntax, and translations.

mod formula;
mod generators;
mod language;
mod parse;
mod translation;

pub use formula::{Formula, Interner, Symbol};
pub use generators::{make_pairing, make_psi_n, Pairing};
pub use language::Language;
pub use parse::{formula_from_sexpr, parse_formula, parse_formula_at};
pub use translation::Translation;
