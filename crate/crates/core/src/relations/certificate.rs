use std::fmt;

use serde_json::{json, Value};

use crate::semantics::{Exactness, Witness};
use crate::syntax::{Formula, Translation};

/// What a certificate claims about its two endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertKind {
    /// `from ≡ to`.
    Equiv,
    /// `from ⇌ to`, witnessed by the two translations.
    DefEq { tr12: Translation, tr21: Translation },
    /// `from ← to`: `from ∪ {axiom} ≡ to`.
    AxiomAdd { axiom: Formula },
    /// `from ⤳ to`: one more symbol, conservatively. `symbol` is checked
    /// against the language difference when given.
    ConceptAdd { symbol: Option<String> },
    /// `from ⋗ to`, removing the concept `formula`. `extra` picks the
    /// valuation whose addition makes the subtheory maximal.
    ConceptRemove { formula: Formula, extra: Option<u64> },
    /// `to` is a maximal subtheory of `from` not proving `formula`.
    TheoremRemove { formula: Formula, extra: Option<u64> },
    /// `to ≡ from ∪ {phi ↔ psi}`.
    Collapse { phi: Formula, psi: Formula },
    /// `tr` is a faithful interpretation of `from` in `to`.
    FaithfulInterp { tr: Translation },
}

impl CertKind {
    pub fn tag(&self) -> &'static str {
        match self {
            CertKind::Equiv => "equiv",
            CertKind::DefEq { .. } => "defeq",
            CertKind::AxiomAdd { .. } => "axiom-add",
            CertKind::ConceptAdd { .. } => "concept-add",
            CertKind::ConceptRemove { .. } => "concept-remove",
            CertKind::TheoremRemove { .. } => "theorem-remove",
            CertKind::Collapse { .. } => "collapse",
            CertKind::FaithfulInterp { .. } => "faithful",
        }
    }

    pub fn direction(&self) -> Direction {
        match self {
            CertKind::Equiv | CertKind::DefEq { .. } => Direction::Symmetric,
            _ => Direction::Directed,
        }
    }

    /// Whether the kind relates equivalent theories (a 0-cost move).
    pub fn is_equivalence(&self) -> bool {
        matches!(self, CertKind::Equiv | CertKind::DefEq { .. })
    }

    fn details(&self) -> Value {
        let tr = |t: &Translation| {
            t.images()
                .map(|(s, f)| (s.to_string(), Value::String(f.to_string())))
                .collect::<serde_json::Map<_, _>>()
        };
        match self {
            CertKind::Equiv => json!({}),
            CertKind::DefEq { tr12, tr21 } => json!({"tr12": tr(tr12), "tr21": tr(tr21)}),
            CertKind::AxiomAdd { axiom } => json!({"axiom": axiom.to_string()}),
            CertKind::ConceptAdd { symbol } => json!({"symbol": symbol}),
            CertKind::ConceptRemove { formula, extra } | CertKind::TheoremRemove { formula, extra } => {
                json!({"formula": formula.to_string(), "extra": extra})
            }
            CertKind::Collapse { phi, psi } => json!({"phi": phi.to_string(), "psi": psi.to_string()}),
            CertKind::FaithfulInterp { tr: t } => json!({"tr": tr(t)}),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Directed,
    Symmetric,
}

/// Why a certificate failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refutation {
    pub reason: String,
    pub formula: Option<Formula>,
    pub witness: Option<Witness>,
}

impl Refutation {
    pub fn new(reason: impl Into<String>) -> Self {
        Refutation {
            reason: reason.into(),
            formula: None,
            witness: None,
        }
    }

    pub fn with_witness(mut self, w: Witness) -> Self {
        self.witness = Some(w);
        self
    }

    pub fn with_formula(mut self, f: Formula) -> Self {
        self.formula = Some(f);
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "reason": self.reason,
            "formula": self.formula.as_ref().map(|f| f.to_string()),
            "witness": self.witness.as_ref().map(Witness::to_json),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    /// Not yet looked at.
    Declared,
    VerifiedExact,
    VerifiedBounded(usize),
    /// Taken on trust; usable in distances, which then become conditional.
    Asserted,
    Refuted(Box<Refutation>),
}

impl Status {
    pub fn verified(e: Exactness) -> Status {
        match e {
            Exactness::Exact => Status::VerifiedExact,
            Exactness::Bounded(k) => Status::VerifiedBounded(k),
        }
    }

    pub fn refuted(r: Refutation) -> Status {
        Status::Refuted(Box::new(r))
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Status::Refuted(_))
    }

    pub fn is_verified(&self) -> bool {
        matches!(self, Status::VerifiedExact | Status::VerifiedBounded(_))
    }

    /// Whether a network may use the edge.
    pub fn is_usable(&self) -> bool {
        self.is_verified() || *self == Status::Asserted
    }

    pub fn exactness(&self) -> Option<Exactness> {
        match self {
            Status::VerifiedExact => Some(Exactness::Exact),
            Status::VerifiedBounded(k) => Some(Exactness::Bounded(*k)),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Status::Refuted(r) => json!({"refuted": r.to_json()}),
            s => json!(s.to_string()),
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Declared => write!(f, "declared"),
            Status::VerifiedExact => write!(f, "verified-exact"),
            Status::VerifiedBounded(k) => write!(f, "verified-bounded({k})"),
            Status::Asserted => write!(f, "asserted"),
            Status::Refuted(r) => write!(f, "refuted: {}", r.reason),
        }
    }
}

/// A claimed one-step relation between two named theories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeCertificate {
    pub kind: CertKind,
    pub from: String,
    pub to: String,
    pub status: Status,
}

impl EdgeCertificate {
    pub fn new(kind: CertKind, from: impl Into<String>, to: impl Into<String>) -> Self {
        EdgeCertificate {
            kind,
            from: from.into(),
            to: to.into(),
            status: Status::Declared,
        }
    }

    pub fn asserted(mut self) -> Self {
        self.status = Status::Asserted;
        self
    }

    pub fn direction(&self) -> Direction {
        self.kind.direction()
    }

    pub fn label(&self) -> String {
        format!("{} {} -> {}", self.kind.tag(), self.from, self.to)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind.tag(),
            "from": self.from,
            "to": self.to,
            "direction": match self.direction() {
                Direction::Directed => "directed",
                Direction::Symmetric => "symmetric",
            },
            "details": self.kind.details(),
            "status": self.status.to_json(),
        })
    }
}
