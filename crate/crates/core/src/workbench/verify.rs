use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::{json, Value};

use super::cache::DiskCache;
use super::catalog::Catalog;
use crate::error::Result;
use crate::network::TheoryClass;
use crate::relations::{verify_certificate, EdgeCertificate, Status};
use crate::semantics::Policy;

/// Verifies each certificate against its endpoints in `class`, in parallel.
pub fn verify_each(certs: &[EdgeCertificate], class: &TheoryClass, bound: usize, policy: &Policy) -> Vec<Result<Status>> {
    certs
        .par_iter()
        .map(|c| verify_certificate(c, class.theory(&c.from)?, class.theory(&c.to)?, bound, policy))
        .collect()
}

#[derive(Debug, Clone)]
pub struct VerifyEntry {
    /// The certificate with its verified status.
    pub certificate: EdgeCertificate,
    /// Set when the checker could not run (cap exceeded, bad precondition).
    pub error: Option<String>,
}

impl VerifyEntry {
    fn group(&self) -> String {
        match (&self.error, &self.certificate.status) {
            (Some(_), _) => "error".into(),
            (None, Status::Refuted(_)) => "refuted".into(),
            (None, s) => s.to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub bound: usize,
    pub entries: Vec<VerifyEntry>,
}

impl VerifyReport {
    pub fn has_refuted(&self) -> bool {
        self.entries.iter().any(|e| e.certificate.status.is_refuted())
    }

    pub fn has_errors(&self) -> bool {
        self.entries.iter().any(|e| e.error.is_some())
    }

    /// Whether any checker stopped at a cap.
    pub fn hit_cap(&self) -> bool {
        self.entries
            .iter()
            .any(|e| e.error.as_deref().is_some_and(|m| m.starts_with("cap exceeded") || m.starts_with("variable budget")))
    }

    /// Certificate labels grouped by status, in a stable order.
    pub fn groups(&self) -> BTreeMap<String, Vec<String>> {
        let mut g: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for e in &self.entries {
            g.entry(e.group()).or_default().push(e.certificate.label());
        }
        g
    }

    pub fn to_json(&self) -> Value {
        json!({
            "bound": self.bound,
            "groups": self.groups(),
            "certificates": self.entries.iter().map(|e| {
                let mut v = e.certificate.to_json();
                if let Some(msg) = &e.error {
                    v["error"] = json!(msg);
                }
                v
            }).collect::<Vec<_>>(),
            "refuted": self.has_refuted(),
        })
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        for (group, labels) in self.groups() {
            out.push_str(&format!("{group} ({}):\n", labels.len()));
            for l in labels {
                out.push_str(&format!("  {l}\n"));
            }
        }
        for e in self.entries.iter().filter(|e| e.certificate.status.is_refuted() || e.error.is_some()) {
            let detail = match (&e.error, &e.certificate.status) {
                (Some(msg), _) => msg.clone(),
                (None, s) => s.to_string(),
            };
            out.push_str(&format!("{}: {detail}\n", e.certificate.label()));
        }
        out
    }
}

/// Verifies every certificate of the catalog at bound `bound`, warming the
/// disk cache first when one is configured.
pub fn verify_all(catalog: &Catalog, bound: usize) -> VerifyReport {
    let mut policy = catalog.policy;
    policy.bound = bound;
    if let Some(cache) = DiskCache::from_env() {
        // cache trouble only costs time; the checks enumerate on a miss
        let _ = cache.warm(&catalog.theories, bound, &policy);
    }
    let class = match catalog.class() {
        Ok(c) => c,
        Err(e) => {
            return VerifyReport {
                bound,
                entries: catalog
                    .certificates
                    .iter()
                    .map(|c| VerifyEntry {
                        certificate: c.clone(),
                        error: Some(e.to_string()),
                    })
                    .collect(),
            }
        }
    };
    let statuses = verify_each(&catalog.certificates, &class, bound, &policy);
    let entries = catalog
        .certificates
        .iter()
        .zip(statuses)
        .map(|(c, s)| {
            let mut certificate = c.clone();
            let error = match s {
                Ok(s) => {
                    certificate.status = s;
                    None
                }
                Err(e) => Some(e.to_string()),
            };
            VerifyEntry { certificate, error }
        })
        .collect();
    VerifyReport { bound, entries }
}
