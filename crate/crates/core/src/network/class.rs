use std::collections::BTreeMap;

use super::graph::{ClusterNetwork, DistanceResult, EdgeLabel, EdgeStatus, Mode};
use super::lower::lower_bound_certificates;
use crate::concepts::sentential_defeq_witness;
use crate::error::{Error, Result};
use crate::relations::{axiom_add_exists, check_concept_add, AxiomAddExists, CertKind, EdgeCertificate, Status};
use crate::semantics::{logically_equivalent, Policy, SatSet, Theory};

/// A finite class of theories with the certificates declared between them.
#[derive(Debug, Clone)]
pub struct TheoryClass {
    theories: Vec<Theory>,
    index: BTreeMap<String, usize>,
    pub certificates: Vec<EdgeCertificate>,
    pub bound: usize,
    pub policy: Policy,
}

/// Which one-step relation a network uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// `−` (symmetric) or `←` (directed), with `≡` as equivalence.
    Axiom,
    /// `∼` (symmetric) or `⤳ ∪ ⋗` (directed), with `⇌` as equivalence.
    Concept,
    /// Faithful interpretations, with `≡` as equivalence.
    Faithful,
}

impl TheoryClass {
    pub fn new(theories: Vec<Theory>, certificates: Vec<EdgeCertificate>, bound: usize, policy: Policy) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (i, t) in theories.iter().enumerate() {
            if index.insert(t.name().to_string(), i).is_some() {
                return Err(Error::Precondition(format!("duplicate theory `{}`", t.name())));
            }
        }
        for c in &certificates {
            for end in [&c.from, &c.to] {
                if !index.contains_key(end) {
                    return Err(Error::Dangling(format!("certificate {} names `{end}`", c.label())));
                }
            }
        }
        Ok(TheoryClass {
            theories,
            index,
            certificates,
            bound,
            policy,
        })
    }

    pub fn theories(&self) -> &[Theory] {
        &self.theories
    }

    pub fn theory(&self, name: &str) -> Result<&Theory> {
        self.index
            .get(name)
            .map(|&i| &self.theories[i])
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    /// The subclass on `nodes`, keeping certificates between them.
    pub fn restrict(&self, nodes: &[String]) -> Result<TheoryClass> {
        let theories = nodes
            .iter()
            .map(|n| self.theory(n).cloned())
            .collect::<Result<Vec<_>>>()?;
        let certificates = self
            .certificates
            .iter()
            .filter(|c| nodes.contains(&c.from) && nodes.contains(&c.to))
            .cloned()
            .collect();
        TheoryClass::new(theories, certificates, self.bound, self.policy)
    }

    fn usable(&self) -> impl Iterator<Item = (&EdgeCertificate, EdgeStatus)> {
        self.certificates
            .iter()
            .filter_map(|c| EdgeStatus::of(&c.status).map(|s| (c, s)))
    }

    fn cert_label(c: &EdgeCertificate, status: EdgeStatus) -> EdgeLabel {
        EdgeLabel {
            kind: c.kind.tag().to_string(),
            status,
            certificate: Some(c.label()),
        }
    }

    fn sat_sets(&self) -> Result<Vec<Option<SatSet>>> {
        self.theories
            .iter()
            .map(|t| if t.is_sentential() { SatSet::of(t).map(Some) } else { Ok(None) })
            .collect()
    }

    /// `(X, ≡, −)`, or `(X, ≡, ←)` in directed mode. Sentential pairs over
    /// one language are related exactly from their `Sat` sets; first-order
    /// pairs by bounded checks; declared certificates are added on top.
    pub fn axiomatic_network(&self, mode: Mode) -> Result<ClusterNetwork> {
        let mut net = ClusterNetwork::new("axiomatic", self.theories.iter().map(|t| t.name()), mode);
        let sats = self.sat_sets()?;
        let n = self.theories.len();
        for i in 0..n {
            for j in 0..n {
                let (ti, tj) = (&self.theories[i], &self.theories[j]);
                if i == j || !ti.lang().same_signature(tj.lang()) {
                    continue;
                }
                if let (Some(si), Some(sj)) = (&sats[i], &sats[j]) {
                    if si == sj {
                        if i < j {
                            net.add_equiv(i, j, EdgeLabel::derived("equiv", EdgeStatus::Exact));
                        }
                    } else if sj.is_subset(si) {
                        net.add_step(i, j, EdgeLabel::derived("axiom-add", EdgeStatus::Exact));
                    }
                    continue;
                }
                let eq = if i < j {
                    logically_equivalent(ti, tj, self.bound, &self.policy)?
                } else {
                    logically_equivalent(tj, ti, self.bound, &self.policy)?
                };
                if let Some(e) = eq.exactness() {
                    if i < j {
                        net.add_equiv(i, j, EdgeLabel::derived("equiv", e.into()));
                    }
                    continue;
                }
                match axiom_add_exists(ti, tj, self.bound, &self.policy)? {
                    AxiomAddExists::Yes { .. } => {
                        net.add_step(i, j, EdgeLabel::derived("axiom-add", EdgeStatus::Exact))
                    }
                    AxiomAddExists::UnknownBounded { bound, .. } => {
                        net.add_step(i, j, EdgeLabel::derived("axiom-add", EdgeStatus::Bounded(bound)))
                    }
                    AxiomAddExists::No { .. } => {}
                }
            }
        }
        for (c, s) in self.usable() {
            let (a, b) = (net.node(&c.from)?, net.node(&c.to)?);
            match c.kind {
                CertKind::Equiv => net.add_equiv(a, b, Self::cert_label(c, s)),
                CertKind::AxiomAdd { .. } | CertKind::Collapse { .. } => net.add_step(a, b, Self::cert_label(c, s)),
                _ => {}
            }
        }
        Ok(net)
    }

    /// `(X, ⇌, ∼)`, or `(X, ⇌, ⤳ ∪ ⋗)` in directed mode. Sentential
    /// theories are related exactly: equal-size `Sat` sets by a verified
    /// definitional-equivalence witness, one-symbol extensions by the
    /// conservativity check. Everything else comes from certificates.
    pub fn conceptual_network(&self, mode: Mode) -> Result<ClusterNetwork> {
        let mut net = ClusterNetwork::new("conceptual", self.theories.iter().map(|t| t.name()), mode);
        let sats = self.sat_sets()?;
        let n = self.theories.len();
        for i in 0..n {
            for j in 0..n {
                let (Some(si), Some(sj)) = (&sats[i], &sats[j]) else {
                    continue;
                };
                let (ti, tj) = (&self.theories[i], &self.theories[j]);
                if i < j && si.len() == sj.len() {
                    // inconsistent theories are all definitionally equivalent
                    let related = if si.is_empty() {
                        true
                    } else {
                        sentential_defeq_witness(ti, tj)?.is_some()
                    };
                    if related {
                        net.add_equiv(i, j, EdgeLabel::derived("defeq", EdgeStatus::Exact));
                    }
                }
                if i != j
                    && tj.lang().includes(ti.lang())
                    && tj.lang().extra_symbols(ti.lang()).len() == 1
                    && check_concept_add(ti, tj, self.bound, &self.policy)? == Status::VerifiedExact
                {
                    net.add_step(i, j, EdgeLabel::derived("concept-add", EdgeStatus::Exact));
                }
            }
        }
        for (c, s) in self.usable() {
            let (a, b) = (net.node(&c.from)?, net.node(&c.to)?);
            match c.kind {
                CertKind::Equiv | CertKind::DefEq { .. } => net.add_equiv(a, b, Self::cert_label(c, s)),
                CertKind::ConceptAdd { .. } => net.add_step(a, b, Self::cert_label(c, s)),
                CertKind::ConceptRemove { .. } if mode == Mode::Directed => {
                    net.add_step(a, b, Self::cert_label(c, s))
                }
                _ => {}
            }
        }
        Ok(net)
    }

    /// `(X, ≡, 𝕀)`: faithful interpretations from certificates, with
    /// logical equivalence as the 0-cost relation.
    pub fn faithful_network(&self) -> Result<ClusterNetwork> {
        let mut net = ClusterNetwork::new("faithful", self.theories.iter().map(|t| t.name()), Mode::Symmetric);
        let sats = self.sat_sets()?;
        for i in 0..self.theories.len() {
            for j in i + 1..self.theories.len() {
                if let (Some(si), Some(sj)) = (&sats[i], &sats[j]) {
                    if si == sj && self.theories[i].lang().same_signature(self.theories[j].lang()) {
                        net.add_equiv(i, j, EdgeLabel::derived("equiv", EdgeStatus::Exact));
                    }
                }
            }
        }
        for (c, s) in self.usable() {
            let (a, b) = (net.node(&c.from)?, net.node(&c.to)?);
            match c.kind {
                CertKind::Equiv => net.add_equiv(a, b, Self::cert_label(c, s)),
                CertKind::FaithfulInterp { .. } => net.add_step(a, b, Self::cert_label(c, s)),
                _ => {}
            }
        }
        Ok(net)
    }

    pub fn network(&self, step: StepKind, mode: Mode) -> Result<ClusterNetwork> {
        match step {
            StepKind::Axiom => self.axiomatic_network(mode),
            StepKind::Concept => self.conceptual_network(mode),
            StepKind::Faithful if mode == Mode::Symmetric => self.faithful_network(),
            StepKind::Faithful => Err(Error::Precondition(
                "faithful-interpretation networks are symmetric".into(),
            )),
        }
    }

    /// `Ad(T, T′)`.
    pub fn axiomatic_distance(&self, a: &str, b: &str) -> Result<DistanceResult> {
        self.axiomatic_network(Mode::Symmetric)?.step_distance(a, b)
    }

    /// The directed step distance over `(X, ≡, ←)`.
    pub fn directed_axiomatic_distance(&self, a: &str, b: &str) -> Result<DistanceResult> {
        self.axiomatic_network(Mode::Directed)?.step_distance(a, b)
    }

    /// `Cd(T, T′)` within the class, with the strongest lower bound the
    /// spectra give.
    pub fn conceptual_distance(&self, a: &str, b: &str) -> Result<DistanceResult> {
        let mut r = self.conceptual_network(Mode::Symmetric)?.step_distance(a, b)?;
        self.attach_lower_bound(&mut r, a, b)?;
        Ok(r)
    }

    /// The directed step distance over `(X, ⇌, ⤳ ∪ ⋗)`.
    pub fn bidirected_conceptual_distance(&self, a: &str, b: &str) -> Result<DistanceResult> {
        self.conceptual_network(Mode::Directed)?.step_distance(a, b)
    }

    pub fn faithful_interpretation_distance(&self, a: &str, b: &str) -> Result<DistanceResult> {
        self.faithful_network()?.step_distance(a, b)
    }

    fn attach_lower_bound(&self, r: &mut DistanceResult, a: &str, b: &str) -> Result<()> {
        let (ta, tb) = (self.theory(a)?, self.theory(b)?);
        let bounds = lower_bound_certificates(ta, tb, self.bound.min(3), &self.policy)?;
        let better = if r.value.is_finite() {
            bounds.growth
        } else {
            bounds.obstruction
        };
        if better.is_some() {
            r.lower_bound = better;
        }
        Ok(())
    }
}

impl From<crate::semantics::Exactness> for EdgeStatus {
    fn from(e: crate::semantics::Exactness) -> Self {
        match e {
            crate::semantics::Exactness::Exact => EdgeStatus::Exact,
            crate::semantics::Exactness::Bounded(k) => EdgeStatus::Bounded(k),
        }
    }
}
