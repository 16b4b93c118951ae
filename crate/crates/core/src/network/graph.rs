use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::ops::Add;

use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::relations::Status;

/// `ℕ ∪ {∞}` with saturating addition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtNat {
    Finite(u64),
    Infinity,
}

impl ExtNat {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtNat::Finite(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            ExtNat::Finite(n) => Some(n),
            ExtNat::Infinity => None,
        }
    }

    pub fn to_json(self) -> Value {
        match self {
            ExtNat::Finite(n) => json!(n),
            ExtNat::Infinity => json!("infinity"),
        }
    }
}

impl Add for ExtNat {
    type Output = ExtNat;

    fn add(self, rhs: ExtNat) -> ExtNat {
        match (self, rhs) {
            (ExtNat::Finite(a), ExtNat::Finite(b)) => a.checked_add(b).map_or(ExtNat::Infinity, ExtNat::Finite),
            _ => ExtNat::Infinity,
        }
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Finite(n) => write!(f, "{n}"),
            ExtNat::Infinity => write!(f, "∞"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Symmetric,
    Directed,
}

/// How much an edge can be trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeStatus {
    Exact,
    Bounded(usize),
    Asserted,
}

impl EdgeStatus {
    /// The edge status of a usable certificate status.
    pub fn of(status: &Status) -> Option<EdgeStatus> {
        match status {
            Status::VerifiedExact => Some(EdgeStatus::Exact),
            Status::VerifiedBounded(k) => Some(EdgeStatus::Bounded(*k)),
            Status::Asserted => Some(EdgeStatus::Asserted),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeLabel {
    pub kind: String,
    pub status: EdgeStatus,
    /// The certificate the edge comes from, if it was declared.
    pub certificate: Option<String>,
}

impl EdgeLabel {
    pub fn derived(kind: impl Into<String>, status: EdgeStatus) -> Self {
        EdgeLabel {
            kind: kind.into(),
            status,
            certificate: None,
        }
    }

    fn name(&self) -> String {
        self.certificate.clone().unwrap_or_else(|| self.kind.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub label: EdgeLabel,
}

/// A path `T₀ … T_m` with its bit sequence: `0` for an equivalence move,
/// `1` for a step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathWitness {
    pub nodes: Vec<String>,
    pub bits: Vec<u8>,
    pub edges: Vec<EdgeLabel>,
}

impl PathWitness {
    pub fn len(&self) -> u64 {
        self.bits.iter().map(|&b| b as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn to_json(&self) -> Value {
        let steps: Vec<Value> = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| {
                json!({
                    "from": self.nodes[i],
                    "to": self.nodes[i + 1],
                    "bit": self.bits[i],
                    "kind": e.kind,
                    "certificate": e.certificate,
                })
            })
            .collect();
        Value::Array(steps)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LowerBound {
    /// No path exists in the network.
    ExhaustedSearch,
    /// `I(T,k)` and `I(T′,k)` differ in being zero, so no finite chain of
    /// conservative extensions and equivalences connects the theories.
    SpectrumObstruction { size: usize, counts: (usize, usize) },
    /// Each step multiplies the size-`k` spectrum by at most `factor`, and
    /// the spectra differ by `ratio`; so at least `bound` steps are needed.
    GrowthCertificate {
        size: usize,
        factor: BigUint,
        ratio: (usize, usize),
        bound: u64,
    },
}

impl LowerBound {
    pub fn value(&self) -> ExtNat {
        match self {
            LowerBound::ExhaustedSearch | LowerBound::SpectrumObstruction { .. } => ExtNat::Infinity,
            LowerBound::GrowthCertificate { bound, .. } => ExtNat::Finite(*bound),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            LowerBound::ExhaustedSearch => json!({"kind": "exhausted-search"}),
            LowerBound::SpectrumObstruction { size, counts } => json!({
                "kind": "spectrum-obstruction",
                "size": size,
                "counts": [counts.0, counts.1],
            }),
            LowerBound::GrowthCertificate {
                size,
                factor,
                ratio,
                bound,
            } => json!({
                "kind": "growth-certificate",
                "size": size,
                "factor": factor.to_string(),
                "ratio": [ratio.0, ratio.1],
                "bound": bound,
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceStatus {
    Exact,
    /// Some edge on the path was only checked on models up to this size.
    Bounded(usize),
    /// The path uses asserted edges.
    Conditional,
}

impl fmt::Display for DistanceStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceStatus::Exact => write!(f, "exact"),
            DistanceStatus::Bounded(k) => write!(f, "bounded({k})"),
            DistanceStatus::Conditional => write!(f, "conditional"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceResult {
    pub value: ExtNat,
    pub witness: Option<PathWitness>,
    pub lower_bound: Option<LowerBound>,
    pub status: DistanceStatus,
    /// Asserted certificates the value depends on.
    pub asserted: Vec<String>,
}

impl DistanceResult {
    pub fn to_json(&self) -> Value {
        json!({
            "distance": self.value.to_json(),
            "status": self.status.to_string(),
            "witness": self.witness.as_ref().map_or(Value::Array(Vec::new()), PathWitness::to_json),
            "lower_bound": self.lower_bound.as_ref().map(LowerBound::to_json),
            "asserted": self.asserted,
        })
    }
}

/// A class of named nodes with 0-cost equivalence edges and 1-cost steps.
#[derive(Debug, Clone)]
pub struct ClusterNetwork {
    pub name: String,
    pub mode: Mode,
    nodes: Vec<String>,
    index: HashMap<String, usize>,
    equiv: Vec<Edge>,
    steps: Vec<Edge>,
}

impl ClusterNetwork {
    pub fn new(name: impl Into<String>, nodes: impl IntoIterator<Item = impl Into<String>>, mode: Mode) -> Self {
        let nodes: Vec<String> = nodes.into_iter().map(Into::into).collect();
        let index = nodes.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        ClusterNetwork {
            name: name.into(),
            mode,
            nodes,
            index,
            equiv: Vec::new(),
            steps: Vec::new(),
        }
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn equiv_edges(&self) -> &[Edge] {
        &self.equiv
    }

    pub fn step_edges(&self) -> &[Edge] {
        &self.steps
    }

    pub fn node(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn add_equiv(&mut self, a: usize, b: usize, label: EdgeLabel) {
        self.equiv.push(Edge { from: a, to: b, label });
    }

    pub fn add_step(&mut self, a: usize, b: usize, label: EdgeLabel) {
        self.steps.push(Edge { from: a, to: b, label });
    }

    /// Outgoing moves as `(target, cost, edge)`. Equivalence edges are
    /// always traversable both ways; steps only forward in directed mode.
    fn adjacency(&self, allow_asserted: bool) -> Vec<Vec<(usize, u8, &Edge)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        let usable = |e: &Edge| allow_asserted || e.label.status != EdgeStatus::Asserted;
        for e in self.equiv.iter().filter(|e| usable(e)) {
            adj[e.from].push((e.to, 0, e));
            adj[e.to].push((e.from, 0, e));
        }
        for e in self.steps.iter().filter(|e| usable(e)) {
            adj[e.from].push((e.to, 1, e));
            if self.mode == Mode::Symmetric {
                adj[e.to].push((e.from, 1, e));
            }
        }
        adj
    }

    fn bfs(&self, a: usize, b: usize, allow_asserted: bool) -> Option<PathWitness> {
        let adj = self.adjacency(allow_asserted);
        let mut dist = vec![u64::MAX; self.nodes.len()];
        let mut parent: Vec<Option<(usize, u8, &Edge)>> = vec![None; self.nodes.len()];
        let mut deque = VecDeque::from([a]);
        dist[a] = 0;
        while let Some(u) = deque.pop_front() {
            for &(v, w, e) in &adj[u] {
                let d = dist[u] + w as u64;
                if d < dist[v] {
                    dist[v] = d;
                    parent[v] = Some((u, w, e));
                    if w == 0 {
                        deque.push_front(v);
                    } else {
                        deque.push_back(v);
                    }
                }
            }
        }
        if dist[b] == u64::MAX {
            return None;
        }
        let (mut nodes, mut bits, mut edges) = (vec![self.nodes[b].clone()], Vec::new(), Vec::new());
        let mut cur = b;
        while let Some((p, w, e)) = parent[cur] {
            nodes.push(self.nodes[p].clone());
            bits.push(w);
            edges.push(e.label.clone());
            cur = p;
        }
        nodes.reverse();
        bits.reverse();
        edges.reverse();
        Some(PathWitness { nodes, bits, edges })
    }

    /// The least number of steps on a path from `a` to `b`.
    ///
    /// A shortest path avoiding asserted edges is preferred; if asserted
    /// edges give a strictly shorter path, that one is returned and the
    /// result is conditional.
    pub fn step_distance(&self, a: &str, b: &str) -> Result<DistanceResult> {
        let (ia, ib) = (self.node(a)?, self.node(b)?);
        let trusted = self.bfs(ia, ib, false);
        let full = self.bfs(ia, ib, true);
        let witness = match (trusted, full) {
            (Some(t), Some(f)) if f.len() < t.len() => f,
            (Some(t), _) => t,
            (None, Some(f)) => f,
            (None, None) => {
                return Ok(DistanceResult {
                    value: ExtNat::Infinity,
                    witness: None,
                    lower_bound: Some(LowerBound::ExhaustedSearch),
                    status: DistanceStatus::Exact,
                    asserted: Vec::new(),
                })
            }
        };
        let mut asserted: Vec<String> = witness
            .edges
            .iter()
            .filter(|e| e.status == EdgeStatus::Asserted)
            .map(EdgeLabel::name)
            .collect();
        asserted.dedup();
        let bounded = witness
            .edges
            .iter()
            .filter_map(|e| match e.status {
                EdgeStatus::Bounded(k) => Some(k),
                _ => None,
            })
            .min();
        let status = if !asserted.is_empty() {
            DistanceStatus::Conditional
        } else if let Some(k) = bounded {
            DistanceStatus::Bounded(k)
        } else {
            DistanceStatus::Exact
        };
        Ok(DistanceResult {
            value: ExtNat::Finite(witness.len()),
            witness: Some(witness),
            lower_bound: None,
            status,
            asserted,
        })
    }

    /// Whether `w` is a path of this network whose bits match its edges.
    pub fn verify_witness(&self, w: &PathWitness) -> bool {
        if w.nodes.len() != w.bits.len() + 1 || w.edges.len() != w.bits.len() {
            return false;
        }
        w.bits.iter().enumerate().all(|(i, &bit)| {
            let (Ok(u), Ok(v)) = (self.node(&w.nodes[i]), self.node(&w.nodes[i + 1])) else {
                return false;
            };
            let edges = if bit == 0 { &self.equiv } else { &self.steps };
            edges.iter().any(|e| {
                e.label == w.edges[i]
                    && ((e.from == u && e.to == v)
                        || (e.from == v && e.to == u && (bit == 0 || self.mode == Mode::Symmetric)))
            })
        })
    }

    /// DOT rendering: equivalence edges dashed and undirected, steps solid
    /// and labeled by kind.
    pub fn to_dot(&self) -> String {
        let mut out = format!("digraph \"{}\" {{\n", self.name);
        for n in &self.nodes {
            out.push_str(&format!("  \"{n}\";\n"));
        }
        for e in &self.equiv {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\" [style=dashed, dir=none, label=\"{}\"];\n",
                self.nodes[e.from], self.nodes[e.to], e.label.kind
            ));
        }
        for e in &self.steps {
            let dir = if self.mode == Mode::Symmetric { ", dir=none" } else { "" };
            let style = if e.label.status == EdgeStatus::Asserted { "bold" } else { "solid" };
            out.push_str(&format!(
                "  \"{}\" -> \"{}\" [style={style}{dir}, label=\"{}\"];\n",
                self.nodes[e.from], self.nodes[e.to], e.label.kind
            ));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> Value {
        let edge = |e: &Edge| {
            json!({
                "from": self.nodes[e.from],
                "to": self.nodes[e.to],
                "kind": e.label.kind,
                "status": match e.label.status {
                    EdgeStatus::Exact => "exact".to_string(),
                    EdgeStatus::Bounded(k) => format!("bounded({k})"),
                    EdgeStatus::Asserted => "asserted".to_string(),
                },
                "certificate": e.label.certificate,
            })
        };
        json!({
            "name": self.name,
            "mode": match self.mode { Mode::Symmetric => "symmetric", Mode::Directed => "directed" },
            "nodes": self.nodes,
            "equiv": self.equiv.iter().map(edge).collect::<Vec<_>>(),
            "steps": self.steps.iter().map(edge).collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(kind: &str) -> EdgeLabel {
        EdgeLabel::derived(kind, EdgeStatus::Exact)
    }

    #[test]
    fn equivalence_then_step() {
        let mut n = ClusterNetwork::new("n", ["A", "B", "C"], Mode::Symmetric);
        n.add_equiv(0, 1, exact("eq"));
        n.add_step(1, 2, exact("s"));
        let d = n.step_distance("A", "C").unwrap();
        assert_eq!(d.value, ExtNat::Finite(1));
        assert_eq!(d.witness.as_ref().unwrap().bits, vec![0, 1]);
        assert!(n.verify_witness(d.witness.as_ref().unwrap()));
        assert_eq!(n.step_distance("C", "A").unwrap().value, ExtNat::Finite(1));
        assert!(n.step_distance("A", "Z").is_err());
    }

    #[test]
    fn discrete_distance() {
        let mut n = ClusterNetwork::new("n", ["A", "B", "C"], Mode::Symmetric);
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            n.add_step(a, b, exact("s"));
        }
        for a in ["A", "B", "C"] {
            for b in ["A", "B", "C"] {
                let d = n.step_distance(a, b).unwrap().value;
                assert_eq!(d, ExtNat::Finite((a != b) as u64));
            }
        }
    }

    #[test]
    fn directed_steps_one_way() {
        let mut n = ClusterNetwork::new("n", ["T", "Bot"], Mode::Directed);
        n.add_step(0, 1, exact("axiom-add"));
        assert_eq!(n.step_distance("T", "Bot").unwrap().value, ExtNat::Finite(1));
        let back = n.step_distance("Bot", "T").unwrap();
        assert_eq!(back.value, ExtNat::Infinity);
        assert_eq!(back.lower_bound, Some(LowerBound::ExhaustedSearch));
    }

    #[test]
    fn asserted_edges_taint_only_when_needed() {
        let mut n = ClusterNetwork::new("n", ["A", "B", "C"], Mode::Symmetric);
        n.add_step(0, 2, EdgeLabel::derived("s", EdgeStatus::Asserted));
        n.add_step(0, 1, exact("s"));
        n.add_step(1, 2, exact("s"));
        let d = n.step_distance("A", "C").unwrap();
        assert_eq!(d.value, ExtNat::Finite(1));
        assert_eq!(d.status, DistanceStatus::Conditional);
        let mut m = ClusterNetwork::new("m", ["A", "B"], Mode::Symmetric);
        m.add_step(0, 1, EdgeLabel::derived("s", EdgeStatus::Asserted));
        m.add_step(0, 1, exact("s"));
        assert_eq!(m.step_distance("A", "B").unwrap().status, DistanceStatus::Exact);
    }

    #[test]
    fn extnat_saturates() {
        assert_eq!(ExtNat::Finite(u64::MAX) + ExtNat::Finite(1), ExtNat::Infinity);
        assert!(ExtNat::Finite(7) < ExtNat::Infinity);
        assert_eq!(ExtNat::Finite(2) + ExtNat::Finite(3), ExtNat::Finite(5));
    }
}
