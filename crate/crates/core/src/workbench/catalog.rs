use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Pos, Result};
use crate::network::{ClusterNetwork, DistanceResult, Mode, StepKind, TheoryClass};
use crate::relations::{CertKind, EdgeCertificate};
use crate::semantics::{parse_valuation, Policy, Theory};
use crate::sexpr::{read_all, SExpr};
use crate::syntax::{parse_formula_at, Formula, Language, Translation};

/// The shipped example catalog.
pub const PAPER_EXAMPLES: &str = include_str!("../../catalogs/paper_examples.cat");

/// Which relation a network treats as a 0-cost move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquivKind {
    Logical,
    DefEq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkDecl {
    pub name: String,
    pub equiv: EquivKind,
    pub step: StepKind,
    pub mode: Mode,
    pub nodes: Vec<String>,
}

impl NetworkDecl {
    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "equiv": match self.equiv { EquivKind::Logical => "logical", EquivKind::DefEq => "defeq" },
            "step": match self.step {
                StepKind::Axiom => "axiom",
                StepKind::Concept => "concept",
                StepKind::Faithful => "faithful",
            },
            "mode": match self.mode { Mode::Symmetric => "symmetric", Mode::Directed => "directed" },
            "nodes": self.nodes,
        })
    }
}

/// A resolved, validated catalog: the class of theories with everything
/// declared about it.
#[derive(Debug, Clone)]
pub struct Catalog {
    pub policy: Policy,
    pub languages: Vec<Arc<Language>>,
    pub theories: Vec<Theory>,
    pub certificates: Vec<EdgeCertificate>,
    pub networks: Vec<NetworkDecl>,
}

pub fn load_catalog(path: impl AsRef<Path>) -> Result<Catalog> {
    Catalog::parse(&std::fs::read_to_string(path)?)
}

fn err(pos: Pos, msg: impl Into<String>) -> Error {
    Error::Catalog { pos, msg: msg.into() }
}

/// One declaration split into its head, an optional name, positional
/// arguments and `:key value…` groups.
struct Form<'a> {
    head: &'a str,
    pos: Pos,
    positional: Vec<&'a SExpr>,
    keys: BTreeMap<&'a str, (Pos, Vec<&'a SExpr>)>,
}

impl<'a> Form<'a> {
    fn split(expr: &'a SExpr) -> Result<Form<'a>> {
        let SExpr::List(items, pos) = expr else {
            return Err(err(expr.pos(), "expected a parenthesized declaration"));
        };
        let head = items
            .first()
            .and_then(SExpr::as_word)
            .ok_or_else(|| err(*pos, "declaration needs a head word"))?;
        let mut positional = Vec::new();
        let mut keys: BTreeMap<&str, (Pos, Vec<&SExpr>)> = BTreeMap::new();
        let mut current: Option<&str> = None;
        for item in &items[1..] {
            match item.as_word().and_then(|w| w.strip_prefix(':')) {
                Some(key) => {
                    if keys.insert(key, (item.pos(), Vec::new())).is_some() {
                        return Err(err(item.pos(), format!("`:{key}` given twice")));
                    }
                    current = Some(key);
                }
                None => match current {
                    Some(key) => keys.get_mut(key).expect("inserted").1.push(item),
                    None => positional.push(item),
                },
            }
        }
        Ok(Form {
            head,
            pos: *pos,
            positional,
            keys,
        })
    }

    fn allow(&self, allowed: &[&str]) -> Result<()> {
        match self.keys.iter().find(|(k, _)| !allowed.contains(k)) {
            Some((k, (pos, _))) => Err(err(*pos, format!("`{}` does not take `:{k}`", self.head))),
            None => Ok(()),
        }
    }

    fn name(&self) -> Result<&'a str> {
        self.positional
            .first()
            .and_then(|e| e.as_word())
            .ok_or_else(|| err(self.pos, format!("`{}` needs a name", self.head)))
    }

    fn values(&self, key: &str) -> Option<&(Pos, Vec<&'a SExpr>)> {
        self.keys.get(key)
    }

    fn single(&self, key: &str) -> Result<Option<&'a SExpr>> {
        match self.keys.get(key) {
            None => Ok(None),
            Some((_, vs)) if vs.len() == 1 => Ok(Some(vs[0])),
            Some((pos, _)) => Err(err(*pos, format!("`:{key}` takes exactly one value"))),
        }
    }

    fn required(&self, key: &str) -> Result<&'a SExpr> {
        self.single(key)?
            .ok_or_else(|| err(self.pos, format!("`{}` needs `:{key}`", self.head)))
    }

    fn word(&self, key: &str) -> Result<Option<&'a str>> {
        self.single(key)?
            .map(|e| e.as_word().ok_or_else(|| err(e.pos(), format!("`:{key}` takes a word"))))
            .transpose()
    }

    fn number(&self, key: &str) -> Result<Option<usize>> {
        self.word(key)?
            .map(|w| {
                w.parse()
                    .map_err(|_| err(self.keys[key].0, format!("`:{key}` takes a number, not `{w}`")))
            })
            .transpose()
    }
}

fn string(e: &SExpr) -> Result<(&str, Pos)> {
    match e {
        SExpr::Str(s, pos) => Ok((s, Pos { line: pos.line, col: pos.col + 1 })),
        other => Err(err(other.pos(), "expected a double-quoted string")),
    }
}

fn formula(e: &SExpr, lang: &Language) -> Result<Formula> {
    let (text, origin) = string(e)?;
    parse_formula_at(text, lang, origin)
}

struct Builder {
    policy: Policy,
    languages: Vec<Arc<Language>>,
    theories: Vec<Theory>,
    certificates: Vec<EdgeCertificate>,
    networks: Vec<NetworkDecl>,
}

impl Builder {
    fn language(&self, name: &str, pos: Pos) -> Result<&Arc<Language>> {
        self.languages
            .iter()
            .find(|l| l.name() == name)
            .ok_or_else(|| Error::Dangling(format!("language `{name}` at {pos}")))
    }

    fn theory(&self, name: &str, pos: Pos) -> Result<&Theory> {
        self.theories
            .iter()
            .find(|t| t.name() == name)
            .ok_or_else(|| Error::Dangling(format!("theory `{name}` at {pos}")))
    }

    fn policy(form: &Form) -> Result<Policy> {
        form.allow(&["size-cap", "rank-cap", "var-cap", "max-bits", "bound"])?;
        let d = Policy::default();
        let p = Policy {
            size_cap: form.number("size-cap")?.unwrap_or(d.size_cap),
            rank_cap: form.number("rank-cap")?.unwrap_or(d.rank_cap),
            var_cap: form.number("var-cap")?.unwrap_or(d.var_cap),
            max_interp_bits: form.number("max-bits")?.unwrap_or(d.max_interp_bits),
            bound: form.number("bound")?.unwrap_or(d.bound),
        };
        if p.bound == 0 || p.bound > p.size_cap {
            return Err(err(form.pos, format!("bound {} must lie in 1..={}", p.bound, p.size_cap)));
        }
        if p.max_interp_bits > 40 {
            return Err(err(form.pos, "max-bits above 40 is not supported"));
        }
        Ok(p)
    }

    fn add_language(&mut self, form: &Form) -> Result<()> {
        form.allow(&["vars"])?;
        let name = form.name()?;
        let mut symbols = Vec::new();
        for item in &form.positional[1..] {
            let parts = match item {
                SExpr::List(parts, _) if parts.len() == 2 => parts,
                other => return Err(err(other.pos(), "symbols are written `(Name rank)`")),
            };
            let sym = parts[0]
                .as_word()
                .ok_or_else(|| err(parts[0].pos(), "symbol name must be a word"))?;
            let rank: usize = parts[1]
                .as_word()
                .and_then(|w| w.parse().ok())
                .ok_or_else(|| err(parts[1].pos(), "symbol rank must be a number"))?;
            if rank > self.policy.rank_cap {
                return Err(err(
                    item.pos(),
                    format!("policy violation: `{sym}` has rank {rank}, cap {}", self.policy.rank_cap),
                ));
            }
            symbols.push((sym.to_string(), rank));
        }
        let vars = match form.number("vars")? {
            Some(v) => v,
            None if symbols.iter().all(|(_, r)| *r == 0) => 0,
            None => return Err(err(form.pos, format!("language `{name}` has relation symbols and needs `:vars`"))),
        };
        if vars > self.policy.var_cap {
            return Err(err(
                form.pos,
                format!("policy violation: `{name}` uses {vars} variables, cap {}", self.policy.var_cap),
            ));
        }
        if self.languages.iter().any(|l| l.name() == name) {
            return Err(err(form.pos, format!("language `{name}` declared twice")));
        }
        let lang = Language::new(name, symbols, vars).map_err(|e| err(form.pos, e.to_string()))?;
        self.languages.push(Arc::new(lang));
        Ok(())
    }

    fn add_theory(&mut self, form: &Form) -> Result<()> {
        form.allow(&["over", "axioms"])?;
        let name = form.name()?;
        if form.positional.len() > 1 {
            return Err(err(form.positional[1].pos(), "unexpected value; axioms follow `:axioms`"));
        }
        let over = form.required("over")?;
        let lang_name = over.as_word().ok_or_else(|| err(over.pos(), "`:over` takes a language name"))?;
        let lang = self.language(lang_name, over.pos())?.clone();
        let axioms = match form.values("axioms") {
            Some((_, vs)) => vs.iter().map(|e| formula(e, &lang)).collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        if self.theories.iter().any(|t| t.name() == name) {
            return Err(err(form.pos, format!("theory `{name}` declared twice")));
        }
        self.theories.push(Theory::new(name, lang, axioms)?);
        Ok(())
    }

    fn translation(&self, e: &SExpr, source: &Arc<Language>, target: &Arc<Language>) -> Result<Translation> {
        let SExpr::List(pairs, pos) = e else {
            return Err(err(e.pos(), "translations are written `((symbol \"formula\") …)`"));
        };
        let mut basic = BTreeMap::new();
        for pair in pairs {
            let parts = match pair {
                SExpr::List(parts, _) if parts.len() == 2 => parts,
                other => return Err(err(other.pos(), "expected `(symbol \"formula\")`")),
            };
            let sym = parts[0]
                .as_word()
                .ok_or_else(|| err(parts[0].pos(), "expected a symbol name"))?;
            if source.rank(sym).is_none() {
                return Err(err(parts[0].pos(), format!("`{sym}` is not a symbol of {}", source.name())));
            }
            basic.insert(sym.to_string(), formula(&parts[1], target)?);
        }
        Translation::new(source.clone(), target.clone(), basic).map_err(|e| err(*pos, e.to_string()))
    }

    fn add_certificate(&mut self, form: &Form) -> Result<()> {
        form.allow(&[
            "kind", "from", "to", "status", "axiom", "formula", "extra", "phi", "psi", "symbol", "tr12", "tr21", "tr",
        ])?;
        let end = |key: &str| -> Result<&Theory> {
            let e = form.required(key)?;
            let name = e.as_word().ok_or_else(|| err(e.pos(), format!("`:{key}` takes a theory name")))?;
            self.theory(name, e.pos())
        };
        let (from, to) = (end("from")?, end("to")?);
        let kind_word = form
            .word("kind")?
            .ok_or_else(|| err(form.pos, "`certificate` needs `:kind`"))?;
        let in_from = |key: &str| formula(form.required(key)?, from.lang());
        let extra = || -> Result<Option<u64>> {
            form.single("extra")?
                .map(|e| {
                    let (text, pos) = string(e)?;
                    parse_valuation(text)
                        .filter(|_| text.len() == from.lang().symbol_count())
                        .ok_or_else(|| {
                            err(pos, format!("`{text}` is not a valuation of the {} constants of {}",
                                from.lang().symbol_count(), from.lang().name()))
                        })
                })
                .transpose()
        };
        let kind = match kind_word {
            "equiv" => CertKind::Equiv,
            "defeq" => CertKind::DefEq {
                tr12: self.translation(form.required("tr12")?, from.lang(), to.lang())?,
                tr21: self.translation(form.required("tr21")?, to.lang(), from.lang())?,
            },
            "axiom-add" => CertKind::AxiomAdd { axiom: in_from("axiom")? },
            "concept-add" => CertKind::ConceptAdd {
                symbol: form.word("symbol")?.map(str::to_string),
            },
            "concept-remove" => CertKind::ConceptRemove {
                formula: in_from("formula")?,
                extra: extra()?,
            },
            "theorem-remove" => CertKind::TheoremRemove {
                formula: in_from("formula")?,
                extra: extra()?,
            },
            "collapse" => CertKind::Collapse {
                phi: in_from("phi")?,
                psi: in_from("psi")?,
            },
            "faithful" => CertKind::FaithfulInterp {
                tr: self.translation(form.required("tr")?, from.lang(), to.lang())?,
            },
            other => return Err(err(form.keys["kind"].0, format!("unknown certificate kind `{other}`"))),
        };
        let mut cert = EdgeCertificate::new(kind, from.name(), to.name());
        match form.word("status")? {
            None | Some("declared") => {}
            Some("asserted") => cert = cert.asserted(),
            Some(other) => {
                return Err(err(
                    form.keys["status"].0,
                    format!("status is `declared` or `asserted`, not `{other}`"),
                ))
            }
        }
        self.certificates.push(cert);
        Ok(())
    }

    fn add_network(&mut self, form: &Form) -> Result<()> {
        form.allow(&["equiv", "step", "mode", "nodes"])?;
        let name = form.name()?;
        let choice = |key: &str, default: Option<&'static str>| -> Result<&str> {
            match (form.word(key)?, default) {
                (Some(w), _) => Ok(w),
                (None, Some(d)) => Ok(d),
                (None, None) => Err(err(form.pos, format!("`network` needs `:{key}`"))),
            }
        };
        let key_pos = |key: &str| form.keys.get(key).map_or(form.pos, |k| k.0);
        let step = match choice("step", None)? {
            "axiom" => StepKind::Axiom,
            "concept" => StepKind::Concept,
            "faithful" => StepKind::Faithful,
            other => return Err(err(key_pos("step"), format!("unknown step relation `{other}`"))),
        };
        let equiv = match choice("equiv", Some(if step == StepKind::Concept { "defeq" } else { "logical" }))? {
            "logical" => EquivKind::Logical,
            "defeq" => EquivKind::DefEq,
            other => return Err(err(key_pos("equiv"), format!("unknown equivalence `{other}`"))),
        };
        if (step == StepKind::Concept) != (equiv == EquivKind::DefEq) {
            return Err(err(
                key_pos("equiv"),
                "concept steps pair with defeq; axiom and faithful steps pair with logical",
            ));
        }
        let mode = match choice("mode", Some("symmetric"))? {
            "symmetric" => Mode::Symmetric,
            "directed" => Mode::Directed,
            other => return Err(err(key_pos("mode"), format!("unknown mode `{other}`"))),
        };
        if step == StepKind::Faithful && mode == Mode::Directed {
            return Err(err(key_pos("mode"), "faithful-interpretation networks are symmetric"));
        }
        let mut nodes = Vec::new();
        let mut seen = BTreeSet::new();
        for e in form.values("nodes").map(|v| v.1.as_slice()).unwrap_or_default() {
            let n = e.as_word().ok_or_else(|| err(e.pos(), "nodes are theory names"))?;
            self.theory(n, e.pos())?;
            if seen.insert(n) {
                nodes.push(n.to_string());
            }
        }
        if self.networks.iter().any(|n| n.name == name) {
            return Err(err(form.pos, format!("network `{name}` declared twice")));
        }
        self.networks.push(NetworkDecl {
            name: name.to_string(),
            equiv,
            step,
            mode,
            nodes,
        });
        Ok(())
    }
}

impl Catalog {
    pub fn parse(text: &str) -> Result<Catalog> {
        let exprs = read_all(text)?;
        let forms = exprs.iter().map(Form::split).collect::<Result<Vec<_>>>()?;
        let mut policies = forms.iter().filter(|f| f.head == "policy");
        let policy = match policies.next() {
            Some(f) => Builder::policy(f)?,
            None => Policy::default(),
        };
        if let Some(f) = policies.next() {
            return Err(err(f.pos, "only one `policy` declaration is allowed"));
        }
        let mut b = Builder {
            policy,
            languages: Vec::new(),
            theories: Vec::new(),
            certificates: Vec::new(),
            networks: Vec::new(),
        };
        // languages and theories first so later forms may refer to them
        // regardless of order
        for pass in 0..3 {
            for f in &forms {
                match (pass, f.head) {
                    (0, "language") => b.add_language(f)?,
                    (1, "theory") => b.add_theory(f)?,
                    (2, "certificate") => b.add_certificate(f)?,
                    (2, "network") => b.add_network(f)?,
                    (_, "policy" | "language" | "theory" | "certificate" | "network") => {}
                    (_, other) => return Err(err(f.pos, format!("unknown declaration `{other}`"))),
                }
            }
        }
        Ok(Catalog {
            policy: b.policy,
            languages: b.languages,
            theories: b.theories,
            certificates: b.certificates,
            networks: b.networks,
        })
    }

    /// The shipped example catalog.
    pub fn paper_examples() -> Catalog {
        Catalog::parse(PAPER_EXAMPLES).expect("shipped catalog parses")
    }

    pub fn theory(&self, name: &str) -> Result<&Theory> {
        self.theories
            .iter()
            .find(|t| t.name() == name)
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn network(&self, name: &str) -> Result<&NetworkDecl> {
        self.networks
            .iter()
            .find(|n| n.name == name)
            .ok_or_else(|| Error::Dangling(format!("network `{name}`")))
    }

    /// Every theory and certificate, with statuses as they stand.
    pub fn class(&self) -> Result<TheoryClass> {
        TheoryClass::new(
            self.theories.clone(),
            self.certificates.clone(),
            self.policy.bound,
            self.policy,
        )
    }

    /// The class of a declared network, with its certificates verified.
    pub fn network_class(&self, name: &str) -> Result<TheoryClass> {
        let decl = self.network(name)?;
        let mut class = self.class()?.restrict(&decl.nodes)?;
        let statuses = super::verify::verify_each(&class.certificates, &class, class.bound, &class.policy);
        for (c, s) in class.certificates.iter_mut().zip(statuses) {
            c.status = s?;
        }
        Ok(class)
    }

    /// The cluster network a declaration describes, in `mode` (or its
    /// declared mode when `None`).
    pub fn build_network(&self, name: &str, mode: Option<Mode>) -> Result<ClusterNetwork> {
        let decl = self.network(name)?;
        let class = self.network_class(name)?;
        let mut net = class.network(decl.step, mode.unwrap_or(decl.mode))?;
        net.name = decl.name.clone();
        Ok(net)
    }

    /// The step distance on a declared network. Directed networks (or
    /// `directed`) use the directed variant.
    pub fn distance(&self, net: &str, a: &str, b: &str, directed: bool) -> Result<DistanceResult> {
        let decl = self.network(net)?;
        for n in [a, b] {
            if !decl.nodes.iter().any(|x| x == n) {
                return Err(Error::UnknownNode(format!("{n} (not in network {net})")));
            }
        }
        let class = self.network_class(net)?;
        let directed = directed || decl.mode == Mode::Directed;
        match (decl.step, directed) {
            (StepKind::Axiom, false) => class.axiomatic_distance(a, b),
            (StepKind::Axiom, true) => class.directed_axiomatic_distance(a, b),
            (StepKind::Concept, false) => class.conceptual_distance(a, b),
            (StepKind::Concept, true) => class.bidirected_conceptual_distance(a, b),
            (StepKind::Faithful, false) => class.faithful_interpretation_distance(a, b),
            (StepKind::Faithful, true) => Err(Error::Precondition(
                "faithful-interpretation networks are symmetric".into(),
            )),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "policy": self.policy,
            "languages": self.languages.iter().map(|l| l.name()).collect::<Vec<_>>(),
            "theories": self.theories.iter().map(|t| json!({
                "name": t.name(),
                "language": t.lang().name(),
                "axioms": t.axioms().iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "certificates": self.certificates.iter().map(EdgeCertificate::to_json).collect::<Vec<_>>(),
            "networks": self.networks.iter().map(NetworkDecl::to_json).collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::Status;

    #[test]
    fn shipped_catalog_loads() {
        let c = Catalog::paper_examples();
        assert!(c.theories.len() >= 12);
        for t in ["T0star", "T4star", "TP", "TE", "PQbot"] {
            c.theory(t).unwrap();
        }
        assert!(c.certificates.iter().all(|x| matches!(x.status, Status::Declared | Status::Asserted)));
    }

    #[test]
    fn empty_catalog_is_valid() {
        let c = Catalog::parse("; nothing here\n").unwrap();
        assert!(c.theories.is_empty() && c.networks.is_empty());
        assert_eq!(c.policy, Policy::default());
    }

    #[test]
    fn unknown_language_is_named() {
        let e = Catalog::parse("(theory T :over Nowhere)").unwrap_err();
        assert!(e.to_string().contains("Nowhere"), "{e}");
    }

    #[test]
    fn formula_errors_point_into_the_file() {
        let e = Catalog::parse("(language L (P 0))\n(theory T :over L :axioms \"(and P Q)\")").unwrap_err();
        match e {
            Error::UnknownSymbol { name, pos } => {
                assert_eq!(name, "Q");
                assert_eq!(pos.line, 2);
                assert_eq!(pos.col, 35);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn policy_violations_are_rejected() {
        let e = Catalog::parse("(policy :var-cap 2)\n(language L (R 2) :vars 3)").unwrap_err();
        assert!(e.to_string().contains("policy violation"), "{e}");
        let e = Catalog::parse("(language L (R 4) :vars 3)").unwrap_err();
        assert!(e.to_string().contains("rank 4"), "{e}");
    }

    #[test]
    fn mismatched_network_relations_are_rejected() {
        let e = Catalog::parse("(network N :equiv logical :step concept)").unwrap_err();
        assert!(matches!(e, Error::Catalog { .. }), "{e}");
    }
}
