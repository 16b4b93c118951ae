use std::fmt;

use serde_json::{json, Value};

use super::class::TheoryClass;
use crate::error::{Error, Result};
use crate::relations::{axiom_add_exists, AxiomAddExists, CertKind};
use crate::semantics::SatSet;

/// `add[i][j]` holds when `T_i ← T_j`: one axiom turns `T_i` into `T_j`.
pub fn axiom_add_matrix(class: &TheoryClass) -> Result<Vec<Vec<bool>>> {
    let ts = class.theories();
    let n = ts.len();
    let sats = ts
        .iter()
        .map(|t| if t.is_sentential() { SatSet::of(t).map(Some) } else { Ok(None) })
        .collect::<Result<Vec<_>>>()?;
    let mut add = vec![vec![false; n]; n];
    let mut undecided = Vec::new();
    for i in 0..n {
        add[i][i] = true;
        for j in 0..n {
            if i == j || !ts[i].lang().same_signature(ts[j].lang()) {
                continue;
            }
            if let (Some(si), Some(sj)) = (&sats[i], &sats[j]) {
                add[i][j] = sj.is_subset(si);
                continue;
            }
            match axiom_add_exists(&ts[i], &ts[j], class.bound, &class.policy)? {
                AxiomAddExists::Yes { .. } => add[i][j] = true,
                AxiomAddExists::No { .. } => {}
                AxiomAddExists::UnknownBounded { .. } => undecided.push((i, j)),
            }
        }
    }
    let pos = |name: &str| ts.iter().position(|t| t.name() == name).expect("resolved");
    for c in class.certificates.iter().filter(|c| c.status.is_usable()) {
        let (a, b) = (pos(&c.from), pos(&c.to));
        match c.kind {
            CertKind::AxiomAdd { .. } | CertKind::Collapse { .. } => add[a][b] = true,
            CertKind::Equiv => {
                add[a][b] = true;
                add[b][a] = true;
            }
            _ => {}
        }
    }
    if let Some(&(i, j)) = undecided.iter().find(|&&(i, j)| !add[i][j]) {
        return Err(Error::Precondition(format!(
            "whether one axiom turns {} into {} is undecided beyond size {}",
            ts[i].name(),
            ts[j].name(),
            class.bound
        )));
    }
    Ok(add)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pattern {
    Holds,
    /// `t` with the two theories that have no common partner.
    Fails { t: String, t1: String, t2: String },
}

impl Pattern {
    pub fn holds(&self) -> bool {
        *self == Pattern::Holds
    }

    pub fn to_json(&self) -> Value {
        match self {
            Pattern::Holds => json!("holds"),
            Pattern::Fails { t, t1, t2 } => json!({"fails": {"t": t, "t1": t1, "t2": t2}}),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmalgamationReport {
    /// Any two one-axiom extensions of a theory have a common one-axiom extension.
    pub amalgamation: Pattern,
    /// Any two theories with a common one-axiom extension have a common
    /// theory they both extend by one axiom.
    pub co_amalgamation: Pattern,
    /// `←` relates only equivalent theories, so both properties hold trivially.
    pub vacuous: bool,
}

impl AmalgamationReport {
    pub fn either_holds(&self) -> bool {
        self.amalgamation.holds() || self.co_amalgamation.holds()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "amalgamation": self.amalgamation.to_json(),
            "co_amalgamation": self.co_amalgamation.to_json(),
            "vacuous": self.vacuous,
        })
    }
}

/// Exhaustive check of both properties over all triples of the class.
pub fn check_amalgamation(class: &TheoryClass) -> Result<AmalgamationReport> {
    let add = axiom_add_matrix(class)?;
    let n = add.len();
    let name = |i: usize| class.theories()[i].name().to_string();
    let find = |premise: &dyn Fn(usize, usize, usize) -> bool, partner: &dyn Fn(usize, usize, usize) -> bool| {
        for t in 0..n {
            for t1 in 0..n {
                for t2 in t1 + 1..n {
                    if premise(t, t1, t2) && !(0..n).any(|p| partner(p, t1, t2)) {
                        return Pattern::Fails {
                            t: name(t),
                            t1: name(t1),
                            t2: name(t2),
                        };
                    }
                }
            }
        }
        Pattern::Holds
    };
    let amalgamation = find(&|t, t1, t2| add[t][t1] && add[t][t2], &|p, t1, t2| add[t1][p] && add[t2][p]);
    let co_amalgamation = find(&|t, t1, t2| add[t1][t] && add[t2][t], &|p, t1, t2| add[p][t1] && add[p][t2]);
    let vacuous = (0..n).all(|i| (0..n).all(|j| !add[i][j] || add[j][i]));
    Ok(AmalgamationReport {
        amalgamation,
        co_amalgamation,
        vacuous,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdClass {
    Zero,
    One,
    Two,
    Infinity,
}

impl AdClass {
    pub fn value(self) -> super::ExtNat {
        match self {
            AdClass::Zero => super::ExtNat::Finite(0),
            AdClass::One => super::ExtNat::Finite(1),
            AdClass::Two => super::ExtNat::Finite(2),
            AdClass::Infinity => super::ExtNat::Infinity,
        }
    }
}

impl fmt::Display for AdClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Axiomatic distance read off the `←` relation, valid in classes with the
/// amalgamation or co-amalgamation property: `0` for equivalent theories,
/// `1` when one finitely axiomatizes over the other, `∞` when `←` does not
/// connect them, `2` otherwise. With `assume_property` the property is
/// taken on trust; otherwise it is checked.
pub fn classify_ad(class: &TheoryClass, a: &str, b: &str, assume_property: bool) -> Result<AdClass> {
    if !assume_property && !check_amalgamation(class)?.either_holds() {
        return Err(Error::Precondition(
            "the class has neither the amalgamation nor the co-amalgamation property".into(),
        ));
    }
    let add = axiom_add_matrix(class)?;
    let pos = |name: &str| {
        class
            .theories()
            .iter()
            .position(|t| t.name() == name)
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    };
    let (i, j) = (pos(a)?, pos(b)?);
    if add[i][j] && add[j][i] {
        return Ok(AdClass::Zero);
    }
    if add[i][j] || add[j][i] {
        return Ok(AdClass::One);
    }
    let n = add.len();
    let mut seen = vec![false; n];
    let mut stack = vec![i];
    seen[i] = true;
    while let Some(u) = stack.pop() {
        for v in 0..n {
            if !seen[v] && (add[u][v] || add[v][u]) {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    Ok(if seen[j] { AdClass::Two } else { AdClass::Infinity })
}
