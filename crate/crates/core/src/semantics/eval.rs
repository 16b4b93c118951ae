use crate::error::{Error, Result};
use crate::syntax::{Formula, Language};

use super::model::{get_bit, FiniteModel};

#[derive(Debug, Clone)]
enum Node {
    Eq(usize, usize),
    Atom(usize, Vec<usize>),
    And(Box<Node>, Box<Node>),
    Not(Box<Node>),
    Exists(usize, Box<Node>),
    /// `∃vi (vi = vj ∧ body)` with `i ≠ j`: only `vi := vj` can succeed.
    ExistsEq(usize, usize, Box<Node>),
}

/// A formula compiled against a language: symbol names are resolved to
/// table indices once, so evaluation does no lookups.
#[derive(Debug, Clone)]
pub struct Evaluator {
    root: Node,
    free: u64,
    var_bound: usize,
}

impl Evaluator {
    pub fn new(phi: &Formula, lang: &Language) -> Result<Self> {
        phi.check(lang)?;
        let index: std::collections::HashMap<&str, usize> =
            lang.symbols().enumerate().map(|(i, (s, _))| (s, i)).collect();
        Ok(Evaluator {
            root: compile(phi, &index),
            free: phi.free_vars(),
            var_bound: lang.var_bound(),
        })
    }

    pub fn free_vars(&self) -> u64 {
        self.free
    }

    /// `m, τ ⊨ φ`. `asg` holds `τ(v0), τ(v1), …`; it is restored before returning.
    pub fn eval(&self, m: &FiniteModel, asg: &mut [usize]) -> bool {
        ev(&self.root, m, asg)
    }

    /// Truth in `m`: satisfied under every assignment. Only the free
    /// variables are varied; the value never depends on the others.
    pub fn is_true(&self, m: &FiniteModel) -> bool {
        self.falsifying_assignment(m).is_none()
    }

    /// An assignment under which the formula fails, if any.
    pub fn falsifying_assignment(&self, m: &FiniteModel) -> Option<Vec<usize>> {
        let mut asg = vec![0usize; self.var_bound.max(1)];
        let free: Vec<usize> = (0..64).filter(|i| self.free >> i & 1 == 1).collect();
        let k = m.size();
        loop {
            if !self.eval(m, &mut asg) {
                asg.truncate(self.var_bound);
                return Some(asg);
            }
            // next assignment of the free variables (odometer)
            let mut pos = 0;
            loop {
                let v = *free.get(pos)?;
                asg[v] += 1;
                if asg[v] < k {
                    break;
                }
                asg[v] = 0;
                pos += 1;
            }
        }
    }

    /// Truth value under a sentential valuation (bit `i` = `i`-th constant).
    pub fn eval_valuation(&self, valuation: u64) -> bool {
        ev_val(&self.root, valuation)
    }
}

fn compile(phi: &Formula, index: &std::collections::HashMap<&str, usize>) -> Node {
    match phi {
        Formula::Equals(i, j) => Node::Eq(*i, *j),
        Formula::Atom(s, args) => Node::Atom(index[&**s], args.clone()),
        Formula::And(a, b) => Node::And(Box::new(compile(a, index)), Box::new(compile(b, index))),
        Formula::Not(a) => Node::Not(Box::new(compile(a, index))),
        Formula::Exists(i, body) => {
            if let Formula::And(guard, rest) = &**body {
                if let Formula::Equals(a, b) = **guard {
                    let other = if a == *i { Some(b) } else if b == *i { Some(a) } else { None };
                    if let Some(j) = other.filter(|j| j != i) {
                        return Node::ExistsEq(*i, j, Box::new(compile(rest, index)));
                    }
                }
            }
            Node::Exists(*i, Box::new(compile(body, index)))
        }
    }
}

fn ev(node: &Node, m: &FiniteModel, asg: &mut [usize]) -> bool {
    match node {
        Node::Eq(i, j) => asg[*i] == asg[*j],
        Node::Atom(s, args) => {
            let k = m.size();
            let idx = args.iter().fold(0, |acc, &a| acc * k + asg[a]);
            get_bit(m.table(*s), idx)
        }
        Node::And(a, b) => ev(a, m, asg) && ev(b, m, asg),
        Node::Not(a) => !ev(a, m, asg),
        Node::Exists(i, body) => {
            let saved = asg[*i];
            let mut found = false;
            for a in 0..m.size() {
                asg[*i] = a;
                if ev(body, m, asg) {
                    found = true;
                    break;
                }
            }
            asg[*i] = saved;
            found
        }
        Node::ExistsEq(i, j, body) => {
            let saved = asg[*i];
            asg[*i] = asg[*j];
            let r = ev(body, m, asg);
            asg[*i] = saved;
            r
        }
    }
}

fn ev_val(node: &Node, v: u64) -> bool {
    match node {
        Node::Atom(s, _) => v >> s & 1 == 1,
        Node::And(a, b) => ev_val(a, v) && ev_val(b, v),
        Node::Not(a) => !ev_val(a, v),
        // Sentential languages have no variables, so these never occur.
        Node::Eq(..) | Node::Exists(..) | Node::ExistsEq(..) => {
            unreachable!("first-order node in a sentential evaluation")
        }
    }
}

/// `m, τ ⊨ φ`. Variables beyond `asg.len()` are an error.
pub fn eval(m: &FiniteModel, asg: &[usize], phi: &Formula) -> Result<bool> {
    let e = Evaluator::new(phi, m.lang())?;
    if asg.len() < m.lang().var_bound() {
        return Err(Error::Precondition(format!(
            "assignment has {} values, language has {} variables",
            asg.len(),
            m.lang().var_bound()
        )));
    }
    if let Some(&bad) = asg.iter().find(|&&a| a >= m.size()) {
        return Err(Error::InvalidModel(format!("assignment value {bad} outside universe")));
    }
    let mut a = asg.to_vec();
    if a.is_empty() {
        a.push(0);
    }
    Ok(e.eval(m, &mut a))
}

/// Whether `φ` is true in `m`, i.e. satisfied under every assignment.
pub fn is_true(m: &FiniteModel, phi: &Formula) -> Result<bool> {
    Ok(Evaluator::new(phi, m.lang())?.is_true(m))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::syntax::parse_formula;

    fn two_point_less() -> FiniteModel {
        let lang = Arc::new(Language::new("L", [("R", 2)], 2).unwrap());
        let mut m = FiniteModel::empty(lang, 2).unwrap();
        m.set("R", &[0, 1], true).unwrap();
        m
    }

    #[test]
    fn evaluates_quantifiers_and_atoms() {
        let m = two_point_less();
        let f = parse_formula("(exists v1 (R v0 v1))", m.lang()).unwrap();
        assert!(eval(&m, &[0, 0], &f).unwrap());
        assert!(!eval(&m, &[1, 0], &f).unwrap());
        let eq = parse_formula("(= v0 v0)", m.lang()).unwrap();
        assert!(eval(&m, &[1, 0], &eq).unwrap());
    }

    #[test]
    fn truth_quantifies_over_free_variables() {
        let m = two_point_less();
        let r = parse_formula("(R v0 v1)", m.lang()).unwrap();
        assert!(!is_true(&m, &r).unwrap());
        let e = Evaluator::new(&r, m.lang()).unwrap();
        assert_eq!(e.falsifying_assignment(&m), Some(vec![0, 0]));
        let taut = parse_formula("(or (R v0 v1) (not (R v0 v1)))", m.lang()).unwrap();
        assert!(is_true(&m, &taut).unwrap());
    }

    #[test]
    fn singleton_universe() {
        let lang = Arc::new(Language::new("E", Vec::<(String, usize)>::new(), 2).unwrap());
        let m = FiniteModel::empty(lang.clone(), 1).unwrap();
        let f = parse_formula("(forall v0 (forall v1 (= v0 v1)))", &lang).unwrap();
        assert!(is_true(&m, &f).unwrap());
    }

    #[test]
    fn equality_guard_fast_path_agrees() {
        let lang = Arc::new(Language::new("L", [("R", 2)], 3).unwrap());
        let m = {
            let mut m = FiniteModel::empty(lang.clone(), 3).unwrap();
            m.set("R", &[2, 1], true).unwrap();
            m.set("R", &[0, 0], true).unwrap();
            m
        };
        // the same formula with the guard hidden behind a double negation
        let fast = parse_formula("(exists v2 (and (= v2 v0) (R v2 v1)))", &lang).unwrap();
        let slow = parse_formula("(exists v2 (and (not (not (= v0 v2))) (R v2 v1)))", &lang).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(
                    eval(&m, &[a, b, 0], &fast).unwrap(),
                    eval(&m, &[a, b, 0], &slow).unwrap()
                );
            }
        }
    }

    #[test]
    fn sentential_valuations() {
        let lang = Language::sentential("S", ["P", "Q"]).unwrap();
        let f = parse_formula("(implies P Q)", &lang).unwrap();
        let e = Evaluator::new(&f, &lang).unwrap();
        // bit 0 = P, bit 1 = Q
        assert!(e.eval_valuation(0b00));
        assert!(!e.eval_valuation(0b01));
        assert!(e.eval_valuation(0b11));
    }
}
