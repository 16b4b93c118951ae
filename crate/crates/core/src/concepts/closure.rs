//! The definable relations of a single finite model in the `n`-variable
//! fragment, computed as a set algebra.
//!
//! Each concept is a set of assignments `s ∈ M^n`, stored as a bitset in
//! lexicographic assignment order (`s` sits at `Σ s_i·k^(n-1-i)`).

use std::collections::HashMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::semantics::{get_bit, set_bit, FiniteModel};
use crate::syntax::Formula;

/// Most assignments (`k^n`) a closure may range over.
pub const MAX_POINTS: usize = 4096;
/// Most concepts a closure may materialize.
pub const MAX_CONCEPTS: usize = 1 << 12;

type Bits = Vec<u64>;

/// How a concept entered the closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generation {
    Diagonal(usize, usize),
    Atom(Formula),
    Complement(usize),
    Intersection(usize, usize),
    Cylindrify { var: usize, of: usize },
}

#[derive(Debug, Clone)]
pub struct ConceptClosure {
    pub model: FiniteModel,
    pub vars: usize,
    pub points: usize,
    relations: Vec<Bits>,
    trace: Vec<Generation>,
}

pub(crate) struct Space {
    k: usize,
    n: usize,
    pub(crate) points: usize,
}

impl Space {
    pub(crate) fn new(m: &FiniteModel, n: usize) -> Result<Space> {
        let k = m.size();
        if let Some((s, r)) = m.lang().symbols().find(|&(_, r)| r > n) {
            return Err(Error::Precondition(format!(
                "`{s}` has rank {r}, more than the {n} variables of the closure"
            )));
        }
        let points = k
            .checked_pow(n as u32)
            .filter(|&p| p <= MAX_POINTS)
            .ok_or_else(|| {
                Error::CapExceeded(format!("closure over {k}^{n} assignments (cap {MAX_POINTS})"))
            })?;
        Ok(Space { k, n, points })
    }

    fn words(&self) -> usize {
        self.points.div_ceil(64)
    }

    fn empty(&self) -> Bits {
        vec![0; self.words()]
    }

    fn stride(&self, var: usize) -> usize {
        self.k.pow((self.n - 1 - var) as u32)
    }

    fn coord(&self, point: usize, var: usize) -> usize {
        point / self.stride(var) % self.k
    }

    fn set_of(&self, f: impl Fn(usize) -> bool) -> Bits {
        let mut b = self.empty();
        for p in 0..self.points {
            if f(p) {
                set_bit(&mut b, p, true);
            }
        }
        b
    }

    pub(crate) fn complement(&self, x: &Bits) -> Bits {
        self.set_of(|p| !get_bit(x, p))
    }

    pub(crate) fn intersection(&self, x: &Bits, y: &Bits) -> Bits {
        x.iter().zip(y).map(|(a, b)| a & b).collect()
    }

    pub(crate) fn cylindrify(&self, x: &Bits, var: usize) -> Bits {
        let stride = self.stride(var);
        self.set_of(|p| {
            let base = p - self.coord(p, var) * stride;
            (0..self.k).any(|a| get_bit(x, base + a * stride))
        })
    }

    /// Diagonals and atom meanings, in a fixed order.
    fn generators(&self, m: &FiniteModel) -> Vec<(Bits, Generation)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i..self.n {
                out.push((
                    self.set_of(|p| self.coord(p, i) == self.coord(p, j)),
                    Generation::Diagonal(i, j),
                ));
            }
        }
        let names: Vec<(String, usize)> =
            m.lang().symbols().map(|(s, r)| (s.to_string(), r)).collect();
        for (idx, (s, r)) in names.iter().enumerate() {
            let table = m.tables()[idx].clone();
            for code in 0..self.n.pow(*r as u32) {
                let mut args = vec![0; *r];
                let mut c = code;
                for slot in args.iter_mut().rev() {
                    *slot = c % self.n;
                    c /= self.n;
                }
                let bits = self.set_of(|p| {
                    let t = args.iter().fold(0, |acc, &v| acc * self.k + self.coord(p, v));
                    get_bit(&table, t)
                });
                out.push((bits, Generation::Atom(Formula::atom(s, args))));
            }
        }
        out
    }
}

impl ConceptClosure {
    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn relations(&self) -> &[Vec<u64>] {
        &self.relations
    }

    pub fn trace(&self) -> &[Generation] {
        &self.trace
    }

    pub fn contains(&self, bits: &[u64]) -> bool {
        self.relations.iter().any(|r| r == bits)
    }

    pub fn member(&self, index: usize, point: usize) -> bool {
        get_bit(&self.relations[index], point)
    }

    /// A formula whose meaning is the `index`-th concept, read off the trace.
    pub fn formula(&self, index: usize) -> Formula {
        match &self.trace[index] {
            Generation::Diagonal(i, j) => Formula::equals(*i, *j),
            Generation::Atom(f) => f.clone(),
            Generation::Complement(a) => Formula::not(self.formula(*a)),
            Generation::Intersection(a, b) => Formula::and(self.formula(*a), self.formula(*b)),
            Generation::Cylindrify { var, of } => Formula::exists(*var, self.formula(*of)),
        }
    }

    pub fn bit_string(&self, index: usize) -> String {
        (0..self.points)
            .map(|p| if self.member(index, p) { '1' } else { '0' })
            .collect()
    }

    /// Closure dump: one entry per concept, bits in assignment order.
    pub fn to_json(&self) -> Value {
        let rels: Vec<Value> = (0..self.len())
            .map(|i| {
                let from = match &self.trace[i] {
                    Generation::Diagonal(a, b) => json!({"diagonal": [a, b]}),
                    Generation::Atom(f) => json!({"atom": f.to_string()}),
                    Generation::Complement(a) => json!({"complement": a}),
                    Generation::Intersection(a, b) => json!({"intersection": [a, b]}),
                    Generation::Cylindrify { var, of } => json!({"cylindrify": {"var": var, "of": of}}),
                };
                json!({"bits": self.bit_string(i), "from": from})
            })
            .collect();
        json!({
            "size": self.model.size(),
            "vars": self.vars,
            "points": self.points,
            "count": self.len(),
            "relations": rels,
        })
    }
}

/// Fixpoint of the diagonals and atom meanings under complement,
/// intersection and cylindrification along each variable.
pub fn concept_closure(m: &FiniteModel, n: usize) -> Result<ConceptClosure> {
    let space = Space::new(m, n)?;
    let atoms = atom_count(m, n)?;
    if atoms >= usize::BITS as usize || 1usize << atoms > MAX_CONCEPTS {
        return Err(Error::CapExceeded(format!(
            "closure would have 2^{atoms} concepts (cap {MAX_CONCEPTS})"
        )));
    }
    let mut relations: Vec<Bits> = Vec::new();
    let mut trace = Vec::new();
    let mut index: HashMap<Bits, usize> = HashMap::new();
    let mut add = |bits: Bits, g: Generation, relations: &mut Vec<Bits>, trace: &mut Vec<Generation>| {
        if !index.contains_key(&bits) {
            index.insert(bits.clone(), relations.len());
            relations.push(bits);
            trace.push(g);
        }
    };
    for (bits, g) in space.generators(m) {
        add(bits, g, &mut relations, &mut trace);
    }
    let mut p = 0;
    while p < relations.len() {
        let current = relations[p].clone();
        add(space.complement(&current), Generation::Complement(p), &mut relations, &mut trace);
        for var in 0..n {
            add(
                space.cylindrify(&current, var),
                Generation::Cylindrify { var, of: p },
                &mut relations,
                &mut trace,
            );
        }
        for q in 0..=p {
            let meet = space.intersection(&current, &relations[q]);
            add(meet, Generation::Intersection(p, q), &mut relations, &mut trace);
        }
        p += 1;
    }
    Ok(ConceptClosure {
        model: m.clone(),
        vars: n,
        points: space.points,
        relations,
        trace,
    })
}

/// Number of atoms of the closure's Boolean algebra, by partition
/// refinement: the coarsest partition of `M^n` refining every generator
/// and such that the cylindrification of each block is a union of blocks.
/// The closure has exactly `2^atoms` elements.
pub fn atom_count(m: &FiniteModel, n: usize) -> Result<usize> {
    let space = Space::new(m, n)?;
    let gens = space.generators(m);
    if gens.is_empty() {
        return Ok(0);
    }
    let mut block = vec![0u32; space.points];
    let mut count = 1;
    let refine = |block: &mut Vec<u32>, by: &Bits| -> usize {
        let mut ids: HashMap<(u32, bool), u32> = HashMap::new();
        for (p, b) in block.iter_mut().enumerate() {
            let key = (*b, get_bit(by, p));
            let next = ids.len() as u32;
            *b = *ids.entry(key).or_insert(next);
        }
        ids.len()
    };
    for (g, _) in &gens {
        count = refine(&mut block, g);
    }
    loop {
        let before = count;
        let blocks: Vec<Bits> = (0..count as u32)
            .map(|b| space.set_of(|p| block[p] == b))
            .collect();
        for b in &blocks {
            for var in 0..n {
                count = refine(&mut block, &space.cylindrify(b, var));
            }
        }
        if count == before {
            return Ok(count);
        }
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::semantics::Evaluator;
    use crate::syntax::Language;

    fn less_on_two() -> FiniteModel {
        let l = Arc::new(Language::new("L", [("R", 2)], 2).unwrap());
        let mut m = FiniteModel::empty(l, 2).unwrap();
        m.set("R", &[0, 1], true).unwrap();
        m
    }

    #[test]
    fn two_point_order_defines_everything() {
        let c = concept_closure(&less_on_two(), 2).unwrap();
        assert_eq!(c.len(), 16);
        assert_eq!(atom_count(&less_on_two(), 2).unwrap(), 4);
    }

    #[test]
    fn singleton_has_two_concepts() {
        let l = Arc::new(Language::new("L", [("R", 1)], 1).unwrap());
        let m = FiniteModel::empty(l, 1).unwrap();
        assert_eq!(concept_closure(&m, 1).unwrap().len(), 2);
    }

    #[test]
    fn closure_is_closed_and_formulas_match() {
        let m = less_on_two();
        let c = concept_closure(&m, 2).unwrap();
        let space = Space::new(&m, 2).unwrap();
        for x in c.relations() {
            assert!(c.contains(&space.complement(x)));
            for v in 0..2 {
                assert!(c.contains(&space.cylindrify(x, v)));
            }
            for y in c.relations() {
                assert!(c.contains(&space.intersection(x, y)));
            }
        }
        for i in 0..c.len() {
            let e = Evaluator::new(&c.formula(i), m.lang()).unwrap();
            for p in 0..c.points {
                let mut asg = vec![p / 2, p % 2];
                assert_eq!(e.eval(&m, &mut asg), c.member(i, p));
            }
        }
    }

    #[test]
    fn definable_symbol_adds_nothing() {
        let m = less_on_two();
        let big = Arc::new(m.lang().with_symbol("L2", "G", 2).unwrap());
        let mut m2 = m.expand(big).unwrap();
        m2.set("G", &[1, 0], true).unwrap(); // G(x, y) := R(y, x)
        assert_eq!(concept_closure(&m2, 2).unwrap().len(), concept_closure(&m, 2).unwrap().len());
    }

    #[test]
    fn caps() {
        let l = Arc::new(Language::new("L", [("R", 2)], 3).unwrap());
        let m = FiniteModel::empty(l, 20).unwrap();
        assert!(concept_closure(&m, 3).unwrap_err().is_cap());
        let l = Arc::new(Language::new("L", [("R", 3)], 3).unwrap());
        let m = FiniteModel::empty(l, 2).unwrap();
        assert!(concept_closure(&m, 2).is_err());
    }
}
