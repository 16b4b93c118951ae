//! Isomorphism-invariant encodings of finite models.
//!
//! Elements are first given a vertex invariant (per symbol and argument
//! position, how many tuples mention the element there, plus how many
//! tuples it fills entirely). Only relabelings that list elements in
//! increasing invariant order are scanned, and the smallest serialized
//! interpretation among them is the canonical code.

use itertools::Itertools;
use serde::Serialize;

use super::model::{get_bit, FiniteModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CanonicalForm {
    /// Sorted element invariants.
    pub invariants: Vec<Vec<u32>>,
    /// Interpretation bits under the minimizing relabeling, symbol tables
    /// concatenated in alphabetical order, 64 bits per word.
    pub code: Vec<u64>,
}

/// Largest universe accepted by [`canonical_form`].
pub const CANON_SIZE_CAP: usize = 8;

fn invariants(m: &FiniteModel) -> Vec<Vec<u32>> {
    let k = m.size();
    let mut inv = vec![Vec::new(); k];
    for ((_, r), t) in m.lang().symbols().zip(m.tables()) {
        if r == 0 {
            continue;
        }
        let base = inv[0].len();
        for row in inv.iter_mut() {
            row.extend(std::iter::repeat_n(0, r + 1));
        }
        for idx in 0..k.pow(r as u32) {
            if !get_bit(t, idx) {
                continue;
            }
            let mut rest = idx;
            let mut first = None;
            let mut constant = true;
            for pos in (0..r).rev() {
                let a = rest % k;
                rest /= k;
                inv[a][base + pos] += 1;
                match first {
                    None => first = Some(a),
                    Some(f) if f != a => constant = false,
                    _ => {}
                }
            }
            if constant {
                inv[first.unwrap()][base + r] += 1;
            }
        }
    }
    inv
}

/// Serializes `m` as seen through `label` (element `a` is written as `label[a]`).
fn encode(m: &FiniteModel, label: &[usize], out: &mut Vec<u64>) {
    out.clear();
    let k = m.size();
    let mut offset = 0usize;
    for ((_, r), t) in m.lang().symbols().zip(m.tables()) {
        let total = k.pow(r as u32);
        let needed = (offset + total).div_ceil(64);
        if out.len() < needed {
            out.resize(needed, 0);
        }
        for idx in 0..total {
            if !get_bit(t, idx) {
                continue;
            }
            let mut rest = idx;
            let mut j = 0;
            let mut place = 1;
            for _ in 0..r {
                j += label[rest % k] * place;
                rest /= k;
                place *= k;
            }
            let bit = offset + j;
            out[bit / 64] |= 1 << (bit % 64);
        }
        offset += total;
    }
    if out.is_empty() {
        out.push(0);
    }
}

/// The canonical form and a relabeling achieving it.
pub fn canonical_labeling(m: &FiniteModel) -> Result<(CanonicalForm, Vec<usize>)> {
    let k = m.size();
    if k > CANON_SIZE_CAP {
        return Err(Error::CapExceeded(format!(
            "canonical form of a size-{k} model (cap {CANON_SIZE_CAP})"
        )));
    }
    let inv = invariants(m);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| inv[a].cmp(&inv[b]));
    // cells of elements with equal invariants, as ranges of `order`
    let mut cells = Vec::new();
    let mut start = 0;
    for i in 1..=k {
        if i == k || inv[order[i]] != inv[order[start]] {
            cells.push(start..i);
            start = i;
        }
    }
    let mut best: Option<(Vec<u64>, Vec<usize>)> = None;
    let mut code = Vec::new();
    let mut label = vec![0usize; k];
    let per_cell = cells
        .iter()
        .map(|c| c.clone().permutations(c.len()).collect::<Vec<_>>())
        .multi_cartesian_product();
    let mut scan = |choice: &[Vec<usize>]| {
        for (cell, perm) in cells.iter().zip(choice) {
            for (slot, &pos) in cell.clone().zip(perm) {
                label[order[slot]] = pos;
            }
        }
        encode(m, &label, &mut code);
        if best.as_ref().is_none_or(|(b, _)| code < *b) {
            best = Some((code.clone(), label.clone()));
        }
    };
    if cells.is_empty() {
        scan(&[]);
    } else {
        for choice in per_cell {
            scan(&choice);
        }
    }
    let (code, label) = best.expect("at least one labeling");
    let mut sorted = inv;
    sorted.sort();
    Ok((
        CanonicalForm {
            invariants: sorted,
            code,
        },
        label,
    ))
}

pub fn canonical_form(m: &FiniteModel) -> Result<CanonicalForm> {
    Ok(canonical_labeling(m)?.0)
}

/// The representative of `m`'s isomorphism class.
pub fn canonical_model(m: &FiniteModel) -> Result<FiniteModel> {
    let (_, label) = canonical_labeling(m)?;
    Ok(m.permute(&label))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::syntax::Language;

    fn lang() -> Arc<Language> {
        Arc::new(Language::new("L", [("R", 2)], 2).unwrap())
    }

    fn with(tuples: &[[usize; 2]], size: usize) -> FiniteModel {
        let mut m = FiniteModel::empty(lang(), size).unwrap();
        for t in tuples {
            m.set("R", t, true).unwrap();
        }
        m
    }

    #[test]
    fn swapped_edge_is_isomorphic() {
        assert_eq!(
            canonical_form(&with(&[[0, 1]], 2)).unwrap(),
            canonical_form(&with(&[[1, 0]], 2)).unwrap()
        );
    }

    #[test]
    fn tuple_counts_separate() {
        assert_ne!(
            canonical_form(&with(&[[0, 1]], 2)).unwrap(),
            canonical_form(&with(&[[0, 1], [1, 0]], 2)).unwrap()
        );
    }

    #[test]
    fn canonical_model_has_canonical_code() {
        let m = with(&[[2, 0], [0, 1], [1, 1]], 3);
        let c = canonical_model(&m).unwrap();
        let (form, label) = canonical_labeling(&c).unwrap();
        assert_eq!(form, canonical_form(&m).unwrap());
        // the representative is a fixed point up to automorphism
        assert_eq!(c.permute(&label), c);
    }
}
