use num_bigint::BigUint;

use super::graph::LowerBound;
use crate::error::Result;
use crate::semantics::{enumerate_models, Evaluator, FiniteModel, Policy, Theory};
use crate::syntax::make_psi_n;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerBounds {
    /// `I(T,k)` for `k = 1..`, as far as the caps allowed.
    pub spectra: (Vec<usize>, Vec<usize>),
    pub obstruction: Option<LowerBound>,
    pub growth: Option<LowerBound>,
}

impl LowerBounds {
    pub fn strongest(&self) -> Option<&LowerBound> {
        self.obstruction.as_ref().or(self.growth.as_ref())
    }
}

fn spectrum_upto(t: &Theory, max_size: usize, policy: &Policy) -> Result<Vec<(usize, Option<FiniteModel>)>> {
    let mut out = Vec::new();
    for k in 1..=max_size {
        match enumerate_models(t, k, policy) {
            Ok(ms) => out.push((ms.len(), ms.first().cloned())),
            Err(e) if e.is_cap() => break,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Smallest `n` with `small · factor^n ≥ large`.
fn steps_needed(small: usize, large: usize, factor: &BigUint) -> u64 {
    let target = BigUint::from(large);
    let mut reach = BigUint::from(small);
    let mut n = 0;
    while reach < target {
        reach *= factor;
        n += 1;
    }
    n
}

/// Evidence that `T` and `T′` are far apart in conceptual distance.
///
/// A spectrum obstruction at size `k` is reported only when it is exact:
/// both theories are sentential (every size behaves like size 1), or both
/// languages can state `Ψ(k)` and a model of the nonempty side satisfies it.
/// The growth certificate assumes steps add symbols of rank at most the
/// policy's rank cap.
pub fn lower_bound_certificates(t1: &Theory, t2: &Theory, max_size: usize, policy: &Policy) -> Result<LowerBounds> {
    let s1 = spectrum_upto(t1, max_size, policy)?;
    let s2 = spectrum_upto(t2, max_size, policy)?;
    let mut obstruction = None;
    let mut growth: Option<LowerBound> = None;
    for (i, ((c1, m1), (c2, m2))) in s1.iter().zip(&s2).enumerate() {
        let k = i + 1;
        if (*c1 == 0) != (*c2 == 0) {
            let exact = if t1.is_sentential() && t2.is_sentential() {
                true
            } else {
                let (t, m) = if *c1 > 0 { (t1, m1) } else { (t2, m2) };
                let other = if *c1 > 0 { t2 } else { t1 };
                other.lang().var_bound() > k
                    && match (make_psi_n(k, t.lang()), m) {
                        (Ok(psi), Some(m)) => Evaluator::new(&psi, t.lang())?.is_true(m),
                        _ => false,
                    }
            };
            if exact && obstruction.is_none() {
                obstruction = Some(LowerBound::SpectrumObstruction {
                    size: k,
                    counts: (*c1, *c2),
                });
            }
            continue;
        }
        if *c1 == 0 {
            continue;
        }
        let exp = k.pow(policy.rank_cap as u32);
        let factor = BigUint::from(1u32) << exp;
        let (small, large) = ((*c1).min(*c2), (*c1).max(*c2));
        let bound = steps_needed(small, large, &factor);
        let better = match &growth {
            Some(LowerBound::GrowthCertificate { bound: b, .. }) => bound > *b,
            _ => true,
        };
        if better {
            growth = Some(LowerBound::GrowthCertificate {
                size: k,
                factor,
                ratio: (large, small),
                bound,
            });
        }
    }
    Ok(LowerBounds {
        spectra: (s1.iter().map(|x| x.0).collect(), s2.iter().map(|x| x.0).collect()),
        obstruction,
        growth,
    })
}
