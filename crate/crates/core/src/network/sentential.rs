use std::sync::Arc;

use num_bigint::BigUint;

use super::graph::{DistanceResult, DistanceStatus, EdgeLabel, EdgeStatus, ExtNat, LowerBound, PathWitness};
use crate::concepts::sentential_defeq_witness;
use crate::error::{Error, Result};
use crate::relations::{check_concept_add, CertKind, EdgeCertificate, Status};
use crate::semantics::{require_sentential, Policy, SatSet, Theory};

/// An exact sentential conceptual distance with its materialized chain.
#[derive(Debug, Clone)]
pub struct SententialCd {
    pub result: DistanceResult,
    /// The intermediate theories of the witness, in path order.
    pub chain: Vec<Theory>,
    /// Verified certificates for every edge of the witness.
    pub certificates: Vec<EdgeCertificate>,
}

/// Least `d` with `b` reachable from `a` in `d` moves, where a move goes
/// from count `c` to any count in `[⌈c/2⌉, 2c]`. The reachable counts after
/// `d` moves form the interval `[⌈a/2^d⌉, a·2^d]`.
fn interval_search(a: u64, b: u64) -> u64 {
    let (mut lo, mut hi, mut d) = (a, a, 0);
    while !(lo <= b && b <= hi) {
        lo = lo.div_ceil(2);
        hi = hi.saturating_mul(2);
        d += 1;
    }
    d
}

fn fresh_symbol(t: &Theory) -> String {
    (0..)
        .map(|i| format!("N{i}"))
        .find(|s| t.lang().rank(s).is_none())
        .expect("infinitely many candidates")
}

/// `t` plus one fresh constant, with `target` satisfying valuations
/// (`|Sat(t)| ≤ target ≤ 2|Sat(t)|`): every valuation extended by the
/// constant false, and the first `target - |Sat(t)|` also by it true.
fn grow(t: &Theory, target: usize, name: String) -> Result<Theory> {
    let sym = fresh_symbol(t);
    let lang = Arc::new(t.lang().with_symbol(format!("{}+{sym}", t.lang().name()), &sym, 0)?);
    let old: Vec<&str> = t.lang().constants();
    let new: Vec<&str> = lang.constants();
    let pos = |c: &str| new.iter().position(|x| *x == c).expect("constant kept");
    let x = 1u64 << pos(&sym);
    let sat = SatSet::of(t)?;
    let lifted: Vec<u64> = sat
        .iter()
        .map(|v| {
            old.iter()
                .enumerate()
                .filter(|(i, _)| v >> i & 1 == 1)
                .fold(0u64, |w, (_, c)| w | 1 << pos(c))
        })
        .collect();
    let extra = target - sat.len();
    let members = lifted
        .iter()
        .copied()
        .chain(lifted.iter().take(extra).map(|w| w | x));
    let grown = SatSet::new(new.iter().map(|c| c.to_string()).collect(), members);
    Theory::new(name, lang.clone(), vec![grown.dnf(&lang)?])
}

/// Exact `Cd` between sentential theories over the class of all sentential
/// theories. Consistent theories are definitionally equivalent exactly when
/// they have equally many satisfying valuations, and one concept step
/// changes that count by a factor in `[1, 2]`.
pub fn sentential_cd_solve(t1: &Theory, t2: &Theory) -> Result<SententialCd> {
    require_sentential(t1.lang())?;
    require_sentential(t2.lang())?;
    let (a, b) = (SatSet::of(t1)?.len(), SatSet::of(t2)?.len());
    if a == 0 && b == 0 {
        return Err(Error::Precondition("both theories are inconsistent".into()));
    }
    if a == 0 || b == 0 {
        return Ok(SententialCd {
            result: DistanceResult {
                value: ExtNat::Infinity,
                witness: None,
                lower_bound: Some(LowerBound::SpectrumObstruction { size: 1, counts: (a, b) }),
                status: DistanceStatus::Exact,
                asserted: Vec::new(),
            },
            chain: Vec::new(),
            certificates: Vec::new(),
        });
    }
    let d = interval_search(a as u64, b as u64);
    let (small, large) = (a.min(b), a.max(b));
    let mut lower = 0;
    let mut reach = small;
    while reach < large {
        reach *= 2;
        lower += 1;
    }
    if lower != d {
        return Err(Error::Precondition(format!("search gave {d}, growth bound {lower}")));
    }

    let (low, high) = if a <= b { (t1, t2) } else { (t2, t1) };
    let policy = Policy::default();
    let mut chain = vec![low.clone()];
    let mut certificates = Vec::new();
    let mut count = small;
    while count < large {
        let next_count = (2 * count).min(large);
        let prev = chain.last().expect("nonempty");
        let next = grow(prev, next_count, format!("{}^{}", low.name(), chain.len()))?;
        let mut cert = EdgeCertificate::new(
            CertKind::ConceptAdd {
                symbol: next.lang().extra_symbols(prev.lang()).first().map(|s| s.0.to_string()),
            },
            prev.name(),
            next.name(),
        );
        cert.status = check_concept_add(prev, &next, 1, &policy)?;
        if cert.status != Status::VerifiedExact {
            return Err(Error::Precondition(format!("chain step {} did not verify", cert.label())));
        }
        certificates.push(cert);
        chain.push(next);
        count = next_count;
    }
    let top = chain.last().expect("nonempty").clone();
    let (tr12, tr21) = sentential_defeq_witness(&top, high)?
        .ok_or_else(|| Error::Precondition("no definitional equivalence at the top of the chain".into()))?;
    let mut defeq = EdgeCertificate::new(CertKind::DefEq { tr12, tr21 }, top.name(), high.name());
    defeq.status = Status::VerifiedExact;
    certificates.push(defeq);

    let label = |c: &EdgeCertificate| EdgeLabel {
        kind: c.kind.tag().to_string(),
        status: EdgeStatus::Exact,
        certificate: Some(c.label()),
    };
    let mut nodes: Vec<String> = chain.iter().map(|t| t.name().to_string()).collect();
    nodes.push(high.name().to_string());
    let mut bits = vec![1u8; chain.len() - 1];
    bits.push(0);
    let mut edges: Vec<EdgeLabel> = certificates.iter().map(label).collect();
    if a > b {
        nodes.reverse();
        bits.reverse();
        edges.reverse();
    }
    let witness = PathWitness { nodes, bits, edges };
    let intermediate = chain[1..].to_vec();
    Ok(SententialCd {
        result: DistanceResult {
            value: ExtNat::Finite(d),
            witness: Some(witness),
            lower_bound: Some(LowerBound::GrowthCertificate {
                size: 1,
                factor: BigUint::from(2u32),
                ratio: (large, small),
                bound: lower,
            }),
            status: DistanceStatus::Exact,
            asserted: Vec::new(),
        },
        chain: intermediate,
        certificates,
    })
}
