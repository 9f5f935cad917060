//! The two-order construction on {1..m}: the usual order paired with an
//! order ≺ on {1..m-1} yields a degree-1 sequence family S[≺] and the
//! set family F[≺] it induces, together with the single-minimum
//! certificate for a freedom-index upper bound of 1.

use crate::family::{Family, GroundSet};
use crate::nested::NestedOrders;
use crate::orders::{GuardError, LinearOrder, OrderError};
use itertools::Itertools;
use serde::Serialize;
use thiserror::Error;

/// An order ≺ on {1..m-1} together with the ambient ground size m.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrecOrder {
    prec: LinearOrder,
    m: u8,
}

#[derive(Debug, Error)]
pub enum PrecError {
    #[error("the order must cover exactly {{1..m-1}}: m = {m}, order on {got}")]
    SizeMismatch { m: u8, got: u8 },
    #[error("ambient ground needs at least 2 elements")]
    TooSmall,
    #[error(transparent)]
    Order(#[from] OrderError),
}

impl PrecOrder {
    pub fn new(prec: LinearOrder, m: u8) -> Result<Self, PrecError> {
        if m < 2 {
            return Err(PrecError::TooSmall);
        }
        if prec.m() != m - 1 {
            return Err(PrecError::SizeMismatch { m, got: prec.m() });
        }
        Ok(PrecOrder { prec, m })
    }

    /// Digit string least-first, e.g. "53241" is 5 ≺ 3 ≺ 2 ≺ 4 ≺ 1.
    pub fn from_digits(s: &str, m: u8) -> Result<Self, PrecError> {
        PrecOrder::new(LinearOrder::from_digits(s)?, m)
    }

    pub fn m(&self) -> u8 {
        self.m
    }

    pub fn prec(&self) -> &LinearOrder {
        &self.prec
    }
}

/// The sequence family S[≺]: all singletons, pairs (t1,t2) with
/// t2 < t1, and triples (t1,t2,t3) with t2 < t1, t3 < t1, t3 ≺ t2.
pub fn sprec(p: &PrecOrder) -> NestedOrders {
    let m = p.m;
    let ground = GroundSet::new(m).unwrap();
    let mut seqs: Vec<Vec<u8>> = Vec::new();
    for t1 in 1..=m {
        seqs.push(vec![t1]);
        for t2 in 1..t1 {
            seqs.push(vec![t1, t2]);
            for t3 in 1..t1 {
                if t3 != t2 && p.prec.less(t3, t2) {
                    seqs.push(vec![t1, t2, t3]);
                }
            }
        }
    }
    NestedOrders::new(ground, Some(3), seqs)
}

/// F[≺], the family induced by S[≺] at degree 1.
pub fn fprec(p: &PrecOrder) -> Family {
    sprec(p).family_of(1)
}

/// The least pivot t whose upward run t ≺ t+1 ≺ … ≺ m-1 and downward
/// run t ≺ t-1 ≺ … ≺ 1 both hold in ≺, if any.
pub fn onemin_holds(p: &PrecOrder) -> Option<u8> {
    let top = p.m - 1;
    (1..=top).find(|&t| {
        (t..top).all(|x| p.prec.less(x, x + 1)) && (2..=t).all(|x| p.prec.less(x, x - 1))
    })
}

/// All orders on {1..m-1} satisfying the pivot condition, least digit
/// sequence first.
pub fn onemin_orders(m: u8) -> Vec<(PrecOrder, u8)> {
    assert!((2..=7).contains(&m));
    let labels: Vec<u8> = (1..=m - 1).collect();
    let mut out = Vec::new();
    for perm in labels.iter().copied().permutations(labels.len()) {
        let p = PrecOrder::new(LinearOrder::from_seq(perm).unwrap(), m).unwrap();
        if let Some(t) = onemin_holds(&p) {
            out.push((p, t));
        }
    }
    out
}

/// A relabeling carrying the family into some F[≺] whose ≺ has a
/// single-minimum pivot; certifies a freedom-index upper bound of 1.
#[derive(Debug, Clone, Serialize)]
pub struct OneMinWitness {
    /// relabeling[i-1] is the new label of element i.
    pub relabeling: Vec<u8>,
    pub prec: PrecOrder,
    pub pivot: u8,
}

/// Searches relabelings (lexicographic) and pivot orders (least digit
/// sequence first) for an embedding of f into an F[≺].
pub fn onemin_certificate(f: &Family) -> Result<Option<OneMinWitness>, GuardError> {
    let m = f.m();
    if m > 6 {
        return Err(GuardError {
            op: "onemin_certificate",
            limit: "ground sets of at most 6 elements",
            got: format!("m = {m}"),
        });
    }
    if m < 2 {
        return Ok(None);
    }
    let targets: Vec<(PrecOrder, u8, Family)> = onemin_orders(m)
        .into_iter()
        .map(|(p, t)| {
            let fam = fprec(&p);
            (p, t, fam)
        })
        .collect();
    let labels: Vec<u8> = (1..=m).collect();
    for perm in labels.iter().copied().permutations(labels.len()) {
        let g = f.relabel(&perm);
        for (p, t, target) in &targets {
            if g.sets().iter().all(|&a| target.contains(a)) {
                return Ok(Some(OneMinWitness {
                    relabeling: perm,
                    prec: p.clone(),
                    pivot: *t,
                }));
            }
        }
    }
    Ok(None)
}

/// The nine-set family over {1..6} from the open embedding question:
/// 12,23,34,35,56,123,235,356,2356.
pub fn problem2() -> Family {
    Family::parse("6: 12,23,34,35,56,123,235,356,2356").unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nested::ValidateMode;

    fn usual(m: u8) -> PrecOrder {
        let seq: Vec<u8> = (1..=m - 1).collect();
        PrecOrder::new(LinearOrder::from_seq(seq).unwrap(), m).unwrap()
    }

    #[test]
    fn sequence_family_membership() {
        let s = sprec(&usual(5));
        assert!(s.contains(&[3, 2, 1]));
        assert!(!s.contains(&[3, 1, 2])); // needs 2 ≺ 1
        assert!(s.contains(&[5, 4]));
        assert!(!s.contains(&[4, 5]));
        assert!(s.contains(&[5, 3, 2]));
        assert!(!s.contains(&[5, 2, 3])); // needs 3 ≺ 2
    }

    #[test]
    fn sequence_family_validates() {
        for m in 2..=5 {
            let labels: Vec<u8> = (1..=m - 1).collect();
            for perm in labels.iter().copied().permutations(labels.len()) {
                let p = PrecOrder::new(LinearOrder::from_seq(perm).unwrap(), m).unwrap();
                let s = sprec(&p);
                let r = s.validate(ValidateMode::Nested(1));
                assert!(r.passes());
                // Comparability holds one level beyond the required one
                // (both stage orders are total), but not at depth 2: the
                // triples have no four-step continuations to order them.
                for level in &r.comparability {
                    match level.prefix_len {
                        0 | 1 => assert!(level.status.ok(), "m = {m}"),
                        _ => assert!(!level.required),
                    }
                }
                if m >= 4 {
                    let l2 = r
                        .comparability
                        .iter()
                        .find(|c| c.prefix_len == 2)
                        .unwrap();
                    assert!(!l2.status.ok(), "m = {m}");
                }
            }
        }
    }

    #[test]
    fn prefix_family_of_the_usual_order() {
        // {1..k} ∪ {p} for 0 ≤ k ≤ p ≤ m, as masks.
        let f = fprec(&usual(5));
        let mut want: Vec<u32> = Vec::new();
        for k in 0..=5u32 {
            for p in k..=5u32 {
                let mut a = (1u32 << k) - 1;
                if p > 0 {
                    a |= 1 << (p - 1);
                }
                want.push(a);
            }
        }
        want.sort_unstable();
        want.dedup();
        assert_eq!(f.sets(), &want[..]);
        assert_eq!(f.len(), 16);
    }

    #[test]
    fn prefix_family_for_53241() {
        let p = PrecOrder::from_digits("53241", 6).unwrap();
        let f = fprec(&p);
        let want = Family::parse(
            "6: 0,1,2,3,4,5,6,12,23,34,35,56,123,234,235,356,1234,2345,2356,12345,23456,123456",
        )
        .unwrap();
        assert_eq!(f, want);
        assert_eq!(f.len(), 22);
        // Every set downward-closed under < belongs to any such family:
        // all consequents of antecedent pairs inside it are smaller than
        // the pair, hence inside it. 1234 is the witness that the family
        // cannot avoid.
        assert!(f.contains(0b001111));
    }

    #[test]
    fn pivot_detection() {
        assert_eq!(onemin_holds(&usual(5)), Some(1));
        assert_eq!(onemin_holds(&PrecOrder::from_digits("53241", 6).unwrap()), None);
        let reversed = PrecOrder::new(LinearOrder::from_digits("4321").unwrap(), 5).unwrap();
        assert_eq!(onemin_holds(&reversed), Some(4));
    }

    #[test]
    fn pivot_order_count_matches_interleavings() {
        for m in 2..=6u8 {
            let got = onemin_orders(m).len() as u32;
            assert_eq!(got, 1 << (m - 2), "m = {m}");
        }
    }

    #[test]
    fn certificate_for_the_prefix_family() {
        let f = fprec(&usual(5));
        let w = onemin_certificate(&f).unwrap().unwrap();
        assert_eq!(w.relabeling, vec![1, 2, 3, 4, 5]);
        assert_eq!(w.pivot, 1);
        assert_eq!(w.prec, usual(5));
    }

    #[test]
    fn certificate_for_chains_and_absence_for_the_cube() {
        let chain = Family::parse("4: 0,2,24,124,1234").unwrap();
        assert!(onemin_certificate(&chain).unwrap().is_some());
        assert!(onemin_certificate(&Family::cube(3)).unwrap().is_none());
    }

    #[test]
    fn embedding_family_battery() {
        let f = problem2();
        assert_eq!(f.len(), 9);
        let host = fprec(&PrecOrder::from_digits("53241", 6).unwrap());
        // Augmenting and closing the nine sets gives a seventeen-set
        // subfamily of the host: the embedding that transfers the
        // freedom-index question.
        let aug = f.augment();
        assert_eq!(aug.len(), 16);
        assert!(aug.sets().iter().all(|&a| host.contains(a)));
        let closed = aug.intersection_closure();
        assert_eq!(closed.len(), 17);
        assert!(closed.sets().iter().all(|&a| host.contains(a)));
        // The host has exactly five further members, the consecutive
        // runs around {2,3,4}.
        let extra: Vec<u32> = host
            .sets()
            .iter()
            .copied()
            .filter(|&a| !closed.contains(a))
            .collect();
        assert_eq!(extra, vec![0b001110, 0b001111, 0b011110, 0b011111, 0b111110]);
    }
}
