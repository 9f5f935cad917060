//! Linear orders on the ground set and representability of a family as
//! intersections of initial segments.
//!
//! An order is kept as its element sequence from least to greatest. A
//! family is representable with orders <_1..<_k when every member equals
//! an intersection of initial segments {x : x <=_i s_i}, one per order;
//! selectors range over actual elements (there is no virtual bottom), so
//! the empty set is representable exactly when some choice of selectors
//! has empty intersection.

use crate::bits;
use crate::family::{Family, SubsetMask};
use itertools::Itertools;
use serde::Serialize;
use thiserror::Error;

/// A linear order on {1..m}, least element first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearOrder {
    seq: Vec<u8>,
    rank: [u8; 17],
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OrderError {
    #[error("sequence is not a permutation of 1..=m")]
    NotAPermutation,
    #[error("digit-string orders need m <= 9")]
    DigitsNeedSmallGround,
}

/// Resource-guard violation for the exhaustive searches.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("resource guard: {op} supports {limit}, got {got}")]
pub struct GuardError {
    pub op: &'static str,
    pub limit: &'static str,
    pub got: String,
}

impl LinearOrder {
    pub fn from_seq(seq: Vec<u8>) -> Result<Self, OrderError> {
        let m = seq.len() as u8;
        if m > 16 {
            return Err(OrderError::NotAPermutation);
        }
        let mut rank = [0u8; 17];
        let mut seen = 0u32;
        for (i, &e) in seq.iter().enumerate() {
            if e == 0 || e > m || seen & bits::bit(e) != 0 {
                return Err(OrderError::NotAPermutation);
            }
            seen |= bits::bit(e);
            rank[e as usize] = i as u8;
        }
        Ok(LinearOrder { seq, rank })
    }

    /// Parses a digit string such as "4321" (least element first).
    pub fn from_digits(text: &str) -> Result<Self, OrderError> {
        let seq: Option<Vec<u8>> = text
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as u8))
            .collect();
        match seq {
            Some(v) if v.len() <= 9 => Self::from_seq(v),
            Some(_) => Err(OrderError::DigitsNeedSmallGround),
            None => Err(OrderError::NotAPermutation),
        }
    }

    pub fn identity(m: u8) -> Self {
        Self::from_seq((1..=m).collect()).unwrap()
    }

    pub fn reversed(&self) -> Self {
        let mut seq = self.seq.clone();
        seq.reverse();
        Self::from_seq(seq).unwrap()
    }

    pub fn m(&self) -> u8 {
        self.seq.len() as u8
    }

    pub fn seq(&self) -> &[u8] {
        &self.seq
    }

    /// Position of `e` from the bottom (0-based).
    pub fn rank(&self, e: u8) -> u8 {
        debug_assert!(e >= 1 && e <= self.m());
        self.rank[e as usize]
    }

    pub fn less(&self, a: u8, b: u8) -> bool {
        self.rank(a) < self.rank(b)
    }

    /// The greatest element of `mask` in this order; `mask` must be
    /// non-empty.
    pub fn max_of(&self, mask: SubsetMask) -> u8 {
        bits::elems(mask).max_by_key(|&e| self.rank(e)).expect("non-empty mask")
    }

    /// Initial segment {x : x <= s}.
    pub fn initial_segment(&self, s: u8) -> SubsetMask {
        let r = self.rank(s) as usize;
        bits::mask_of(self.seq[..=r].iter().copied())
    }

    /// Strict initial segment {x : x < s}.
    pub fn strict_segment(&self, s: u8) -> SubsetMask {
        self.initial_segment(s) & !bits::bit(s)
    }

    pub fn bottom(&self) -> Option<u8> {
        self.seq.first().copied()
    }

    /// Digit string for m <= 9, otherwise a comma-joined list.
    pub fn display(&self) -> String {
        if self.m() <= 9 {
            self.seq.iter().map(|e| e.to_string()).collect()
        } else {
            self.seq.iter().map(|e| e.to_string()).join(",")
        }
    }
}

impl Serialize for LinearOrder {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.m() <= 9 {
            s.serialize_str(&self.display())
        } else {
            self.seq.serialize(s)
        }
    }
}

/// Per-member selector witness for a representable family.
#[derive(Debug, Clone, Serialize)]
pub struct Representation {
    /// One row per family member (in family order): the chosen selector
    /// elements, one per order.
    pub selectors: Vec<Vec<u8>>,
}

/// Checks whether every member of `f` is an intersection of initial
/// segments of the given orders; returns the chosen selectors on success.
pub fn is_representable(f: &Family, orders: &[LinearOrder]) -> Option<Representation> {
    assert!(!orders.is_empty() && orders.iter().all(|o| o.m() == f.m()));
    let mut selectors = Vec::with_capacity(f.len());
    for &a in f.sets() {
        selectors.push(represent_one(a, orders)?);
    }
    Some(Representation { selectors })
}

fn represent_one(a: SubsetMask, orders: &[LinearOrder]) -> Option<Vec<u8>> {
    if a == 0 {
        // Minimal segments are the bottoms; their intersection is empty
        // exactly when the orders do not all share a least element.
        let bots: Vec<u8> = orders.iter().map(|o| o.bottom().expect("m >= 1")).collect();
        let inter = orders
            .iter()
            .zip(&bots)
            .fold(!0u32, |acc, (o, &b)| acc & o.initial_segment(b));
        return (inter == 0).then_some(bots);
    }
    // The least covering segment per order is forced; any other valid
    // selector only enlarges the intersection.
    let sel: Vec<u8> = orders.iter().map(|o| o.max_of(a)).collect();
    let inter = orders
        .iter()
        .zip(&sel)
        .fold(!0u32, |acc, (o, &s)| acc & o.initial_segment(s));
    (inter & bits::full_mask(orders[0].m()) == a).then_some(sel)
}

/// Statistics from an exhaustive order search.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SearchStats {
    pub tuples_examined: u64,
}

/// A witness tuple of orders with its selector table, if any.
pub type SearchHit = Option<(Vec<LinearOrder>, Representation)>;

/// Exhaustive search for `k` orders representing `f`, scanning
/// non-decreasing order tuples (representability is symmetric in the
/// orders). Returns the first witness in lexicographic tuple order,
/// re-verified, plus the number of tuples examined.
///
/// Guarded to m <= 6 and k <= 3.
pub fn search_orders(f: &Family, k: u8) -> Result<(SearchHit, SearchStats), GuardError> {
    let m = f.m();
    if m > 6 {
        return Err(GuardError {
            op: "search_orders",
            limit: "ground sets of at most 6 elements",
            got: format!("m = {m}"),
        });
    }
    if k == 0 || k > 3 {
        return Err(GuardError {
            op: "search_orders",
            limit: "1 to 3 orders",
            got: format!("k = {k}"),
        });
    }
    if m == 0 {
        // No orders exist on an empty ground set; only families without
        // non-empty members could be represented, and there are no
        // selectors, so nothing is.
        return Ok((None, SearchStats { tuples_examined: 0 }));
    }
    let labels: Vec<u8> = (1..=m).collect();
    let all: Vec<LinearOrder> = labels
        .iter()
        .copied()
        .permutations(m as usize)
        .map(|p| LinearOrder::from_seq(p).unwrap())
        .collect();
    let mut stats = SearchStats { tuples_examined: 0 };
    let n = all.len();
    let mut idx = vec![0usize; k as usize];
    loop {
        stats.tuples_examined += 1;
        let tuple: Vec<LinearOrder> = idx.iter().map(|&i| all[i].clone()).collect();
        if let Some(rep) = is_representable(f, &tuple) {
            // Re-verify the witness from scratch before returning it.
            let again = is_representable(f, &tuple).expect("witness must re-verify");
            assert_eq!(rep.selectors, again.selectors);
            return Ok((Some((tuple, again)), stats));
        }
        // Advance the non-decreasing index tuple.
        let mut j = k as usize;
        loop {
            if j == 0 {
                return Ok((None, stats));
            }
            j -= 1;
            if idx[j] + 1 < n {
                idx[j] += 1;
                for l in j + 1..k as usize {
                    idx[l] = idx[j];
                }
                break;
            }
        }
    }
}

/// Orders witnessing that every subset except `missing` (an (m-1)-subset)
/// is representable: m-1 orders, the k-th ending with the two elements
/// (complement element, then k).
///
/// Built for the canonical missing set {1..m-1} and relabelled so that
/// the given `missing` takes its place.
pub fn proper_orders(m: u8, missing: SubsetMask) -> Result<Vec<LinearOrder>, GuardError> {
    if m < 2 {
        return Err(GuardError {
            op: "proper_orders",
            limit: "ground sets of at least 2 elements",
            got: format!("m = {m}"),
        });
    }
    let full = bits::full_mask(m);
    assert!(
        missing & !full == 0 && missing.count_ones() == (m - 1) as u32,
        "missing must be an (m-1)-subset of the ground set"
    );
    // Relabelling sending {1..m-1} onto `missing` in increasing order and
    // m onto the leftover element.
    let extra = bits::elems(full & !missing).next().unwrap();
    let mut perm = vec![0u8; m as usize];
    for (i, e) in bits::elems(missing).enumerate() {
        perm[i] = e;
    }
    perm[(m - 1) as usize] = extra;

    let mut out = Vec::with_capacity((m - 1) as usize);
    for k in 1..m {
        let mut seq: Vec<u8> = (1..m).filter(|&e| e != k).collect();
        seq.push(m);
        seq.push(k);
        let seq = seq.into_iter().map(|e| perm[(e - 1) as usize]).collect();
        out.push(LinearOrder::from_seq(seq).unwrap());
    }
    Ok(out)
}

/// m orders under which every subset of {1..m} is representable: the k-th
/// order puts k on top and the rest below in increasing label order.
pub fn full_cube_orders(m: u8) -> Result<Vec<LinearOrder>, GuardError> {
    if m < 2 {
        return Err(GuardError {
            op: "full_cube_orders",
            limit: "ground sets of at least 2 elements",
            got: format!("m = {m}"),
        });
    }
    Ok((1..=m)
        .map(|k| {
            let mut seq: Vec<u8> = (1..=m).filter(|&e| e != k).collect();
            seq.push(k);
            LinearOrder::from_seq(seq).unwrap()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::mask_of;

    fn ord(s: &str) -> LinearOrder {
        LinearOrder::from_digits(s).unwrap()
    }

    fn fam(s: &str) -> Family {
        Family::parse(s).unwrap()
    }

    #[test]
    fn segments() {
        assert_eq!(ord("1234").initial_segment(2), 0b0011);
        assert_eq!(ord("4321").initial_segment(3), 0b1100);
        assert_eq!(ord("1423").initial_segment(4), 0b1001);
        assert_eq!(ord("1423").strict_segment(4), 0b0001);
    }

    #[test]
    fn representability_witness_pairs() {
        let cases: [(&str, &str, &str); 4] = [
            ("6: 0,1,2,3,4,5,6,12,23,34,45,56,123,234,345,456,1234,2345,3456,12345,23456,123456",
             "123456", "654321"),
            ("4: 12,23,34,123,234", "1234", "4321"),
            ("4: 12,13,14,123,124", "1423", "1324"),
            ("4: 12,123,124", "3124", "4213"),
        ];
        for (f, o1, o2) in cases {
            let f = fam(f);
            let orders = [ord(o1), ord(o2)];
            assert!(is_representable(&f, &orders).is_some(), "{o1},{o2}");
        }
        // The intervals family above really is Family::intervals(6).
        assert_eq!(fam("6: 0,1,2,3,4,5,6,12,23,34,45,56,123,234,345,456,1234,2345,3456,12345,23456,123456"),
                   Family::intervals(6));
    }

    #[test]
    fn empty_set_needs_distinct_bottoms() {
        let f = fam("2: 0");
        assert!(is_representable(&f, &[ord("12")]).is_none());
        assert!(is_representable(&f, &[ord("12"), ord("12")]).is_none());
        let rep = is_representable(&f, &[ord("12"), ord("21")]).unwrap();
        assert_eq!(rep.selectors, vec![vec![1, 2]]);
    }

    #[test]
    fn search_finds_chains_with_one_order() {
        let (hit, _) = search_orders(&fam("3: 1,12,123"), 1).unwrap();
        let (orders, _) = hit.unwrap();
        assert_eq!(orders.len(), 1);
        assert!(is_representable(&fam("3: 1,12,123"), &orders).is_some());

        // A chain containing the empty set is not 1-order representable:
        // initial segments are never empty.
        let (hit, _) = search_orders(&fam("2: 0,1,12"), 1).unwrap();
        assert!(hit.is_none());
    }

    #[test]
    fn search_two_orders() {
        let f = fam("2: 1,2");
        let (hit1, _) = search_orders(&f, 1).unwrap();
        assert!(hit1.is_none());
        let (hit2, _) = search_orders(&f, 2).unwrap();
        assert!(hit2.is_some());
    }

    #[test]
    fn representability_is_monotone_in_extra_orders() {
        // Appending any order keeps a family representable.
        let f = fam("3: 1,12,123");
        let (hit, _) = search_orders(&f, 1).unwrap();
        let (mut orders, _) = hit.unwrap();
        orders.push(ord("321"));
        assert!(is_representable(&f, &orders).is_some());
    }

    #[test]
    fn proper_orders_miss_exactly_the_given_set() {
        for m in 3..=5u8 {
            let missing = bits::full_mask(m) & !bits::bit(m); // {1..m-1}
            let orders = proper_orders(m, missing).unwrap();
            assert_eq!(orders.len(), (m - 1) as usize);
            for a in 0..=bits::full_mask(m) {
                let f = Family::new(crate::family::GroundSet::new(m).unwrap(), [a]).unwrap();
                let rep = is_representable(&f, &orders).is_some();
                assert_eq!(rep, a != missing, "m={m} a={a:#b}");
            }
        }
        // m = 2 degenerates to a single order, which carries its own
        // bottom in every segment, so the empty set drops out too.
        let orders = proper_orders(2, 0b01).unwrap();
        assert_eq!(orders.len(), 1);
        for a in 0..=0b11u32 {
            let f = Family::new(crate::family::GroundSet::new(2).unwrap(), [a]).unwrap();
            let rep = is_representable(&f, &orders).is_some();
            assert_eq!(rep, a != 0b01 && a != 0, "a={a:#b}");
        }
        // A non-canonical missing set is handled by relabelling.
        let missing = mask_of([1, 2, 4]);
        let orders = proper_orders(4, missing).unwrap();
        for a in 0..=bits::full_mask(4) {
            let f = Family::new(crate::family::GroundSet::new(4).unwrap(), [a]).unwrap();
            assert_eq!(is_representable(&f, &orders).is_some(), a != missing);
        }
    }

    #[test]
    fn full_cube_orders_represent_everything() {
        for m in 2..=4u8 {
            let orders = full_cube_orders(m).unwrap();
            assert_eq!(orders.len(), m as usize);
            assert!(is_representable(&Family::cube(m), &orders).is_some());
        }
    }

    #[test]
    fn guards() {
        assert!(search_orders(&fam("7: 1234567"), 2).is_err());
        assert!(search_orders(&fam("3: 1"), 4).is_err());
        assert!(proper_orders(1, 0).is_err());
    }
}
