//! The nested-orders index: exact computation by the recursive formula
//! (memoized on canonical forms) and by direct search over order trees,
//! plus the size-count bound check and the freedom-index bracket.

use crate::bits;
use crate::family::{Family, SubsetMask};
use crate::fprec::{onemin_certificate, OneMinWitness};
use crate::nested::{OrderTree, Seq};
use crate::orders::{
    full_cube_orders, is_representable, proper_orders, search_orders, GuardError, LinearOrder,
    Representation,
};
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};

/// Memoized index values keyed by canonical family serialization.
/// `expansions` counts recursion nodes that were actually expanded
/// (memo hits and base cases are free).
#[derive(Debug, Clone, Default)]
pub struct Memo {
    map: HashMap<String, i32>,
    expansions: u64,
}

impl Memo {
    pub fn new() -> Self {
        Memo::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn expansions(&self) -> u64 {
        self.expansions
    }

    pub fn reset_expansions(&mut self) {
        self.expansions = 0;
    }

    pub fn get(&self, key: &str) -> Option<i32> {
        self.map.get(key).copied()
    }

    pub fn insert(&mut self, key: String, value: i32) {
        self.map.insert(key, value);
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, i32)> {
        self.map.iter().map(|(k, &v)| (k.as_str(), v))
    }

    /// A copy for a worker; workers never observe each other's partial
    /// work and are merged after the fact.
    pub fn snapshot(&self) -> Memo {
        Memo { map: self.map.clone(), expansions: 0 }
    }

    /// Folds a worker's table back in. Values are pure functions of the
    /// key, so collisions always agree.
    pub fn merge(&mut self, other: Memo) {
        self.expansions += other.expansions;
        for (k, v) in other.map {
            let old = self.map.insert(k, v);
            debug_assert!(old.is_none() || old == Some(v));
        }
    }
}

/// The index by the recursive formula:
/// no(f) = 1 + max over nonempty A of min over a in A of no(link(f,A,a)),
/// with base value -1 when every member equals the ground set and 0 for
/// inclusion chains.
pub fn no_rec(f: &Family, memo: &mut Memo) -> i32 {
    if f.subset_of_top() {
        return -1;
    }
    if f.is_chain() {
        return 0;
    }
    let (canon, _) = f.canonicalize();
    let key = canon.canonical_key();
    if let Some(v) = memo.get(&key) {
        return v;
    }
    memo.expansions += 1;
    let full = canon.ground().full();
    let mut best = -1i32;
    for a_set in 1..=full {
        let mut inner = i32::MAX;
        for a in bits::elems(a_set) {
            let v = no_rec(&canon.link(a_set, a), memo);
            inner = inner.min(v);
            if inner <= best {
                break;
            }
        }
        best = best.max(inner);
    }
    let value = 1 + best;
    memo.insert(key, value);
    value
}

/// Why a trace terminates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Terminal {
    /// Every member equals the ground set (value -1).
    TopOnly,
    /// Linearly ordered by inclusion (value 0).
    Chain,
}

/// One level of the recursion: the family, its value, and the optimal
/// pivot pair (smallest maximizing set, then smallest minimizing element)
/// unless terminal.
#[derive(Debug, Clone, Serialize)]
pub struct TraceStep {
    pub family: String,
    pub value: i32,
    pub pivot_set: Option<Vec<u8>>,
    pub pivot: Option<u8>,
    pub terminal: Option<Terminal>,
}

/// Value plus the optimal descent path. Ties break toward the smallest
/// subset mask and then the smallest element, so traces are reproducible.
pub fn no_rec_trace(f: &Family, memo: &mut Memo) -> (i32, Vec<TraceStep>) {
    let value = no_rec(f, memo);
    let mut steps = Vec::new();
    let mut cur = f.clone();
    loop {
        let v = no_rec(&cur, memo);
        if cur.subset_of_top() {
            steps.push(TraceStep {
                family: cur.to_string(),
                value: v,
                pivot_set: None,
                pivot: None,
                terminal: Some(Terminal::TopOnly),
            });
            break;
        }
        if cur.is_chain() {
            steps.push(TraceStep {
                family: cur.to_string(),
                value: v,
                pivot_set: None,
                pivot: None,
                terminal: Some(Terminal::Chain),
            });
            break;
        }
        let full = cur.ground().full();
        let mut pivot_set = 0;
        let mut pivot = 0;
        let mut found = false;
        'sets: for a_set in 1..=full {
            let mut inner = i32::MAX;
            let mut inner_elem = 0;
            for a in bits::elems(a_set) {
                let w = no_rec(&cur.link(a_set, a), memo);
                if w < inner {
                    inner = w;
                    inner_elem = a;
                }
            }
            if 1 + inner == v {
                pivot_set = a_set;
                pivot = inner_elem;
                found = true;
                break 'sets;
            }
        }
        debug_assert!(found, "some subset must achieve the maximum");
        steps.push(TraceStep {
            family: cur.to_string(),
            value: v,
            pivot_set: Some(bits::elems(pivot_set).collect()),
            pivot: Some(pivot),
            terminal: None,
        });
        cur = cur.link(pivot_set, pivot);
    }
    (value, steps)
}

/// Outcome of the direct search.
#[derive(Debug, Clone)]
pub enum DirectResult {
    /// Least feasible degree, with a generating order tree when requested
    /// (degree -1 needs no tree: the induced family is always {X}).
    Found { n: i32, tree: Option<OrderTree> },
    /// Every degree up to the bound is infeasible.
    Exceeds { n_max: i32 },
}

/// Feasibility of "f is contained in the family induced at degree n by
/// some order tree", decided level by level.
///
/// State (s, d, k): the elements s chosen along the current prefix, the
/// segment domain d, the prefix length k. At k = n the members of f
/// through s must cut d into an inclusion chain (realizable as initial
/// segments of a single order); below n some arrangement of d must make
/// every strict-prefix child feasible.
struct DirectCtx<'a> {
    f: &'a Family,
    n: u8,
    cf: HashMap<(SubsetMask, SubsetMask, u8), bool>,
    ok: HashMap<(SubsetMask, SubsetMask, u8), bool>,
}

impl<'a> DirectCtx<'a> {
    fn new(f: &'a Family, n: u8) -> Self {
        DirectCtx { f, n, cf: HashMap::new(), ok: HashMap::new() }
    }

    /// Masks of A ∩ d over members A ⊇ s, the constraint residue at a
    /// final-level prefix.
    fn cuts(&self, s: SubsetMask, d: SubsetMask) -> Vec<SubsetMask> {
        let mut cuts: Vec<SubsetMask> = self
            .f
            .sets()
            .iter()
            .filter(|&&a| a & s == s)
            .map(|&a| a & d)
            .collect();
        cuts.sort_unstable_by_key(|&c| (c.count_ones(), c));
        cuts.dedup();
        cuts
    }

    fn chain_feasible(&mut self, s: SubsetMask, d: SubsetMask, k: u8) -> bool {
        if let Some(&v) = self.cf.get(&(s, d, k)) {
            return v;
        }
        let v = if k == self.n {
            let cuts = self.cuts(s, d);
            cuts.windows(2).all(|w| w[0] & !w[1] == 0)
        } else {
            self.arrangeable(s, d, k)
        };
        self.cf.insert((s, d, k), v);
        v
    }

    /// Can p be linearly arranged (as the lower part of the level-k
    /// order) with every element's strict segment feasible one level
    /// down? Decided by peeling the topmost element.
    fn arrangeable(&mut self, s: SubsetMask, p: SubsetMask, k: u8) -> bool {
        if p == 0 {
            return true;
        }
        if let Some(&v) = self.ok.get(&(s, p, k)) {
            return v;
        }
        let mut v = false;
        for d in bits::elems(p) {
            let rest = p & !bits::bit(d);
            if self.chain_feasible(s | bits::bit(d), rest, k + 1) && self.arrangeable(s, rest, k) {
                v = true;
                break;
            }
        }
        self.ok.insert((s, p, k), v);
        v
    }

    /// An order on d realizing the given inclusion chain as initial
    /// segments: layer by layer, ascending labels, leftovers last.
    fn chain_order(&self, s: SubsetMask, d: SubsetMask) -> Vec<u8> {
        let cuts = self.cuts(s, d);
        let mut order = Vec::new();
        let mut placed: SubsetMask = 0;
        for c in cuts {
            order.extend(bits::elems(c & !placed));
            placed |= c;
        }
        order.extend(bits::elems(d & !placed));
        order
    }

    /// Rebuilds the witness tree along feasible states, smallest labels
    /// first from the top of each order.
    fn rebuild(
        &mut self,
        s: SubsetMask,
        d: SubsetMask,
        k: u8,
        prefix: Seq,
        out: &mut BTreeMap<Seq, Vec<u8>>,
    ) {
        if k == self.n {
            if d != 0 || prefix.is_empty() {
                out.insert(prefix, self.chain_order(s, d));
            }
            return;
        }
        let mut rest = d;
        let mut top_down: Vec<u8> = Vec::new();
        while rest != 0 {
            let pick = bits::elems(rest)
                .find(|&e| {
                    let r = rest & !bits::bit(e);
                    self.chain_feasible(s | bits::bit(e), r, k + 1) && self.arrangeable(s, r, k)
                })
                .expect("a feasible state admits a feasible arrangement");
            top_down.push(pick);
            rest &= !bits::bit(pick);
        }
        top_down.reverse();
        let order = top_down;
        if d != 0 || prefix.is_empty() {
            out.insert(prefix.clone(), order.clone());
        }
        for (i, &t) in order.iter().enumerate() {
            let dom = bits::mask_of(order[..i].iter().copied());
            if dom == 0 && k + 1 == self.n {
                continue;
            }
            let mut child = prefix.clone();
            child.push(t);
            self.rebuild(s | bits::bit(t), dom, k + 1, child, out);
        }
    }
}

fn direct_feasible(f: &Family, n: i32) -> bool {
    if n == -1 {
        return f.subset_of_top();
    }
    let mut ctx = DirectCtx::new(f, n as u8);
    ctx.chain_feasible(0, f.ground().full(), 0)
}

fn direct_witness(f: &Family, n: i32) -> Option<OrderTree> {
    if n == -1 {
        return None;
    }
    let mut ctx = DirectCtx::new(f, n as u8);
    if !ctx.chain_feasible(0, f.ground().full(), 0) {
        return None;
    }
    let mut orders = BTreeMap::new();
    ctx.rebuild(0, f.ground().full(), 0, Vec::new(), &mut orders);
    let tree = OrderTree::from_orders(f.ground(), n as u8 + 1, orders)
        .expect("rebuilt orders follow the segment structure");
    debug_assert!({
        let fam = tree.to_nested().family_of(n);
        f.sets().iter().all(|&a| fam.contains(a))
    });
    Some(tree)
}

/// The index by definition: the least degree n in -1..=n_max whose
/// induced family (over some order tree) contains f.
pub fn no_direct(f: &Family, n_max: i32, want_witness: bool) -> Result<DirectResult, GuardError> {
    if f.m() > 6 {
        return Err(GuardError {
            op: "no_direct",
            limit: "ground sets of at most 6 elements",
            got: format!("m = {}", f.m()),
        });
    }
    if n_max > 3 {
        return Err(GuardError {
            op: "no_direct",
            limit: "degree bound at most 3",
            got: format!("n_max = {n_max}"),
        });
    }
    for n in -1..=n_max {
        if direct_feasible(f, n) {
            let tree = if want_witness { direct_witness(f, n) } else { None };
            return Ok(DirectResult::Found { n, tree });
        }
    }
    Ok(DirectResult::Exceeds { n_max })
}

/// One size class of the counting bound: members of size no+k against
/// the two binomial readings (as printed, and as the proof's sequence
/// count gives).
#[derive(Debug, Clone, Serialize)]
pub struct NestboundRow {
    pub k: i32,
    pub size: i32,
    pub count: u64,
    pub printed_bound: u64,
    pub printed_ok: bool,
    pub derived_bound: u64,
    pub derived_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct NestboundReport {
    pub no: i32,
    pub rows: Vec<NestboundRow>,
}

impl NestboundReport {
    pub fn printed_ok(&self) -> bool {
        self.rows.iter().all(|r| r.printed_ok)
    }

    pub fn derived_ok(&self) -> bool {
        self.rows.iter().all(|r| r.derived_ok)
    }
}

/// Checks, for k in 0..=|X|-no, the count of members of size no+k
/// against binom(no, |X|-k) (printed) and binom(|X|-k, no) (derived).
pub fn nestbound_check(f: &Family, no: i32) -> NestboundReport {
    let m = f.m() as i32;
    let mut rows = Vec::new();
    for k in 0..=(m - no) {
        let size = no + k;
        let count = f
            .sets()
            .iter()
            .filter(|&&a| a.count_ones() as i32 == size)
            .count() as u64;
        let printed_bound = bits::binom_ext(no as i64, (m - k) as i64);
        let derived_bound = bits::binom_ext((m - k) as i64, no as i64);
        rows.push(NestboundRow {
            k,
            size,
            count,
            printed_bound,
            printed_ok: count <= printed_bound,
            derived_bound,
            derived_ok: count <= derived_bound,
        });
    }
    NestboundReport { no, rows }
}

/// Kinds of freedom-index upper-bound certificates, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UpperKind {
    /// Inclusion chain: bound 0.
    Chain,
    /// Intersection-of-initial-segments with k orders: bound k-1.
    Orders,
    /// Embeds into an F[prec] with the single-minimum pivot: bound 1.
    OneMin,
    /// Some (m-1)-subset is missing: bound m-2.
    Proper,
    /// The m standard orders represent every subset: bound m-1.
    FullCube,
}

#[derive(Debug, Clone, Serialize)]
pub struct UpperCertificate {
    pub kind: UpperKind,
    pub bound: i32,
    pub witness: serde_json::Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BracketStatus {
    /// Upper bound equals max(lower, 0): the freedom index is pinned.
    Tight,
    /// The freedom index lies strictly inside the bracket, or no upper
    /// certificate applies.
    Gap,
    /// Some certificate bound undercuts the lower bound: a finding.
    Contradiction,
}

#[derive(Debug, Clone, Serialize)]
pub struct FrBracket {
    pub lower: i32,
    pub upper: Option<i32>,
    pub status: BracketStatus,
    pub certificates: Vec<UpperCertificate>,
}

fn orders_witness(orders: &[LinearOrder], rep: &Representation) -> serde_json::Value {
    serde_json::json!({
        "orders": orders,
        "selectors": rep.selectors,
    })
}

fn onemin_witness(w: &OneMinWitness) -> serde_json::Value {
    serde_json::json!({
        "relabeling": w.relabeling,
        "prec": w.prec.prec(),
        "pivot": w.pivot,
    })
}

/// Assembles the bracket for the freedom index: lower bound from the
/// computed nested-orders index, upper bounds from every applicable
/// certificate. Order search runs for 1..=max_orders orders (capped by
/// the search guard) and stops at the first representable width.
pub fn fr_bracket(f: &Family, memo: &mut Memo, max_orders: u8) -> FrBracket {
    let m = f.m();
    let lower = no_rec(f, memo);
    let mut certificates = Vec::new();

    if f.is_chain() {
        certificates.push(UpperCertificate {
            kind: UpperKind::Chain,
            bound: 0,
            witness: serde_json::Value::Null,
        });
    }

    if m <= 6 {
        for k in 1..=max_orders.min(3) {
            if let Ok((Some((orders, rep)), _)) = search_orders(f, k) {
                certificates.push(UpperCertificate {
                    kind: UpperKind::Orders,
                    bound: k as i32 - 1,
                    witness: orders_witness(&orders, &rep),
                });
                break;
            }
        }
    }

    if (2..=6).contains(&m) {
        if let Ok(Some(w)) = onemin_certificate(f) {
            certificates.push(UpperCertificate {
                kind: UpperKind::OneMin,
                bound: 1,
                witness: onemin_witness(&w),
            });
        }
    }

    if m >= 2 {
        let full = f.ground().full();
        let missing = (0..m)
            .map(|i| full & !(1u32 << i))
            .find(|&co| !f.contains(co));
        if let Some(co) = missing {
            // Attach the standard orders avoiding `co` when they in fact
            // represent f; for m = 2 the lone order cannot carry the empty
            // set, so the witness may be the missing elements alone.
            let mut witness = serde_json::json!({
                "missing": bits::elems(co).collect::<Vec<u8>>(),
            });
            if let Ok(orders) = proper_orders(m, co) {
                if let Some(rep) = is_representable(f, &orders) {
                    witness = serde_json::json!({
                        "missing": bits::elems(co).collect::<Vec<u8>>(),
                        "orders": orders,
                        "selectors": rep.selectors,
                    });
                }
            }
            certificates.push(UpperCertificate {
                kind: UpperKind::Proper,
                bound: m as i32 - 2,
                witness,
            });
        }
    }

    if (2..=6).contains(&m) {
        let orders = full_cube_orders(m).expect("m is in range");
        if let Some(rep) = is_representable(f, &orders) {
            certificates.push(UpperCertificate {
                kind: UpperKind::FullCube,
                bound: m as i32 - 1,
                witness: orders_witness(&orders, &rep),
            });
        }
    }

    let upper = certificates.iter().map(|c| c.bound).min();
    let status = match upper {
        Some(u) if u < lower.max(0) => BracketStatus::Contradiction,
        Some(u) if u == lower.max(0) => BracketStatus::Tight,
        _ => BracketStatus::Gap,
    };
    FrBracket { lower, upper, status, certificates }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::GroundSet;
    use crate::nested::ValidateMode;

    fn fam(text: &str) -> Family {
        Family::parse(text).unwrap()
    }

    #[test]
    fn recursion_base_cases() {
        let mut memo = Memo::new();
        assert_eq!(no_rec(&fam("2: 12"), &mut memo), -1);
        assert_eq!(no_rec(&fam("3:"), &mut memo), -1);
        assert_eq!(no_rec(&fam("2: 0,1,12"), &mut memo), 0);
        assert_eq!(no_rec(&fam("2: 1,2"), &mut memo), 1);
    }

    #[test]
    fn recursion_known_values() {
        let mut memo = Memo::new();
        assert_eq!(no_rec(&Family::cube(3), &mut memo), 2);
        assert_eq!(no_rec(&Family::intervals(5), &mut memo), 1);
        assert_eq!(no_rec(&Family::intervals(3), &mut memo), 1);
    }

    #[test]
    fn memo_reuse_skips_expansion() {
        let mut memo = Memo::new();
        no_rec(&Family::cube(3), &mut memo);
        let cold = memo.expansions();
        assert!(cold > 0);
        memo.reset_expansions();
        no_rec(&Family::cube(3), &mut memo);
        assert_eq!(memo.expansions(), 0);
    }

    #[test]
    fn trace_descends_optimally() {
        let mut memo = Memo::new();
        let (v, steps) = no_rec_trace(&Family::cube(2), &mut memo);
        assert_eq!(v, 1);
        assert_eq!(steps.len(), 2);
        assert_eq!(steps[0].pivot_set, Some(vec![1, 2]));
        assert_eq!(steps[0].pivot, Some(1));
        assert_eq!(steps[1].value, 0);
        assert_eq!(steps[1].terminal, Some(Terminal::Chain));
    }

    #[test]
    fn direct_matches_recursion_on_small_families() {
        for f in [
            fam("3: 0,1,12,123"),
            fam("2: 1,2"),
            Family::cube(3),
            Family::intervals(4),
            fam("2: 12"),
        ] {
            let mut memo = Memo::new();
            let want = no_rec(&f, &mut memo);
            match no_direct(&f, 3, false).unwrap() {
                DirectResult::Found { n, .. } => assert_eq!(n, want, "family {f}"),
                DirectResult::Exceeds { .. } => panic!("no value within bound for {f}"),
            }
        }
    }

    #[test]
    fn direct_witness_revalidates() {
        let f = Family::intervals(4);
        match no_direct(&f, 3, true).unwrap() {
            DirectResult::Found { n, tree } => {
                assert_eq!(n, 1);
                let tree = tree.unwrap();
                let s = tree.to_nested();
                assert!(s.validate(ValidateMode::Nested(1)).passes());
                let induced = s.family_of(1);
                assert!(f.sets().iter().all(|&a| induced.contains(a)));
            }
            DirectResult::Exceeds { .. } => panic!("intervals are 1-representable"),
        }
    }

    #[test]
    fn direct_cube_four_needs_three() {
        match no_direct(&Family::cube(4), 3, false).unwrap() {
            DirectResult::Found { n, .. } => assert_eq!(n, 3),
            DirectResult::Exceeds { .. } => panic!("within bound"),
        }
        match no_direct(&Family::cube(4), 2, false).unwrap() {
            DirectResult::Exceeds { n_max } => assert_eq!(n_max, 2),
            DirectResult::Found { .. } => panic!("the full cube on 4 needs degree 3"),
        }
    }

    #[test]
    fn direct_guard() {
        let f = Family::new(GroundSet::new(7).unwrap(), vec![1]).unwrap();
        assert!(no_direct(&f, 3, false).is_err());
        assert!(no_direct(&Family::cube(3), 4, false).is_err());
    }

    #[test]
    fn nestbound_cube() {
        let f = Family::cube(4);
        let r = nestbound_check(&f, 3);
        assert!(r.derived_ok());
        // The transposed reading already fails on the cube: four
        // 3-subsets against C(3, 4) = 0.
        assert!(!r.printed_ok());
        let k0 = r.rows.iter().find(|row| row.k == 0).unwrap();
        assert_eq!(k0.count, 4);
        assert_eq!(k0.printed_bound, 0);
        assert_eq!(k0.derived_bound, 4);
        let k1 = r.rows.iter().find(|row| row.k == 1).unwrap();
        assert_eq!(k1.count, 1);
        assert_eq!(k1.printed_bound, 1);
        assert_eq!(k1.derived_bound, 1);
    }

    #[test]
    fn nestbound_discriminates_readings() {
        let f = Family::intervals(4);
        let r = nestbound_check(&f, 1);
        assert!(r.derived_ok());
        assert!(!r.printed_ok());
        let k2 = r.rows.iter().find(|row| row.k == 2).unwrap();
        assert_eq!(k2.size, 3);
        assert_eq!(k2.count, 2);
        assert_eq!(k2.printed_bound, 0);
        assert!(!k2.printed_ok);
        assert_eq!(k2.derived_bound, 2);
        assert!(k2.derived_ok);
    }

    #[test]
    fn bracket_intervals_tight() {
        let mut memo = Memo::new();
        let b = fr_bracket(&Family::intervals(6), &mut memo, 2);
        assert_eq!(b.lower, 1);
        assert_eq!(b.upper, Some(1));
        assert_eq!(b.status, BracketStatus::Tight);
        assert!(b
            .certificates
            .iter()
            .any(|c| c.kind == UpperKind::Orders && c.bound == 1));
    }

    #[test]
    fn bracket_cube_tight_via_full_orders() {
        let mut memo = Memo::new();
        let b = fr_bracket(&Family::cube(3), &mut memo, 3);
        assert_eq!(b.lower, 2);
        assert_eq!(b.upper, Some(2));
        assert_eq!(b.status, BracketStatus::Tight);
        assert!(b.certificates.iter().any(|c| c.kind == UpperKind::FullCube));
        // No two orders represent all eight subsets.
        assert!(!b
            .certificates
            .iter()
            .any(|c| c.kind == UpperKind::Orders && c.bound < 2));
    }

    #[test]
    fn bracket_chain_tight_at_zero() {
        let mut memo = Memo::new();
        let b = fr_bracket(&fam("3: 0,1,12"), &mut memo, 1);
        assert_eq!(b.lower, 0);
        assert_eq!(b.upper, Some(0));
        assert_eq!(b.status, BracketStatus::Tight);
    }

    #[test]
    fn bracket_top_only_family() {
        let mut memo = Memo::new();
        let b = fr_bracket(&fam("2: 12"), &mut memo, 1);
        assert_eq!(b.lower, -1);
        assert_eq!(b.upper, Some(0));
        assert_eq!(b.status, BracketStatus::Tight);
    }
}
