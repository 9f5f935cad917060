//! Families of nested orders: duplicate-free sequences over the ground
//! set, closed under the two prefix deletions, transitive and (up to the
//! stated depth) comparable, together with the order trees that generate
//! them.
//!
//! For a sequence u = (t1..tk), `t ≺_u s` stands for "u⌢(s,t) belongs to
//! the family"; the admissible continuations of u form the strict initial
//! segment below t_k in the order attached to (t1..t_{k-1}). A family of
//! degree n keeps sequences of length at most n+2 and induces the set
//! family F_{S,n} via its longest sequences.

use crate::bits;
use crate::family::{Family, GroundSet, SubsetMask};
use crate::orders::{GuardError, LinearOrder};
use serde::ser::SerializeStruct;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use thiserror::Error;

/// A duplicate-free sequence of ground elements.
pub type Seq = Vec<u8>;

/// A set of sequences over a ground set, with an optional length bound
/// (`depth_bound` = n+2 for a family of degree n).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NestedOrders {
    ground: GroundSet,
    depth_bound: Option<u8>,
    seqs: BTreeSet<Seq>,
}

/// How to validate: against the full definition (comparability at every
/// prefix length) or as a family of degree n (length at most n+2,
/// comparability required strictly below prefix length n).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ValidateMode {
    Full,
    Nested(u8),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ClauseStatus {
    Pass,
    Fail { witness: Vec<Seq>, note: String },
}

impl ClauseStatus {
    pub fn ok(&self) -> bool {
        matches!(self, ClauseStatus::Pass)
    }

    fn fail(witness: Vec<Seq>, note: impl Into<String>) -> Self {
        ClauseStatus::Fail { witness, note: note.into() }
    }
}

/// Comparability status at one prefix length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComparabilityLevel {
    pub prefix_len: u8,
    /// Whether the chosen validation mode demands this level.
    pub required: bool,
    pub status: ClauseStatus,
}

/// Clause-by-clause validation outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub mode: ValidateMode,
    /// Every one-element sequence is present.
    pub singletons: ClauseStatus,
    /// Entries are distinct and lie in the ground set.
    pub entries: ClauseStatus,
    /// Closure under dropping the last and the second-to-last entry.
    pub prefix_closed: ClauseStatus,
    /// u⌢(s,t), u⌢(t,w) present force u⌢(s,w).
    pub transitive: ClauseStatus,
    /// Comparability per prefix length (recorded at every length seen,
    /// required only where the mode says so).
    pub comparability: Vec<ComparabilityLevel>,
    /// Sequences respect the mode's length bound.
    pub length_bound: ClauseStatus,
}

impl ValidationReport {
    pub fn passes(&self) -> bool {
        self.singletons.ok()
            && self.entries.ok()
            && self.prefix_closed.ok()
            && self.transitive.ok()
            && self.length_bound.ok()
            && self.comparability.iter().all(|c| !c.required || c.status.ok())
    }

    /// True when comparability also holds at every recorded level, not
    /// just the required ones.
    pub fn comparable_everywhere(&self) -> bool {
        self.comparability.iter().all(|c| c.status.ok())
    }
}

#[derive(Debug, Error)]
pub enum ExtendError {
    #[error("input is not a valid family of degree {0}")]
    InvalidInput(u8, Box<ValidationReport>),
}

impl NestedOrders {
    pub fn new(
        ground: GroundSet,
        depth_bound: Option<u8>,
        seqs: impl IntoIterator<Item = Seq>,
    ) -> Self {
        NestedOrders { ground, depth_bound, seqs: seqs.into_iter().collect() }
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn depth_bound(&self) -> Option<u8> {
        self.depth_bound
    }

    /// Degree n such that depth_bound = n+2, when bounded.
    pub fn degree(&self) -> Option<i32> {
        self.depth_bound.map(|d| d as i32 - 2)
    }

    pub fn seqs(&self) -> &BTreeSet<Seq> {
        &self.seqs
    }

    pub fn len(&self) -> usize {
        self.seqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seqs.is_empty()
    }

    pub fn contains(&self, seq: &[u8]) -> bool {
        self.seqs.contains(seq)
    }

    /// Continuation index: for every proper prefix of a stored sequence,
    /// the sorted list of next elements.
    fn trie(&self) -> HashMap<Seq, Vec<u8>> {
        let mut map: HashMap<Seq, Vec<u8>> = HashMap::new();
        for s in &self.seqs {
            let prefix = s[..s.len() - 1].to_vec();
            map.entry(prefix).or_default().push(s[s.len() - 1]);
        }
        for v in map.values_mut() {
            v.sort_unstable();
            v.dedup();
        }
        map
    }

    /// Clause-by-clause validation; see `ValidateMode`.
    pub fn validate(&self, mode: ValidateMode) -> ValidationReport {
        let m = self.ground.m();
        let max_len: Option<usize> = match mode {
            ValidateMode::Full => None,
            ValidateMode::Nested(n) => Some(n as usize + 2),
        };

        let mut length_bound = ClauseStatus::Pass;
        if let Some(bound) = max_len {
            if let Some(bad) = self.seqs.iter().find(|s| s.len() > bound) {
                length_bound = ClauseStatus::fail(
                    vec![bad.clone()],
                    format!("length exceeds {bound}"),
                );
            }
        }

        let mut entries = ClauseStatus::Pass;
        'outer: for s in &self.seqs {
            let mut seen = 0u32;
            for &e in s {
                if e == 0 || e > m || seen & bits::bit(e) != 0 {
                    entries = ClauseStatus::fail(
                        vec![s.clone()],
                        "entries must be distinct labels of the ground set",
                    );
                    break 'outer;
                }
                seen |= bits::bit(e);
            }
        }

        let mut singletons = ClauseStatus::Pass;
        for t in self.ground.labels() {
            if !self.seqs.contains(&vec![t][..]) {
                singletons = ClauseStatus::fail(vec![vec![t]], "missing one-element sequence");
                break;
            }
        }

        let mut prefix_closed = ClauseStatus::Pass;
        'pc: for s in &self.seqs {
            let k = s.len();
            if k < 2 {
                continue;
            }
            let drop_last = &s[..k - 1];
            if !self.seqs.contains(drop_last) {
                prefix_closed = ClauseStatus::fail(
                    vec![s.clone(), drop_last.to_vec()],
                    "missing the sequence without its last entry",
                );
                break 'pc;
            }
            let mut drop_snd: Seq = s[..k - 2].to_vec();
            drop_snd.push(s[k - 1]);
            if !self.seqs.contains(&drop_snd) {
                prefix_closed = ClauseStatus::fail(
                    vec![s.clone(), drop_snd],
                    "missing the sequence without its second-to-last entry",
                );
                break 'pc;
            }
        }

        let trie = self.trie();
        let empty: Vec<u8> = Vec::new();
        let child = |p: &Seq| trie.get(p).unwrap_or(&empty).clone();

        let mut transitive = ClauseStatus::Pass;
        'tr: for (p, ch) in trie.iter() {
            for &s in ch {
                let mut ps = p.clone();
                ps.push(s);
                for &t in &child(&ps) {
                    let mut pt = p.clone();
                    pt.push(t);
                    for &u in &child(&pt) {
                        let mut psu = ps.clone();
                        psu.push(u);
                        if !self.seqs.contains(&psu) {
                            let mut pst = ps.clone();
                            pst.push(t);
                            let mut ptu = pt.clone();
                            ptu.push(u);
                            transitive = ClauseStatus::fail(
                                vec![pst, ptu, psu],
                                "the third sequence is forced but missing",
                            );
                            break 'tr;
                        }
                    }
                }
            }
        }

        // Comparability per prefix length.
        let mut by_k: BTreeMap<u8, ClauseStatus> = BTreeMap::new();
        for (p, ch) in trie.iter() {
            let k = p.len() as u8;
            let entry = by_k.entry(k).or_insert(ClauseStatus::Pass);
            if !entry.ok() {
                continue;
            }
            'pairs: for (i, &s) in ch.iter().enumerate() {
                for &t in &ch[i + 1..] {
                    let mut ps = p.clone();
                    ps.push(s);
                    ps.push(t);
                    let mut pt = p.clone();
                    pt.push(t);
                    pt.push(s);
                    if !self.seqs.contains(&ps) && !self.seqs.contains(&pt) {
                        let mut a = p.clone();
                        a.push(s);
                        let mut b = p.clone();
                        b.push(t);
                        *entry = ClauseStatus::fail(
                            vec![a, b],
                            "neither two-step continuation is present",
                        );
                        break 'pairs;
                    }
                }
            }
        }
        let comparability: Vec<ComparabilityLevel> = by_k
            .into_iter()
            .map(|(k, status)| ComparabilityLevel {
                prefix_len: k,
                required: match mode {
                    ValidateMode::Full => true,
                    ValidateMode::Nested(n) => k < n,
                },
                status,
            })
            .collect();

        ValidationReport {
            mode,
            singletons,
            entries,
            prefix_closed,
            transitive,
            comparability,
            length_bound,
        }
    }

    /// The induced set family at degree n: subsets A such that every
    /// stored sequence of length n+2 whose first n+1 entries lie in A has
    /// its last entry in A as well.
    pub fn family_of(&self, n: i32) -> Family {
        assert!(n >= -1, "degree starts at -1");
        let want = (n + 2) as usize;
        let mut constraints: HashSet<(SubsetMask, u8)> = HashSet::new();
        for s in &self.seqs {
            if s.len() == want {
                let premise = bits::mask_of(s[..want - 1].iter().copied());
                constraints.insert((premise, s[want - 1]));
            }
        }
        let full = self.ground.full();
        let mut sets = Vec::new();
        for a in 0..=full {
            let ok = constraints
                .iter()
                .all(|&(prem, concl)| prem & !a != 0 || a & bits::bit(concl) != 0);
            if ok {
                sets.push(a);
            }
        }
        if full == 0 {
            // 0..=0 covered the single subset already.
            sets.dedup();
        }
        Family::from_sorted_unchecked(self.ground, sets)
    }

    /// Extends a valid family of degree n to one of degree n+1: first
    /// completes comparability at prefix length n (linear extensions,
    /// smallest label first), then attaches to every length-(n+1) prefix
    /// the increasing-label order on its continuation set.
    pub fn extend(&self, n: u8) -> Result<NestedOrders, ExtendError> {
        let report = self.validate(ValidateMode::Nested(n));
        if !report.passes() {
            return Err(ExtendError::InvalidInput(n, Box::new(report)));
        }
        let mut seqs = self.seqs.clone();

        // Complete the frontier orders at prefix length n.
        let trie = self.trie();
        let mut prefixes: Vec<&Seq> = trie.keys().filter(|p| p.len() == n as usize).collect();
        prefixes.sort();
        for p in prefixes {
            let ch = &trie[p];
            if ch.len() < 2 {
                continue;
            }
            // t ≺ s when p⌢(s,t) is already present.
            let below = |s: u8, t: u8| {
                let mut q = p.clone();
                q.push(s);
                q.push(t);
                self.seqs.contains(&q)
            };
            let mut placed: Vec<u8> = Vec::new();
            let mut rest: Vec<u8> = ch.clone();
            while !rest.is_empty() {
                let pick = *rest
                    .iter()
                    .find(|&&c| rest.iter().all(|&o| o == c || !below(c, o)))
                    .expect("a validated strict partial order has a minimal element");
                rest.retain(|&o| o != pick);
                placed.push(pick);
            }
            for (i, &s) in placed.iter().enumerate() {
                for &t in &placed[..i] {
                    let mut q = p.clone();
                    q.push(s);
                    q.push(t);
                    seqs.insert(q);
                }
            }
        }

        // Attach increasing-label orders to the length-(n+1) prefixes.
        let completed = NestedOrders {
            ground: self.ground,
            depth_bound: Some(n + 2),
            seqs: seqs.clone(),
        };
        let trie2 = completed.trie();
        for (p, ch) in trie2.iter() {
            if p.len() != (n + 1) as usize {
                continue;
            }
            for (i, &s) in ch.iter().enumerate() {
                for &t in &ch[..i] {
                    let mut q = p.clone();
                    q.push(s);
                    q.push(t);
                    seqs.insert(q);
                }
            }
        }

        let out = NestedOrders { ground: self.ground, depth_bound: Some(n + 3), seqs };
        debug_assert!(out.validate(ValidateMode::Nested(n + 1)).passes());
        Ok(out)
    }

    /// Witness shape {"m", "n", "seqs"} with sequences sorted
    /// lexicographically.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap()
    }
}

impl Serialize for NestedOrders {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("NestedOrders", 3)?;
        st.serialize_field("m", &self.ground.m())?;
        st.serialize_field("n", &self.degree())?;
        let seqs: Vec<&Seq> = self.seqs.iter().collect();
        st.serialize_field("seqs", &seqs)?;
        st.end()
    }
}

/// The family of degree k-1 generated by k linear orders: sequences
/// (t1..tp), p <= k+1, where every later entry is below each earlier
/// entry t_j in the j-th order.
pub fn nested_from_orders(orders: &[LinearOrder]) -> NestedOrders {
    assert!(!orders.is_empty(), "need at least one order");
    let m = orders[0].m();
    assert!(orders.iter().all(|o| o.m() == m), "orders must share the ground set");
    let ground = GroundSet::new(m).unwrap();
    let k = orders.len();
    let mut seqs: BTreeSet<Seq> = BTreeSet::new();
    // Depth-first over (sequence, candidate mask for the next entry).
    let mut stack: Vec<(Seq, SubsetMask)> = ground
        .labels()
        .map(|t| (vec![t], orders[0].strict_segment(t)))
        .collect();
    while let Some((seq, cands)) = stack.pop() {
        if seq.len() < k + 1 {
            for t in bits::elems(cands) {
                let mut next = seq.clone();
                next.push(t);
                let narrowed = if next.len() <= k {
                    cands & orders[next.len() - 1].strict_segment(t)
                } else {
                    0
                };
                stack.push((next, narrowed));
            }
        }
        seqs.insert(seq);
    }
    NestedOrders { ground, depth_bound: Some(k as u8 + 1), seqs }
}

/// A root order plus one order per admissible prefix: the generator for a
/// family of degree depth-1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderTree {
    ground: GroundSet,
    depth: u8,
    /// Keyed by prefix (the empty key is the root); the value lists the
    /// prefix's continuation set from least to greatest.
    orders: BTreeMap<Seq, Vec<u8>>,
}

impl OrderTree {
    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn depth(&self) -> u8 {
        self.depth
    }

    pub fn orders(&self) -> &BTreeMap<Seq, Vec<u8>> {
        &self.orders
    }

    /// Assembles a tree from explicit orders; validates the segment
    /// structure (each key's domain must be the strict segment below its
    /// last entry in the parent's order).
    pub fn from_orders(
        ground: GroundSet,
        depth: u8,
        orders: BTreeMap<Seq, Vec<u8>>,
    ) -> Result<Self, String> {
        let tree = OrderTree { ground, depth, orders };
        tree.check_shape()?;
        Ok(tree)
    }

    fn check_shape(&self) -> Result<(), String> {
        let root = self.orders.get(&Vec::new()).ok_or("missing root order")?;
        {
            let mut sorted = root.clone();
            sorted.sort_unstable();
            let want: Vec<u8> = self.ground.labels().collect();
            if sorted != want {
                return Err("root order must arrange the whole ground set".into());
            }
        }
        for (p, ord) in &self.orders {
            if p.is_empty() {
                continue;
            }
            if p.len() >= self.depth as usize {
                return Err(format!("prefix {p:?} too deep for depth {}", self.depth));
            }
            let parent = &p[..p.len() - 1];
            let last = p[p.len() - 1];
            let parent_ord = self
                .orders
                .get(parent)
                .ok_or_else(|| format!("prefix {p:?} lacks a parent order"))?;
            let pos = parent_ord
                .iter()
                .position(|&e| e == last)
                .ok_or_else(|| format!("prefix {p:?} leaves its parent's domain"))?;
            let mut dom: Vec<u8> = parent_ord[..pos].to_vec();
            dom.sort_unstable();
            let mut have = ord.clone();
            have.sort_unstable();
            if dom != have {
                return Err(format!("order at {p:?} must arrange the segment below {last}"));
            }
        }
        Ok(())
    }

    /// All admissible sequences of length at most depth+1: the generated
    /// family of nested orders, of degree depth-1.
    pub fn to_nested(&self) -> NestedOrders {
        let mut seqs: BTreeSet<Seq> = BTreeSet::new();
        let root = &self.orders[&Vec::new()];
        let mut stack: Vec<Seq> = root.iter().map(|&t| vec![t]).collect();
        while let Some(seq) = stack.pop() {
            if seq.len() <= self.depth as usize {
                // Continuations: the strict segment below the last entry
                // in the order attached to the sequence minus that entry.
                let parent = &seq[..seq.len() - 1];
                if let Some(ord) = self.orders.get(parent) {
                    let last = seq[seq.len() - 1];
                    let pos = ord.iter().position(|&e| e == last).expect("segment member");
                    for &t in &ord[..pos] {
                        let mut next = seq.clone();
                        next.push(t);
                        stack.push(next);
                    }
                }
            }
            seqs.insert(seq);
        }
        NestedOrders {
            ground: self.ground,
            depth_bound: Some(self.depth + 1),
            seqs,
        }
    }
}

/// Streams every order tree of the given depth over {1..m}: an
/// assignment of one order per admissible prefix, deepest prefixes of
/// length depth-1. Guarded to m <= 6 and degree n <= 3 (depth = n+1).
pub fn enumerate_order_trees(ground: GroundSet, n: u8) -> Result<OrderTreeIter, GuardError> {
    if ground.m() > 6 {
        return Err(GuardError {
            op: "enumerate_order_trees",
            limit: "ground sets of at most 6 elements",
            got: format!("m = {}", ground.m()),
        });
    }
    if n > 3 {
        return Err(GuardError {
            op: "enumerate_order_trees",
            limit: "degree at most 3",
            got: format!("n = {n}"),
        });
    }
    Ok(OrderTreeIter::new(ground, n + 1))
}

/// One choice point: a prefix, its domain (sorted), and the index of the
/// permutation currently assigned to it.
#[derive(Debug, Clone)]
struct Slot {
    prefix: Seq,
    domain: Vec<u8>,
    idx: u64,
    count: u64,
}

pub struct OrderTreeIter {
    ground: GroundSet,
    depth: u8,
    /// Slots grouped by level (level = prefix length).
    levels: Vec<Vec<Slot>>,
    started: bool,
    done: bool,
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// The idx-th permutation (factorial number system) of a sorted domain.
fn nth_perm(domain: &[u8], mut idx: u64) -> Vec<u8> {
    let mut pool = domain.to_vec();
    let mut out = Vec::with_capacity(pool.len());
    for i in (0..pool.len()).rev() {
        let f = factorial(i);
        let j = (idx / f) as usize;
        idx %= f;
        out.push(pool.remove(j));
    }
    out
}

impl OrderTreeIter {
    fn new(ground: GroundSet, depth: u8) -> Self {
        OrderTreeIter { ground, depth, levels: Vec::new(), started: false, done: false }
    }

    fn slot_order(slot: &Slot) -> Vec<u8> {
        nth_perm(&slot.domain, slot.idx)
    }

    /// Builds level `level` from the assignments at level-1.
    fn build_level(&mut self, level: usize) {
        let mut slots = Vec::new();
        if level == 0 {
            let domain: Vec<u8> = self.ground.labels().collect();
            let count = factorial(domain.len());
            slots.push(Slot { prefix: Vec::new(), domain, idx: 0, count });
        } else {
            for parent in &self.levels[level - 1] {
                let order = Self::slot_order(parent);
                for (pos, &t) in order.iter().enumerate() {
                    if pos == 0 {
                        continue; // empty segment below the least element
                    }
                    let mut domain: Vec<u8> = order[..pos].to_vec();
                    domain.sort_unstable();
                    let mut prefix = parent.prefix.clone();
                    prefix.push(t);
                    let count = factorial(domain.len());
                    slots.push(Slot { prefix, domain, idx: 0, count });
                }
            }
            slots.sort_by(|a, b| a.prefix.cmp(&b.prefix));
        }
        self.levels.push(slots);
    }

    fn rebuild_from(&mut self, level: usize) {
        self.levels.truncate(level);
        for l in level..self.depth as usize {
            self.build_level(l);
        }
    }

    fn emit(&self) -> OrderTree {
        let mut orders = BTreeMap::new();
        for level in &self.levels {
            for slot in level {
                orders.insert(slot.prefix.clone(), Self::slot_order(slot));
            }
        }
        OrderTree { ground: self.ground, depth: self.depth, orders }
    }

    /// Odometer step over all slots (deepest level fastest); returns
    /// false when the space is exhausted.
    fn advance(&mut self) -> bool {
        for level in (0..self.levels.len()).rev() {
            for s in (0..self.levels[level].len()).rev() {
                let slot = &mut self.levels[level][s];
                if slot.idx + 1 < slot.count {
                    slot.idx += 1;
                    for reset in self.levels[level][s + 1..].iter_mut() {
                        reset.idx = 0;
                    }
                    self.rebuild_from(level + 1);
                    return true;
                }
            }
            // carry: reset handled by the rebuild after an upper increment
        }
        false
    }
}

impl Iterator for OrderTreeIter {
    type Item = OrderTree;

    fn next(&mut self) -> Option<OrderTree> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.rebuild_from(0);
            return Some(self.emit());
        }
        if self.advance() {
            Some(self.emit())
        } else {
            self.done = true;
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orders::LinearOrder;

    fn ord(s: &str) -> LinearOrder {
        LinearOrder::from_digits(s).unwrap()
    }

    #[test]
    fn two_order_family_membership() {
        let s = nested_from_orders(&[ord("123"), ord("321")]);
        assert!(s.contains(&[3, 1, 2]));
        assert!(!s.contains(&[3, 2, 1])); // needs 1 <_2 2, but 2 <_2 1
        assert!(s.contains(&[2, 1]));
        assert!(!s.contains(&[1, 2]));
        assert_eq!(s.degree(), Some(1));
        assert!(s.validate(ValidateMode::Nested(1)).passes());
        // The generator satisfies comparability at every level it has.
        assert!(s.validate(ValidateMode::Nested(1)).comparable_everywhere());
    }

    #[test]
    fn one_order_family() {
        let s = nested_from_orders(&[ord("12")]);
        let want: BTreeSet<Seq> = [vec![1], vec![2], vec![2, 1]].into_iter().collect();
        assert_eq!(s.seqs(), &want);
    }

    #[test]
    fn induced_family_of_two_orders_is_the_interval_family() {
        let s = nested_from_orders(&[ord("123"), ord("321")]);
        assert_eq!(s.family_of(1), Family::intervals(3));
        // Degree -1 collapses to {X}.
        assert_eq!(s.family_of(-1).sets(), &[0b111]);
    }

    #[test]
    fn validation_catches_broken_clauses() {
        let good = nested_from_orders(&[ord("123"), ord("321")]);
        // Remove a singleton: clause (1).
        let mut seqs = good.seqs().clone();
        seqs.remove(&vec![2]);
        let s = NestedOrders::new(good.ground(), Some(3), seqs);
        let r = s.validate(ValidateMode::Nested(1));
        assert!(!r.singletons.ok());

        // Remove (3,2) but keep (3,1,2), whose second-to-last deletion
        // is (3,2): clause (3).
        let mut seqs = good.seqs().clone();
        assert!(seqs.remove(&vec![3, 2]));
        assert!(seqs.contains(&vec![3, 1, 2]));
        let s = NestedOrders::new(good.ground(), Some(3), seqs);
        let r = s.validate(ValidateMode::Nested(1));
        assert!(!r.prefix_closed.ok());

        // A duplicate entry: clause (2).
        let mut seqs = good.seqs().clone();
        seqs.insert(vec![3, 1, 1]);
        let s = NestedOrders::new(good.ground(), Some(3), seqs);
        assert!(!s.validate(ValidateMode::Nested(1)).entries.ok());

        // Dropping one comparability pair at the root is recorded at
        // prefix length 0.
        let mut seqs = good.seqs().clone();
        assert!(seqs.remove(&vec![3, 2]));
        assert!(seqs.remove(&vec![3, 1, 2]));
        let s = NestedOrders::new(good.ground(), Some(3), seqs);
        let r = s.validate(ValidateMode::Nested(1));
        let level0 = r.comparability.iter().find(|c| c.prefix_len == 0).unwrap();
        assert!(!level0.status.ok());
        assert!(level0.required);
    }

    #[test]
    fn transitivity_violation_reported() {
        // (3,2) and (2,1) force (3,1), which is absent.
        let seqs: BTreeSet<Seq> = [
            vec![1],
            vec![2],
            vec![3],
            vec![3, 2],
            vec![2, 1],
        ]
        .into_iter()
        .collect();
        let s = NestedOrders::new(GroundSet::new(3).unwrap(), Some(3), seqs);
        let r = s.validate(ValidateMode::Nested(1));
        assert!(!r.transitive.ok());
    }

    #[test]
    fn extend_adds_one_level() {
        let base = nested_from_orders(&[ord("12345")]);
        let ext = base.extend(0).unwrap();
        assert!(ext.validate(ValidateMode::Nested(1)).passes());
        assert_eq!(ext.degree(), Some(1));
        // The shorter sequences are untouched.
        let short: BTreeSet<Seq> =
            ext.seqs().iter().filter(|s| s.len() <= 2).cloned().collect();
        assert_eq!(&short, base.seqs());
        // Induced families grow with the degree.
        let f0 = base.family_of(0);
        let f1 = ext.family_of(1);
        assert!(f0.sets().iter().all(|&a| f1.contains(a)));
    }

    #[test]
    fn extend_at_full_depth_changes_nothing() {
        // Depth already maximal: every continuation set at the frontier
        // is empty, so extension is the identity on the sequences.
        let s = nested_from_orders(&[ord("123"), ord("321")]);
        let e = s.extend(1).unwrap();
        assert_eq!(e.seqs(), s.seqs());
    }

    #[test]
    fn tree_counts() {
        let g2 = GroundSet::new(2).unwrap();
        assert_eq!(enumerate_order_trees(g2, 1).unwrap().count(), 2);
        let g3 = GroundSet::new(3).unwrap();
        assert_eq!(enumerate_order_trees(g3, 1).unwrap().count(), 12);
        // Depth 1: just the root orders.
        assert_eq!(enumerate_order_trees(g3, 0).unwrap().count(), 6);
    }

    #[test]
    fn trees_generate_valid_families() {
        let g3 = GroundSet::new(3).unwrap();
        for tree in enumerate_order_trees(g3, 1).unwrap() {
            let s = tree.to_nested();
            let r = s.validate(ValidateMode::Nested(1));
            assert!(r.passes());
            assert!(r.comparable_everywhere());
        }
    }

    #[test]
    fn tree_shape_validation() {
        let g = GroundSet::new(2).unwrap();
        let mut orders = BTreeMap::new();
        orders.insert(Vec::new(), vec![1, 2]);
        orders.insert(vec![2], vec![1]);
        assert!(OrderTree::from_orders(g, 2, orders.clone()).is_ok());
        orders.insert(vec![1], vec![2]); // 2 is not below 1 at the root
        assert!(OrderTree::from_orders(g, 2, orders).is_err());
    }

    #[test]
    fn witness_json_shape() {
        let s = nested_from_orders(&[ord("12")]);
        assert_eq!(
            serde_json::to_string(&s).unwrap(),
            r#"{"m":2,"n":0,"seqs":[[1],[2],[2,1]]}"#
        );
    }
}
