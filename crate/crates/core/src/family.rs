//! Finite families of subsets of a ground set {1..m}, m <= 16.
//!
//! A subset is a bitmask (`u32`) with element `i` in bit `i-1`; a family
//! stores its member masks sorted strictly increasing, so equality of
//! families is equality of the struct.
//!
//! The text notation is `["m" ":"] set ("," set)*` where a set is `0`
//! (the empty set), a run of digits (one element per digit), or
//! `{a,b,...}` with decimal labels. Without the prefix the ground size
//! is the largest label mentioned. `"m:"` with no sets denotes the empty
//! family over {1..m}.

use crate::bits;
use itertools::Itertools;
use serde::Serialize;
use std::fmt;
use thiserror::Error;

/// Hard cap on the ground size; masks fit in 16 bits.
pub const MAX_GROUND: u8 = 16;

/// A subset of the ground set as a bitmask (element `i` <-> bit `i-1`).
pub type SubsetMask = u32;

/// The ground set {1..m}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GroundSet {
    m: u8,
}

impl GroundSet {
    pub fn new(m: u8) -> Result<Self, FamilyError> {
        if m > MAX_GROUND {
            return Err(FamilyError::GroundTooLarge(m));
        }
        Ok(GroundSet { m })
    }

    pub fn m(&self) -> u8 {
        self.m
    }

    /// Mask of the whole ground set.
    pub fn full(&self) -> SubsetMask {
        bits::full_mask(self.m)
    }

    /// All 1-based labels.
    pub fn labels(&self) -> impl Iterator<Item = u8> {
        1..=self.m
    }
}

/// A finite family of subsets of a ground set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Family {
    ground: GroundSet,
    sets: Vec<SubsetMask>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FamilyError {
    #[error("ground size {0} exceeds the cap of 16")]
    GroundTooLarge(u8),
    #[error("set {mask:#x} is not a subset of the {m}-element ground set")]
    MaskOutOfRange { mask: SubsetMask, m: u8 },
}

/// Error from the text-notation parser, with a byte position.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl Family {
    /// Builds a family, sorting and deduplicating the given member masks.
    pub fn new(
        ground: GroundSet,
        sets: impl IntoIterator<Item = SubsetMask>,
    ) -> Result<Self, FamilyError> {
        let full = ground.full();
        let mut v: Vec<SubsetMask> = Vec::new();
        for s in sets {
            if s & !full != 0 {
                return Err(FamilyError::MaskOutOfRange { mask: s, m: ground.m });
            }
            v.push(s);
        }
        v.sort_unstable();
        v.dedup();
        Ok(Family { ground, sets: v })
    }

    /// Internal constructor for masks already known to be sorted, unique
    /// and within the ground set.
    pub(crate) fn from_sorted_unchecked(ground: GroundSet, sets: Vec<SubsetMask>) -> Self {
        debug_assert!(sets.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(sets.iter().all(|s| s & !ground.full() == 0));
        Family { ground, sets }
    }

    /// Decodes a family over {1..m} from a bitset of member masks:
    /// mask `j` belongs to the family iff bit `j` of `code` is set.
    /// Only meaningful for m <= 6 (2^m <= 64 candidate masks).
    pub fn from_code(m: u8, code: u64) -> Self {
        assert!(m <= 6, "from_code supports m <= 6");
        let ground = GroundSet::new(m).unwrap();
        let sets = (0..(1u32 << m)).filter(|&j| code >> j & 1 == 1).collect();
        Family { ground, sets }
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn m(&self) -> u8 {
        self.ground.m
    }

    pub fn sets(&self) -> &[SubsetMask] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn contains(&self, mask: SubsetMask) -> bool {
        self.sets.binary_search(&mask).is_ok()
    }

    /// True when every member equals the ground set (so: the empty family
    /// or {X} alone).
    pub fn subset_of_top(&self) -> bool {
        let full = self.ground.full();
        self.sets.iter().all(|&s| s == full)
    }

    /// True when the members are pairwise comparable under inclusion.
    pub fn is_chain(&self) -> bool {
        for (i, &a) in self.sets.iter().enumerate() {
            for &b in &self.sets[i + 1..] {
                if a & b != a && a & b != b {
                    return false;
                }
            }
        }
        true
    }

    /// Smallest family containing `self` that is closed under pairwise
    /// intersection and contains the ground set (the empty intersection).
    pub fn intersection_closure(&self) -> Family {
        let mut have: Vec<SubsetMask> = self.sets.clone();
        have.push(self.ground.full());
        have.sort_unstable();
        have.dedup();
        loop {
            let mut added = false;
            let snapshot = have.clone();
            for (i, &a) in snapshot.iter().enumerate() {
                for &b in &snapshot[i + 1..] {
                    let c = a & b;
                    if have.binary_search(&c).is_err() {
                        let pos = have.binary_search(&c).unwrap_err();
                        have.insert(pos, c);
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        Family { ground: self.ground, sets: have }
    }

    /// Restriction to `keep`: the family {A ∩ keep : A ∈ self} over the
    /// ground set keep, relabelled onto {1..|keep|} in increasing label
    /// order.
    pub fn restrict(&self, keep: SubsetMask) -> Family {
        assert!(keep & !self.ground.full() == 0, "restriction set must lie in the ground set");
        let m = keep.count_ones() as u8;
        let ground = GroundSet::new(m).unwrap();
        let mut sets: Vec<SubsetMask> =
            self.sets.iter().map(|&s| bits::compress(s, keep)).collect();
        sets.sort_unstable();
        sets.dedup();
        Family { ground, sets }
    }

    /// The link of the family at (`a_set`, `a`): {B ∩ a_set ∖ {a} : a ∈ B}
    /// over the ground set a_set ∖ {a}, relabelled in increasing label
    /// order. Requires `a ∈ a_set ⊆ X`.
    pub fn link(&self, a_set: SubsetMask, a: u8) -> Family {
        let abit = bits::bit(a);
        assert!(a_set & !self.ground.full() == 0 && a_set & abit != 0, "need a ∈ a_set ⊆ X");
        let keep = a_set & !abit;
        let m = keep.count_ones() as u8;
        let ground = GroundSet::new(m).unwrap();
        let mut sets: Vec<SubsetMask> = self
            .sets
            .iter()
            .filter(|&&b| b & abit != 0)
            .map(|&b| bits::compress(b & keep, keep))
            .collect();
        sets.sort_unstable();
        sets.dedup();
        Family { ground, sets }
    }

    /// Applies a relabelling of the ground set; `perm[i-1]` is the new
    /// label of element `i`.
    pub fn relabel(&self, perm: &[u8]) -> Family {
        assert_eq!(perm.len(), self.m() as usize);
        let mut sets: Vec<SubsetMask> =
            self.sets.iter().map(|&s| bits::apply_perm(s, perm)).collect();
        sets.sort_unstable();
        Family { ground: self.ground, sets }
    }

    /// The lexicographically least relabelling of the family (comparing
    /// the sorted member-mask vectors), plus one permutation achieving it.
    ///
    /// Brute force over the m! relabellings with an early-exit comparison;
    /// intended for the small grounds the search routines work over.
    pub fn canonicalize(&self) -> (Family, Vec<u8>) {
        let m = self.m();
        if m == 0 || self.sets.is_empty() {
            return (self.clone(), (1..=m).collect());
        }
        let labels: Vec<u8> = (1..=m).collect();
        let mut best: Option<(Vec<SubsetMask>, Vec<u8>)> = None;
        let mut scratch: Vec<SubsetMask> = Vec::with_capacity(self.sets.len());
        for perm in labels.iter().copied().permutations(m as usize) {
            scratch.clear();
            scratch.extend(self.sets.iter().map(|&s| bits::apply_perm(s, &perm)));
            scratch.sort_unstable();
            let better = match &best {
                None => true,
                Some((b, _)) => scratch.as_slice() < b.as_slice(),
            };
            if better {
                best = Some((scratch.clone(), perm));
            }
        }
        let (sets, perm) = best.unwrap();
        (Family { ground: self.ground, sets }, perm)
    }

    /// Canonical serialization `"m|h1.h2...."`: ground size, then the
    /// canonical member masks ascending in lowercase hex.
    pub fn canonical_key(&self) -> String {
        let (canon, _) = self.canonicalize();
        let body = canon.sets.iter().map(|s| format!("{s:x}")).join(".");
        format!("{}|{}", canon.m(), body)
    }

    /// Adds the ground set and every singleton to the family.
    pub fn augment(&self) -> Family {
        let mut sets = self.sets.clone();
        sets.push(self.ground.full());
        sets.extend(self.ground.labels().map(bits::bit));
        sets.sort_unstable();
        sets.dedup();
        Family { ground: self.ground, sets }
    }

    /// All 2^m subsets.
    pub fn cube(m: u8) -> Self {
        let ground = GroundSet::new(m).expect("ground cap");
        let sets = (0..=bits::full_mask(m)).collect::<Vec<_>>();
        let sets = if m == 0 { vec![0] } else { sets };
        Family { ground, sets }
    }

    /// The empty set plus every interval {i..j} of {1..m}.
    pub fn intervals(m: u8) -> Self {
        let ground = GroundSet::new(m).expect("ground cap");
        let mut sets = vec![0u32];
        for i in 1..=m {
            for j in i..=m {
                sets.push(((i as u32)..=(j as u32)).fold(0, |acc, e| acc | bits::bit(e as u8)));
            }
        }
        sets.sort_unstable();
        sets.dedup();
        Family { ground, sets }
    }

    /// All subsets of {1..m} of cardinality exactly `r`.
    pub fn uniform(m: u8, r: u8) -> Self {
        let ground = GroundSet::new(m).expect("ground cap");
        let sets = (0..=bits::full_mask(m))
            .filter(|s| s.count_ones() == r as u32)
            .collect();
        Family { ground, sets }
    }

    /// Parses the text notation described in the module docs.
    pub fn parse(input: &str) -> Result<Self, ParseError> {
        Parser::new(input).family()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.m())?;
        if self.sets.is_empty() {
            return Ok(());
        }
        write!(f, " ")?;
        let mut first = true;
        for &s in &self.sets {
            if !first {
                write!(f, ",")?;
            }
            first = false;
            if s == 0 {
                write!(f, "0")?;
            } else if self.m() <= 9 {
                for e in bits::elems(s) {
                    write!(f, "{e}")?;
                }
            } else {
                write!(f, "{{{}}}", bits::elems(s).map(|e| e.to_string()).join(","))?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src: src.as_bytes(), pos: 0 }
    }

    fn err<T>(&self, pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn integer(&mut self) -> Result<(u32, usize), ParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err(start, "expected a number");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match text.parse::<u32>() {
            Ok(v) => Ok((v, start)),
            Err(_) => self.err(start, "number out of range"),
        }
    }

    /// One set token; returns (mask, position, labels mentioned).
    fn set_token(&mut self, declared: Option<u8>) -> Result<(SubsetMask, u8), ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(b'{') => {
                self.pos += 1;
                let mut mask = 0u32;
                let mut maxe = 0u8;
                loop {
                    self.skip_ws();
                    let (v, vpos) = self.integer()?;
                    let e = self.check_elem(v, vpos, declared)?;
                    mask |= bits::bit(e);
                    maxe = maxe.max(e);
                    self.skip_ws();
                    match self.peek() {
                        Some(b',') => {
                            self.pos += 1;
                        }
                        Some(b'}') => {
                            self.pos += 1;
                            return Ok((mask, maxe));
                        }
                        _ => return self.err(self.pos, "expected ',' or '}' in a braced set"),
                    }
                }
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.peek().is_some_and(|ch| ch.is_ascii_digit()) {
                    self.pos += 1;
                }
                let digits = &self.src[start..self.pos];
                if digits == b"0" {
                    return Ok((0, 0));
                }
                let mut mask = 0u32;
                let mut maxe = 0u8;
                for (i, &d) in digits.iter().enumerate() {
                    if d == b'0' {
                        return self.err(start + i, "element 0 is only valid as the empty-set token");
                    }
                    let e = self.check_elem((d - b'0') as u32, start + i, declared)?;
                    mask |= bits::bit(e);
                    maxe = maxe.max(e);
                }
                Ok((mask, maxe))
            }
            _ => self.err(self.pos, "expected a set"),
        }
    }

    fn check_elem(&self, v: u32, pos: usize, declared: Option<u8>) -> Result<u8, ParseError> {
        if v == 0 {
            return self.err(pos, "element 0 is only valid as the empty-set token");
        }
        if v > MAX_GROUND as u32 {
            return self.err(pos, format!("element {v} exceeds the ground cap of 16"));
        }
        if let Some(m) = declared {
            if v > m as u32 {
                return self.err(pos, format!("element {v} exceeds the declared ground size {m}"));
            }
        }
        Ok(v as u8)
    }

    fn family(&mut self) -> Result<Family, ParseError> {
        self.skip_ws();
        // Disambiguate a leading integer: "m:" prefix vs a digit-form set.
        let mut declared: Option<u8> = None;
        let save = self.pos;
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let (v, vpos) = self.integer()?;
            self.skip_ws();
            if self.peek() == Some(b':') {
                self.pos += 1;
                if v > MAX_GROUND as u32 {
                    return self.err(vpos, format!("ground size {v} exceeds the cap of 16"));
                }
                declared = Some(v as u8);
            } else {
                self.pos = save;
            }
        }

        self.skip_ws();
        let mut sets: Vec<SubsetMask> = Vec::new();
        let mut max_label = 0u8;
        if self.pos == self.src.len() {
            // Empty set list: only the "m:" form denotes the empty family.
            match declared {
                Some(m) => {
                    let ground = GroundSet::new(m).unwrap();
                    return Ok(Family { ground, sets });
                }
                None => return self.err(self.pos, "expected a set"),
            }
        }
        loop {
            let (mask, maxe) = self.set_token(declared)?;
            sets.push(mask);
            max_label = max_label.max(maxe);
            self.skip_ws();
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                }
                None => break,
                _ => return self.err(self.pos, "expected ',' between sets"),
            }
        }
        let m = declared.unwrap_or(max_label);
        let ground = GroundSet::new(m).unwrap();
        sets.sort_unstable();
        sets.dedup();
        Ok(Family { ground, sets })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::mask_of;
    use proptest::prelude::*;

    fn fam(text: &str) -> Family {
        Family::parse(text).unwrap()
    }

    #[test]
    fn parse_digit_form() {
        let f = fam("6: 12,23,34,35,56,123,235,356,2356");
        assert_eq!(f.m(), 6);
        assert_eq!(f.sets(), &[3, 6, 7, 12, 20, 22, 48, 52, 54]);
    }

    #[test]
    fn parse_infers_ground_from_max_label() {
        let f = fam("12,23");
        assert_eq!(f.m(), 3);
        let g = fam("{1,2,10},{3}");
        assert_eq!(g.m(), 10);
        assert_eq!(g.sets(), &[4, 0b1000000011]);
    }

    #[test]
    fn parse_empty_tokens() {
        assert_eq!(fam("3: 0").sets(), &[0]);
        assert_eq!(fam("3: 0").m(), 3);
        let empty = fam("4:");
        assert!(empty.is_empty());
        assert_eq!(empty.m(), 4);
        // "0" with no prefix: the empty set over an empty ground.
        let z = fam("0");
        assert_eq!(z.m(), 0);
        assert_eq!(z.sets(), &[0]);
    }

    #[test]
    fn parse_errors() {
        assert!(Family::parse("3: 14").is_err());
        assert!(Family::parse("abc").is_err());
        assert!(Family::parse("12,103").is_err());
        assert!(Family::parse("{1,2").is_err());
        assert!(Family::parse("").is_err());
        assert!(Family::parse("17: 1").is_err());
        assert!(Family::parse("{17}").is_err());
        let e = Family::parse("3: 12,,13").unwrap_err();
        assert!(e.pos > 0);
    }

    #[test]
    fn display_round_trips_representative_cases() {
        for text in ["3: 12,23", "3: 0", "4:", "0: 0", "10: {1,2,10},{3}", "2: 0,1,12"] {
            let f = fam(text);
            assert_eq!(Family::parse(&f.to_string()).unwrap(), f, "through {text}");
        }
        assert_eq!(fam("12,23").to_string(), "3: 12,23");
    }

    #[test]
    fn chain_detection() {
        assert!(fam("3: 1,12,123").is_chain());
        assert!(fam("3: 0").is_chain());
        assert!(fam("2:").is_chain());
        assert!(!fam("2: 1,2").is_chain());
    }

    #[test]
    fn closure_adds_intersections_and_top() {
        let f = fam("3: 12,23").intersection_closure();
        assert_eq!(f.sets(), &[0b010, 0b011, 0b110, 0b111]);
        // Idempotent on an already closed family.
        assert_eq!(f.intersection_closure(), f);
        // The closure of the empty family is {X}.
        assert_eq!(fam("2:").intersection_closure().sets(), &[0b11]);
    }

    #[test]
    fn restriction_relabels_in_label_order() {
        let f = fam("3: 12,3").restrict(mask_of([1, 3]));
        assert_eq!(f.m(), 2);
        assert_eq!(f.sets(), &[1, 2]);

        let p2 = fam("6: 12,23,34,35,56,123,235,356,2356");
        let r = p2.restrict(mask_of([2, 3, 5, 6]));
        assert_eq!(r.m(), 4);
        assert_eq!(r.sets(), &[1, 2, 3, 6, 7, 12, 14, 15]);
    }

    #[test]
    fn links() {
        let cube2 = Family::cube(2);
        let l = cube2.link(0b11, 1);
        assert_eq!(l.m(), 1);
        assert_eq!(l.sets(), &[0, 1]);

        let l2 = fam("2: 0,1,12").link(0b11, 2);
        assert_eq!(l2.m(), 1);
        assert_eq!(l2.sets(), &[1]);

        let p2 = fam("6: 12,23,34,35,56,123,235,356,2356");
        let l3 = p2.link(p2.ground().full(), 3);
        assert_eq!(l3.m(), 5);
        // {2},{4},{5},{1,2},{2,5},{5,6},{2,5,6} relabelled over {1,2,4,5,6}.
        assert_eq!(l3.sets(), &[2, 3, 4, 8, 10, 24, 26]);
    }

    #[test]
    fn canonical_form_identifies_relabellings() {
        let a = fam("3: 2,23");
        let b = fam("3: 1,12");
        assert_eq!(a.canonicalize().0, b.canonicalize().0);
        let (canon, perm) = a.canonicalize();
        assert_eq!(a.relabel(&perm), canon);
        // Idempotent.
        assert_eq!(canon.canonicalize().0, canon);
    }

    #[test]
    fn chains_with_equal_size_profile_share_canonical_form() {
        // Exhaustive over m <= 3: any two chains with the same multiset of
        // member sizes are relabellings of one another.
        for m in 0..=3u8 {
            let n = 1u32 << (1 << m);
            let mut groups: std::collections::HashMap<Vec<u32>, Family> =
                std::collections::HashMap::new();
            for code in 0..n {
                let f = Family::from_code(m, code as u64);
                if !f.is_chain() {
                    continue;
                }
                let mut profile: Vec<u32> = f.sets().iter().map(|s| s.count_ones()).collect();
                profile.sort_unstable();
                let canon = f.canonicalize().0;
                match groups.entry(profile) {
                    std::collections::hash_map::Entry::Occupied(e) => {
                        assert_eq!(e.get(), &canon)
                    }
                    std::collections::hash_map::Entry::Vacant(v) => {
                        v.insert(canon);
                    }
                }
            }
        }
    }

    #[test]
    fn canonical_key_format() {
        assert_eq!(fam("3: 2,23").canonical_key(), "3|1.3");
        assert_eq!(fam("4:").canonical_key(), "4|");
        assert_eq!(fam("2: 0,12").canonical_key(), "2|0.3");
    }

    #[test]
    fn augmentation() {
        assert_eq!(fam("2:").augment().sets(), &[1, 2, 3]);
        let p = fam("3: 13").augment();
        assert_eq!(p.sets(), &[1, 2, 4, 5, 7]);
        assert_eq!(p.augment(), p);
    }

    #[test]
    fn builders() {
        assert_eq!(Family::cube(2).sets(), &[0, 1, 2, 3]);
        assert_eq!(Family::cube(0).sets(), &[0]);
        assert_eq!(
            Family::intervals(3).sets(),
            &[0, 1, 2, 3, 4, 6, 7]
        );
        assert_eq!(Family::uniform(4, 2).len(), 6);
        assert_eq!(Family::uniform(4, 0).sets(), &[0]);
    }

    fn arbitrary_family() -> impl Strategy<Value = Family> {
        (0u8..=11).prop_flat_map(|m| {
            let full = bits::full_mask(m) as u64;
            proptest::collection::vec(0u64..=full, 0..=12).prop_map(move |masks| {
                Family::new(GroundSet::new(m).unwrap(), masks.into_iter().map(|x| x as u32))
                    .unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1024))]
        #[test]
        fn text_notation_round_trips(f in arbitrary_family()) {
            let text = f.to_string();
            prop_assert_eq!(Family::parse(&text).unwrap(), f);
        }
    }

    proptest! {
        #[test]
        fn closure_is_idempotent_and_monotone(f in arbitrary_family()) {
            let c = f.intersection_closure();
            prop_assert!(f.sets().iter().all(|&s| c.contains(s)));
            prop_assert!(c.contains(c.ground().full()));
            prop_assert_eq!(c.intersection_closure(), c);
        }

        #[test]
        fn canonical_form_is_relabelling_invariant(
            (f, pidx) in (0u8..=5).prop_flat_map(|m| {
                let full = bits::full_mask(m) as u64;
                let fams = proptest::collection::vec(0u64..=full, 0..=10).prop_map(move |masks| {
                    Family::new(GroundSet::new(m).unwrap(), masks.into_iter().map(|x| x as u32))
                        .unwrap()
                });
                (fams, 0usize..120)
            })
        ) {
            let labels: Vec<u8> = (1..=f.m()).collect();
            let perms: Vec<Vec<u8>> = labels.iter().copied()
                .permutations(f.m() as usize).collect();
            let perm = &perms[pidx % perms.len()];
            prop_assert_eq!(f.relabel(perm).canonicalize().0, f.canonicalize().0);
        }
    }
}
