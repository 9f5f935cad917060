//! Cycle detection in restricted families and the complete
//! classification of intersection-closed families on a four-element
//! ground set.

use crate::bits;
use crate::family::{Family, SubsetMask};
use serde::Serialize;
use std::collections::HashSet;
use thiserror::Error;

/// A support of size at least 3 whose restricted family contains every
/// edge of a closed tour through the support.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleWitness {
    pub support: Vec<u8>,
    pub cycle: Vec<u8>,
}

/// Lexicographically least closed tour through `verts` (first vertex
/// fixed, second kept below the last to quotient direction), or none.
fn ham_cycle(verts: &[u8], edges: &HashSet<(u8, u8)>) -> Option<Vec<u8>> {
    let k = verts.len();
    let has = |a: u8, b: u8| edges.contains(&(a.min(b), a.max(b)));
    for &v in verts {
        let deg = verts.iter().filter(|&&w| w != v && has(v, w)).count();
        if deg < 2 {
            return None;
        }
    }
    fn grow(
        path: &mut Vec<u8>,
        avail: &mut Vec<bool>,
        verts: &[u8],
        has: &dyn Fn(u8, u8) -> bool,
    ) -> bool {
        if path.len() == verts.len() {
            return has(*path.last().unwrap(), path[0]) && path[1] < *path.last().unwrap();
        }
        for (i, &v) in verts.iter().enumerate() {
            if !avail[i] || !has(*path.last().unwrap(), v) {
                continue;
            }
            path.push(v);
            avail[i] = false;
            if grow(path, avail, verts, has) {
                return true;
            }
            path.pop();
            avail[i] = true;
        }
        false
    }
    let mut path = vec![verts[0]];
    let mut avail = vec![true; k];
    avail[0] = false;
    if grow(&mut path, &mut avail, verts, &has) {
        Some(path)
    } else {
        None
    }
}

/// Scans supports in ascending mask order; on each, collects the
/// doubletons of the restricted family as edges and looks for a closed
/// tour covering the support.
pub fn contains_cycle(f: &Family) -> Option<CycleWitness> {
    let full = f.ground().full();
    for support in 0..=full {
        if support.count_ones() < 3 {
            continue;
        }
        let mut edges: HashSet<(u8, u8)> = HashSet::new();
        for &b in f.sets() {
            let e: SubsetMask = b & support;
            if e.count_ones() == 2 {
                let mut it = bits::elems(e);
                let x = it.next().unwrap();
                let y = it.next().unwrap();
                edges.insert((x, y));
            }
        }
        let verts: Vec<u8> = bits::elems(support).collect();
        if edges.len() < verts.len() {
            continue;
        }
        if let Some(cycle) = ham_cycle(&verts, &edges) {
            return Some(CycleWitness { support: verts, cycle });
        }
    }
    None
}

/// The four classes of intersection-closed families on {1,2,3,4},
/// ordered by index value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Class4Label {
    /// Linearly ordered by inclusion: index 0.
    Chain,
    /// Neither chain, cycle, nor full cube: index 1.
    Acyclic,
    /// Contains a cycle but not every subset: index 2.
    Cyclic,
    /// Every subset of the ground set: index 3.
    FullCube,
}

impl Class4Label {
    pub fn value(self) -> i32 {
        match self {
            Class4Label::Chain => 0,
            Class4Label::Acyclic => 1,
            Class4Label::Cyclic => 2,
            Class4Label::FullCube => 3,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("classification requires a 4-element ground set, got {0}")]
    GroundMismatch(u8),
    #[error("classification requires an intersection-closed family containing the ground set")]
    NotClosed,
}

/// Pure case analysis; its agreement with the computed index is checked
/// by the test suite rather than assumed here.
pub fn classify4(f: &Family) -> Result<Class4Label, ClassifyError> {
    if f.m() != 4 {
        return Err(ClassifyError::GroundMismatch(f.m()));
    }
    if &f.intersection_closure() != f {
        return Err(ClassifyError::NotClosed);
    }
    if f.is_chain() {
        return Ok(Class4Label::Chain);
    }
    if f == &Family::cube(4) {
        return Ok(Class4Label::FullCube);
    }
    if contains_cycle(f).is_some() {
        return Ok(Class4Label::Cyclic);
    }
    Ok(Class4Label::Acyclic)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(text: &str) -> Family {
        Family::parse(text).unwrap()
    }

    #[test]
    fn triangle_is_a_cycle() {
        let w = contains_cycle(&fam("3: 12,23,13")).unwrap();
        assert_eq!(w.support, vec![1, 2, 3]);
        assert_eq!(w.cycle, vec![1, 2, 3]);
    }

    #[test]
    fn three_tripletons_cycle_through_their_complements() {
        let w = contains_cycle(&fam("4: 123,124,134")).unwrap();
        assert_eq!(w.support, vec![2, 3, 4]);
        assert_eq!(w.cycle, vec![2, 3, 4]);
    }

    #[test]
    fn path_is_acyclic() {
        assert!(contains_cycle(&fam("4: 12,23,34")).is_none());
    }

    #[test]
    fn four_cycle_found_with_chords_absent() {
        let w = contains_cycle(&fam("4: 12,23,34,14")).unwrap();
        assert_eq!(w.support, vec![1, 2, 3, 4]);
        assert_eq!(w.cycle, vec![1, 2, 3, 4]);
    }

    #[test]
    fn doubletons_must_come_from_the_restriction() {
        // {1,2,3}∩{2,3} etc: restriction to {2,3,4} of tripletons forms
        // the triangle even though no doubleton is a member.
        let w = contains_cycle(&fam("4: 123,234,124,34")).unwrap();
        assert!(w.support.len() >= 3);
    }

    #[test]
    fn classification_cases() {
        assert_eq!(classify4(&Family::cube(4)).unwrap(), Class4Label::FullCube);
        assert_eq!(
            classify4(&fam("4: 0,1,12,123,1234")).unwrap(),
            Class4Label::Chain
        );
        let cyc = fam("4: 12,23,13").intersection_closure();
        assert_eq!(classify4(&cyc).unwrap(), Class4Label::Cyclic);
        let path = fam("4: 12,23,34").intersection_closure();
        assert_eq!(classify4(&path).unwrap(), Class4Label::Acyclic);
    }

    #[test]
    fn classification_preconditions() {
        assert_eq!(
            classify4(&fam("3: 12")).unwrap_err(),
            ClassifyError::GroundMismatch(3)
        );
        assert_eq!(
            classify4(&fam("4: 12,23")).unwrap_err(),
            ClassifyError::NotClosed
        );
    }
}
