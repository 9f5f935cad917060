//! Small bitmask helpers shared by the other modules.
//!
//! Ground elements are labelled 1..=m and element `i` lives in bit `i-1`.

/// Iterates the elements (1-based labels) of a mask in increasing order.
pub fn elems(mask: u32) -> impl Iterator<Item = u8> {
    let mut rest = mask;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let b = rest.trailing_zeros() as u8;
            rest &= rest - 1;
            Some(b + 1)
        }
    })
}

/// Bit for element `e` (1-based).
#[inline]
pub fn bit(e: u8) -> u32 {
    debug_assert!((1..=32).contains(&e));
    1 << (e - 1)
}

/// Mask of the full ground set {1..m}.
#[inline]
pub fn full_mask(m: u8) -> u32 {
    if m == 0 {
        0
    } else {
        (1u32 << m) - 1
    }
}

/// Builds a mask from 1-based element labels.
pub fn mask_of(elems: impl IntoIterator<Item = u8>) -> u32 {
    elems.into_iter().fold(0, |acc, e| acc | bit(e))
}

/// Renumbers the elements of `mask` onto {1..k} where `keep` (with k set
/// bits) tells which ambient elements survive, in increasing label order.
/// Bits of `mask` outside `keep` are dropped.
pub fn compress(mask: u32, keep: u32) -> u32 {
    let mut out = 0u32;
    let mut pos = 0;
    let mut rest = keep;
    while rest != 0 {
        let b = rest & rest.wrapping_neg();
        if mask & b != 0 {
            out |= 1 << pos;
        }
        pos += 1;
        rest &= rest - 1;
    }
    out
}

/// Applies a relabelling to a mask: `perm[i-1]` is the new label of
/// element `i`.
pub fn apply_perm(mask: u32, perm: &[u8]) -> u32 {
    let mut out = 0u32;
    for e in elems(mask) {
        out |= bit(perm[(e - 1) as usize]);
    }
    out
}

/// Iterates every submask of `mask`, including 0 and `mask` itself,
/// in increasing numeric order.
pub fn submasks(mask: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(0u32);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == mask {
            None
        } else {
            Some(cur.wrapping_sub(mask) & mask)
        };
        Some(cur)
    })
}

/// Binomial coefficient extended so that C(a, -1) = [a == -1].
///
/// The degenerate row keeps the size-count bound meaningful for families
/// whose index is -1 (only the ground set itself can occur, at k = m+1).
pub fn binom_ext(a: i64, b: i64) -> u64 {
    if b == -1 {
        return u64::from(a == -1);
    }
    if b < 0 || a < 0 || b > a {
        return 0;
    }
    let mut acc: u64 = 1;
    for i in 0..b {
        acc = acc * ((a - i) as u64) / ((i + 1) as u64);
    }
    acc
}
