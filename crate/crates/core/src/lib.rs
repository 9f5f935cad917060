//! Exact computation of the nested-orders index of finite set families,
//! with certificate-based bracketing of the freedom index.
//!
//! A family of subsets of {1..m} is measured by the least degree n such
//! that it embeds into the family induced by a system of nested linear
//! orders of depth n+1. The index is computed two independent ways (a
//! memoized recursion over link families and a direct search over order
//! trees), comes with counting-bound checks, and is complemented by
//! upper-bound certificates for the non-computable freedom index it
//! bounds from below.

pub mod bits;
pub mod cache;
pub mod family;
pub mod fprec;
pub mod index;
pub mod nested;
pub mod orders;
pub mod structure;

pub use family::{Family, GroundSet, SubsetMask};
pub use index::{fr_bracket, nestbound_check, no_direct, no_rec, no_rec_trace, Memo};
pub use nested::{nested_from_orders, NestedOrders, OrderTree, ValidateMode};
pub use orders::{is_representable, search_orders, LinearOrder};
pub use structure::{classify4, contains_cycle};
