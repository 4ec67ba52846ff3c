//! Simulation toolkit for Turing machines running through transfinite time.
//!
//! The crate provides exact ordinal arithmetic in Cantor normal form
//! ([`ordinal`]), words indexed by ordinals with contraction-based
//! equivalence ([`word`]), limit rules that decide tape contents at limit
//! stages ([`operator`]), a machine engine that runs programs symbolically
//! past `w` with loop certification ([`machine`]), program transformations
//! between alphabet sizes ([`transform`]), a dovetailing observation harness
//! ([`harness`]), codes for reals and ordinals ([`codes`]), and a property
//! classifier for limit rules ([`classify`]).

pub mod classify;
pub mod codes;
pub mod harness;
pub mod machine;
pub mod operator;
pub mod ordinal;
pub mod transform;
pub mod word;

pub use ordinal::{Ordinal, OrdinalClass};
pub use word::WordExpr;
