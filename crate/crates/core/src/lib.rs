//! M-small supersingular elliptic curves.
//!
//! Builds the set of supersingular j-invariants in characteristic p that
//! carry a non-integer endomorphism of degree at most M, splits it into
//! classes indexed by fundamental discriminants, and certifies the distance
//! structure of those classes in the isogeny graph. A quaternion-order
//! lattice layer checks the matching statements on the maximal-order side.

pub mod arith;
pub mod classpoly;
pub mod error;
pub mod isograph;
pub mod modpoly;
pub mod msmall;
pub mod poly;
pub mod quadforms;
pub mod quatorders;

pub use error::{Error, Result};
