//! Exact arithmetic for Thompson's group `T` and its modular subgroup.
//!
//! Elements of `T` are available in three interchangeable forms:
//!
//! * reduced tree pair diagrams ([`tree_pairs`]),
//! * piecewise-linear circle maps with dyadic breakpoints ([`circle_maps::PlMap`]),
//! * piecewise-`PSL₂(ℤ)` maps of the projective line ([`circle_maps::PpMap`]),
//!
//! and the Minkowski question mark function ([`farey`]) conjugates the last
//! form onto the second. On top of that sit two membership tests for the
//! copy of `PSL₂(ℤ) = ⟨a, b | a² = b³ = 1⟩` inside `T`: one on tree pair
//! diagrams ([`thin`]) and one on slope sequences ([`seq`]). The [`harness`]
//! module runs the word-length experiments and exhaustive sweeps.
//!
//! Throughout, juxtaposition of group elements means "apply the left factor
//! first": `(gh)(x) = h(g(x))`. No floating point is used anywhere.

pub mod circle_maps;
pub mod error;
pub mod farey;
pub mod harness;
pub mod psl2z;
pub mod seq;
pub mod thin;
pub mod tree_pairs;

pub use error::{Error, Result};

use std::fmt;

/// A `±1` label: a δ exponent of a normal word or a thin-tree weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    /// The indicator ε: `+1 ↦ 1`, `−1 ↦ 0`.
    pub fn indicator(self) -> u8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => 0,
        }
    }

    /// Inverse of [`Sign::indicator`].
    pub fn from_indicator(bit: bool) -> Sign {
        if bit {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Plus => f.write_str("+1"),
            Sign::Minus => f.write_str("-1"),
        }
    }
}
