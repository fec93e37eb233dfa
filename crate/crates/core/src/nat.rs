//! Arbitrary-precision naturals and the Cantor pairing `c`, `p1`, `p2`.
//!
//! Most values flowing through the interpreter are small, so [`Nat`] keeps
//! anything that fits a `u64` inline and only falls back to a shared
//! [`BigUint`] above that.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A natural number. Invariant: `Big` only holds values above `u64::MAX`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Nat {
    Small(u64),
    Big(Arc<BigUint>),
}

impl Nat {
    pub const ZERO: Nat = Nat::Small(0);

    pub fn from_big(n: BigUint) -> Nat {
        match n.to_u64() {
            Some(v) => Nat::Small(v),
            None => Nat::Big(Arc::new(n)),
        }
    }

    pub fn to_big(&self) -> BigUint {
        match self {
            Nat::Small(v) => BigUint::from(*v),
            Nat::Big(b) => (**b).clone(),
        }
    }

    pub fn as_u64(&self) -> Option<u64> {
        match self {
            Nat::Small(v) => Some(*v),
            Nat::Big(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Nat::Small(0))
    }

    pub fn succ(&self) -> Nat {
        match self {
            Nat::Small(v) => match v.checked_add(1) {
                Some(w) => Nat::Small(w),
                None => Nat::from_big(BigUint::from(*v) + 1u32),
            },
            Nat::Big(b) => Nat::from_big(&**b + 1u32),
        }
    }

    /// Predecessor, saturating at zero.
    pub fn pred(&self) -> Nat {
        match self {
            Nat::Small(v) => Nat::Small(v.saturating_sub(1)),
            Nat::Big(b) => Nat::from_big(&**b - 1u32),
        }
    }

    /// Number of significant bits (0 for zero).
    pub fn bits(&self) -> u64 {
        match self {
            Nat::Small(v) => 64 - u64::from(v.leading_zeros()),
            Nat::Big(b) => b.bits(),
        }
    }

    /// Bit `i` (little-endian position).
    pub fn bit(&self, i: u64) -> bool {
        match self {
            Nat::Small(v) => i < 64 && (v >> i) & 1 == 1,
            Nat::Big(b) => b.bit(i),
        }
    }
}

impl Default for Nat {
    fn default() -> Self {
        Nat::ZERO
    }
}

impl From<u64> for Nat {
    fn from(v: u64) -> Self {
        Nat::Small(v)
    }
}

impl From<u32> for Nat {
    fn from(v: u32) -> Self {
        Nat::Small(u64::from(v))
    }
}

impl From<usize> for Nat {
    fn from(v: usize) -> Self {
        Nat::Small(v as u64)
    }
}

impl From<BigUint> for Nat {
    fn from(v: BigUint) -> Self {
        Nat::from_big(v)
    }
}

impl PartialEq<u64> for Nat {
    fn eq(&self, other: &u64) -> bool {
        self.as_u64() == Some(*other)
    }
}

impl Ord for Nat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Nat::Small(a), Nat::Small(b)) => a.cmp(b),
            (Nat::Small(_), Nat::Big(_)) => Ordering::Less,
            (Nat::Big(_), Nat::Small(_)) => Ordering::Greater,
            (Nat::Big(a), Nat::Big(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Nat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Nat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nat::Small(v) => write!(f, "{v}"),
            Nat::Big(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Debug for Nat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits() > 256 {
            write!(f, "Nat(<{} bits>)", self.bits())
        } else {
            write!(f, "{self}")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a natural number: {0:?}")]
pub struct ParseNatError(pub String);

impl FromStr for Nat {
    type Err = ParseNatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseNatError(s.to_string()));
        }
        if let Ok(v) = t.parse::<u64>() {
            return Ok(Nat::Small(v));
        }
        BigUint::from_str(t)
            .map(Nat::from_big)
            .map_err(|_| ParseNatError(s.to_string()))
    }
}

// JSON numbers when they fit, decimal strings otherwise.
impl Serialize for Nat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Nat::Small(v) => s.serialize_u64(*v),
            Nat::Big(b) => s.serialize_str(&b.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Nat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct NatVisitor;
        impl Visitor<'_> for NatVisitor {
            type Value = Nat;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a natural number or a decimal string")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Nat, E> {
                Ok(Nat::Small(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Nat, E> {
                u64::try_from(v)
                    .map(Nat::Small)
                    .map_err(|_| E::custom("negative number"))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Nat, E> {
                v.parse().map_err(E::custom)
            }
        }
        d.deserialize_any(NatVisitor)
    }
}

/// Cantor pairing `c(a, b) = (a+b)(a+b+1)/2 + a`.
pub fn pair(a: &Nat, b: &Nat) -> Nat {
    if let (Nat::Small(x), Nat::Small(y)) = (a, b) {
        let s = u128::from(*x) + u128::from(*y);
        // s < 2^65, so s*(s+1)/2 < 2^129 may overflow; guard on s.
        if s < (1u128 << 63) {
            let v = s * (s + 1) / 2 + u128::from(*x);
            if let Ok(small) = u64::try_from(v) {
                return Nat::Small(small);
            }
            return Nat::from_big(BigUint::from(v));
        }
    }
    let (x, y) = (a.to_big(), b.to_big());
    let s = &x + &y;
    let v = (&s * (&s + 1u32)) / 2u32 + x;
    Nat::from_big(v)
}

/// Inverse of [`pair`]; total on ℕ.
pub fn unpair(n: &Nat) -> (Nat, Nat) {
    match n {
        Nat::Small(v) => {
            let v = u128::from(*v);
            let w = ((8 * v + 1).isqrt() - 1) / 2;
            let t = w * (w + 1) / 2;
            let a = v - t;
            let b = w - a;
            (Nat::Small(a as u64), Nat::Small(b as u64))
        }
        Nat::Big(big) => {
            let v: &BigUint = big;
            let disc: BigUint = v * 8u32 + 1u32;
            let w: BigUint = (disc.sqrt() - BigUint::one()) / 2u32;
            let t: BigUint = &w * (&w + 1u32) / 2u32;
            let a = v - &t;
            let b = &w - &a;
            (Nat::from_big(a), Nat::from_big(b))
        }
    }
}

pub fn proj1(n: &Nat) -> Nat {
    unpair(n).0
}

pub fn proj2(n: &Nat) -> Nat {
    unpair(n).1
}

/// `pair` on machine integers, for tests and table construction.
pub fn pair_u64(a: u64, b: u64) -> Nat {
    pair(&Nat::Small(a), &Nat::Small(b))
}
