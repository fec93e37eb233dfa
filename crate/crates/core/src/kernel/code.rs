//! Program-code layout.
//!
//! Codes are built with a length-additive pairing `P` rather than the Cantor
//! pairing: a natural `n` is read as the bijective-binary string `str(n)`
//! (binary of `n + 1` without its leading one), and
//!
//! ```text
//! P(a, b) = nat(gamma(|str a|) ++ str a ++ str b)
//! ```
//!
//! where `gamma(l)` is the Elias-gamma code of `l + 1`. The bit length of
//! `P(a, b)` is about `bits(a) + bits(b) + 2 log bits(a)`, so codes that embed
//! other codes stay proportional to the size of the program text. `P` is
//! injective, never yields 0 or 1, and `P(a, b) > max(a, b)`.
//!
//! A program code is `P(tag, payload)`; see [`Tag`] for the constructor order.

use num_bigint::BigUint;

use crate::nat::Nat;

/// Constructor tags. Codes with any other tag decode to `Lit(payload)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tag {
    Proj = 0,
    Lit = 1,
    Pair = 2,
    Fst = 3,
    Snd = 4,
    Comp = 5,
    If0 = 6,
    Succ = 7,
    SmnCode = 8,
    ConstCode = 9,
    Apply = 10,
    CodePair = 11,
}

impl Tag {
    pub fn from_u64(t: u64) -> Option<Tag> {
        use Tag::*;
        Some(match t {
            0 => Proj,
            1 => Lit,
            2 => Pair,
            3 => Fst,
            4 => Snd,
            5 => Comp,
            6 => If0,
            7 => Succ,
            8 => SmnCode,
            9 => ConstCode,
            10 => Apply,
            11 => CodePair,
            _ => return None,
        })
    }
}

/// `str(n)` as a vector of binary digits, most significant first.
pub fn nat_bits(n: &Nat) -> Vec<u8> {
    match n {
        Nat::Small(v) => {
            let w = u128::from(*v) + 1;
            let len = 127 - w.leading_zeros();
            (0..len).rev().map(|i| ((w >> i) & 1) as u8).collect()
        }
        Nat::Big(b) => {
            let w: BigUint = &**b + 1u32;
            let mut digits = w.to_radix_be(2);
            digits.remove(0);
            digits
        }
    }
}

/// Inverse of [`nat_bits`].
pub fn bits_nat(s: &[u8]) -> Nat {
    if s.len() < 64 {
        let mut w: u64 = 1;
        for &d in s {
            w = (w << 1) | u64::from(d);
        }
        return Nat::Small(w - 1);
    }
    let mut digits = Vec::with_capacity(s.len() + 1);
    digits.push(1u8);
    digits.extend_from_slice(s);
    let w = BigUint::from_radix_be(&digits, 2).expect("binary digits");
    Nat::from_big(w - 1u32)
}

fn push_gamma(out: &mut Vec<u8>, len: usize) {
    let v = len as u64 + 1;
    let width = 64 - v.leading_zeros() as usize;
    out.extend(std::iter::repeat_n(0u8, width - 1));
    out.extend((0..width).rev().map(|i| ((v >> i) & 1) as u8));
}

/// Append the digits of `P(a, b)` given the digits of `a` and `b`.
pub fn push_pair_bits(out: &mut Vec<u8>, a: &[u8], b: &[u8]) {
    push_gamma(out, a.len());
    out.extend_from_slice(a);
    out.extend_from_slice(b);
}

/// Split the digits of `P(a, b)` into those of `a` and `b`.
/// `None` when `s` is not in the image of `P`.
pub fn split_pair_bits(s: &[u8]) -> Option<(&[u8], &[u8])> {
    let zeros = s.iter().take_while(|&&d| d == 0).count();
    let end = zeros.checked_mul(2)?.checked_add(1)?;
    if end > s.len() || zeros >= 64 {
        return None;
    }
    let mut v: u64 = 0;
    for &d in &s[zeros..end] {
        v = (v << 1) | u64::from(d);
    }
    let len = usize::try_from(v - 1).ok()?;
    let rest = &s[end..];
    if len > rest.len() {
        return None;
    }
    Some(rest.split_at(len))
}

/// The code pairing `P`.
pub fn code_pair(a: &Nat, b: &Nat) -> Nat {
    let (sa, sb) = (nat_bits(a), nat_bits(b));
    let mut out = Vec::with_capacity(sa.len() + sb.len() + 16);
    push_pair_bits(&mut out, &sa, &sb);
    bits_nat(&out)
}

/// Inverse of [`code_pair`] on its image.
pub fn code_unpair(n: &Nat) -> Option<(Nat, Nat)> {
    let s = nat_bits(n);
    split_pair_bits(&s).map(|(a, b)| (bits_nat(a), bits_nat(b)))
}

fn node(tag: Tag, payload: &Nat) -> Nat {
    code_pair(&Nat::from(tag as u64), payload)
}

// Code-level constructors: each takes the codes of its children and returns
// the code of the node, without decoding anything.

pub fn proj(i: u64) -> Nat {
    node(Tag::Proj, &Nat::from(i))
}

pub fn lit(k: &Nat) -> Nat {
    node(Tag::Lit, k)
}

pub fn lit_u64(k: u64) -> Nat {
    lit(&Nat::from(k))
}

pub fn pair(p: &Nat, q: &Nat) -> Nat {
    node(Tag::Pair, &code_pair(p, q))
}

pub fn fst(p: &Nat) -> Nat {
    node(Tag::Fst, p)
}

pub fn snd(p: &Nat) -> Nat {
    node(Tag::Snd, p)
}

pub fn list(items: &[Nat]) -> Nat {
    items
        .iter()
        .rev()
        .fold(Nat::ZERO, |tail, h| code_pair(h, &tail))
}

pub fn comp(f: &Nat, args: &[Nat]) -> Nat {
    node(Tag::Comp, &code_pair(f, &list(args)))
}

pub fn if0(c: &Nat, t: &Nat, e: &Nat) -> Nat {
    node(Tag::If0, &code_pair(c, &code_pair(t, e)))
}

pub fn succ(p: &Nat) -> Nat {
    node(Tag::Succ, p)
}

pub fn smn_code(arity: u64, p: &Nat, q: &Nat) -> Nat {
    node(Tag::SmnCode, &code_pair(&Nat::from(arity), &code_pair(p, q)))
}

pub fn const_code(p: &Nat) -> Nat {
    node(Tag::ConstCode, p)
}

pub fn apply(p: &Nat, q: &Nat) -> Nat {
    node(Tag::Apply, &code_pair(p, q))
}

pub fn codepair(p: &Nat, q: &Nat) -> Nat {
    node(Tag::CodePair, &code_pair(p, q))
}

/// Codes of `Proj(1) .. Proj(n)`.
pub fn projs(n: u64) -> Vec<Nat> {
    (1..=n).map(proj).collect()
}

/// The code of `Comp(f, [Proj 1 .. Proj n, Lit k])`: `f` with an extra
/// trailing argument fixed to `k`. This is what the `SmnCode` opcode computes.
pub fn specialize_last(f: &Nat, n: u64, k: &Nat) -> Nat {
    let mut args = projs(n);
    args.push(lit(k));
    comp(f, &args)
}
