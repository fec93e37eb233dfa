//! Program syntax, its Gödel numbering and the s-expression text form.

use std::fmt;
use std::sync::Arc;

use super::code::{self, bits_nat, nat_bits, split_pair_bits, Tag};
use super::ModelId;
use crate::nat::Nat;

pub type Prog = Arc<ProgramAst>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ProgramAst {
    /// 1-based argument position. `Proj(0)` is always out of range.
    Proj(u64),
    Lit(Nat),
    Pair(Prog, Prog),
    Fst(Prog),
    Snd(Prog),
    Comp(Prog, Vec<Prog>),
    If0(Prog, Prog, Prog),
    Succ(Prog),
    /// `SmnCode(n, p, q)`: the code of `Comp(decode p, [Proj 1..Proj n, Lit q])`.
    SmnCode(u64, Prog, Prog),
    /// The code of `Lit(p)`.
    ConstCode(Prog),
    /// Run the program coded by `p` on the single argument `q`. UREC only.
    Apply(Prog, Prog),
    /// The code pairing applied to the values of `p` and `q`.
    CodePair(Prog, Prog),
}

// Short constructors used throughout the crate.
pub fn proj(i: u64) -> Prog {
    Arc::new(ProgramAst::Proj(i))
}
pub fn lit(k: impl Into<Nat>) -> Prog {
    Arc::new(ProgramAst::Lit(k.into()))
}
pub fn pair(p: Prog, q: Prog) -> Prog {
    Arc::new(ProgramAst::Pair(p, q))
}
pub fn fst(p: Prog) -> Prog {
    Arc::new(ProgramAst::Fst(p))
}
pub fn snd(p: Prog) -> Prog {
    Arc::new(ProgramAst::Snd(p))
}
pub fn comp(f: Prog, args: Vec<Prog>) -> Prog {
    Arc::new(ProgramAst::Comp(f, args))
}
pub fn if0(c: Prog, t: Prog, e: Prog) -> Prog {
    Arc::new(ProgramAst::If0(c, t, e))
}
pub fn succ(p: Prog) -> Prog {
    Arc::new(ProgramAst::Succ(p))
}
pub fn smn_code(n: u64, p: Prog, q: Prog) -> Prog {
    Arc::new(ProgramAst::SmnCode(n, p, q))
}
pub fn const_code(p: Prog) -> Prog {
    Arc::new(ProgramAst::ConstCode(p))
}
pub fn apply(p: Prog, q: Prog) -> Prog {
    Arc::new(ProgramAst::Apply(p, q))
}
pub fn codepair(p: Prog, q: Prog) -> Prog {
    Arc::new(ProgramAst::CodePair(p, q))
}
pub fn projs(n: u64) -> Vec<Prog> {
    (1..=n).map(proj).collect()
}

impl ProgramAst {
    /// Number of nodes.
    pub fn size(&self) -> u64 {
        use ProgramAst::*;
        match self {
            Proj(_) | Lit(_) => 1,
            Fst(p) | Snd(p) | Succ(p) | ConstCode(p) => 1 + p.size(),
            Pair(p, q) | Apply(p, q) | CodePair(p, q) | SmnCode(_, p, q) => {
                1 + p.size() + q.size()
            }
            Comp(f, args) => 1 + f.size() + args.iter().map(|a| a.size()).sum::<u64>(),
            If0(c, t, e) => 1 + c.size() + t.size() + e.size(),
        }
    }

    pub fn contains_apply(&self) -> bool {
        use ProgramAst::*;
        match self {
            Apply(..) => true,
            Proj(_) | Lit(_) => false,
            Fst(p) | Snd(p) | Succ(p) | ConstCode(p) => p.contains_apply(),
            Pair(p, q) | CodePair(p, q) | SmnCode(_, p, q) => {
                p.contains_apply() || q.contains_apply()
            }
            Comp(f, args) => f.contains_apply() || args.iter().any(|a| a.contains_apply()),
            If0(c, t, e) => c.contains_apply() || t.contains_apply() || e.contains_apply(),
        }
    }
}

/// Gödel number of a program.
pub fn encode(ast: &ProgramAst) -> Nat {
    use ProgramAst::*;
    match ast {
        Proj(i) => code::proj(*i),
        Lit(k) => code::lit(k),
        Pair(p, q) => code::pair(&encode(p), &encode(q)),
        Fst(p) => code::fst(&encode(p)),
        Snd(p) => code::snd(&encode(p)),
        Comp(f, args) => {
            let args: Vec<Nat> = args.iter().map(|a| encode(a)).collect();
            code::comp(&encode(f), &args)
        }
        If0(c, t, e) => code::if0(&encode(c), &encode(t), &encode(e)),
        Succ(p) => code::succ(&encode(p)),
        SmnCode(n, p, q) => code::smn_code(*n, &encode(p), &encode(q)),
        ConstCode(p) => code::const_code(&encode(p)),
        Apply(p, q) => code::apply(&encode(p), &encode(q)),
        CodePair(p, q) => code::codepair(&encode(p), &encode(q)),
    }
}

/// Total decoding. Digit strings outside the image of the pairing decode to
/// `Lit(0)`; unknown tags decode to `Lit(payload)`; under TOTAL every
/// `Apply` node becomes `Lit(0)`.
pub fn decode(n: &Nat, model: ModelId) -> Prog {
    decode_bits(&nat_bits(n), model)
}

fn small(s: &[u8]) -> u64 {
    bits_nat(s).as_u64().unwrap_or(u64::MAX)
}

fn decode_bits(s: &[u8], model: ModelId) -> Prog {
    let Some((tag, payload)) = split_pair_bits(s) else {
        return lit(0u64);
    };
    let binary = |p: &[u8]| -> (Prog, Prog) {
        match split_pair_bits(p) {
            Some((a, b)) => (decode_bits(a, model), decode_bits(b, model)),
            None => (lit(0u64), lit(0u64)),
        }
    };
    let tag = if tag.len() < 64 { Tag::from_u64(small(tag)) } else { None };
    match tag {
        None => lit(bits_nat(payload)),
        Some(Tag::Proj) => proj(small(payload)),
        Some(Tag::Lit) => lit(bits_nat(payload)),
        Some(Tag::Pair) => {
            let (p, q) = binary(payload);
            pair(p, q)
        }
        Some(Tag::Fst) => fst(decode_bits(payload, model)),
        Some(Tag::Snd) => snd(decode_bits(payload, model)),
        Some(Tag::Comp) => match split_pair_bits(payload) {
            Some((f, mut rest)) => {
                let mut args = Vec::new();
                while let Some((h, t)) = split_pair_bits(rest) {
                    args.push(decode_bits(h, model));
                    rest = t;
                }
                comp(decode_bits(f, model), args)
            }
            None => comp(lit(0u64), Vec::new()),
        },
        Some(Tag::If0) => match split_pair_bits(payload) {
            Some((c, rest)) => {
                let (t, e) = binary(rest);
                if0(decode_bits(c, model), t, e)
            }
            None => if0(lit(0u64), lit(0u64), lit(0u64)),
        },
        Some(Tag::Succ) => succ(decode_bits(payload, model)),
        Some(Tag::SmnCode) => match split_pair_bits(payload) {
            Some((n, rest)) => {
                let (p, q) = binary(rest);
                smn_code(small(n), p, q)
            }
            None => smn_code(0, lit(0u64), lit(0u64)),
        },
        Some(Tag::ConstCode) => const_code(decode_bits(payload, model)),
        Some(Tag::Apply) => match model {
            ModelId::Urec => {
                let (p, q) = binary(payload);
                apply(p, q)
            }
            ModelId::Total => lit(0u64),
        },
        Some(Tag::CodePair) => {
            let (p, q) = binary(payload);
            codepair(p, q)
        }
    }
}

impl fmt::Display for ProgramAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ProgramAst::*;
        match self {
            Proj(i) => write!(f, "(proj {i})"),
            Lit(k) => write!(f, "(lit {k})"),
            Pair(p, q) => write!(f, "(pair {p} {q})"),
            Fst(p) => write!(f, "(fst {p})"),
            Snd(p) => write!(f, "(snd {p})"),
            Comp(g, args) => {
                write!(f, "(comp {g} (")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, "))")
            }
            If0(c, t, e) => write!(f, "(if0 {c} {t} {e})"),
            Succ(p) => write!(f, "(succ {p})"),
            SmnCode(n, p, q) => write!(f, "(smn {n} {p} {q})"),
            ConstCode(p) => write!(f, "(const {p})"),
            Apply(p, q) => write!(f, "(apply {p} {q})"),
            CodePair(p, q) => write!(f, "(codepair {p} {q})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("s-expression error at offset {offset}: {message}")]
pub struct SexprError {
    pub offset: usize,
    pub message: String,
}

/// Parse the s-expression form produced by `Display`.
pub fn parse_program(text: &str) -> Result<Prog, SexprError> {
    let mut p = SexprParser { src: text.as_bytes(), pos: 0 };
    let prog = p.program()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(prog)
}

struct SexprParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl SexprParser<'_> {
    fn err(&self, message: &str) -> SexprError {
        SexprError { offset: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), SexprError> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn word(&mut self) -> Result<&str, SexprError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a word"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii"))
    }

    fn number(&mut self) -> Result<Nat, SexprError> {
        let at = self.pos;
        let w = self.word()?.to_string();
        w.parse().map_err(|_| SexprError { offset: at, message: format!("bad number {w:?}") })
    }

    fn small(&mut self) -> Result<u64, SexprError> {
        let at = self.pos;
        self.number()?
            .as_u64()
            .ok_or(SexprError { offset: at, message: "number too large".into() })
    }

    fn program(&mut self) -> Result<Prog, SexprError> {
        self.expect(b'(')?;
        let head_at = self.pos;
        let head = self.word()?.to_string();
        let prog = match head.as_str() {
            "proj" => proj(self.small()?),
            "lit" => lit(self.number()?),
            "pair" => pair(self.program()?, self.program()?),
            "fst" => fst(self.program()?),
            "snd" => snd(self.program()?),
            "comp" => {
                let f = self.program()?;
                self.expect(b'(')?;
                let mut args = Vec::new();
                loop {
                    self.skip_ws();
                    if self.src.get(self.pos) == Some(&b')') {
                        self.pos += 1;
                        break;
                    }
                    args.push(self.program()?);
                }
                comp(f, args)
            }
            "if0" => if0(self.program()?, self.program()?, self.program()?),
            "succ" => succ(self.program()?),
            "smn" => {
                let n = self.small()?;
                smn_code(n, self.program()?, self.program()?)
            }
            "const" => const_code(self.program()?),
            "apply" => apply(self.program()?, self.program()?),
            "codepair" => codepair(self.program()?, self.program()?),
            _ => {
                return Err(SexprError {
                    offset: head_at,
                    message: format!("unknown operator {head:?}"),
                })
            }
        };
        self.expect(b')')?;
        Ok(prog)
    }
}
