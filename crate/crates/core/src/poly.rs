//! Polynomials over GF(2).
//!
//! Coefficients are packed 64 per word with the constant term in the low bit
//! of word 0. The storage is kept normalized (no trailing zero words), so the
//! derived equality compares exactly the sets of exponents.

use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use crate::bits::{words_for, xor_shifted, BitVec};
use crate::error::{Error, Result};

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Gf2Poly {
    words: Vec<u64>,
}

/// Text notation for polynomials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PolyStyle {
    /// `1 + x + x^5`
    #[default]
    Algebraic,
    /// `0,1,5`
    Exponents,
}

impl FromStr for PolyStyle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "algebraic" => Ok(PolyStyle::Algebraic),
            "exponents" | "exponent-list" => Ok(PolyStyle::Exponents),
            other => Err(Error::parse(0, format!("unknown polynomial style '{other}'"))),
        }
    }
}

impl Gf2Poly {
    pub fn zero() -> Self {
        Gf2Poly { words: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(0)
    }

    pub fn monomial(k: usize) -> Self {
        let mut words = vec![0; k / WORD + 1];
        words[k / WORD] = 1 << (k % WORD);
        Gf2Poly { words }
    }

    /// Sum of `x^e` over the given exponents; repeated exponents cancel.
    pub fn from_exponents<I: IntoIterator<Item = usize>>(exponents: I) -> Self {
        let mut words = Vec::new();
        for e in exponents {
            if words.len() <= e / WORD {
                words.resize(e / WORD + 1, 0);
            }
            words[e / WORD] ^= 1 << (e % WORD);
        }
        Self::from_words(words)
    }

    /// Polynomial whose coefficient of `x^i` is `bits[i]`.
    pub fn from_bits(bits: &BitVec) -> Self {
        Self::from_words(bits.words().to_vec())
    }

    pub(crate) fn from_words(mut words: Vec<u64>) -> Self {
        while words.last() == Some(&0) {
            words.pop();
        }
        Gf2Poly { words }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    /// Highest exponent with a nonzero coefficient; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let last = *self.words.last()?;
        Some((self.words.len() - 1) * WORD + (WORD - 1 - last.leading_zeros() as usize))
    }

    /// Number of nonzero coefficients.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn coeff(&self, i: usize) -> bool {
        self.words
            .get(i / WORD)
            .is_some_and(|w| (w >> (i % WORD)) & 1 == 1)
    }

    /// Exponents of the nonzero terms in increasing order.
    pub fn exponents(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + tz)
            })
        })
    }

    /// Coefficient vector `(c_0, .., c_{len-1})`, truncating or zero-padding.
    pub fn to_bits(&self, len: usize) -> BitVec {
        let n = words_for(len).min(self.words.len());
        BitVec::from_words(len, self.words[..n].to_vec())
    }

    pub fn add(&self, other: &Gf2Poly) -> Gf2Poly {
        let (long, short) = if self.words.len() >= other.words.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut words = long.words.clone();
        for (a, b) in words.iter_mut().zip(&short.words) {
            *a ^= b;
        }
        Self::from_words(words)
    }

    /// Carryless product; iterates over the terms of the sparser factor.
    pub fn mul(&self, other: &Gf2Poly) -> Gf2Poly {
        let (Some(da), Some(db)) = (self.degree(), other.degree()) else {
            return Gf2Poly::zero();
        };
        let (sparse, dense) = if self.weight() <= other.weight() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = vec![0u64; words_for(da + db + 1) + 1];
        for e in sparse.exponents() {
            xor_shifted(&mut out, &dense.words, e);
        }
        Self::from_words(out)
    }

    /// Multiplication by `x^k`.
    pub fn shl(&self, k: usize) -> Gf2Poly {
        if self.is_zero() {
            return Gf2Poly::zero();
        }
        let mut out = vec![0u64; self.words.len() + k / WORD + 1];
        xor_shifted(&mut out, &self.words, k);
        Self::from_words(out)
    }

    /// Long division: returns `(q, r)` with `self = q * divisor + r` and
    /// `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Gf2Poly) -> Result<(Gf2Poly, Gf2Poly)> {
        let dd = divisor.degree().ok_or(Error::ZeroDivisor)?;
        let Some(dr) = self.degree() else {
            return Ok((Gf2Poly::zero(), Gf2Poly::zero()));
        };
        if dr < dd {
            return Ok((Gf2Poly::zero(), self.clone()));
        }
        let mut rem = self.words.clone();
        rem.push(0);
        let mut quot = vec![0u64; (dr - dd) / WORD + 1];
        let mut top = dr;
        loop {
            let shift = top - dd;
            quot[shift / WORD] |= 1 << (shift % WORD);
            xor_shifted(&mut rem, &divisor.words, shift);
            match highest_bit(&rem, top) {
                Some(next) if next >= dd => top = next,
                _ => break,
            }
        }
        Ok((Self::from_words(quot), Self::from_words(rem)))
    }

    /// Whether `self` divides `k`. Every nonzero polynomial divides zero.
    pub fn divides(&self, k: &Gf2Poly) -> Result<bool> {
        let (_, r) = k.div_rem(self)?;
        Ok(r.is_zero())
    }

    pub fn format(&self, style: PolyStyle) -> String {
        match style {
            PolyStyle::Algebraic => {
                if self.is_zero() {
                    return "0".to_string();
                }
                let terms: Vec<String> = self
                    .exponents()
                    .map(|e| match e {
                        0 => "1".to_string(),
                        1 => "x".to_string(),
                        _ => format!("x^{e}"),
                    })
                    .collect();
                terms.join(" + ")
            }
            PolyStyle::Exponents => self
                .exponents()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(","),
        }
    }

    pub fn parse(text: &str, style: PolyStyle) -> Result<Gf2Poly> {
        match style {
            PolyStyle::Algebraic => parse_algebraic(text),
            PolyStyle::Exponents => parse_exponents(text),
        }
    }
}

/// Highest set bit at index `<= below`, scanning down from there.
fn highest_bit(words: &[u64], below: usize) -> Option<usize> {
    let mut wi = (below / WORD).min(words.len().checked_sub(1)?);
    loop {
        if words[wi] != 0 {
            return Some(wi * WORD + (WORD - 1 - words[wi].leading_zeros() as usize));
        }
        if wi == 0 {
            return None;
        }
        wi -= 1;
    }
}

fn parse_algebraic(text: &str) -> Result<Gf2Poly> {
    // whitespace-insensitive: keep original byte offsets for diagnostics
    let chars: Vec<(usize, char)> = text
        .char_indices()
        .filter(|(_, c)| !c.is_whitespace())
        .collect();
    let end = text.len();
    if chars.is_empty() {
        return Err(Error::parse(0, "empty polynomial"));
    }
    let pos_at = |i: usize| chars.get(i).map_or(end, |&(p, _)| p);
    let mut exps = Vec::new();
    let mut i = 0;
    loop {
        match chars.get(i).map(|&(_, c)| c) {
            Some('1') if !chars.get(i + 1).is_some_and(|&(_, c)| c.is_ascii_digit()) => {
                exps.push(0);
                i += 1;
            }
            Some('0') if !chars.get(i + 1).is_some_and(|&(_, c)| c.is_ascii_digit()) => {
                i += 1;
            }
            Some('x') | Some('X') => {
                i += 1;
                if chars.get(i).map(|&(_, c)| c) == Some('^') {
                    i += 1;
                    let start = i;
                    while chars.get(i).is_some_and(|&(_, c)| c.is_ascii_digit()) {
                        i += 1;
                    }
                    if start == i {
                        return Err(Error::parse(pos_at(i), "expected exponent after '^'"));
                    }
                    let digits: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                    let e: usize = digits
                        .parse()
                        .map_err(|_| Error::parse(pos_at(start), "exponent out of range"))?;
                    exps.push(e);
                } else {
                    exps.push(1);
                }
            }
            Some(c) => {
                return Err(Error::parse(pos_at(i), format!("unexpected '{c}'")));
            }
            None => return Err(Error::parse(end, "expected a term")),
        }
        match chars.get(i).map(|&(_, c)| c) {
            None => break,
            Some('+') => i += 1,
            Some(c) => return Err(Error::parse(pos_at(i), format!("expected '+', found '{c}'"))),
        }
    }
    Ok(Gf2Poly::from_exponents(exps))
}

fn parse_exponents(text: &str) -> Result<Gf2Poly> {
    if text.trim().is_empty() {
        return Ok(Gf2Poly::zero());
    }
    let mut exps = Vec::new();
    let mut offset = 0;
    for field in text.split(',') {
        let trimmed = field.trim();
        let lead = field.len() - field.trim_start().len();
        let e: usize = trimmed.parse().map_err(|_| {
            Error::parse(offset + lead, format!("expected a non-negative integer, found '{trimmed}'"))
        })?;
        exps.push(e);
        offset += field.len() + 1;
    }
    Ok(Gf2Poly::from_exponents(exps))
}

impl FromStr for Gf2Poly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_algebraic(s)
    }
}

impl fmt::Display for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format(PolyStyle::Algebraic))
    }
}

impl fmt::Debug for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Poly({self})")
    }
}

impl Add for &Gf2Poly {
    type Output = Gf2Poly;

    fn add(self, rhs: &Gf2Poly) -> Gf2Poly {
        Gf2Poly::add(self, rhs)
    }
}

impl Mul for &Gf2Poly {
    type Output = Gf2Poly;

    fn mul(self, rhs: &Gf2Poly) -> Gf2Poly {
        Gf2Poly::mul(self, rhs)
    }
}
