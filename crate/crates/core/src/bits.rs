//! Fixed-length packed bit vectors.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// A fixed-length vector of bits packed 64 per word, index 0 in the low bit
/// of word 0. Bits past `len` are always zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

/// A truth assignment to the variables of an affine system.
pub type Assignment = BitVec;

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = BitVec {
            len,
            words: vec![!0; words_for(len)],
        };
        v.clear_tail();
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            if f(i) {
                v.set(i, true);
            }
        }
        v
    }

    /// Low `len` bits of `value`, bit i of the integer at index i.
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len <= WORD, "from_u64 supports at most 64 bits");
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = value;
            v.clear_tail();
        }
        v
    }

    pub(crate) fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        let mut v = BitVec { len, words };
        v.clear_tail();
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Parity of the bitwise AND with `other`, i.e. the GF(2) inner product.
    pub fn dot(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// XOR `src` (given as packed words) into `self` starting at bit `shift`.
    /// Bits that would land past `len` must be zero in `src`.
    pub(crate) fn xor_words_at(&mut self, src: &[u64], shift: usize) {
        xor_shifted(&mut self.words, src, shift);
        debug_assert!(self.tail_is_clear());
    }

    /// Iterator over the indices of set bits in increasing order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + tz)
                }
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Copy of the bits `start..start + len`; bits beyond `self.len()` read as zero.
    pub fn slice(&self, start: usize, len: usize) -> BitVec {
        BitVec::from_fn(len, |i| start + i < self.len && self.get(start + i))
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    fn tail_is_clear(&self) -> bool {
        let rem = self.len % WORD;
        rem == 0 || self.words.last().is_none_or(|&w| w >> rem == 0)
    }
}

/// `dst ^= src << shift` over packed little-endian words. `dst` must be long
/// enough to hold every set bit of the shifted source.
pub(crate) fn xor_shifted(dst: &mut [u64], src: &[u64], shift: usize) {
    let word_shift = shift / WORD;
    let bit_shift = shift % WORD;
    if bit_shift == 0 {
        for (i, &w) in src.iter().enumerate() {
            if w != 0 {
                dst[i + word_shift] ^= w;
            }
        }
    } else {
        for (i, &w) in src.iter().enumerate() {
            if w == 0 {
                continue;
            }
            dst[i + word_shift] ^= w << bit_shift;
            let carry = w >> (WORD - bit_shift);
            if carry != 0 {
                dst[i + word_shift + 1] ^= carry;
            }
        }
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

impl FromStr for BitVec {
    type Err = Error;

    /// Parses a string of `0`/`1` characters, index 0 first.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut v = BitVec::zeros(s.chars().count());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                _ => return Err(Error::parse(i, format!("expected '0' or '1', found '{c}'"))),
            }
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_flip() {
        let mut v = BitVec::zeros(130);
        v.set(0, true);
        v.set(64, true);
        v.flip(129);
        assert!(v.get(0) && v.get(64) && v.get(129));
        assert_eq!(v.count_ones(), 3);
        assert_eq!(v.iter_ones().collect::<Vec<_>>(), vec![0, 64, 129]);
    }

    #[test]
    fn ones_has_clean_tail() {
        let v = BitVec::ones(70);
        assert_eq!(v.count_ones(), 70);
        assert!(v.tail_is_clear());
    }

    #[test]
    fn string_round_trip() {
        let v: BitVec = "1101100".parse().unwrap();
        assert_eq!(v.to_string(), "1101100");
        assert!(matches!(
            "10x".parse::<BitVec>(),
            Err(Error::Parse { position: 2, .. })
        ));
    }

    #[test]
    fn shifted_xor_crosses_words() {
        let mut v = BitVec::zeros(200);
        v.xor_words_at(&[0b101, 0], 62);
        assert_eq!(v.iter_ones().collect::<Vec<_>>(), vec![62, 64]);
    }

    #[test]
    fn dot_is_inner_product_parity() {
        let a: BitVec = "1110".parse().unwrap();
        let b: BitVec = "0111".parse().unwrap();
        assert!(!a.dot(&b));
        let c: BitVec = "0100".parse().unwrap();
        assert!(a.dot(&c));
    }
}
