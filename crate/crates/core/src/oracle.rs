//! Brute-force ground truth for small instances.
//!
//! Nothing here reuses the evaluation code of the main solvers: multiples
//! are formed by a local shift-and-xor loop over plain words, and constraints
//! are evaluated as integer masks.

use crate::affine::{AffineSystem, EXHAUSTIVE_CAP};
use crate::bits::{Assignment, BitVec};
use crate::error::{Error, Result};
use crate::poly::Gf2Poly;

/// Minimum-weight nonzero multiple `P * Q` with `deg Q <= n - deg P - 1`.
/// Ties go to the smallest `Q` read as a binary number with `b_0` as the
/// least significant bit, so lower-degree multipliers win.
pub fn brute_min_pm(p: &Gf2Poly, n: usize) -> Result<(Gf2Poly, usize)> {
    let d = p.degree().ok_or(Error::ZeroPolynomial)?;
    if n <= d {
        return Err(Error::DegreeBound { n, degree: d });
    }
    let vars = n - d;
    if vars > EXHAUSTIVE_CAP {
        return Err(Error::TooLarge {
            vars,
            cap: EXHAUSTIVE_CAP,
        });
    }
    let coeffs: Vec<usize> = (0..=d).filter(|&i| p.coeff(i)).collect();
    let len = n.div_ceil(64);
    // shifted[j] = coefficients of x^j * P
    let shifted: Vec<Vec<u64>> = (0..vars)
        .map(|j| {
            let mut w = vec![0u64; len];
            for &i in &coeffs {
                w[(i + j) / 64] |= 1 << ((i + j) % 64);
            }
            w
        })
        .collect();

    let mut k = vec![0u64; len];
    let mut q: u64 = 0;
    let mut best: Option<(usize, u64)> = None;
    for step in 1u64..1 << vars {
        let j = step.trailing_zeros() as usize;
        q ^= 1 << j;
        for (a, b) in k.iter_mut().zip(&shifted[j]) {
            *a ^= b;
        }
        let weight: usize = k.iter().map(|w| w.count_ones() as usize).sum();
        if best.is_none_or(|(bw, bq)| (weight, q) < (bw, bq)) {
            best = Some((weight, q));
        }
    }
    let (weight, q) = best.expect("at least one nonzero multiplier");
    let q = Gf2Poly::from_exponents((0..vars).filter(|j| q >> j & 1 == 1));
    let mut exps = Vec::new();
    for a in &coeffs {
        for b in q.exponents() {
            exps.push(a + b);
        }
    }
    let multiple = Gf2Poly::from_exponents(exps);
    debug_assert_eq!(multiple.weight(), weight);
    Ok((multiple, weight))
}

/// Straight enumeration of every assignment; same contract as
/// [`AffineSystem::exhaustive_solve`].
pub fn brute_maxsat(s: &AffineSystem, forbid_zero: bool) -> Result<(Assignment, usize)> {
    let k = s.vars();
    if k > EXHAUSTIVE_CAP {
        return Err(Error::TooLarge {
            vars: k,
            cap: EXHAUSTIVE_CAP,
        });
    }
    let constraints: Vec<(u64, u32)> = (0..s.constraints())
        .map(|c| {
            let mask = (0..k).filter(|&v| s.row(c).get(v)).fold(0u64, |m, v| m | 1 << v);
            (mask, u32::from(s.rhs().get(c)))
        })
        .collect();
    let mut best: Option<(usize, u64, u64)> = None;
    let start = u64::from(forbid_zero);
    for x in start..1u64 << k {
        let satisfied = constraints
            .iter()
            .filter(|&&(mask, b)| (mask & x).count_ones() & 1 == b)
            .count();
        let lex = x.reverse_bits() >> (64 - k);
        // maximize satisfied, then minimize lex
        let better = match best {
            None => true,
            Some((bs, bl, _)) => satisfied > bs || (satisfied == bs && lex < bl),
        };
        if better {
            best = Some((satisfied, lex, x));
        }
    }
    let (satisfied, _, x) = best.ok_or(Error::ZeroAssignment)?;
    Ok((BitVec::from_u64(k, x), satisfied))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Gf2Poly {
        s.parse().unwrap()
    }

    #[test]
    fn min_pm_examples() {
        let (k, w) = brute_min_pm(&p("1 + x + x^2"), 7).unwrap();
        assert_eq!((k, w), (p("1 + x^3"), 2));
        // the identity (1 + x)(1 + x + x^2) = 1 + x^3 gives a weight-2 witness
        assert_eq!(p("1 + x").mul(&p("1 + x + x^2")), p("1 + x^3"));

        assert_eq!(brute_min_pm(&p("x"), 5).unwrap(), (p("x"), 1));
        assert_eq!(brute_min_pm(&p("1 + x"), 10).unwrap().1, 2);
        assert_eq!(brute_min_pm(&Gf2Poly::one(), 1).unwrap(), (Gf2Poly::one(), 1));
    }

    #[test]
    fn min_pm_errors() {
        assert_eq!(brute_min_pm(&Gf2Poly::zero(), 3), Err(Error::ZeroPolynomial));
        assert_eq!(brute_min_pm(&p("1 + x^3"), 3), Err(Error::DegreeBound { n: 3, degree: 3 }));
        assert!(matches!(brute_min_pm(&p("1 + x"), 40), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn maxsat_examples() {
        let hom = AffineSystem::from_constraints(3, &[(vec![0, 1], false), (vec![2], false)]).unwrap();
        assert_eq!(brute_maxsat(&hom, false).unwrap(), (BitVec::zeros(3), 2));
        let contra = AffineSystem::from_constraints(1, &[(vec![0], true), (vec![0], false)]).unwrap();
        assert_eq!(brute_maxsat(&contra, false).unwrap().1, 1);
        assert_eq!(brute_maxsat(&contra, true).unwrap().1, 1);
    }
}
