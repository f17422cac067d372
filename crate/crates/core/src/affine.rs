//! Systems of affine Boolean constraints `x_{i1} ^ .. ^ x_{il} = b`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::bits::{Assignment, BitVec};
use crate::error::{Error, Result};
use crate::toeplitz::{parse_dims, BinaryMatrix, ToeplitzOperator};

/// Default variable cap for [`AffineSystem::exhaustive_solve`].
pub const EXHAUSTIVE_CAP: usize = 26;

/// `m` affine constraints over `k` variables, stored as dense coefficient
/// rows plus a right-hand side. A constraint is violated by `x` when
/// `row . x != rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineSystem {
    vars: usize,
    rows: Vec<BitVec>,
    rhs: BitVec,
}

impl AffineSystem {
    pub fn new(vars: usize, rows: Vec<BitVec>, rhs: BitVec) -> Result<Self> {
        if vars == 0 {
            return Err(Error::InvalidSystem("at least one variable required".into()));
        }
        if rows.is_empty() {
            return Err(Error::InvalidSystem("at least one constraint required".into()));
        }
        if rhs.len() != rows.len() {
            return Err(Error::LengthMismatch {
                expected: rows.len(),
                actual: rhs.len(),
            });
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != vars) {
            return Err(Error::LengthMismatch {
                expected: vars,
                actual: bad.len(),
            });
        }
        Ok(AffineSystem { vars, rows, rhs })
    }

    /// Builds a system from `(support, rhs)` pairs; repeated indices cancel.
    pub fn from_constraints(vars: usize, constraints: &[(Vec<usize>, bool)]) -> Result<Self> {
        let mut rows = Vec::with_capacity(constraints.len());
        let mut rhs = BitVec::zeros(constraints.len());
        for (c, (support, b)) in constraints.iter().enumerate() {
            let mut row = BitVec::zeros(vars);
            for &i in support {
                if i >= vars {
                    return Err(Error::InvalidSystem(format!(
                        "variable index {i} out of range for {vars} variables"
                    )));
                }
                row.flip(i);
            }
            rows.push(row);
            rhs.set(c, *b);
        }
        Self::new(vars, rows, rhs)
    }

    /// One constraint per row of `a`, with the given right-hand side.
    pub fn from_matrix(a: &BinaryMatrix, rhs: BitVec) -> Result<Self> {
        Self::new(a.cols(), a.row_slice().to_vec(), rhs)
    }

    /// `A x = 0`.
    pub fn homogeneous(a: &BinaryMatrix) -> Result<Self> {
        Self::from_matrix(a, BitVec::zeros(a.rows()))
    }

    /// The homogeneous system `M(P, t) x = 0`: `d + t + 1` constraints over
    /// `t + 1` variables.
    pub fn from_toeplitz(op: &ToeplitzOperator) -> Self {
        let rows = (0..op.rows()).map(|i| op.row(i)).collect();
        AffineSystem {
            vars: op.cols(),
            rows,
            rhs: BitVec::zeros(op.rows()),
        }
    }

    /// Number of constraints.
    pub fn constraints(&self) -> usize {
        self.rows.len()
    }

    /// Number of variables.
    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn row(&self, c: usize) -> &BitVec {
        &self.rows[c]
    }

    pub fn rhs(&self) -> &BitVec {
        &self.rhs
    }

    pub fn is_homogeneous(&self) -> bool {
        self.rhs.is_zero()
    }

    /// Variable indices of constraint `c`.
    pub fn support(&self, c: usize) -> Vec<usize> {
        self.rows[c].iter_ones().collect()
    }

    /// For each variable, the constraints it occurs in.
    pub fn occurrences(&self) -> Vec<Vec<usize>> {
        let mut occ = vec![Vec::new(); self.vars];
        for (c, row) in self.rows.iter().enumerate() {
            for v in row.iter_ones() {
                occ[v].push(c);
            }
        }
        occ
    }

    fn check_len(&self, x: &Assignment) -> Result<()> {
        if x.len() != self.vars {
            return Err(Error::LengthMismatch {
                expected: self.vars,
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// Bit `c` set iff constraint `c` is violated by `x`.
    pub fn violations(&self, x: &Assignment) -> Result<BitVec> {
        self.check_len(x)?;
        Ok(BitVec::from_fn(self.rows.len(), |c| {
            self.rows[c].dot(x) != self.rhs.get(c)
        }))
    }

    pub fn satisfied_count(&self, x: &Assignment) -> Result<usize> {
        Ok(self.constraints() - self.violation_count(x)?)
    }

    pub fn violation_count(&self, x: &Assignment) -> Result<usize> {
        Ok(self.violations(x)?.count_ones())
    }

    /// Substitutes `x_var = value`, removing the variable. Remaining
    /// variables keep their relative order.
    pub fn pin(&self, var: usize, value: bool) -> Result<AffineSystem> {
        if var >= self.vars {
            return Err(Error::InvalidSystem(format!("cannot pin variable {var}")));
        }
        if self.vars == 1 {
            return Err(Error::InvalidSystem("pinning would leave no variables".into()));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| BitVec::from_fn(self.vars - 1, |j| r.get(if j < var { j } else { j + 1 })))
            .collect();
        let rhs = BitVec::from_fn(self.rows.len(), |c| {
            self.rhs.get(c) ^ (value && self.rows[c].get(var))
        });
        Ok(AffineSystem {
            vars: self.vars - 1,
            rows,
            rhs,
        })
    }

    /// [`Self::exhaustive_solve_capped`] with [`EXHAUSTIVE_CAP`].
    pub fn exhaustive_solve(&self, forbid_zero: bool) -> Result<(Assignment, usize)> {
        self.exhaustive_solve_capped(forbid_zero, EXHAUSTIVE_CAP)
    }

    /// Maximizes the satisfied count over all `2^k` assignments (all nonzero
    /// ones with `forbid_zero`). Among optimal assignments the
    /// lexicographically smallest wins, reading bit 0 first.
    pub fn exhaustive_solve_capped(&self, forbid_zero: bool, cap: usize) -> Result<(Assignment, usize)> {
        let k = self.vars;
        if k > cap || k > 63 {
            return Err(Error::TooLarge { vars: k, cap });
        }
        let m = self.constraints();
        let cols: Vec<BitVec> = (0..k)
            .map(|j| BitVec::from_fn(m, |c| self.rows[c].get(j)))
            .collect();

        // the top `split` variables select a chunk; each chunk walks a Gray
        // code over the remaining ones
        let split = if k >= 16 { 8.min(k) } else { 0 };
        let low = k - split;
        let best = (0u64..1 << split)
            .into_par_iter()
            .filter_map(|high| {
                let mut residual = self.rhs.clone();
                let mut mask = high << low;
                for (j, col) in cols.iter().enumerate().skip(low) {
                    if mask >> j & 1 == 1 {
                        residual.xor_assign(col);
                    }
                }
                let mut best: Option<(usize, u64, u64)> = None;
                let mut consider = |mask: u64, residual: &BitVec| {
                    if forbid_zero && mask == 0 {
                        return;
                    }
                    let key = (residual.count_ones(), lex_key(mask, k));
                    if best.is_none_or(|(v, l, _)| key < (v, l)) {
                        best = Some((key.0, key.1, mask));
                    }
                };
                consider(mask, &residual);
                for step in 1u64..1 << low {
                    let j = step.trailing_zeros() as usize;
                    mask ^= 1 << j;
                    residual.xor_assign(&cols[j]);
                    consider(mask, &residual);
                }
                best
            })
            .min_by_key(|&(v, l, _)| (v, l))
            .ok_or(Error::ZeroAssignment)?;
        let (violated, _, mask) = best;
        Ok((BitVec::from_u64(k, mask), m - violated))
    }
}

/// Integer whose natural order is the lexicographic order of the assignment
/// `mask` read from variable 0.
fn lex_key(mask: u64, k: usize) -> u64 {
    if k == 0 {
        0
    } else {
        mask.reverse_bits() >> (64 - k)
    }
}

impl fmt::Display for AffineSystem {
    /// `m k` on the first line, then `b: i1 i2 ..` per constraint.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.constraints(), self.vars)?;
        for (c, row) in self.rows.iter().enumerate() {
            write!(f, "{}:", u8::from(self.rhs.get(c)))?;
            for v in row.iter_ones() {
                write!(f, " {v}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for AffineSystem {
    type Err = Error;

    /// Blank lines and lines starting with `#` are skipped.
    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| {
            let l = l.trim();
            !l.is_empty() && !l.starts_with('#')
        });
        let (hline, header) = lines
            .next()
            .ok_or_else(|| Error::parse(0, "missing 'm k' header"))?;
        let (m, k) = parse_dims(header, hline + 1)?;
        let mut constraints = Vec::with_capacity(m);
        for (idx, line) in lines {
            let lineno = idx + 1;
            let (b, support) = line.split_once(':').ok_or_else(|| {
                Error::parse(lineno, format!("line {lineno}: expected 'b: i1 i2 ..'"))
            })?;
            let b = match b.trim() {
                "0" => false,
                "1" => true,
                other => {
                    return Err(Error::parse(
                        lineno,
                        format!("line {lineno}: rhs must be 0 or 1, found '{other}'"),
                    ))
                }
            };
            let support = support
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|_| {
                        Error::parse(lineno, format!("line {lineno}: invalid variable index '{tok}'"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            constraints.push((support, b));
        }
        if constraints.len() != m {
            return Err(Error::parse(
                0,
                format!("header declares {m} constraints, found {}", constraints.len()),
            ));
        }
        Self::from_constraints(k, &constraints)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Gf2Poly;
    use proptest::prelude::*;

    fn figure_system() -> AffineSystem {
        let op = ToeplitzOperator::build(&"1 + x + x^2".parse::<Gf2Poly>().unwrap(), 4).unwrap();
        AffineSystem::from_toeplitz(&op)
    }

    fn bits(s: &str) -> BitVec {
        s.parse().unwrap()
    }

    #[test]
    fn counts() {
        let s = AffineSystem::from_constraints(2, &[(vec![0, 1], true), (vec![0], true)]).unwrap();
        assert_eq!(s.satisfied_count(&bits("10")).unwrap(), 2);
        assert_eq!(s.violation_count(&bits("11")).unwrap(), 1);

        let hom = figure_system();
        assert_eq!(hom.satisfied_count(&BitVec::zeros(5)).unwrap(), 7);
        assert_eq!(hom.violation_count(&BitVec::zeros(5)).unwrap(), 0);
        // 7 rows minus weight(1 + x^6)
        assert_eq!(hom.satisfied_count(&bits("11011")).unwrap(), 5);
        assert_eq!(hom.violation_count(&bits("11011")).unwrap(), 2);
        assert_eq!(
            hom.violation_count(&bits("1101")),
            Err(Error::LengthMismatch { expected: 5, actual: 4 })
        );
    }

    #[test]
    fn from_toeplitz_rows() {
        let s = figure_system();
        assert_eq!((s.constraints(), s.vars()), (7, 5));
        assert!(s.is_homogeneous());
        assert_eq!(s.support(0), vec![0]);
        assert_eq!(s.support(2), vec![0, 1, 2]);
        assert_eq!(s.support(6), vec![4]);

        let one = AffineSystem::from_toeplitz(&ToeplitzOperator::build(&Gf2Poly::one(), 0).unwrap());
        assert_eq!(one.to_string(), "1 1\n0: 0\n");
    }

    #[test]
    fn exhaustive_examples() {
        let s = AffineSystem::from_constraints(1, &[(vec![0], true)]).unwrap();
        assert_eq!(s.exhaustive_solve(false).unwrap(), (bits("1"), 1));

        let hom = figure_system();
        assert_eq!(hom.exhaustive_solve(false).unwrap(), (BitVec::zeros(5), 7));
        let (x, sat) = hom.exhaustive_solve(true).unwrap();
        assert_eq!(sat, 5);
        // weight-2 multiples come from Q in {11000, 01100, 00110, 00011, 11011};
        // reading bit 0 first, 00011 is the smallest
        assert_eq!(x, bits("00011"));
    }

    #[test]
    fn exhaustive_cap() {
        let s = AffineSystem::new(30, vec![BitVec::zeros(30)], BitVec::zeros(1)).unwrap();
        assert_eq!(
            s.exhaustive_solve(false),
            Err(Error::TooLarge { vars: 30, cap: EXHAUSTIVE_CAP })
        );
        assert!(s.exhaustive_solve_capped(false, 4).is_err());
    }

    #[test]
    fn exhaustive_splits_deterministically() {
        // 18 variables takes the chunked path; all assignments with x_17 = 1
        // and anything else satisfy the single constraint, lex-min is 0..01
        let s = AffineSystem::from_constraints(18, &[(vec![17], true)]).unwrap();
        let (x, sat) = s.exhaustive_solve(false).unwrap();
        assert_eq!(sat, 1);
        assert_eq!(x.iter_ones().collect::<Vec<_>>(), vec![17]);
    }

    #[test]
    fn pinning_substitutes() {
        let s = figure_system();
        let pinned = s.pin(0, true).unwrap();
        assert_eq!((pinned.constraints(), pinned.vars()), (7, 4));
        // x = 1011 with x_0 = 1 restores 11011
        assert_eq!(pinned.violation_count(&bits("1011")).unwrap(), 2);
        assert_eq!(pinned.rhs().to_string(), "1110000");
        let single = AffineSystem::from_constraints(1, &[(vec![0], false)]).unwrap();
        assert!(single.pin(0, true).is_err());
    }

    #[test]
    fn text_format() {
        let s = figure_system();
        let text = s.to_string();
        assert_eq!(text.lines().count(), 8);
        assert!(text.starts_with("7 5\n0: 0\n0: 0 1\n0: 0 1 2\n"));
        assert_eq!(text.parse::<AffineSystem>().unwrap(), s);

        let parsed: AffineSystem = "# comment\n2 3\n1:\n0: 2 2 1\n".parse().unwrap();
        assert_eq!(parsed.support(0), Vec::<usize>::new());
        assert_eq!(parsed.support(1), vec![1]);
        assert!(parsed.rhs().get(0));
        assert!("1 2\n0: 5\n".parse::<AffineSystem>().is_err());
        assert!("1 2\n2: 0\n".parse::<AffineSystem>().is_err());
        assert!("2 2\n0: 0\n".parse::<AffineSystem>().is_err());
        assert!("1 2\n0 1\n".parse::<AffineSystem>().is_err());
    }

    fn arb_system() -> impl Strategy<Value = AffineSystem> {
        (1usize..=8, 1usize..=12).prop_flat_map(|(k, m)| {
            prop::collection::vec((prop::collection::vec(any::<bool>(), k), any::<bool>()), m)
                .prop_map(move |rows| {
                    let rhs = BitVec::from_bools(&rows.iter().map(|r| r.1).collect::<Vec<_>>());
                    let rows = rows.iter().map(|r| BitVec::from_bools(&r.0)).collect();
                    AffineSystem::new(k, rows, rhs).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn counts_partition(s in arb_system(), seed in any::<u64>()) {
            let x = BitVec::from_u64(s.vars(), seed);
            let sat = s.satisfied_count(&x).unwrap();
            let vio = s.violation_count(&x).unwrap();
            prop_assert_eq!(sat + vio, s.constraints());
        }

        #[test]
        fn exhaustive_dominates_enumeration(s in arb_system(), forbid in any::<bool>()) {
            let (best, sat) = s.exhaustive_solve(forbid).unwrap();
            prop_assert_eq!(s.satisfied_count(&best).unwrap(), sat);
            prop_assert!(!(forbid && best.is_zero()));
            for mask in 0u64..1 << s.vars() {
                if forbid && mask == 0 {
                    continue;
                }
                let x = BitVec::from_u64(s.vars(), mask);
                prop_assert!(s.satisfied_count(&x).unwrap() <= sat);
            }
        }

        #[test]
        fn text_round_trip(s in arb_system()) {
            prop_assert_eq!(s.to_string().parse::<AffineSystem>().unwrap(), s);
        }
    }
}
