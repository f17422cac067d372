//! Toeplitz operators of GF(2) polynomials and dense binary matrices.
//!
//! The operator `M(P, t)` of a degree-`d` polynomial `P = a_0 + .. + a_d x^d`
//! has `d + t + 1` rows and `t + 1` columns; its first column is
//! `(a_0, .., a_d, 0, .., 0)` and every further column is the previous one
//! shifted down by one row. Multiplying it by the coefficient vector of `Q`
//! (with `deg Q <= t`) yields the coefficient vector of `P * Q`.

use std::fmt;
use std::str::FromStr;

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::poly::Gf2Poly;

/// The implicit matrix `M(P, t)`, stored as `P` plus the column count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToeplitzOperator {
    poly: Gf2Poly,
    degree: usize,
    cols: usize,
}

impl ToeplitzOperator {
    /// Operator with `t + 1` columns for the nonzero polynomial `p`.
    pub fn build(p: &Gf2Poly, t: usize) -> Result<Self> {
        let degree = p.degree().ok_or(Error::ZeroPolynomial)?;
        Ok(ToeplitzOperator {
            poly: p.clone(),
            degree,
            cols: t + 1,
        })
    }

    pub fn poly(&self) -> &Gf2Poly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `t`, the largest exponent of a multiplier `Q`.
    pub fn t(&self) -> usize {
        self.cols - 1
    }

    pub fn rows(&self) -> usize {
        self.degree + self.cols
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry `(i, j)`, 0-based: `a_{i-j}` on the band `0 <= i - j <= d`.
    pub fn entry(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows() && j < self.cols, "entry ({i}, {j}) out of range");
        i >= j && i - j <= self.degree && self.poly.coeff(i - j)
    }

    pub fn row(&self, i: usize) -> BitVec {
        BitVec::from_fn(self.cols, |j| self.entry(i, j))
    }

    pub fn column(&self, j: usize) -> BitVec {
        assert!(j < self.cols, "column {j} out of range");
        let mut col = BitVec::zeros(self.rows());
        col.xor_words_at(self.poly.words(), j);
        col
    }

    /// `M(P, t) * v` over GF(2), accumulated column by column from the
    /// packed coefficients of `P`.
    pub fn matvec(&self, v: &BitVec) -> Result<BitVec> {
        if v.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                actual: v.len(),
            });
        }
        let mut out = BitVec::zeros(self.rows());
        for j in v.iter_ones() {
            out.xor_words_at(self.poly.words(), j);
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> BinaryMatrix {
        BinaryMatrix {
            cols: self.cols,
            rows: (0..self.rows()).map(|i| self.row(i)).collect(),
        }
    }
}

/// A dense `m x k` matrix over GF(2), stored by rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMatrix {
    cols: usize,
    rows: Vec<BitVec>,
}

impl BinaryMatrix {
    pub fn from_rows(rows: Vec<BitVec>) -> Result<Self> {
        let cols = rows.first().ok_or(Error::EmptyMatrix)?.len();
        if cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch {
                expected: cols,
                actual: bad.len(),
            });
        }
        Ok(BinaryMatrix { cols, rows })
    }

    pub fn from_fn(m: usize, k: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        Self::from_rows((0..m).map(|i| BitVec::from_fn(k, |j| f(i, j))).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn row_slice(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn count_ones(&self) -> usize {
        self.rows.iter().map(BitVec::count_ones).sum()
    }
}

impl fmt::Display for BinaryMatrix {
    /// `m k` on the first line, then one line of `k` bits per row.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows(), self.cols)?;
        for row in &self.rows {
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

impl FromStr for BinaryMatrix {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::EmptyMatrix)?;
        let (m, k) = parse_dims(header, 1)?;
        if m == 0 || k == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut rows = Vec::with_capacity(m);
        for (lineno, line) in lines {
            let row: BitVec = line.trim().parse().map_err(|e| match e {
                Error::Parse { message, .. } => {
                    Error::parse(lineno + 1, format!("line {}: {message}", lineno + 1))
                }
                other => other,
            })?;
            if row.len() != k {
                return Err(Error::parse(
                    lineno + 1,
                    format!("line {}: expected {k} bits, found {}", lineno + 1, row.len()),
                ));
            }
            rows.push(row);
        }
        if rows.len() != m {
            return Err(Error::parse(0, format!("expected {m} rows, found {}", rows.len())));
        }
        Self::from_rows(rows)
    }
}

/// Parses an `m k` header line; `line` is 1-based for diagnostics.
pub(crate) fn parse_dims(header: &str, line: usize) -> Result<(usize, usize)> {
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [m, k] = fields.as_slice() else {
        return Err(Error::parse(line, format!("line {line}: expected 'm k', found '{}'", header.trim())));
    };
    let num = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::parse(line, format!("line {line}: invalid dimension '{s}'")))
    };
    Ok((num(m)?, num(k)?))
}

/// How ties are resolved in a majority vote over a diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TiePolicy {
    Zero,
    #[default]
    One,
}

/// How a generic matrix is mapped onto the coefficients of a polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    /// `a_delta` is the majority bit of the diagonal `i - j = delta`.
    Majority(TiePolicy),
    /// `a_delta = A(delta, 0)`, the first column.
    FirstOccurrence,
}

impl Default for Projection {
    fn default() -> Self {
        Projection::Majority(TiePolicy::One)
    }
}

impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Projection::Majority(TiePolicy::One) => f.write_str("majority-tie1"),
            Projection::Majority(TiePolicy::Zero) => f.write_str("majority-tie0"),
            Projection::FirstOccurrence => f.write_str("first-occurrence"),
        }
    }
}

impl FromStr for Projection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "majority" | "majority-tie1" => Ok(Projection::Majority(TiePolicy::One)),
            "majority-tie0" => Ok(Projection::Majority(TiePolicy::Zero)),
            "first-occurrence" | "first" => Ok(Projection::FirstOccurrence),
            other => Err(Error::parse(0, format!("unknown projection '{other}'"))),
        }
    }
}

/// Toeplitz form of an `m x k` matrix: a polynomial of degree exactly `m`
/// (leading coefficient forced to 1) and `t = k`. Entries above the main
/// diagonal have no counterpart in a Toeplitz operator and are ignored.
pub fn project_toeplitz(a: &BinaryMatrix, projection: Projection) -> Result<(Gf2Poly, usize)> {
    let (m, k) = (a.rows(), a.cols());
    if m == 0 || k == 0 {
        return Err(Error::EmptyMatrix);
    }
    let mut exps: Vec<usize> = Vec::new();
    match projection {
        Projection::Majority(tie) => {
            let mut ones = vec![0usize; m];
            let mut total = vec![0usize; m];
            for i in 0..m {
                let row = a.row(i);
                for j in 0..=i.min(k - 1) {
                    total[i - j] += 1;
                    ones[i - j] += usize::from(row.get(j));
                }
            }
            for delta in 0..m {
                let zeros = total[delta] - ones[delta];
                let bit = match ones[delta].cmp(&zeros) {
                    std::cmp::Ordering::Greater => true,
                    std::cmp::Ordering::Less => false,
                    std::cmp::Ordering::Equal => tie == TiePolicy::One,
                };
                if bit {
                    exps.push(delta);
                }
            }
        }
        Projection::FirstOccurrence => {
            exps.extend((0..m).filter(|&delta| a.get(delta, 0)));
        }
    }
    exps.push(m);
    Ok((Gf2Poly::from_exponents(exps), k))
}
