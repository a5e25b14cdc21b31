//! Linear algebra over GF(2): binary matrices, row reduction, kernels and
//! exhaustive minimum-weight search over a row space.

use std::fmt;
use std::str::FromStr;

use crate::bits::Bits;
use crate::error::{Error, Result};

/// Default limit on the number of span elements `min_weight_in_span` will visit.
pub const DEFAULT_SPAN_CAP: u128 = 1 << 24;

/// A `rows x cols` matrix over GF(2), stored row by row.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    cols: usize,
    rows: Vec<Bits>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![Bits::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<Bits>) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: r.len(),
            });
        }
        Ok(Self { cols, rows })
    }

    /// Builds a matrix from nested 0/1 slices; panics on ragged input.
    pub fn from_nested<R: AsRef<[u8]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let rows = rows
            .iter()
            .map(|r| {
                let r = r.as_ref();
                assert_eq!(r.len(), cols, "ragged rows");
                Bits::from_indices(cols, r.iter().enumerate().filter(|(_, &v)| v != 0).map(|(i, _)| i))
            })
            .collect();
        Self { cols, rows }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.rows[r].set(c, v)
    }

    pub fn row(&self, r: usize) -> &Bits {
        &self.rows[r]
    }

    pub fn rows(&self) -> &[Bits] {
        &self.rows
    }

    /// Hamming weight `|A|`.
    pub fn weight(&self) -> usize {
        self.rows.iter().map(Bits::count_ones).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Bits::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.iter_ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Reduced row echelon form together with the pivot column of each
    /// nonzero row. Zero rows are dropped.
    pub fn rref(&self) -> (Vec<Bits>, Vec<usize>) {
        let mut rows: Vec<Bits> = self.rows.clone();
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..self.cols {
            let Some(p) = (next..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(next, p);
            let pivot_row = rows[next].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != next && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(col);
            next += 1;
            if next == rows.len() {
                break;
            }
        }
        rows.truncate(next);
        (rows, pivots)
    }

    /// Rank over GF(2).
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{v : M v = 0}`, one vector per free column in increasing order.
    pub fn kernel(&self) -> Vec<Bits> {
        let (rref, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = Bits::zeros(self.cols);
                v.set(free, true);
                for (row, &p) in rref.iter().zip(&pivots) {
                    if row.get(free) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }

    /// Coefficients `c` with `sum_i c_i row_i = v`, or `None` if `v` is not in
    /// the row space.
    pub fn membership(&self, v: &Bits) -> Result<Option<Vec<bool>>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        let m = self.rows.len();
        // Each working row carries the combination of original rows it represents.
        let mut work: Vec<(Bits, Bits)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.clone(), Bits::from_indices(m, [i])))
            .collect();
        let mut basis: Vec<(usize, Bits, Bits)> = Vec::new();
        for (mut row, mut comb) in work.drain(..) {
            for (p, brow, bcomb) in &basis {
                if row.get(*p) {
                    row.xor_assign(brow);
                    comb.xor_assign(bcomb);
                }
            }
            if let Some(p) = row.first_one() {
                basis.push((p, row, comb));
            }
        }
        let mut residual = v.clone();
        let mut coeffs = Bits::zeros(m);
        for (p, brow, bcomb) in &basis {
            if residual.get(*p) {
                residual.xor_assign(brow);
                coeffs.xor_assign(bcomb);
            }
        }
        Ok(residual.is_zero().then(|| (0..m).map(|i| coeffs.get(i)).collect()))
    }

    /// Minimum Hamming weight over the row space, by exhaustive Gray-code
    /// enumeration of a row basis. With `exclude_zero` the zero vector is not a
    /// candidate.
    pub fn min_weight_in_span(&self, exclude_zero: bool) -> Result<usize> {
        self.min_weight_in_span_capped(exclude_zero, DEFAULT_SPAN_CAP)
    }

    pub fn min_weight_in_span_capped(&self, exclude_zero: bool, cap: u128) -> Result<usize> {
        if !exclude_zero {
            return Ok(0);
        }
        let (basis, _) = self.rref();
        if basis.is_empty() {
            return Err(Error::EmptySpan);
        }
        let total = 1u128.checked_shl(basis.len() as u32).unwrap_or(u128::MAX);
        if total - 1 > cap {
            return Err(Error::EnumerationCap {
                requested: total - 1,
                cap,
            });
        }
        let mut current = Bits::zeros(self.cols);
        let mut best = usize::MAX;
        for i in 1u64..(total as u64) {
            current.xor_assign(&basis[i.trailing_zeros() as usize]);
            best = best.min(current.count_ones());
        }
        Ok(best)
    }
}

/// Incrementally built echelon basis for fast span membership tests.
#[derive(Clone, Debug, Default)]
pub struct EchelonBasis {
    rows: Vec<(usize, Bits)>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_vectors<'a>(vs: impl IntoIterator<Item = &'a Bits>) -> Self {
        let mut b = Self::new();
        for v in vs {
            b.insert(v.clone());
        }
        b
    }

    /// Residual of `v` after elimination against the basis.
    pub fn reduce(&self, v: &Bits) -> Bits {
        let mut r = v.clone();
        for (p, row) in &self.rows {
            if r.get(*p) {
                r.xor_assign(row);
            }
        }
        r
    }

    pub fn contains(&self, v: &Bits) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` if independent; returns whether the dimension grew.
    pub fn insert(&mut self, v: Bits) -> bool {
        let r = self.reduce(&v);
        match r.first_one() {
            Some(p) => {
                // Keep earlier rows free of the new pivot so `reduce` stays single-pass.
                for (_, row) in self.rows.iter_mut() {
                    if row.get(p) {
                        row.xor_assign(&r);
                    }
                }
                self.rows.push((p, r));
                true
            }
            None => false,
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn vectors(&self) -> impl Iterator<Item = &Bits> {
        self.rows.iter().map(|(_, r)| r)
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryMatrix {}x{}", self.rows.len(), self.cols)?;
        write!(f, "{self}")
    }
}

/// One line per row of `0`/`1` characters, each terminated by a newline.
impl fmt::Display for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            for c in 0..self.cols {
                f.write_str(if row.get(c) { "1" } else { "0" })?;
            }
            f.write_str("\n")?;
        }
        Ok(())
    }
}

impl FromStr for BinaryMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut cols = None;
        let mut rows = Vec::new();
        for (lineno, line) in s.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            let mut bits = Vec::with_capacity(line.len());
            for ch in line.chars() {
                match ch {
                    '0' => bits.push(false),
                    '1' => bits.push(true),
                    other => {
                        return Err(Error::Parse(format!(
                            "line {}: unexpected character {other:?}",
                            lineno + 1
                        )))
                    }
                }
            }
            match cols {
                None => cols = Some(bits.len()),
                Some(c) if c != bits.len() => {
                    return Err(Error::Parse(format!(
                        "line {}: ragged row of length {} (expected {c})",
                        lineno + 1,
                        bits.len()
                    )))
                }
                _ => {}
            }
            rows.push(Bits::from_bools(&bits));
        }
        let cols = cols.ok_or_else(|| Error::Parse("empty matrix".into()))?;
        Ok(Self { cols, rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn family_k1() -> BinaryMatrix {
        BinaryMatrix::from_nested(&[[1, 1, 0], [1, 0, 1], [0, 1, 1]])
    }

    #[test]
    fn rank_examples() {
        assert_eq!(BinaryMatrix::identity(4).rank(), 4);
        assert_eq!(BinaryMatrix::from_nested(&[[1u8; 3]; 3]).rank(), 1);
        // row3 = row1 + row2
        assert_eq!(family_k1().rank(), 2);
        assert_eq!(BinaryMatrix::zeros(3, 5).rank(), 0);
    }

    #[test]
    fn min_weight_examples() {
        assert_eq!(
            BinaryMatrix::from_nested(&[[1u8; 3]; 3])
                .min_weight_in_span(true)
                .unwrap(),
            3
        );
        assert_eq!(family_k1().min_weight_in_span(true).unwrap(), 2);
        assert_eq!(
            BinaryMatrix::from_nested(&[[1, 0, 1, 1]])
                .min_weight_in_span(true)
                .unwrap(),
            3
        );
        assert_eq!(family_k1().min_weight_in_span(false).unwrap(), 0);
    }

    #[test]
    fn min_weight_empty_span_is_an_error() {
        let z = BinaryMatrix::zeros(2, 3);
        assert!(matches!(z.min_weight_in_span(true), Err(Error::EmptySpan)));
    }

    #[test]
    fn min_weight_cap_fails_loudly() {
        let m = BinaryMatrix::identity(10);
        assert!(matches!(
            m.min_weight_in_span_capped(true, 100),
            Err(Error::EnumerationCap {
                requested: 1023,
                cap: 100
            })
        ));
    }

    #[test]
    fn membership_examples() {
        let m = family_k1();
        let zero = Bits::zeros(3);
        assert_eq!(m.membership(&zero).unwrap(), Some(vec![false, false, false]));

        let basis = BinaryMatrix::from_nested(&[[1, 1, 0], [1, 0, 1]]);
        let sum = m.row(0).xor(m.row(1));
        assert_eq!(basis.membership(&sum).unwrap(), Some(vec![true, true]));

        let basis = BinaryMatrix::from_nested(&[[1, 1, 0], [0, 1, 1]]);
        assert_eq!(basis.membership(&Bits::from_indices(3, [0])).unwrap(), None);

        assert!(basis.membership(&Bits::zeros(4)).is_err());
    }

    #[test]
    fn membership_coefficients_reconstruct_vector() {
        let m = BinaryMatrix::from_nested(&[[1, 1, 0, 1], [1, 1, 0, 1], [0, 1, 1, 0], [1, 0, 1, 1]]);
        let target = m.row(2).xor(m.row(3));
        let coeffs = m.membership(&target).unwrap().unwrap();
        let mut acc = Bits::zeros(4);
        for (i, c) in coeffs.iter().enumerate() {
            if *c {
                acc.xor_assign(m.row(i));
            }
        }
        assert_eq!(acc, target);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let m = family_k1();
        let ker = m.kernel();
        assert_eq!(ker.len(), 3 - m.rank());
        for v in &ker {
            assert!(m.rows().iter().all(|r| !r.dot(v)));
        }
    }

    #[test]
    fn text_format_round_trip_and_ragged_rejection() {
        let m = family_k1();
        let text = m.to_string();
        assert_eq!(text, "110\n101\n011\n");
        assert_eq!(text.parse::<BinaryMatrix>().unwrap(), m);
        assert!("110\n10\n".parse::<BinaryMatrix>().is_err());
        assert!("1a0\n".parse::<BinaryMatrix>().is_err());
        assert!("".parse::<BinaryMatrix>().is_err());
    }

    #[test]
    fn echelon_basis_matches_rank() {
        let m = family_k1();
        let b = EchelonBasis::from_vectors(m.rows());
        assert_eq!(b.dim(), 2);
        assert!(b.contains(&m.row(0).xor(m.row(2))));
        assert!(!b.contains(&Bits::from_indices(3, [0])));
    }
}
