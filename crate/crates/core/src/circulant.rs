//! Matrices over the ring of L×L binary circulants.
//!
//! `P^(i)` is the i-th cyclic right shift of the identity: row `r` has its
//! one in column `(r + i) mod L`.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

/// A circulant `Σ c_i P^(i)`, stored as its exponent set.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CirculantPoly {
    lift: usize,
    exps: BTreeSet<usize>,
}

impl CirculantPoly {
    pub fn zero(lift: usize) -> Self {
        assert!(lift >= 1, "lift size must be positive");
        Self {
            lift,
            exps: BTreeSet::new(),
        }
    }

    pub fn identity(lift: usize) -> Self {
        Self::monomial(lift, 0)
    }

    pub fn monomial(lift: usize, i: usize) -> Self {
        Self::from_exponents(lift, [i])
    }

    /// Builds the circulant from exponents; repeated exponents cancel mod 2.
    pub fn from_exponents<I: IntoIterator<Item = usize>>(lift: usize, exps: I) -> Self {
        let mut p = Self::zero(lift);
        for e in exps {
            p.toggle(e % lift);
        }
        p
    }

    fn toggle(&mut self, e: usize) {
        if !self.exps.remove(&e) {
            self.exps.insert(e);
        }
    }

    pub fn lift_size(&self) -> usize {
        self.lift
    }

    pub fn exponents(&self) -> impl Iterator<Item = usize> + '_ {
        self.exps.iter().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.exps.len()
    }

    pub fn transpose(&self) -> Self {
        Self::from_exponents(self.lift, self.exps.iter().map(|&e| (self.lift - e) % self.lift))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.lift, other.lift);
        let mut out = self.clone();
        for &e in &other.exps {
            out.toggle(e);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.lift, other.lift);
        let mut out = Self::zero(self.lift);
        for &a in &self.exps {
            for &b in &other.exps {
                out.toggle((a + b) % self.lift);
            }
        }
        out
    }

    pub fn to_binary(&self) -> BitMatrix {
        let l = self.lift;
        let mut m = BitMatrix::zeros(l, l);
        for &e in &self.exps {
            for r in 0..l {
                m.flip(r, (r + e) % l);
            }
        }
        m
    }
}

impl fmt::Debug for CirculantPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .exps
            .iter()
            .map(|&e| if e == 0 { "I".to_string() } else { format!("P^{e}") })
            .collect();
        f.write_str(&terms.join("+"))
    }
}

/// A matrix whose entries are circulants of a common size.
#[derive(Clone, PartialEq, Eq)]
pub struct CirculantMatrix {
    rows: usize,
    cols: usize,
    lift: usize,
    entries: Vec<CirculantPoly>,
}

impl CirculantMatrix {
    pub fn zeros(rows: usize, cols: usize, lift: usize) -> Self {
        Self {
            rows,
            cols,
            lift,
            entries: vec![CirculantPoly::zero(lift); rows * cols],
        }
    }

    pub fn identity(n: usize, lift: usize) -> Self {
        let mut m = Self::zeros(n, n, lift);
        for i in 0..n {
            m.set(i, i, CirculantPoly::identity(lift));
        }
        m
    }

    /// Embeds a binary matrix, mapping each one to `I`.
    pub fn from_binary(b: &BitMatrix, lift: usize) -> Self {
        let mut m = Self::zeros(b.rows(), b.cols(), lift);
        for r in 0..b.rows() {
            for c in b.row_ones(r) {
                m.set(r, c, CirculantPoly::identity(lift));
            }
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, lift: usize, entries: Vec<CirculantPoly>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                what: "circulant entry count",
                expected: rows * cols,
                found: entries.len(),
            });
        }
        if let Some(bad) = entries.iter().find(|e| e.lift != lift) {
            return Err(Error::LiftMismatch(lift, bad.lift));
        }
        Ok(Self {
            rows,
            cols,
            lift,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn lift_size(&self) -> usize {
        self.lift
    }

    pub fn get(&self, r: usize, c: usize) -> &CirculantPoly {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, p: CirculantPoly) {
        assert_eq!(p.lift, self.lift, "entry lift size mismatch");
        self.entries[r * self.cols + c] = p;
    }

    /// Transposes the grid and each entry.
    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows, self.lift);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).transpose());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.lift != other.lift {
            return Err(Error::LiftMismatch(self.lift, other.lift));
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                what: "circulant product",
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols, self.lift);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = CirculantPoly::zero(self.lift);
                for k in 0..self.cols {
                    acc = acc.add(&self.get(r, k).mul(other.get(k, c)));
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    /// Kronecker product over the ring.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        if self.lift != other.lift {
            return Err(Error::LiftMismatch(self.lift, other.lift));
        }
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols, self.lift);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                let a = self.get(r1, c1);
                if a.is_zero() {
                    continue;
                }
                for r2 in 0..other.rows {
                    for c2 in 0..other.cols {
                        out.set(r1 * other.rows + r2, c1 * other.cols + c2, a.mul(other.get(r2, c2)));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.lift != other.lift {
            return Err(Error::LiftMismatch(self.lift, other.lift));
        }
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                what: "circulant hstack rows",
                expected: self.rows,
                found: other.rows,
            });
        }
        let cols = self.cols + other.cols;
        let mut out = Self::zeros(self.rows, cols, self.lift);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c).clone());
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c).clone());
            }
        }
        Ok(out)
    }

    /// Binary expansion: every entry becomes its L×L circulant block.
    pub fn lift(&self) -> BitMatrix {
        let l = self.lift;
        let mut m = BitMatrix::zeros(self.rows * l, self.cols * l);
        for r in 0..self.rows {
            for c in 0..self.cols {
                for e in self.get(r, c).exponents() {
                    for i in 0..l {
                        m.flip(r * l + i, c * l + (i + e) % l);
                    }
                }
            }
        }
        m
    }
}

impl fmt::Debug for CirculantMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CirculantMatrix {}x{} (L={}) [", self.rows, self.cols, self.lift)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| format!("{:?}", self.get(r, c))).collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense(rows: &[Vec<u8>]) -> BitMatrix {
        BitMatrix::from_dense(rows).unwrap()
    }

    #[test]
    fn lift_of_shift_by_three() {
        let m = CirculantPoly::monomial(4, 3).to_binary();
        let want = dense(&[vec![0, 0, 0, 1], vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0]]);
        assert_eq!(m, want);
    }

    #[test]
    fn lift_of_identity_plus_shift() {
        let m = CirculantPoly::from_exponents(3, [0, 1]).to_binary();
        assert_eq!(m, dense(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]));
    }

    #[test]
    fn lift_of_block_matrix() {
        let l = 2;
        let entries = vec![
            CirculantPoly::zero(l),
            CirculantPoly::from_exponents(l, [0, 1]),
            CirculantPoly::monomial(l, 1),
            CirculantPoly::zero(l),
        ];
        let m = CirculantMatrix::from_entries(2, 2, l, entries).unwrap();
        let want = dense(&[vec![0, 0, 1, 1], vec![0, 0, 1, 1], vec![0, 1, 0, 0], vec![1, 0, 0, 0]]);
        assert_eq!(m.lift(), want);
    }

    #[test]
    fn transpose_maps_exponents() {
        assert_eq!(CirculantPoly::monomial(5, 1).transpose(), CirculantPoly::monomial(5, 4));
        assert_eq!(CirculantPoly::identity(5).transpose(), CirculantPoly::identity(5));
    }

    #[test]
    fn repeated_exponents_cancel() {
        assert!(CirculantPoly::from_exponents(3, [1, 4]).is_zero());
    }

    #[test]
    fn mismatched_lifts_are_rejected() {
        let a = CirculantMatrix::identity(2, 3);
        let b = CirculantMatrix::identity(2, 4);
        assert!(matches!(a.mul(&b), Err(Error::LiftMismatch(3, 4))));
        assert!(a.kron(&b).is_err());
    }

    fn arb_circ(rows: usize, cols: usize, lift: usize) -> impl Strategy<Value = CirculantMatrix> {
        proptest::collection::vec(proptest::collection::vec(0..lift, 0..3), rows * cols).prop_map(move |es| {
            let entries = es.into_iter().map(|e| CirculantPoly::from_exponents(lift, e)).collect();
            CirculantMatrix::from_entries(rows, cols, lift, entries).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn lift_commutes_with_transpose(m in (1usize..6).prop_flat_map(|l| arb_circ(2, 3, l))) {
            prop_assert_eq!(m.transpose().lift(), m.lift().transpose());
        }

        #[test]
        fn lift_is_multiplicative(
            (a, b) in (1usize..6).prop_flat_map(|l| (arb_circ(2, 2, l), arb_circ(2, 2, l)))
        ) {
            prop_assert_eq!(a.mul(&b).unwrap().lift(), a.lift().mul(&b.lift()));
        }
    }
}
