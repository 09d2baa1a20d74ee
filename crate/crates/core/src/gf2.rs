//! Dense bit-packed linear algebra over GF(2).
//!
//! Vectors and matrices store bits in 64-bit words, row-major for matrices.
//! Elimination routines pivot on the first set bit of each column scanning
//! rows top to bottom, so every basis produced here is deterministic.

use std::fmt;
use std::ops::{BitXor, BitXorAssign};

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// A vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
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

    /// Vector of length `len` with ones at `indices` (repeated indices cancel).
    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, indices: I) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
            v.flip(i);
        }
        v
    }

    /// Parses a string of `0`/`1` characters, ignoring whitespace.
    pub fn parse01(s: &str) -> Result<Self> {
        let bits: Vec<bool> = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("unexpected character {other:?} in bit string"))),
            })
            .collect::<Result<_>>()?;
        Ok(Self::from_bools(&bits))
    }

    pub(crate) fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        let mut v = Self { len, words };
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
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Parity of the overlap with `other`.
    pub fn dot(&self, other: &BitVector) -> bool {
        debug_assert_eq!(self.len, other.len);
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    /// Number of positions set in both vectors.
    pub fn overlap(&self, other: &BitVector) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let tz = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * WORD + tz)
                }
            })
        })
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    /// Concatenation `self ‖ other`.
    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Bits `start..start+len` as a new vector.
    pub fn slice(&self, start: usize, len: usize) -> BitVector {
        assert!(start + len <= self.len);
        let mut out = BitVector::zeros(len);
        for i in self.iter_ones().filter(|&i| i >= start && i < start + len) {
            out.set(i - start, true);
        }
        out
    }

    /// Kronecker product of two vectors (outer product flattened row-major).
    pub fn kron(&self, other: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.len * other.len);
        for i in self.iter_ones() {
            for j in other.iter_ones() {
                out.set(i * other.len + j, true);
            }
        }
        out
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl BitXorAssign<&BitVector> for BitVector {
    fn bitxor_assign(&mut self, rhs: &BitVector) {
        assert_eq!(self.len, rhs.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&rhs.words) {
            *a ^= b;
        }
    }
}

impl BitXor for &BitVector {
    type Output = BitVector;
    fn bitxor(self, rhs: &BitVector) -> BitVector {
        let mut out = self.clone();
        out ^= rhs;
        out
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

/// A dense matrix over GF(2), stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if f(r, c) {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    /// Builds a matrix from rows of equal length; `cols` is needed for the empty case.
    pub fn from_rows(cols: usize, rows: &[BitVector]) -> Result<Self> {
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    what: "row length",
                    expected: cols,
                    found: row.len(),
                });
            }
            m.row_words_mut(r).copy_from_slice(row.words());
        }
        Ok(m)
    }

    /// Builds a matrix from nested 0/1 values. All rows must have the same length.
    pub fn from_dense(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    what: "row length",
                    expected: cols,
                    found: row.len(),
                });
            }
            for (c, &v) in row.iter().enumerate() {
                if v & 1 == 1 {
                    m.set(r, c, true);
                }
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.stride + c / WORD];
        let mask = 1u64 << (c % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        assert!(r < self.rows && c < self.cols);
        self.data[r * self.stride + c / WORD] ^= 1u64 << (c % WORD);
    }

    #[inline]
    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVector {
        BitVector::from_words(self.cols, self.row_words(r).to_vec())
    }

    pub fn column(&self, c: usize) -> BitVector {
        BitVector::from_indices(self.rows, (0..self.rows).filter(|&r| self.get(r, c)))
    }

    pub fn row_ones(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        self.row_words(r).iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let tz = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * WORD + tz)
                }
            })
        })
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn column_weights(&self) -> Vec<usize> {
        let mut out = vec![0; self.cols];
        for r in 0..self.rows {
            for c in self.row_ones(r) {
                out[c] += 1;
            }
        }
        out
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// Sparse view: the column indices of each row.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        (0..self.rows).map(|r| self.row_ones(r).collect()).collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        let (lo, hi) = (a.min(b), a.max(b));
        let (head, tail) = self.data.split_at_mut(hi * s);
        head[lo * s..(lo + 1) * s].swap_with_slice(&mut tail[..s]);
    }

    /// `row[dst] ^= row[src]`.
    pub fn xor_row_into(&mut self, src: usize, dst: usize) {
        assert_ne!(src, dst);
        let s = self.stride;
        if src < dst {
            let (head, tail) = self.data.split_at_mut(dst * s);
            for (d, v) in tail[..s].iter_mut().zip(&head[src * s..(src + 1) * s]) {
                *d ^= v;
            }
        } else {
            let (head, tail) = self.data.split_at_mut(src * s);
            for (d, v) in head[dst * s..(dst + 1) * s].iter_mut().zip(&tail[..s]) {
                *d ^= v;
            }
        }
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row_ones(r) {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Matrix-vector product `self · v` over GF(2).
    pub fn mul_vec(&self, v: &BitVector) -> BitVector {
        assert_eq!(v.len(), self.cols, "matrix-vector dimension mismatch");
        let mut out = BitVector::zeros(self.rows);
        for r in 0..self.rows {
            let ones: u32 = self
                .row_words(r)
                .iter()
                .zip(v.words())
                .map(|(a, b)| (a & b).count_ones())
                .sum();
            if ones & 1 == 1 {
                out.set(r, true);
            }
        }
        out
    }

    /// Fallible variant of [`BitMatrix::mul_vec`].
    pub fn try_mul_vec(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                what: "vector length",
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok(self.mul_vec(v))
    }

    /// Matrix product `self · other` over GF(2).
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in self.row_ones(r).collect::<Vec<_>>() {
                let src = other.row_words(k).to_vec();
                for (d, s) in out.row_words_mut(r).iter_mut().zip(&src) {
                    *d ^= s;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (d, s) in out.data.iter_mut().zip(&other.data) {
            *d ^= s;
        }
        out
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let mut out = BitMatrix::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in self.row_ones(r) {
                out.set(r, c, true);
            }
            for c in other.row_ones(r) {
                out.set(r, self.cols + c, true);
            }
        }
        out
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut out = BitMatrix::zeros(self.rows + other.rows, self.cols);
        out.data[..self.data.len()].copy_from_slice(&self.data);
        out.data[self.data.len()..].copy_from_slice(&other.data);
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &BitMatrix) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for r1 in 0..self.rows {
            for c1 in self.row_ones(r1).collect::<Vec<_>>() {
                for r2 in 0..other.rows {
                    for c2 in other.row_ones(r2) {
                        out.set(r1 * other.rows + r2, c1 * other.cols + c2, true);
                    }
                }
            }
        }
        out
    }

    pub fn select_columns(&self, cols: &[usize]) -> BitMatrix {
        BitMatrix::from_fn(self.rows, cols.len(), |r, c| self.get(r, cols[c]))
    }

    pub fn select_rows(&self, rows: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(rows.len(), self.cols);
        for (i, &r) in rows.iter().enumerate() {
            out.row_words_mut(i).copy_from_slice(self.row_words(r));
        }
        out
    }

    pub fn permute_columns(&self, perm: &[usize]) -> BitMatrix {
        assert_eq!(perm.len(), self.cols);
        self.select_columns(perm)
    }

    /// Reduced row echelon form with deterministic first-set-bit pivoting.
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.get(i, c)) else {
                continue;
            };
            m.swap_rows(r, p);
            for i in 0..m.rows {
                if i != r && m.get(i, c) {
                    m.xor_row_into(r, i);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        // Row elimination on whichever orientation has fewer rows.
        if self.rows <= self.cols {
            RowBasis::from_matrix(self).rank()
        } else {
            RowBasis::from_matrix(&self.transpose()).rank()
        }
    }

    /// Any `x` with `self · x = b`; free variables are set to zero.
    /// Returns `Ok(None)` when the system is inconsistent.
    pub fn solve(&self, b: &BitVector) -> Result<Option<BitVector>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch {
                what: "right-hand side length",
                expected: self.rows,
                found: b.len(),
            });
        }
        let mut m = self.clone();
        let mut rhs = b.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.get(i, c)) else {
                continue;
            };
            m.swap_rows(r, p);
            let (br, bp) = (rhs.get(r), rhs.get(p));
            rhs.set(r, bp);
            rhs.set(p, br);
            for i in 0..m.rows {
                if i != r && m.get(i, c) {
                    m.xor_row_into(r, i);
                    if rhs.get(r) {
                        rhs.flip(i);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        if (r..m.rows).any(|i| rhs.get(i)) {
            return Ok(None);
        }
        let mut x = BitVector::zeros(m.cols);
        for (i, &c) in pivots.iter().enumerate() {
            if rhs.get(i) {
                x.set(c, true);
            }
        }
        Ok(Some(x))
    }

    /// Basis of `{x : self · x = 0}` with one vector per free column.
    pub fn nullspace_basis(&self) -> Vec<BitVector> {
        let Rref { matrix, pivots } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = BitVector::zeros(self.cols);
                v.set(f, true);
                for (i, &p) in pivots.iter().enumerate() {
                    if matrix.get(i, f) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }

    /// Whether `v` lies in the row space of `self`.
    pub fn rowspace_contains(&self, v: &BitVector) -> Result<bool> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                what: "vector length",
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok(RowBasis::from_matrix(self).contains(v))
    }

    /// Dense `0`/`1` rows, one string per row.
    pub fn to_strings(&self) -> Vec<String> {
        (0..self.rows).map(|r| self.row(r).to_string()).collect()
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {}", self.row(r))?;
        }
        write!(f, "]")
    }
}

/// Result of [`BitMatrix::rref`]: the reduced matrix and its pivot columns.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: BitMatrix,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Incrementally built echelon basis supporting span membership queries.
///
/// Each stored row has a distinct pivot (its lowest set bit) and no other
/// stored row has that pivot bit set.
#[derive(Clone, Debug)]
pub struct RowBasis {
    len: usize,
    rows: Vec<BitVector>,
    pivots: Vec<usize>,
}

impl RowBasis {
    pub fn new(len: usize) -> Self {
        Self {
            len,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_matrix(m: &BitMatrix) -> Self {
        let mut b = Self::new(m.cols());
        for r in 0..m.rows() {
            b.insert(m.row(r));
        }
        b
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn vector_len(&self) -> usize {
        self.len
    }

    /// Reduces `v` in place against the basis; the result is zero iff `v` was in the span.
    pub fn reduce(&self, v: &mut BitVector) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                *v ^= row;
            }
        }
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w);
        w.is_zero()
    }

    /// Adds `v` to the span; returns `false` when it was already contained.
    pub fn insert(&mut self, mut v: BitVector) -> bool {
        assert_eq!(v.len(), self.len);
        self.reduce(&mut v);
        let Some(p) = v.first_one() else {
            return false;
        };
        for row in &mut self.rows {
            if row.get(p) {
                *row ^= &v;
            }
        }
        self.rows.push(v);
        self.pivots.push(p);
        true
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }
}

/// Inverse of a square matrix, if it exists.
pub fn inverse(m: &BitMatrix) -> Option<BitMatrix> {
    let n = m.rows();
    if n != m.cols() {
        return None;
    }
    let aug = m.hstack(&BitMatrix::identity(n));
    let Rref { matrix, pivots } = aug.rref();
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    let cols: Vec<usize> = (n..2 * n).collect();
    Some(matrix.select_columns(&cols))
}
