//! Extended-integer and bit-packed Boolean matrices.
//!
//! Every algorithm in this crate is built on two dense matrix kinds:
//! [`ExtMatrix`] over `Z ∪ {-inf, +inf}` and [`BoolMatrix`] with rows packed
//! into 64-bit words. Both are immutable after construction in practice;
//! all operations return fresh values.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::Error;

/// An integer extended with `-inf` and `+inf`.
///
/// The derived ordering is total: `NegInf < Finite(_) < PosInf`, and finite
/// values compare as plain integers.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum ExtInt {
    NegInf,
    Finite(i64),
    PosInf,
}

impl ExtInt {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtInt::Finite(_))
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            ExtInt::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Addition for distance products. `x + inf = inf`; a finite overflow or a
    /// `-inf` addend is an error (`-inf` is only ever a product-output
    /// sentinel, never an input to min-plus sums).
    pub fn checked_add(self, other: ExtInt) -> Result<ExtInt, Error> {
        match (self, other) {
            (ExtInt::NegInf, _) | (_, ExtInt::NegInf) => Err(Error::Overflow),
            (ExtInt::PosInf, _) | (_, ExtInt::PosInf) => Ok(ExtInt::PosInf),
            (ExtInt::Finite(a), ExtInt::Finite(b)) => {
                a.checked_add(b).map(ExtInt::Finite).ok_or(Error::Overflow)
            }
        }
    }

    pub fn checked_sub(self, rhs: i64) -> Result<ExtInt, Error> {
        match self {
            ExtInt::Finite(a) => a.checked_sub(rhs).map(ExtInt::Finite).ok_or(Error::Overflow),
            other => Ok(other),
        }
    }

    /// Negation flipping the infinities, used when rewriting `A + B < c` as a
    /// dominance comparison against `-B`.
    pub fn neg(self) -> Result<ExtInt, Error> {
        match self {
            ExtInt::NegInf => Ok(ExtInt::PosInf),
            ExtInt::PosInf => Ok(ExtInt::NegInf),
            ExtInt::Finite(v) => v.checked_neg().map(ExtInt::Finite).ok_or(Error::Overflow),
        }
    }
}

impl From<i64> for ExtInt {
    fn from(v: i64) -> Self {
        ExtInt::Finite(v)
    }
}

impl fmt::Display for ExtInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtInt::NegInf => write!(f, "-inf"),
            ExtInt::PosInf => write!(f, "inf"),
            ExtInt::Finite(v) => write!(f, "{v}"),
        }
    }
}

/// Dense row-major matrix over [`ExtInt`].
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ExtMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<ExtInt>,
}

impl ExtMatrix {
    pub fn filled(rows: usize, cols: usize, fill: ExtInt) -> Self {
        ExtMatrix { rows, cols, entries: vec![fill; rows * cols] }
    }

    /// Builds a matrix from explicit rows; all rows must share a length.
    pub fn from_rows(rows: &[Vec<ExtInt>]) -> Result<Self, Error> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(ExtMatrix { rows: r, cols: c, entries: rows.concat() })
    }

    /// Convenience constructor from plain integers.
    pub fn from_ints(rows: &[Vec<i64>]) -> Self {
        let data: Vec<Vec<ExtInt>> =
            rows.iter().map(|r| r.iter().map(|&v| ExtInt::Finite(v)).collect()).collect();
        ExtMatrix::from_rows(&data).expect("literal rows are rectangular")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> ExtInt {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: ExtInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[ExtInt] {
        &self.entries
    }

    pub fn transpose(&self) -> ExtMatrix {
        let mut out = ExtMatrix::filled(self.cols, self.rows, ExtInt::NegInf);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Number of finite entries; density is measured by counting, not by a
    /// separate sparse format.
    pub fn finite_count(&self) -> usize {
        self.entries.iter().filter(|e| e.is_finite()).count()
    }

    pub fn max_finite(&self) -> Option<i64> {
        self.entries.iter().filter_map(|e| e.finite()).max()
    }
}

const WORD_BITS: usize = 64;

/// Boolean matrix with rows bit-packed into `u64` words. Padding bits past
/// `cols` are kept zero in every row.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BoolMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl BoolMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(WORD_BITS);
        BoolMatrix { rows, cols, words_per_row, bits: vec![0; rows * words_per_row] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BoolMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self, Error> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        let mut m = BoolMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, &b) in row.iter().enumerate() {
                if b {
                    m.set(i, j, true);
                }
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        let w = self.bits[i * self.words_per_row + j / WORD_BITS];
        (w >> (j % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        debug_assert!(i < self.rows && j < self.cols);
        let w = &mut self.bits[i * self.words_per_row + j / WORD_BITS];
        let mask = 1u64 << (j % WORD_BITS);
        if v {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn row_count(&self, i: usize) -> usize {
        self.row_words(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Boolean product: `C[i,j] = 1` iff some `k` has `a[i,k] = b[k,j] = 1`.
    /// Word-parallel cubic: for every set bit `a[i,k]`, OR row `k` of `b`
    /// into row `i` of the accumulator.
    pub fn multiply(&self, other: &BoolMatrix) -> Result<BoolMatrix, Error> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "bool multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = BoolMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let (head, tail) = out.bits.split_at_mut(i * out.words_per_row);
            let _ = head;
            let acc = &mut tail[..out.words_per_row];
            for (wk, &word) in self.row_words(i).iter().enumerate() {
                let mut w = word;
                while w != 0 {
                    let k = wk * WORD_BITS + w.trailing_zeros() as usize;
                    w &= w - 1;
                    for (dst, src) in acc.iter_mut().zip(other.row_words(k)) {
                        *dst |= src;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Entry-wise OR.
    pub fn or(&self, other: &BoolMatrix) -> Result<BoolMatrix, Error> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "or {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = self.clone();
        for (dst, src) in out.bits.iter_mut().zip(&other.bits) {
            *dst |= src;
        }
        Ok(out)
    }

    pub fn or_in_place(&mut self, other: &BoolMatrix) -> Result<(), Error> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape("or_in_place shape".into()));
        }
        for (dst, src) in self.bits.iter_mut().zip(&other.bits) {
            *dst |= src;
        }
        Ok(())
    }

    /// ORs row `src_row` of `other` into row `dst_row` of `self`.
    pub fn or_row_from(&mut self, dst_row: usize, other: &BoolMatrix, src_row: usize) {
        debug_assert_eq!(self.cols, other.cols);
        let base = dst_row * self.words_per_row;
        for (w, src) in other.row_words(src_row).iter().enumerate() {
            self.bits[base + w] |= src;
        }
    }

    /// Column extraction materializes a transposed copy when needed.
    pub fn transpose(&self) -> BoolMatrix {
        let mut out = BoolMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for (wk, &word) in self.row_words(i).iter().enumerate() {
                let mut w = word;
                while w != 0 {
                    let j = wk * WORD_BITS + w.trailing_zeros() as usize;
                    w &= w - 1;
                    out.set(j, i, true);
                }
            }
        }
        out
    }

    /// Indices of set bits in row `i`, ascending.
    pub fn row_indices(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (wk, &word) in self.row_words(i).iter().enumerate() {
            let mut w = word;
            while w != 0 {
                out.push(wk * WORD_BITS + w.trailing_zeros() as usize);
                w &= w - 1;
            }
        }
        out
    }
}

/// A uniform grid of Boolean blocks, assembled into one matrix by
/// [`BlockGrid::stack`]. All blocks in a grid row must share their row count
/// and all blocks in a grid column their column count.
pub struct BlockGrid<'a> {
    block_rows: usize,
    block_cols: usize,
    blocks: Vec<&'a BoolMatrix>,
}

impl<'a> BlockGrid<'a> {
    /// `blocks` is row-major over the grid: `blocks[p * block_cols + q]`.
    pub fn new(
        block_rows: usize,
        block_cols: usize,
        blocks: Vec<&'a BoolMatrix>,
    ) -> Result<Self, Error> {
        if blocks.len() != block_rows * block_cols || blocks.is_empty() {
            return Err(Error::NonuniformBlocks);
        }
        for p in 0..block_rows {
            let r = blocks[p * block_cols].rows();
            if (0..block_cols).any(|q| blocks[p * block_cols + q].rows() != r) {
                return Err(Error::NonuniformBlocks);
            }
        }
        for q in 0..block_cols {
            let c = blocks[q].cols();
            if (0..block_rows).any(|p| blocks[p * block_cols + q].cols() != c) {
                return Err(Error::NonuniformBlocks);
            }
        }
        Ok(BlockGrid { block_rows, block_cols, blocks })
    }

    pub fn block(&self, p: usize, q: usize) -> &BoolMatrix {
        self.blocks[p * self.block_cols + q]
    }

    /// Assembles the grid into a single matrix whose `(p,q)` block equals
    /// `blocks[p][q]`.
    pub fn stack(&self) -> BoolMatrix {
        let total_rows: usize = (0..self.block_rows).map(|p| self.block(p, 0).rows()).sum();
        let total_cols: usize = (0..self.block_cols).map(|q| self.block(0, q).cols()).sum();
        let mut out = BoolMatrix::zeros(total_rows, total_cols);
        let mut row_off = 0;
        for p in 0..self.block_rows {
            let mut col_off = 0;
            for q in 0..self.block_cols {
                let b = self.block(p, q);
                for i in 0..b.rows() {
                    for j in b.row_indices(i) {
                        out.set(row_off + i, col_off + j, true);
                    }
                }
                col_off += b.cols();
            }
            row_off += self.block(p, 0).rows();
        }
        out
    }
}
