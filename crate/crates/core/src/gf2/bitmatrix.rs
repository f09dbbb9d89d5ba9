//! Word-packed vectors and matrices over GF(2).
//!
//! Rows are packed little-endian into `u64` words (bit `j` of a row lives in
//! word `j / 64`, position `j % 64`).  All row operations are whole-word
//! XORs, which keeps Gaussian elimination fast enough for the
//! architecture-statistics scans on matrices with a few thousand columns.

use crate::error::{Error, Result};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

const WORD: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// A fixed-length bit vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, words: vec![0; words_for(len)] }
    }

    /// Unit vector `e_i`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_indices(len: usize, ones: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in ones {
            v.set(i, true);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let (w, b) = (i / WORD, i % WORD);
        if value {
            self.words[w] |= 1u64 << b;
        } else {
            self.words[w] &= !(1u64 << b);
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Indices of the set bits, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (wi, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                out.push(wi * WORD + b);
                w &= w - 1;
            }
        }
        out
    }

    /// Parity of the AND with another vector, i.e. the GF(2) inner product.
    pub fn dot(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() % 2 == 1
    }

    /// Hamming distance to another vector of the same length.
    pub fn hamming_distance(&self, other: &BitVec) -> Result<usize> {
        if self.len != other.len {
            return Err(Error::ShapeMismatch(format!(
                "hamming distance between lengths {} and {}",
                self.len, other.len
            )));
        }
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

impl std::fmt::Debug for BitVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        Ok(())
    }
}

/// A dense binary matrix, row-major and word-packed.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    wpr: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let wpr = words_for(cols);
        BitMatrix { rows, cols, wpr, bits: vec![0; rows * wpr] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Matrix with entries drawn i.i.d. uniform from {0, 1}.
    pub fn random(rows: usize, cols: usize, rng: &mut impl rand::Rng) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for w in 0..m.wpr {
                m.bits[r * m.wpr + w] = rng.gen();
            }
            m.mask_row_tail(r);
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

    pub fn from_rows(rows: &[BitVec]) -> Result<Self> {
        let cols = rows.first().map_or(0, BitVec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch("rows of unequal length".into()));
        }
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            m.bits[i * m.wpr..(i + 1) * m.wpr].copy_from_slice(r.words());
        }
        Ok(m)
    }

    fn mask_row_tail(&mut self, r: usize) {
        let rem = self.cols % WORD;
        if rem != 0 && self.wpr > 0 {
            self.bits[r * self.wpr + self.wpr - 1] &= (1u64 << rem) - 1;
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.bits[r * self.wpr + c / WORD] >> (c % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let idx = r * self.wpr + c / WORD;
        let bit = 1u64 << (c % WORD);
        if value {
            self.bits[idx] |= bit;
        } else {
            self.bits[idx] &= !bit;
        }
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.bits[r * self.wpr..(r + 1) * self.wpr]
    }

    /// XOR row `src` into row `dst`.
    pub fn xor_row(&mut self, dst: usize, src: usize) {
        debug_assert_ne!(dst, src);
        let (lo, hi) = (dst.min(src), dst.max(src));
        let (head, tail) = self.bits.split_at_mut(hi * self.wpr);
        let hi_row = &mut tail[..self.wpr];
        let lo_row = &head[lo * self.wpr..lo * self.wpr + self.wpr];
        if dst > src {
            for (a, b) in hi_row.iter_mut().zip(lo_row) {
                *a ^= b;
            }
        } else {
            // dst < src: xor the (immutable) hi row into the lo row.
            let lo_row = &mut head[lo * self.wpr..lo * self.wpr + self.wpr];
            for (a, b) in lo_row.iter_mut().zip(tail[..self.wpr].iter()) {
                *a ^= b;
            }
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.wpr {
            self.bits.swap(a * self.wpr + w, b * self.wpr + w);
        }
    }

    pub fn row(&self, r: usize) -> BitVec {
        BitVec { len: self.cols, words: self.row_words(r).to_vec() }
    }

    pub fn set_row(&mut self, r: usize, v: &BitVec) {
        debug_assert_eq!(v.len(), self.cols);
        self.bits[r * self.wpr..(r + 1) * self.wpr].copy_from_slice(v.words());
    }

    pub fn column(&self, c: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn row_distance(&self, a: usize, b: usize) -> usize {
        self.row_words(a)
            .iter()
            .zip(self.row_words(b))
            .map(|(x, y)| (x ^ y).count_ones() as usize)
            .sum()
    }

    pub fn is_zero_row(&self, r: usize) -> bool {
        self.row_words(r).iter().all(|&w| w == 0)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row(r).support() {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            // out.row(r) = XOR of other's rows selected by self's row r.
            let row = self.row(r);
            for k in row.support() {
                let (dst, src) = (r * out.wpr, k * other.wpr);
                for w in 0..out.wpr {
                    out.bits[dst + w] ^= other.bits[src + w];
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `M v` over GF(2).
    pub fn mat_vec(&self, v: &BitVec) -> Result<BitVec> {
        if v.len() != self.cols {
            return Err(Error::ShapeMismatch(format!(
                "matrix has {} cols, vector has {}",
                self.cols,
                v.len()
            )));
        }
        let mut out = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            let mut acc = 0u64;
            for (a, b) in self.row_words(r).iter().zip(v.words()) {
                acc ^= a & b;
            }
            if acc.count_ones() % 2 == 1 {
                out.set(r, true);
            }
        }
        Ok(out)
    }

    /// Rank over GF(2); the input is left untouched.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rank_in_place()
    }

    fn rank_in_place(&mut self) -> usize {
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(pivot) = (rank..self.rows).find(|&r| self.get(r, c)) else {
                continue;
            };
            self.swap_rows(rank, pivot);
            for r in 0..self.rows {
                if r != rank && self.get(r, c) {
                    self.xor_row(r, rank);
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    /// Inverse over GF(2), or `Err(Singular)` for rank-deficient input.
    pub fn inverse(&self) -> Result<BitMatrix> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch(format!(
                "inverse of {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut work = self.clone();
        let mut inv = BitMatrix::identity(n);
        for c in 0..n {
            let Some(pivot) = (c..n).find(|&r| work.get(r, c)) else {
                return Err(Error::Singular(format!("pivot search failed at column {c}")));
            };
            work.swap_rows(c, pivot);
            inv.swap_rows(c, pivot);
            for r in 0..n {
                if r != c && work.get(r, c) {
                    work.xor_row(r, c);
                    inv.xor_row(r, c);
                }
            }
        }
        Ok(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Submatrix picked by (not necessarily sorted) row and column indices.
    pub fn submatrix(&self, row_idx: &[usize], col_idx: &[usize]) -> BitMatrix {
        let mut m = BitMatrix::zeros(row_idx.len(), col_idx.len());
        for (ri, &r) in row_idx.iter().enumerate() {
            for (ci, &c) in col_idx.iter().enumerate() {
                if self.get(r, c) {
                    m.set(ri, ci, true);
                }
            }
        }
        m
    }

    /// Stack `other` below `self`.
    pub fn vstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols {
            return Err(Error::ShapeMismatch("vstack with differing column counts".into()));
        }
        let mut m = BitMatrix::zeros(self.rows + other.rows, self.cols);
        m.bits[..self.bits.len()].copy_from_slice(&self.bits);
        m.bits[self.bits.len()..].copy_from_slice(&other.bits);
        Ok(m)
    }

    /// Packed binary encoding: 8-byte little-endian header (`rows`, `cols`
    /// as `u32` each) followed by row-major rows padded to whole bytes,
    /// bit `c` of a row at byte `c / 8`, position `c % 8`.
    pub fn to_packed_bytes(&self) -> Vec<u8> {
        let bpr = self.cols.div_ceil(8);
        let mut out = Vec::with_capacity(8 + self.rows * bpr);
        out.extend_from_slice(&(self.rows as u32).to_le_bytes());
        out.extend_from_slice(&(self.cols as u32).to_le_bytes());
        for r in 0..self.rows {
            let mut row = vec![0u8; bpr];
            for c in self.row(r).support() {
                row[c / 8] |= 1 << (c % 8);
            }
            out.extend_from_slice(&row);
        }
        out
    }

    pub fn from_packed_bytes(bytes: &[u8]) -> Result<BitMatrix> {
        if bytes.len() < 8 {
            return Err(Error::Malformed("packed matrix shorter than 8-byte header".into()));
        }
        let rows = u32::from_le_bytes(bytes[0..4].try_into().unwrap()) as usize;
        let cols = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
        let bpr = cols.div_ceil(8);
        let expected = 8 + rows * bpr;
        if bytes.len() != expected {
            return Err(Error::Malformed(format!(
                "packed {rows}x{cols} matrix needs {expected} bytes, got {}",
                bytes.len()
            )));
        }
        let mut m = BitMatrix::zeros(rows, cols);
        for r in 0..rows {
            let row = &bytes[8 + r * bpr..8 + (r + 1) * bpr];
            for c in 0..cols {
                if (row[c / 8] >> (c % 8)) & 1 == 1 {
                    m.set(r, c, true);
                }
            }
        }
        Ok(m)
    }
}

impl std::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "{:?}", self.row(r))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct BitMatrixRepr {
    rows: u32,
    cols: u32,
    bits: Vec<String>,
}

impl Serialize for BitMatrix {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let bits = (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| if self.get(r, c) { '1' } else { '0' })
                    .collect::<String>()
            })
            .collect();
        BitMatrixRepr { rows: self.rows as u32, cols: self.cols as u32, bits }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for BitMatrix {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = BitMatrixRepr::deserialize(de)?;
        let (rows, cols) = (repr.rows as usize, repr.cols as usize);
        if repr.bits.len() != rows {
            return Err(D::Error::custom(format!(
                "expected {rows} row strings, got {}",
                repr.bits.len()
            )));
        }
        let mut m = BitMatrix::zeros(rows, cols);
        for (r, s) in repr.bits.iter().enumerate() {
            if s.len() != cols {
                return Err(D::Error::custom(format!(
                    "row {r} has {} characters, expected {cols}",
                    s.len()
                )));
            }
            for (c, ch) in s.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => m.set(r, c, true),
                    other => {
                        return Err(D::Error::custom(format!(
                            "row {r} contains '{other}', expected '0' or '1'"
                        )))
                    }
                }
            }
        }
        Ok(m)
    }
}
