//! Packed GF(2) bit vectors and matrices.
//!
//! Bit packing is most-significant-bit-first within each 64-bit word: bit `i`
//! of a vector lives in word `i / 64` at bit position `63 - (i % 64)`. Padding
//! bits in the last word are kept zero so that whole-word operations (XOR,
//! AND/popcount) need no masking.

use rand::Rng;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// Mask selecting the valid (high) bits of the last word of a `len`-bit vector.
#[inline]
fn tail_mask(len: usize) -> u64 {
    let r = len % WORD_BITS;
    if r == 0 {
        !0
    } else {
        !0u64 << (WORD_BITS - r)
    }
}

/// A fixed-length bit string over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

impl std::fmt::Debug for Bits {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Bits({})", self.to_binary_string())
    }
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Bits { len, words: vec![0; words_for(len)] }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut b = Bits::zeros(bits.len());
        for (i, &v) in bits.iter().enumerate() {
            b.set(i, v);
        }
        b
    }

    /// Uniformly random bit string.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut words: Vec<u64> = (0..words_for(len)).map(|_| rng.gen()).collect();
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        Bits { len, words }
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
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / WORD_BITS] >> (WORD_BITS - 1 - i % WORD_BITS) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (WORD_BITS - 1 - i % WORD_BITS);
        if v {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn xor_assign(&mut self, other: &Bits) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &Bits) -> Bits {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// GF(2) inner product `<self, other>`.
    pub fn dot(&self, other: &Bits) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= (a & b).count_ones() & 1;
        }
        acc & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Bit-order reversal: output bit `i` is input bit `len - 1 - i`.
    ///
    /// Reverses the whole padded word block (word order plus `reverse_bits`
    /// per word), which parks the valid bits at the tail, then shifts them
    /// back to the front.
    pub fn reversed(&self) -> Bits {
        let w = self.words.len();
        if w == 0 {
            return self.clone();
        }
        let mut words: Vec<u64> = self.words.iter().rev().map(|x| x.reverse_bits()).collect();
        let shift = w * WORD_BITS - self.len;
        let (word_shift, bit_shift) = (shift / WORD_BITS, shift % WORD_BITS);
        if word_shift > 0 {
            words.rotate_left(word_shift);
            for x in &mut words[w - word_shift..] {
                *x = 0;
            }
        }
        if bit_shift > 0 {
            for i in 0..w {
                let hi = words[i] << bit_shift;
                let lo = if i + 1 < w { words[i + 1] >> (WORD_BITS - bit_shift) } else { 0 };
                words[i] = hi | lo;
            }
        }
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(self.len);
        }
        Bits { len: self.len, words }
    }

    /// The `len`-bit slice starting at bit `start`.
    pub fn slice(&self, start: usize, len: usize) -> Bits {
        assert!(start + len <= self.len, "slice out of range");
        let out_words = words_for(len);
        let mut words = Vec::with_capacity(out_words);
        let base = start / WORD_BITS;
        let off = start % WORD_BITS;
        for w in 0..out_words {
            let hi = self.words.get(base + w).copied().unwrap_or(0);
            let word = if off == 0 {
                hi
            } else {
                let lo = self.words.get(base + w + 1).copied().unwrap_or(0);
                hi << off | lo >> (WORD_BITS - off)
            };
            words.push(word);
        }
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        Bits { len, words }
    }

    /// Concatenation `self || other`.
    pub fn concat(&self, other: &Bits) -> Bits {
        let mut out = Bits::zeros(self.len + other.len);
        for i in 0..self.len {
            out.set(i, self.get(i));
        }
        for i in 0..other.len {
            out.set(self.len + i, other.get(i));
        }
        out
    }

    /// First `n` bits.
    pub fn truncate(&self, n: usize) -> Bits {
        assert!(n <= self.len);
        let mut out = Bits::zeros(n);
        for i in 0..n {
            out.set(i, self.get(i));
        }
        out
    }

    /// Integer value with bit 0 as the least-significant place. Requires `len <= 63`.
    pub fn to_index(&self) -> u64 {
        assert!(self.len <= 63);
        let mut v = 0u64;
        for i in 0..self.len {
            if self.get(i) {
                v |= 1 << i;
            }
        }
        v
    }

    /// Inverse of [`Bits::to_index`].
    pub fn from_index(len: usize, idx: u64) -> Bits {
        assert!(len <= 63);
        let mut b = Bits::zeros(len);
        for i in 0..len {
            b.set(i, idx >> i & 1 == 1);
        }
        b
    }

    pub fn to_binary_string(&self) -> String {
        (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }

    /// Canonical lowercase hex: bit 0 is the most significant bit of the first
    /// digit; pad bits are zero.
    pub fn to_hex(&self) -> String {
        let digits = self.len.div_ceil(4);
        let mut s = String::with_capacity(digits);
        for d in 0..digits {
            let mut nibble = 0u8;
            for k in 0..4 {
                let i = 4 * d + k;
                if i < self.len && self.get(i) {
                    nibble |= 8 >> k;
                }
            }
            s.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        s
    }

    /// Parse the canonical hex form produced by [`Bits::to_hex`].
    pub fn from_hex(len: usize, s: &str) -> Result<Bits> {
        let digits = len.div_ceil(4);
        if s.len() != digits {
            return Err(Error::InvalidArgument(format!(
                "expected {digits} hex digits for {len} bits, got {}",
                s.len()
            )));
        }
        let mut b = Bits::zeros(len);
        for (d, c) in s.chars().enumerate() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| Error::InvalidArgument(format!("invalid hex digit '{c}'")))?
                as u8;
            for k in 0..4 {
                let i = 4 * d + k;
                let bit = nibble & (8 >> k) != 0;
                if i < len {
                    b.set(i, bit);
                } else if bit {
                    return Err(Error::InvalidArgument("nonzero padding bits".into()));
                }
            }
        }
        Ok(b)
    }
}

/// A dense matrix over GF(2), rows packed as in [`Bits`].
#[derive(Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    wpr: usize,
    data: Vec<u64>,
}

impl std::fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Gf2Matrix({}x{})", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {}", self.row(r).to_binary_string())?;
        }
        Ok(())
    }
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let wpr = words_for(cols);
        Gf2Matrix { rows, cols, wpr, data: vec![0; rows * wpr] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Gf2Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let mut m = Gf2Matrix::zeros(rows, cols);
        for r in 0..rows {
            let row = Bits::random(cols, rng);
            m.set_row(r, &row);
        }
        m
    }

    pub fn from_rows(rows: &[Bits]) -> Self {
        assert!(!rows.is_empty());
        let cols = rows[0].len();
        let mut m = Gf2Matrix::zeros(rows.len(), cols);
        for (r, bits) in rows.iter().enumerate() {
            assert_eq!(bits.len(), cols);
            m.set_row(r, bits);
        }
        m
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
        self.data[r * self.wpr + c / WORD_BITS] >> (WORD_BITS - 1 - c % WORD_BITS) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let mask = 1u64 << (WORD_BITS - 1 - c % WORD_BITS);
        let w = &mut self.data[r * self.wpr + c / WORD_BITS];
        if v {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn row(&self, r: usize) -> Bits {
        Bits { len: self.cols, words: self.data[r * self.wpr..(r + 1) * self.wpr].to_vec() }
    }

    pub fn set_row(&mut self, r: usize, bits: &Bits) {
        assert_eq!(bits.len(), self.cols);
        self.data[r * self.wpr..(r + 1) * self.wpr].copy_from_slice(&bits.words);
    }

    pub fn col(&self, c: usize) -> Bits {
        let mut b = Bits::zeros(self.rows);
        for r in 0..self.rows {
            b.set(r, self.get(r, c));
        }
        b
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        let (s, d) = (src * self.wpr, dst * self.wpr);
        for k in 0..self.wpr {
            let v = self.data[s + k];
            self.data[d + k] ^= v;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.wpr {
            self.data.swap(a * self.wpr + k, b * self.wpr + k);
        }
    }

    /// Matrix-vector product over GF(2).
    pub fn mul_vec(&self, x: &Bits) -> Bits {
        assert_eq!(x.len(), self.cols, "mul_vec dimension mismatch");
        let mut out = Bits::zeros(self.rows);
        for r in 0..self.rows {
            let mut acc = 0u32;
            let base = r * self.wpr;
            for k in 0..self.wpr {
                acc ^= (self.data[base + k] & x.words[k]).count_ones() & 1;
            }
            out.set(r, acc & 1 == 1);
        }
        out
    }

    /// Matrix product over GF(2).
    pub fn mul_mat(&self, other: &Gf2Matrix) -> Gf2Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Gf2Matrix::zeros(self.rows, other.cols);
        // out[r] = XOR of other's rows selected by self's row bits
        for r in 0..self.rows {
            let mut acc = vec![0u64; out.wpr];
            for c in 0..self.cols {
                if self.get(r, c) {
                    for k in 0..out.wpr {
                        acc[k] ^= other.data[c * other.wpr + k];
                    }
                }
            }
            out.data[r * out.wpr..(r + 1) * out.wpr].copy_from_slice(&acc);
        }
        out
    }

    pub fn transpose(&self) -> Gf2Matrix {
        let mut out = Gf2Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    out.set(c, r, true);
                }
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..m.cols {
            let Some(pivot) = (rank..m.rows).find(|&r| m.get(r, c)) else {
                continue;
            };
            m.swap_rows(rank, pivot);
            for r in 0..m.rows {
                if r != rank && m.get(r, c) {
                    m.xor_row_into(rank, r);
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }

    /// Inverse over GF(2), or `None` when singular.
    pub fn inverse(&self) -> Option<Gf2Matrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = Gf2Matrix::identity(n);
        for c in 0..n {
            let pivot = (c..n).find(|&r| m.get(r, c))?;
            m.swap_rows(c, pivot);
            inv.swap_rows(c, pivot);
            for r in 0..n {
                if r != c && m.get(r, c) {
                    m.xor_row_into(c, r);
                    inv.xor_row_into(c, r);
                }
            }
        }
        Some(inv)
    }

    /// Solves `A x = b`, preferring the lexicographically smallest solution
    /// (bit 0 most significant). Returns `None` when inconsistent.
    ///
    /// Pivots are chosen right-to-left so the leftmost variables stay free and
    /// are fixed to zero.
    pub fn solve_lex_min(&self, b: &Bits) -> Option<Bits> {
        assert_eq!(b.len(), self.rows);
        let n = self.cols;
        let mut m = self.clone();
        let mut rhs = b.clone();
        let mut pivot_of_col: Vec<Option<usize>> = vec![None; n];
        let mut rank = 0;
        for c in (0..n).rev() {
            let Some(p) = (rank..m.rows).find(|&r| m.get(r, c)) else {
                continue;
            };
            m.swap_rows(rank, p);
            let tmp = rhs.get(rank);
            rhs.set(rank, rhs.get(p));
            rhs.set(p, tmp);
            for r in 0..m.rows {
                if r != rank && m.get(r, c) {
                    m.xor_row_into(rank, r);
                    let v = rhs.get(r) ^ rhs.get(rank);
                    rhs.set(r, v);
                }
            }
            pivot_of_col[c] = Some(rank);
            rank += 1;
        }
        // Inconsistent if a zero row has nonzero rhs.
        for r in rank..m.rows {
            if rhs.get(r) {
                return None;
            }
        }
        let mut x = Bits::zeros(n);
        for c in 0..n {
            if let Some(r) = pivot_of_col[c] {
                // Row r reads: x_c + sum over its other (free, zero) columns = rhs_r.
                x.set(c, rhs.get(r));
            }
        }
        Some(x)
    }

    /// Basis of the right nullspace, one column vector per basis element.
    pub fn nullspace_basis(&self) -> Vec<Bits> {
        let n = self.cols;
        let mut m = self.clone();
        let mut pivot_col_of_row: Vec<usize> = Vec::new();
        let mut is_pivot = vec![false; n];
        let mut rank = 0;
        for c in 0..n {
            let Some(p) = (rank..m.rows).find(|&r| m.get(r, c)) else {
                continue;
            };
            m.swap_rows(rank, p);
            for r in 0..m.rows {
                if r != rank && m.get(r, c) {
                    m.xor_row_into(rank, r);
                }
            }
            pivot_col_of_row.push(c);
            is_pivot[c] = true;
            rank += 1;
        }
        let mut basis = Vec::with_capacity(n - rank);
        for free in 0..n {
            if is_pivot[free] {
                continue;
            }
            let mut v = Bits::zeros(n);
            v.set(free, true);
            for (r, &pc) in pivot_col_of_row.iter().enumerate() {
                if m.get(r, free) {
                    v.set(pc, true);
                }
            }
            basis.push(v);
        }
        basis
    }
}
