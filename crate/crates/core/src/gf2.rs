//! Dense bit-packed GF(2) matrices with Gauss-Jordan elimination.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        Self {
            rows,
            cols,
            words,
            data: vec![0; rows * words],
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
        (self.data[r * self.words + c / 64] >> (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        let w = &mut self.data[r * self.words + c / 64];
        let mask = 1u64 << (c % 64);
        if bit {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        self.data[r * self.words + c / 64] ^= 1u64 << (c % 64);
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }

    /// row[dst] ^= row[src]
    fn xor_rows(&mut self, src: usize, dst: usize) {
        debug_assert_ne!(src, dst);
        let w = self.words;
        let (a, b) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * w);
            (&lo[src * w..(src + 1) * w], &mut hi[..w])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * w);
            (&hi[..w], &mut lo[dst * w..(dst + 1) * w])
        };
        for (d, s) in b.iter_mut().zip(a) {
            *d ^= *s;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let w = self.words;
        for k in 0..w {
            self.data.swap(a * w + k, b * w + k);
        }
    }

    /// Reduced row echelon form over the first `pivot_cols` columns (the rest ride
    /// along, e.g. an augmented right-hand side). Returns the pivot column of each
    /// of the leading `rank` rows.
    pub fn row_reduce(&mut self, pivot_cols: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..pivot_cols.min(self.cols) {
            if next == self.rows {
                break;
            }
            let Some(p) = (next..self.rows).find(|&r| self.get(r, col)) else {
                continue;
            };
            self.swap_rows(p, next);
            for r in 0..self.rows {
                if r != next && self.get(r, col) {
                    self.xor_rows(next, r);
                }
            }
            pivots.push(col);
            next += 1;
        }
        pivots
    }

    /// Parity of `row(r) & mask`.
    pub fn masked_parity(&self, r: usize, mask: &[u64]) -> u8 {
        let ones: u32 = self
            .row(r)
            .iter()
            .zip(mask)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        (ones & 1) as u8
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_rows(rows: &[&[u8]]) -> BitMatrix {
        let mut m = BitMatrix::zeros(rows.len(), rows[0].len());
        for (r, row) in rows.iter().enumerate() {
            for (c, &b) in row.iter().enumerate() {
                m.set(r, c, b == 1);
            }
        }
        m
    }

    #[test]
    fn rank_of_small_matrices() {
        let mut m = from_rows(&[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]);
        assert_eq!(m.row_reduce(3).len(), 2);
        let mut id = from_rows(&[&[1, 0], &[0, 1]]);
        assert_eq!(id.row_reduce(2), vec![0, 1]);
    }

    #[test]
    fn reduced_form_clears_pivot_columns() {
        let mut m = from_rows(&[&[0, 1, 1, 1], &[1, 1, 0, 1], &[1, 0, 0, 1]]);
        let piv = m.row_reduce(4);
        for (r, &c) in piv.iter().enumerate() {
            for rr in 0..m.rows() {
                assert_eq!(m.get(rr, c), rr == r);
            }
        }
    }

    #[test]
    fn wide_rows_cross_word_boundaries() {
        let mut m = BitMatrix::zeros(3, 130);
        m.set(0, 129, true);
        m.set(1, 129, true);
        m.set(1, 64, true);
        m.set(2, 0, true);
        let piv = m.row_reduce(130);
        assert_eq!(piv, vec![0, 64, 129]);
        m.flip(2, 5);
        assert!(m.get(2, 5));
    }
}
