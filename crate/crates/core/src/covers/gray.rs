//! Binary reflected Gray codes.

use super::CoverError;

/// A sequence of distinct binary words; bit `j` of word `i` is
/// `(words[i] >> j) & 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayCode {
    pub width: usize,
    pub words: Vec<u64>,
}

impl GrayCode {
    /// First `count` words of the reflected code, `i ^ (i >> 1)`, on
    /// `ceil(log2 count)` bits (at least one).
    pub fn reflected(count: usize) -> Result<Self, CoverError> {
        if count == 0 || count > 1 << 62 {
            return Err(CoverError::BadParameter(format!("gray code of {count} words")));
        }
        let width = ceil_log2(count).max(1);
        let words = (0..count as u64).map(|i| i ^ (i >> 1)).collect();
        Ok(Self { width, words })
    }

    pub fn bit(&self, i: usize, j: usize) -> bool {
        self.words[i] >> j & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Words are distinct, fit the width, and neighbours differ in one bit.
    pub fn is_gray(&self) -> bool {
        let fits = self.words.iter().all(|&w| self.width >= 64 || w >> self.width == 0);
        let mut sorted = self.words.clone();
        sorted.sort_unstable();
        sorted.dedup();
        fits && sorted.len() == self.words.len() && self.words.windows(2).all(|w| (w[0] ^ w[1]).count_ones() == 1)
    }

    /// Word `i` as a string, most significant bit first.
    pub fn render(&self, i: usize) -> String {
        (0..self.width).rev().map(|j| if self.bit(i, j) { '1' } else { '0' }).collect()
    }
}

/// Smallest `w` with `2^w >= n` (0 for `n <= 1`).
pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}
