//! Fixed-width integer fields packed least-significant-bit first into `u64`
//! words. Fields may straddle a word boundary.

use crate::error::{Error, Result};

pub const WORD_BITS: usize = 64;

/// `ceil(lg x)` for `x >= 1`; `ceil_log2(1) == 0`.
pub fn ceil_log2(x: u64) -> u32 {
    debug_assert!(x >= 1);
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// Bits needed to store any value in `[0, max_value]`, at least one.
pub fn bits_for(max_value: u64) -> u32 {
    (64 - max_value.leading_zeros()).max(1)
}

#[inline]
pub fn low_mask(len: u32) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// Reads `len <= 64` bits starting at bit `offset`. Bits past the end of
/// `words` read as zero.
#[inline]
pub fn read_bits(words: &[u64], offset: usize, len: u32) -> u64 {
    if len == 0 {
        return 0;
    }
    let w = offset / WORD_BITS;
    let shift = (offset % WORD_BITS) as u32;
    let lo = words.get(w).copied().unwrap_or(0) >> shift;
    let v = if shift as usize + len as usize > WORD_BITS {
        lo | (words.get(w + 1).copied().unwrap_or(0) << (64 - shift))
    } else {
        lo
    };
    v & low_mask(len)
}

#[inline]
pub fn write_bits(words: &mut [u64], offset: usize, len: u32, value: u64) {
    if len == 0 {
        return;
    }
    let value = value & low_mask(len);
    let w = offset / WORD_BITS;
    let shift = (offset % WORD_BITS) as u32;
    words[w] &= !(low_mask(len) << shift);
    words[w] |= value << shift;
    if shift as usize + len as usize > WORD_BITS {
        let spill = shift + len - 64;
        words[w + 1] &= !low_mask(spill);
        words[w + 1] |= value >> (64 - shift);
    }
}

/// `len` fields of `width` bits each.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PackedSequence {
    words: Vec<u64>,
    width: u32,
    len: usize,
}

impl PackedSequence {
    pub fn new(width: u32, len: usize) -> Self {
        assert!((1..=64).contains(&width), "field width {width} outside [1, 64]");
        let bits = width as usize * len;
        Self {
            words: vec![0; bits.div_ceil(WORD_BITS)],
            width,
            len,
        }
    }

    pub fn from_values<I>(width: u32, values: I) -> Self
    where
        I: IntoIterator<Item = u64>,
        I::IntoIter: ExactSizeIterator,
    {
        let it = values.into_iter();
        let mut seq = Self::new(width, it.len());
        for (k, v) in it.enumerate() {
            debug_assert!(v <= low_mask(width), "value {v} wider than {width} bits");
            seq.set(k, v);
        }
        seq
    }

    pub fn from_raw(width: u32, len: usize, words: Vec<u64>) -> Result<Self> {
        if !(1..=64).contains(&width) {
            return Err(Error::Format(format!("field width {width} outside [1, 64]")));
        }
        let need = (width as usize)
            .checked_mul(len)
            .ok_or_else(|| Error::Format("packed sequence size overflows".into()))?
            .div_ceil(WORD_BITS);
        if words.len() != need {
            return Err(Error::Format(format!(
                "packed sequence expects {need} words, found {}",
                words.len()
            )));
        }
        Ok(Self { words, width, len })
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        debug_assert!(i < self.len);
        read_bits(&self.words, i * self.width as usize, self.width)
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: u64) {
        debug_assert!(i < self.len);
        write_bits(&mut self.words, i * self.width as usize, self.width, value);
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Payload bits, `len * width`.
    pub fn bit_len(&self) -> usize {
        self.len * self.width as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn log_helpers() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(256), 8);
        assert_eq!(ceil_log2(257), 9);
        assert_eq!(bits_for(0), 1);
        assert_eq!(bits_for(255), 8);
        assert_eq!(bits_for(256), 9);
    }

    #[test]
    fn straddling_fields() {
        let vals: Vec<u64> = (0..100).map(|k| (k * 37) % 128).collect();
        let p = PackedSequence::from_values(7, vals.iter().copied());
        assert_eq!(p.words().len(), 11);
        assert_eq!(p.iter().collect::<Vec<_>>(), vals);
    }

    #[test]
    fn full_width_fields() {
        let vals = vec![u64::MAX, 0, 12345];
        let p = PackedSequence::from_values(64, vals.iter().copied());
        assert_eq!(p.iter().collect::<Vec<_>>(), vals);
    }

    proptest! {
        #[test]
        fn get_returns_set_value(width in 1u32..=64, vals in prop::collection::vec(any::<u64>(), 0..200)) {
            let vals: Vec<u64> = vals.into_iter().map(|v| v & low_mask(width)).collect();
            let p = PackedSequence::from_values(width, vals.iter().copied());
            prop_assert_eq!(p.iter().collect::<Vec<_>>(), vals);
            // nothing is written past the last field
            let used = p.bit_len() % 64;
            if used != 0 {
                prop_assert_eq!(p.words().last().unwrap() >> used, 0);
            }
        }
    }
}
