//! Word-parallel kernels: block projection, field popcount, in-block select,
//! and constant-time predecessor over a handful of packed short keys.
//!
//! Fields are numbered from 1 and stored least-significant first, so field
//! `j` of width `l` occupies bits `[(j-1)*l, j*l)`. A "field mask" has, for
//! each selected field `j`, the top bit of that field set (bit `j*l - 1`).

use std::ops::{BitAnd, BitOr, BitXor, Not};

use crate::error::{Error, Result};
use crate::packed::{bits_for, low_mask, read_bits, write_bits};

/// Position (0-based) of the `k`-th (0-based) set bit of `w`. `k` must be
/// smaller than `w.count_ones()`.
#[inline]
pub fn select_in_word(mut w: u64, mut k: u32) -> u32 {
    debug_assert!(k < w.count_ones());
    let mut pos = 0;
    for half in [32u32, 16, 8] {
        let low = (w & low_mask(half)).count_ones();
        if k >= low {
            k -= low;
            w >>= half;
            pos += half;
        } else {
            w &= low_mask(half);
        }
    }
    for _ in 0..k {
        w &= w - 1;
    }
    pos + w.trailing_zeros()
}

/// Integer types wide enough to host the replicated superfields of the
/// select scheme. Only the operations the kernels need.
pub trait WideWord:
    Copy + Eq + BitAnd<Output = Self> + BitOr<Output = Self> + BitXor<Output = Self> + Not<Output = Self>
{
    const BITS: u32;
    fn zero() -> Self;
    fn from_u64(v: u64) -> Self;
    fn low_u64(self) -> u64;
    fn shl(self, s: u32) -> Self;
    fn shr(self, s: u32) -> Self;
    fn wrapping_add(self, o: Self) -> Self;
    fn wrapping_sub(self, o: Self) -> Self;
    fn wrapping_mul(self, o: Self) -> Self;
    fn trailing_zeros(self) -> u32;
    fn is_zero(self) -> bool {
        self == Self::zero()
    }
    fn low_mask(len: u32) -> Self {
        if len >= Self::BITS {
            !Self::zero()
        } else {
            Self::from_u64(1).shl(len).wrapping_sub(Self::from_u64(1))
        }
    }
}

impl WideWord for u64 {
    const BITS: u32 = 64;
    fn zero() -> Self {
        0
    }
    fn from_u64(v: u64) -> Self {
        v
    }
    fn low_u64(self) -> u64 {
        self
    }
    fn shl(self, s: u32) -> Self {
        self.checked_shl(s).unwrap_or(0)
    }
    fn shr(self, s: u32) -> Self {
        self.checked_shr(s).unwrap_or(0)
    }
    fn wrapping_add(self, o: Self) -> Self {
        u64::wrapping_add(self, o)
    }
    fn wrapping_sub(self, o: Self) -> Self {
        u64::wrapping_sub(self, o)
    }
    fn wrapping_mul(self, o: Self) -> Self {
        u64::wrapping_mul(self, o)
    }
    fn trailing_zeros(self) -> u32 {
        u64::trailing_zeros(self)
    }
}

impl WideWord for u128 {
    const BITS: u32 = 128;
    fn zero() -> Self {
        0
    }
    fn from_u64(v: u64) -> Self {
        u128::from(v)
    }
    fn low_u64(self) -> u64 {
        self as u64
    }
    fn shl(self, s: u32) -> Self {
        self.checked_shl(s).unwrap_or(0)
    }
    fn shr(self, s: u32) -> Self {
        self.checked_shr(s).unwrap_or(0)
    }
    fn wrapping_add(self, o: Self) -> Self {
        u128::wrapping_add(self, o)
    }
    fn wrapping_sub(self, o: Self) -> Self {
        u128::wrapping_sub(self, o)
    }
    fn wrapping_mul(self, o: Self) -> Self {
        u128::wrapping_mul(self, o)
    }
    fn trailing_zeros(self) -> u32 {
        u128::trailing_zeros(self)
    }
}

/// Fixed-width unsigned integer of `N` little-endian limbs, arithmetic mod
/// `2^(64N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Wide<const N: usize>(pub [u64; N]);

impl<const N: usize> BitAnd for Wide<N> {
    type Output = Self;
    fn bitand(mut self, o: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(o.0) {
            *a &= b;
        }
        self
    }
}

impl<const N: usize> BitOr for Wide<N> {
    type Output = Self;
    fn bitor(mut self, o: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(o.0) {
            *a |= b;
        }
        self
    }
}

impl<const N: usize> BitXor for Wide<N> {
    type Output = Self;
    fn bitxor(mut self, o: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(o.0) {
            *a ^= b;
        }
        self
    }
}

impl<const N: usize> Not for Wide<N> {
    type Output = Self;
    fn not(mut self) -> Self {
        for a in self.0.iter_mut() {
            *a = !*a;
        }
        self
    }
}

impl<const N: usize> WideWord for Wide<N> {
    const BITS: u32 = 64 * N as u32;

    fn zero() -> Self {
        Wide([0; N])
    }

    fn from_u64(v: u64) -> Self {
        let mut w = [0; N];
        w[0] = v;
        Wide(w)
    }

    fn low_u64(self) -> u64 {
        self.0[0]
    }

    fn shl(self, s: u32) -> Self {
        let mut out = [0u64; N];
        let limbs = (s / 64) as usize;
        let bits = s % 64;
        for k in (limbs..N).rev() {
            let src = k - limbs;
            let mut v = self.0[src] << bits;
            if bits != 0 && src > 0 {
                v |= self.0[src - 1] >> (64 - bits);
            }
            out[k] = v;
        }
        Wide(out)
    }

    fn shr(self, s: u32) -> Self {
        let mut out = [0u64; N];
        let limbs = (s / 64) as usize;
        let bits = s % 64;
        for k in 0..N.saturating_sub(limbs) {
            let src = k + limbs;
            let mut v = self.0[src] >> bits;
            if bits != 0 && src + 1 < N {
                v |= self.0[src + 1] << (64 - bits);
            }
            out[k] = v;
        }
        Wide(out)
    }

    fn wrapping_add(self, o: Self) -> Self {
        let mut out = [0u64; N];
        let mut carry = false;
        for k in 0..N {
            let (s1, c1) = self.0[k].overflowing_add(o.0[k]);
            let (s2, c2) = s1.overflowing_add(u64::from(carry));
            out[k] = s2;
            carry = c1 || c2;
        }
        Wide(out)
    }

    fn wrapping_sub(self, o: Self) -> Self {
        let mut out = [0u64; N];
        let mut borrow = false;
        for k in 0..N {
            let (d1, b1) = self.0[k].overflowing_sub(o.0[k]);
            let (d2, b2) = d1.overflowing_sub(u64::from(borrow));
            out[k] = d2;
            borrow = b1 || b2;
        }
        Wide(out)
    }

    fn wrapping_mul(self, o: Self) -> Self {
        let mut out = [0u64; N];
        for i in 0..N {
            if self.0[i] == 0 {
                continue;
            }
            let mut carry = 0u128;
            for j in 0..N - i {
                let cur = u128::from(out[i + j])
                    + u128::from(self.0[i]) * u128::from(o.0[j])
                    + carry;
                out[i + j] = cur as u64;
                carry = cur >> 64;
            }
        }
        Wide(out)
    }

    fn trailing_zeros(self) -> u32 {
        let mut tz = 0;
        for &l in &self.0 {
            if l != 0 {
                return tz + l.trailing_zeros();
            }
            tz += 64;
        }
        tz
    }
}

/// `count` copies of `pattern`, one every `stride` bits starting at bit 0.
pub fn replicate<W: WideWord>(pattern: W, stride: u32, count: u32) -> W {
    let mut out = W::zero();
    for k in 0..count {
        out = out | pattern.shl(k * stride);
    }
    out
}

/// Bit `j*width - 1` set for `j` in `1..=count`.
pub fn field_top_bits(width: u32, count: u32) -> u64 {
    replicate(1u64 << (width - 1), width, count)
}

fn check_block_shape(width: u32, count: u32) -> Result<()> {
    if !(1..=64).contains(&width) || width as u64 * count as u64 > 64 {
        return Err(Error::Contract(format!(
            "{count} fields of {width} bits do not fit one word"
        )));
    }
    Ok(())
}

/// Single-word projection: top bit of field `j` set iff field `j` equals
/// `value`. Replicate, XOR, then an exact per-field zero test that never
/// carries across field boundaries.
#[inline]
pub fn project_word(payload: u64, width: u32, count: u32, value: u64) -> u64 {
    debug_assert!(width as u64 * count as u64 <= 64);
    if count == 0 {
        return 0;
    }
    // geometric series: (2^(w*c) - 1) / (2^w - 1) has a 1 at every field base
    let ones = low_mask(width * count) / low_mask(width);
    let top = ones << (width - 1);
    let rest = top - ones; // low width-1 bits of every field
    let y = payload ^ value.wrapping_mul(ones);
    let nonzero = ((y & rest) + rest) | y;
    !nonzero & top
}

/// A run of `count` fields of `width` bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldBlock {
    words: Vec<u64>,
    width: u32,
    count: usize,
}

impl FieldBlock {
    pub fn from_fields(width: u32, fields: &[u64]) -> Result<Self> {
        if !(2..=16).contains(&width) {
            return Err(Error::Contract(format!("field width {width} outside [2, 16]")));
        }
        let mut words = vec![0u64; (fields.len() * width as usize).div_ceil(64)];
        for (k, &f) in fields.iter().enumerate() {
            if f > low_mask(width) {
                return Err(Error::Contract(format!("field value {f} wider than {width} bits")));
            }
            write_bits(&mut words, k * width as usize, width, f);
        }
        Ok(Self {
            words,
            width,
            count: fields.len(),
        })
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Field `j`, 1-based.
    pub fn field(&self, j: usize) -> u64 {
        read_bits(&self.words, (j - 1) * self.width as usize, self.width)
    }
}

/// Field mask of the fields equal to `value`, in the same layout as the
/// block. Uses the single-word kernel when the block fits in a word;
/// otherwise runs it over word-sized groups of whole fields.
pub fn project_block(blk: &FieldBlock, value: u64) -> Vec<u64> {
    let width = blk.width;
    if blk.count * width as usize <= 64 {
        let payload = blk.words.first().copied().unwrap_or(0);
        return vec![project_word(payload, width, blk.count as u32, value)];
    }
    let per_word = 64 / width as usize;
    let mut out = vec![0u64; blk.words.len()];
    let mut f = 0;
    while f < blk.count {
        let c = per_word.min(blk.count - f);
        let bits = (c * width as usize) as u32;
        let payload = read_bits(&blk.words, f * width as usize, bits);
        let m = project_word(payload, width, c as u32, value);
        write_bits(&mut out, f * width as usize, bits, m);
        f += c;
    }
    out
}

/// Multiply-based popcount of a field mask. Needs `b^2 * l - 1 + lg b`
/// bits of workspace.
fn popcount_scheme<W: WideWord>(mask: W, width: u32, count: u32) -> u32 {
    let span = width * count;
    let one = W::from_u64(1);
    // b copies of the block, one per span
    let x = mask.wrapping_mul(replicate(one, span, count));
    // copy i keeps only its i-th aligned bit
    let isolate = replicate(one.shl(width - 1), span + width, count);
    let y = x & isolate;
    // add the isolated bits together at bit b^2*l - 1
    let z = y.wrapping_mul(replicate(one, span + width, count));
    let c = z.shr(count * span - 1) & W::low_mask(bits_for(count as u64));
    c.low_u64() as u32
}

fn popcount_fits(bits: u32, width: u32, count: u32) -> bool {
    count * count * width - 1 + bits_for(count as u64) <= bits
}

/// Number of set field-top bits in `mask` (fields `1..=count`).
pub fn popcount_fields(mask: u64, width: u32, count: u32) -> u32 {
    debug_assert!(width >= 1 && width as u64 * count as u64 <= 64);
    if count == 0 {
        0
    } else if popcount_fits(64, width, count) {
        popcount_scheme(mask, width, count)
    } else if popcount_fits(128, width, count) {
        popcount_scheme(u128::from(mask), width, count)
    } else {
        mask.count_ones()
    }
}

/// The parallel prefix-count select. Superfields are `2*b^2*l` bits wide
/// and the word must hold `b` of them.
fn select_scheme<W: WideWord>(mask: u64, width: u32, count: u32, j: u32) -> u32 {
    let one = W::from_u64(1);
    let span = width * count;
    let k = 2 * count * span;
    // b superfields holding the block
    let x = W::from_u64(mask).wrapping_mul(replicate(one, k, count));
    // superfield i keeps its first i fields
    let mut prefixes = W::zero();
    for i in 1..=count {
        prefixes = prefixes | W::low_mask(i * width).shl((i - 1) * k);
    }
    let y = x & prefixes;
    // parallel popcount inside each superfield
    let y = y.wrapping_mul(replicate(one, span, count));
    let isolate = replicate(one.shl(width - 1), span + width, count);
    let y = y & replicate(isolate, k, count);
    let z = y.wrapping_mul(replicate(one, span + width, count));
    let counts = z.shr(count * span - 1) & replicate(W::low_mask(bits_for(count as u64)), k, count);
    // superfields whose prefix count equals j
    let ones = replicate(one, k, count);
    let top = ones.shl(k - 1);
    let rest = top.wrapping_sub(ones);
    let t = counts ^ W::from_u64(u64::from(j)).wrapping_mul(ones);
    let hits = !(((t & rest).wrapping_add(rest)) | t) & top;
    // lowest hit
    let lowest = hits & (hits ^ hits.wrapping_sub(one));
    (lowest.trailing_zeros() + 1) / k
}

/// Index (1-based) of the field holding the `j`-th set top bit of `mask`.
pub fn select_in_block(mask: u64, width: u32, count: u32, j: u32) -> Result<u32> {
    check_block_shape(width, count)?;
    let mask = mask & field_top_bits(width, count.max(1)) & low_mask(width * count);
    let available = mask.count_ones();
    if j == 0 || j > available {
        return Err(Error::NotFound {
            what: "set field".into(),
            j: u64::from(j),
            available: u64::from(available),
        });
    }
    Ok(select_in_block_unchecked(mask, width, count, j))
}

/// Workspace bits the prefix-count select needs for `count` fields.
pub fn select_scheme_bits(width: u32, count: u32) -> u32 {
    2 * count * count * count * width
}

#[inline]
pub(crate) fn select_in_block_unchecked(mask: u64, width: u32, count: u32, j: u32) -> u32 {
    match select_scheme_bits(width, count) {
        0..=128 => select_scheme::<u128>(mask, width, count, j),
        129..=256 => select_scheme::<Wide<4>>(mask, width, count, j),
        257..=512 => select_scheme::<Wide<8>>(mask, width, count, j),
        513..=1024 => select_scheme::<Wide<16>>(mask, width, count, j),
        1025..=2048 => select_scheme::<Wide<32>>(mask, width, count, j),
        _ => (select_in_word(mask, j - 1) + 1) / width,
    }
}

/// Largest field count whose select fits a `u128` workspace.
pub fn select_fast_count(width: u32) -> u32 {
    let mut b = 1;
    while select_scheme_bits(width, b + 1) <= 128 && (b + 1) * width <= 64 {
        b += 1;
    }
    b
}

/// Index of the field whose top bit is the single set bit of `v`. Replaces a
/// minimal perfect hash over the powers `2^(stride*i)` with a trailing-zero
/// count.
pub fn lowest_set_field(v: u64, stride: u32) -> Result<u32> {
    if v.count_ones() != 1 {
        return Err(Error::Contract(format!(
            "expected exactly one set bit, found {}",
            v.count_ones()
        )));
    }
    let pos = v.trailing_zeros() + 1;
    if stride == 0 || pos % stride != 0 {
        return Err(Error::Contract(format!(
            "set bit {pos} is not a multiple of stride {stride}"
        )));
    }
    Ok(pos / stride)
}

/// Sorted short keys, each followed by a zero separator bit. Keys never
/// straddle words; each word holds `64 / (width + 1)` keys.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PackedKeySet {
    words: Vec<u64>,
    key_width: u32,
    len: usize,
}

impl PackedKeySet {
    pub fn new(key_width: u32, keys: &[u64]) -> Result<Self> {
        if !(1..=63).contains(&key_width) {
            return Err(Error::Contract(format!("key width {key_width} outside [1, 63]")));
        }
        if keys.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Validation("packed keys must be strictly increasing".into()));
        }
        if keys.iter().any(|&k| k > low_mask(key_width)) {
            return Err(Error::Validation(format!("key wider than {key_width} bits")));
        }
        let stride = key_width + 1;
        let per_word = (64 / stride) as usize;
        let words = keys
            .chunks(per_word)
            .map(|chunk| {
                chunk
                    .iter()
                    .enumerate()
                    .fold(0u64, |w, (k, &key)| w | (key << (k as u32 * stride)))
            })
            .collect();
        Ok(Self {
            words,
            key_width,
            len: keys.len(),
        })
    }

    pub fn from_raw(key_width: u32, len: usize, words: Vec<u64>) -> Result<Self> {
        if !(1..=63).contains(&key_width) {
            return Err(Error::Format(format!("key width {key_width} outside [1, 63]")));
        }
        let per_word = (64 / (key_width + 1)) as usize;
        if words.len() != len.div_ceil(per_word) {
            return Err(Error::Format("packed key set word count mismatch".into()));
        }
        Ok(Self {
            words,
            key_width,
            len,
        })
    }

    pub fn key_width(&self) -> u32 {
        self.key_width
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn keys_per_word(&self) -> usize {
        (64 / (self.key_width + 1)) as usize
    }

    /// Key `i`, 1-based.
    pub fn key(&self, i: usize) -> u64 {
        let per_word = self.keys_per_word();
        let (w, k) = ((i - 1) / per_word, (i - 1) % per_word);
        (self.words[w] >> (k as u32 * (self.key_width + 1))) & low_mask(self.key_width)
    }
}

/// Number of keys in one packed word that are `<= x`: subtract the keys
/// from replicated `x` with separators set; separator survives iff no borrow.
#[inline]
fn packed_word_rank(word: u64, key_width: u32, keys: u32, x: u64) -> u32 {
    let stride = key_width + 1;
    let ones = replicate(1u64, stride, keys);
    let separators = ones << key_width;
    let xs = x.wrapping_mul(ones) | separators;
    let diff = xs.wrapping_sub(word);
    (diff & separators).count_ones()
}

/// `(rank, predecessor)` of `x`: the number of keys `<= x` and the largest
/// such key, or `(0, 0)` when every key exceeds `x`.
pub fn packed_predecessor(ks: &PackedKeySet, x: u64) -> (usize, u64) {
    debug_assert!(x <= low_mask(ks.key_width));
    let per_word = ks.keys_per_word();
    let mut rank = 0usize;
    for (w, &word) in ks.words.iter().enumerate() {
        let keys = per_word.min(ks.len - w * per_word) as u32;
        let c = packed_word_rank(word, ks.key_width, keys, x);
        rank += c as usize;
        if c < keys {
            break;
        }
    }
    if rank == 0 {
        (0, 0)
    } else {
        (rank, ks.key(rank))
    }
}
