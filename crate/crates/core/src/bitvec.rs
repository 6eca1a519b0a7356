//! Plain bitvector with constant-time rank and sampled select.
//!
//! Rank directory: an absolute 64-bit counter per 2^16-bit superblock and a
//! 16-bit counter per 512-bit block, relative to its superblock. Select
//! directory: the position of every 8192-th 1-bit and 0-bit, followed by a
//! binary search over the rank directory and an in-word select.

use crate::broadword::select_in_word;
use crate::error::{check_range, Error, Result};
use crate::packed::WORD_BITS;

pub const SUPERBLOCK_BITS: usize = 1 << 16;
pub const BLOCK_BITS: usize = 512;
pub const SELECT_SAMPLE: usize = 8192;

const WORDS_PER_BLOCK: usize = BLOCK_BITS / WORD_BITS;
const BLOCKS_PER_SUPERBLOCK: usize = SUPERBLOCK_BITS / BLOCK_BITS;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitVector {
    words: Vec<u64>,
    n_bits: usize,
    superblocks: Vec<u64>,
    blocks: Vec<u16>,
    select1_samples: Vec<u64>,
    select0_samples: Vec<u64>,
}

impl BitVector {
    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut b = BitVectorBuilder::new();
        for bit in bits {
            b.push(bit);
        }
        b.build()
    }

    /// Wraps raw words; bits at and above `n_bits` are cleared.
    pub fn from_words(mut words: Vec<u64>, n_bits: usize) -> Self {
        words.resize(n_bits.div_ceil(WORD_BITS), 0);
        if n_bits % WORD_BITS != 0 {
            let last = words.len() - 1;
            words[last] &= (1u64 << (n_bits % WORD_BITS)) - 1;
        }
        let mut bv = Self {
            words,
            n_bits,
            ..Default::default()
        };
        bv.build_directories();
        bv
    }

    /// Rebuilds from serialized parts without recomputing the directories.
    pub fn from_parts(
        words: Vec<u64>,
        n_bits: usize,
        superblocks: Vec<u64>,
        blocks: Vec<u16>,
        select1_samples: Vec<u64>,
        select0_samples: Vec<u64>,
    ) -> Result<Self> {
        let n_words = n_bits.div_ceil(WORD_BITS);
        if words.len() != n_words
            || superblocks.len() != n_bits.div_ceil(SUPERBLOCK_BITS) + 1
            || blocks.len() != n_bits.div_ceil(BLOCK_BITS)
        {
            return Err(Error::Format(format!(
                "bitvector of {n_bits} bits has inconsistent component sizes"
            )));
        }
        let ones = *superblocks.last().unwrap();
        if ones > n_bits as u64
            || select1_samples.len() != (ones as usize).div_ceil(SELECT_SAMPLE)
            || select0_samples.len() != (n_bits - ones as usize).div_ceil(SELECT_SAMPLE)
        {
            return Err(Error::Format("bitvector select samples inconsistent".into()));
        }
        Ok(Self {
            words,
            n_bits,
            superblocks,
            blocks,
            select1_samples,
            select0_samples,
        })
    }

    fn build_directories(&mut self) {
        let n_sb = self.n_bits.div_ceil(SUPERBLOCK_BITS);
        let n_blk = self.n_bits.div_ceil(BLOCK_BITS);
        self.superblocks = Vec::with_capacity(n_sb + 1);
        self.blocks = Vec::with_capacity(n_blk);
        let mut total = 0u64;
        let mut in_sb = 0u64;
        for b in 0..n_blk {
            if b % BLOCKS_PER_SUPERBLOCK == 0 {
                self.superblocks.push(total);
                in_sb = 0;
            }
            self.blocks.push(in_sb as u16);
            let lo = b * WORDS_PER_BLOCK;
            let hi = (lo + WORDS_PER_BLOCK).min(self.words.len());
            let c: u64 = self.words[lo..hi].iter().map(|w| u64::from(w.count_ones())).sum();
            total += c;
            in_sb += c;
        }
        if self.superblocks.len() < n_sb + 1 {
            self.superblocks.push(total);
        }

        self.select1_samples.clear();
        self.select0_samples.clear();
        let (mut ones, mut zeros) = (0usize, 0usize);
        for pos in 0..self.n_bits {
            if self.bit(pos) {
                if ones % SELECT_SAMPLE == 0 {
                    self.select1_samples.push(pos as u64);
                }
                ones += 1;
            } else {
                if zeros % SELECT_SAMPLE == 0 {
                    self.select0_samples.push(pos as u64);
                }
                zeros += 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.n_bits
    }

    pub fn is_empty(&self) -> bool {
        self.n_bits == 0
    }

    pub fn count_ones(&self) -> usize {
        *self.superblocks.last().unwrap_or(&0) as usize
    }

    pub fn count_zeros(&self) -> usize {
        self.n_bits - self.count_ones()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn superblocks(&self) -> &[u64] {
        &self.superblocks
    }

    pub fn blocks(&self) -> &[u16] {
        &self.blocks
    }

    pub fn select1_samples(&self) -> &[u64] {
        &self.select1_samples
    }

    pub fn select0_samples(&self) -> &[u64] {
        &self.select0_samples
    }

    /// Bit at 0-based index `idx`.
    #[inline]
    pub fn bit(&self, idx: usize) -> bool {
        (self.words[idx / WORD_BITS] >> (idx % WORD_BITS)) & 1 == 1
    }

    /// Bit at 1-based position `pos`.
    pub fn get(&self, pos: usize) -> Result<bool> {
        check_range("bit position", pos as u64, 1, self.n_bits as u64)?;
        Ok(self.bit(pos - 1))
    }

    /// Number of 1-bits in positions `[1, i]`.
    pub fn rank1(&self, i: usize) -> Result<usize> {
        check_range("bit position", i as u64, 0, self.n_bits as u64)?;
        Ok(self.rank1_unchecked(i))
    }

    pub fn rank0(&self, i: usize) -> Result<usize> {
        Ok(i - self.rank1(i)?)
    }

    #[inline]
    pub(crate) fn rank1_unchecked(&self, i: usize) -> usize {
        if i == 0 {
            return 0;
        }
        if i == self.n_bits {
            return self.count_ones();
        }
        let blk = i / BLOCK_BITS;
        let mut r = self.superblocks[i / SUPERBLOCK_BITS] as usize + self.blocks[blk] as usize;
        let w_end = i / WORD_BITS;
        for w in &self.words[blk * WORDS_PER_BLOCK..w_end] {
            r += w.count_ones() as usize;
        }
        let rem = i % WORD_BITS;
        if rem != 0 {
            r += (self.words[w_end] & ((1u64 << rem) - 1)).count_ones() as usize;
        }
        r
    }

    /// Position (1-based) of the `j`-th occurrence of `bit`.
    pub fn select(&self, bit: bool, j: usize) -> Result<usize> {
        let total = if bit { self.count_ones() } else { self.count_zeros() };
        if j == 0 || j > total {
            return Err(Error::NotFound {
                what: format!("{}-bit", u8::from(bit)),
                j: j as u64,
                available: total as u64,
            });
        }
        Ok(self.select_unchecked(bit, j))
    }

    pub fn select1(&self, j: usize) -> Result<usize> {
        self.select(true, j)
    }

    pub fn select0(&self, j: usize) -> Result<usize> {
        self.select(false, j)
    }

    pub(crate) fn select_unchecked(&self, bit: bool, j: usize) -> usize {
        // count of `bit` values strictly before a 0-based boundary, from the directories
        let before_sb = |sb: usize| -> usize {
            let ones = self.superblocks[sb] as usize;
            if bit {
                ones
            } else {
                sb * SUPERBLOCK_BITS - ones
            }
        };
        let target = j - 1;
        let samples = if bit { &self.select1_samples } else { &self.select0_samples };
        let m = target / SELECT_SAMPLE;
        let n_sb = self.superblocks.len() - 1;
        let mut lo = samples[m] as usize / SUPERBLOCK_BITS;
        let mut hi = samples
            .get(m + 1)
            .map_or(n_sb - 1, |&p| p as usize / SUPERBLOCK_BITS);
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if before_sb(mid) <= target {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let sb = lo;
        let base = before_sb(sb);
        let first_blk = sb * BLOCKS_PER_SUPERBLOCK;
        let last_blk = (first_blk + BLOCKS_PER_SUPERBLOCK).min(self.blocks.len()) - 1;
        let in_blk = |b: usize| -> usize {
            let ones = self.blocks[b] as usize;
            if bit {
                ones
            } else {
                (b - first_blk) * BLOCK_BITS - ones
            }
        };
        let (mut lo, mut hi) = (first_blk, last_blk);
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if base + in_blk(mid) <= target {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let mut remaining = target - base - in_blk(lo);
        let mut w = lo * WORDS_PER_BLOCK;
        loop {
            let word = if bit { self.words[w] } else { !self.words[w] };
            let c = word.count_ones() as usize;
            if remaining < c {
                return w * WORD_BITS + select_in_word(word, remaining as u32) as usize + 1;
            }
            remaining -= c;
            w += 1;
        }
    }

    /// Directory bits (rank counters and select samples).
    pub fn directory_bits(&self) -> usize {
        self.superblocks.len() * 64
            + self.blocks.len() * 16
            + (self.select1_samples.len() + self.select0_samples.len()) * 64
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.n_bits).map(move |k| self.bit(k))
    }
}

/// Appends bits one at a time.
#[derive(Debug, Default)]
pub struct BitVectorBuilder {
    words: Vec<u64>,
    n_bits: usize,
}

impl BitVectorBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        if self.n_bits % WORD_BITS == 0 {
            self.words.push(0);
        }
        if bit {
            *self.words.last_mut().unwrap() |= 1u64 << (self.n_bits % WORD_BITS);
        }
        self.n_bits += 1;
    }

    pub fn push_run(&mut self, bit: bool, count: usize) {
        for _ in 0..count {
            self.push(bit);
        }
    }

    pub fn len(&self) -> usize {
        self.n_bits
    }

    pub fn is_empty(&self) -> bool {
        self.n_bits == 0
    }

    pub fn build(self) -> BitVector {
        BitVector::from_words(self.words, self.n_bits)
    }
}

/// `1^{c_1} 0 1^{c_2} 0 ...`
pub fn unary_concat(counts: &[usize]) -> BitVector {
    let mut b = BitVectorBuilder::new();
    for &c in counts {
        b.push_run(true, c);
        b.push(false);
    }
    b.build()
}
