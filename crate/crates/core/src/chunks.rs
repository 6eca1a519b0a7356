//! The chunk-count bitmap `A` shared by the chunked representations.
//!
//! The string is cut into `K = ceil(n / chunk_len)` chunks. Traversing the
//! symbol-by-chunk count matrix row by row, `A` receives `1^{count} 0` for
//! every (symbol, chunk) cell, so it has `n` ones and `sigma * K` zeros.

use crate::bitvec::{BitVector, BitVectorBuilder};
use crate::error::{Error, Result};
use crate::persist::{Decoder, Encoder};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkCounts {
    bits: BitVector,
    sigma: u64,
    chunk_len: usize,
    chunks: usize,
}

impl ChunkCounts {
    /// `symbols` are 0-based, below `sigma`.
    pub fn new(symbols: impl Iterator<Item = u64>, n: usize, sigma: u64, chunk_len: usize) -> Self {
        let chunks = n.div_ceil(chunk_len).max(1);
        let mut counts = vec![0u32; sigma as usize * chunks];
        for (c, s) in symbols.enumerate() {
            counts[s as usize * chunks + c / chunk_len] += 1;
        }
        let mut b = BitVectorBuilder::new();
        for &cnt in &counts {
            b.push_run(true, cnt as usize);
            b.push(false);
        }
        Self {
            bits: b.build(),
            sigma,
            chunk_len,
            chunks,
        }
    }

    pub fn bits(&self) -> &BitVector {
        &self.bits
    }

    pub fn chunk_len(&self) -> usize {
        self.chunk_len
    }

    /// Chunks per symbol row.
    pub fn chunks(&self) -> usize {
        self.chunks
    }

    #[inline]
    fn zero_end(&self, z: usize) -> usize {
        if z == 0 {
            0
        } else {
            self.bits.select_unchecked(false, z)
        }
    }

    /// Occurrences of symbol `a` (1-based) in chunks `0..k`.
    #[inline]
    pub fn prefix(&self, a: u64, k: usize) -> usize {
        let z0 = (a as usize - 1) * self.chunks;
        self.zero_end(z0 + k) - self.zero_end(z0) - k
    }

    /// Occurrences of all symbols below `a`, i.e. the rank among all
    /// occurrences in symbol-major order where row `a` starts.
    #[inline]
    pub fn row_start(&self, a: u64) -> usize {
        let z = (a as usize - 1) * self.chunks;
        self.zero_end(z) - z
    }

    /// Total occurrences of symbol `a`.
    pub fn total(&self, a: u64) -> usize {
        self.prefix(a, self.chunks)
    }

    /// Chunk holding the `j`-th occurrence of `a` and its rank inside that
    /// chunk. `j` must be in `1..=total(a)`.
    #[inline]
    pub fn locate(&self, a: u64, j: usize) -> (usize, usize) {
        let g = self.row_start(a) + j;
        let zeros_before = self.bits.select_unchecked(true, g) - g;
        let k = zeros_before - (a as usize - 1) * self.chunks;
        (k, j - self.prefix(a, k))
    }

    pub fn write(&self, enc: &mut Encoder) {
        enc.put_u64(self.sigma);
        enc.put_usize(self.chunk_len);
        enc.put_usize(self.chunks);
        enc.put_bitvec(&self.bits);
    }

    pub fn read(dec: &mut Decoder<'_>) -> Result<Self> {
        let sigma = dec.get_u64()?;
        let chunk_len = dec.get_usize()?;
        let chunks = dec.get_usize()?;
        let bits = dec.get_bitvec()?;
        if chunk_len == 0 || (sigma as usize).checked_mul(chunks) != Some(bits.count_zeros()) {
            return Err(Error::Format("chunk bitmap shape inconsistent".into()));
        }
        Ok(Self {
            bits,
            sigma,
            chunk_len,
            chunks,
        })
    }
}
