//! Multiary wavelet tree stored level by level.
//!
//! Symbols `S[i] - 1` are written with `B = ceil(lg sigma)` bits and cut into
//! `h = ceil(B / l)` digits, the first one possibly narrower. Level `k`
//! holds the `k`-th digit of every symbol, with positions grouped by the
//! digits above it (stable within a group), so each tree node is a
//! contiguous range. Every level carries, per digit value, a rank directory
//! (absolute superblock counters and 16-bit block counters) and a select
//! directory (superblocks of 4096 occurrences and blocks of 64, each dense
//! or sparse). Inside a block the digits are scanned a word at a time with
//! the broadword projection, popcount and select kernels.

use crate::bitvec::BitVector;
use crate::broadword::{popcount_fields, project_word, select_fast_count, select_in_block_unchecked};
use crate::error::{not_found, Error, Result};
use crate::packed::{bits_for, ceil_log2, low_mask, read_bits, PackedSequence};
use crate::persist::{Decoder, Encoder, Persist};
use crate::seqcore::{check_access, check_rank, check_select, validate_symbols, SequenceOps};

pub const DEFAULT_DIGIT_BITS: u32 = 4;
pub const DEFAULT_BLOCK: usize = 512;

const SELECT_SUPERBLOCK: usize = 4096;
const SELECT_BLOCK: usize = 64;
const SPARSE_SUPERBLOCK_SPAN: usize = 1 << 18;
const SPARSE_BLOCK_SPAN: usize = 4096;
const REL_BITS: u32 = 18;
const SPARSE_FLAG: u64 = 1 << 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WaveletParams {
    /// Digit width `l`; the tree has arity `2^l`.
    pub digit_bits: u32,
    /// Positions per rank block.
    pub block: usize,
}

impl Default for WaveletParams {
    fn default() -> Self {
        Self {
            digit_bits: DEFAULT_DIGIT_BITS,
            block: DEFAULT_BLOCK,
        }
    }
}

impl WaveletParams {
    pub fn new(digit_bits: u32, block: usize) -> Result<Self> {
        let p = Self { digit_bits, block };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=8).contains(&self.digit_bits) {
            return Err(Error::Validation(format!(
                "digit width {} outside [2, 8]",
                self.digit_bits
            )));
        }
        let per_word = 64 / self.digit_bits as usize;
        if !(64..=1 << 16).contains(&self.block) || self.block % per_word != 0 {
            return Err(Error::Validation(format!(
                "block size {} must be in [64, 65536] and a multiple of {per_word}",
                self.block
            )));
        }
        Ok(())
    }

    /// Positions per rank superblock: the largest multiple of the block
    /// size not above 2^16, so block counters fit 16 bits.
    fn superblock(&self) -> usize {
        (1 << 16) / self.block * self.block
    }
}

/// Start of each node at one level, as the number of symbols whose prefix
/// (the digits above the level) is smaller.
#[derive(Debug, Clone, PartialEq, Eq)]
enum NodeIndex {
    Dense(PackedSequence),
    Sparse {
        prefixes: PackedSequence,
        starts: PackedSequence,
    },
}

impl NodeIndex {
    fn build(prefixes_of_symbols: impl Iterator<Item = u64>, prefix_bits: u32, n: usize) -> Self {
        let width = bits_for(n as u64);
        if prefix_bits <= 40 && (1usize << prefix_bits) <= 2 * n + 64 {
            let mut counts = vec![0u64; (1 << prefix_bits) + 1];
            for p in prefixes_of_symbols {
                counts[p as usize + 1] += 1;
            }
            for k in 1..counts.len() {
                counts[k] += counts[k - 1];
            }
            NodeIndex::Dense(PackedSequence::from_values(width, counts))
        } else {
            let mut ps: Vec<u64> = prefixes_of_symbols.collect();
            ps.sort_unstable();
            let mut prefixes = Vec::new();
            let mut starts = Vec::new();
            for (k, &p) in ps.iter().enumerate() {
                if prefixes.last() != Some(&p) {
                    prefixes.push(p);
                    starts.push(k as u64);
                }
            }
            starts.push(n as u64);
            NodeIndex::Sparse {
                prefixes: PackedSequence::from_values(bits_for(prefixes.last().copied().unwrap_or(0)), prefixes),
                starts: PackedSequence::from_values(width, starts),
            }
        }
    }

    #[inline]
    fn start(&self, p: u64) -> usize {
        match self {
            NodeIndex::Dense(s) => s.get(p as usize) as usize,
            NodeIndex::Sparse { prefixes, starts } => {
                let (mut a, mut b) = (0, prefixes.len());
                while a < b {
                    let mid = (a + b) / 2;
                    if prefixes.get(mid) < p {
                        a = mid + 1;
                    } else {
                        b = mid;
                    }
                }
                starts.get(a) as usize
            }
        }
    }

    fn write(&self, enc: &mut Encoder) {
        match self {
            NodeIndex::Dense(s) => {
                enc.put_u64(1);
                enc.put_packed(s);
            }
            NodeIndex::Sparse { prefixes, starts } => {
                enc.put_u64(2);
                enc.put_packed(prefixes);
                enc.put_packed(starts);
            }
        }
    }

    fn read(dec: &mut Decoder<'_>) -> Result<Option<Self>> {
        Ok(match dec.get_u64()? {
            0 => None,
            1 => Some(NodeIndex::Dense(dec.get_packed()?)),
            2 => {
                let prefixes = dec.get_packed()?;
                let starts = dec.get_packed()?;
                if starts.len() != prefixes.len() + 1 {
                    return Err(Error::Format("sparse node index sizes disagree".into()));
                }
                Some(NodeIndex::Sparse { prefixes, starts })
            }
            t => return Err(Error::Format(format!("unknown node index kind {t}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Level {
    width: u32,
    digits: PackedSequence,
    /// Node starts for the prefixes above this level; absent at the root.
    nodes: Option<NodeIndex>,
    /// `[superblock * r + d]`: occurrences of `d` before the superblock.
    sb_counts: Vec<u64>,
    /// `[block * r + d]`: occurrences of `d` between superblock and block start.
    blk_counts: Vec<u16>,
    sb_first: Vec<u64>,
    /// Dense: position of the superblock's first occurrence. Sparse: flag
    /// plus offset into `sb_positions`.
    sb_info: Vec<u64>,
    sb_positions: PackedSequence,
    blk_first: Vec<u64>,
    /// First occurrence of each block, relative to its superblock start.
    blk_start: PackedSequence,
    blk_sparse: BitVector,
    /// All 64 relative positions of every sparse block.
    blk_positions: PackedSequence,
}

impl Level {
    fn arity(&self) -> usize {
        1 << self.width
    }

    fn build(digits: PackedSequence, nodes: Option<NodeIndex>, params: &WaveletParams) -> Self {
        let n = digits.len();
        let w = digits.width();
        let r = 1usize << w;
        let blk = params.block;
        let sb = params.superblock();
        let n_blk = n / blk + 1;
        let n_sb = n / sb + 1;

        let mut sb_counts = vec![0u64; n_sb * r];
        let mut blk_counts = vec![0u16; n_blk * r];
        let mut count = vec![0u64; r];
        let mut sb_base = vec![0u64; r];
        let mut occ: Vec<Vec<u64>> = vec![Vec::new(); r];
        for b in 0..n_blk {
            let pos = b * blk;
            if pos % sb == 0 {
                sb_counts[pos / sb * r..(pos / sb + 1) * r].copy_from_slice(&count);
                sb_base.copy_from_slice(&count);
            }
            for d in 0..r {
                blk_counts[b * r + d] = (count[d] - sb_base[d]) as u16;
            }
            for p in pos..(pos + blk).min(n) {
                let d = digits.get(p) as usize;
                count[d] += 1;
                occ[d].push(p as u64);
            }
        }

        let mut sb_first = Vec::with_capacity(r + 1);
        let mut sb_info = Vec::new();
        let mut sb_pos = Vec::new();
        let mut blk_first = Vec::with_capacity(r + 1);
        let mut blk_start = Vec::new();
        let mut blk_sparse = Vec::new();
        let mut blk_pos = Vec::new();
        for positions in &occ {
            sb_first.push(sb_info.len() as u64);
            blk_first.push(blk_start.len() as u64);
            for chunk in positions.chunks(SELECT_SUPERBLOCK) {
                let start = chunk[0];
                let span = (chunk[chunk.len() - 1] - start) as usize + 1;
                if span > SPARSE_SUPERBLOCK_SPAN {
                    sb_info.push(SPARSE_FLAG | sb_pos.len() as u64);
                    sb_pos.extend_from_slice(chunk);
                    for _ in chunk.chunks(SELECT_BLOCK) {
                        blk_start.push(0);
                        blk_sparse.push(false);
                    }
                    continue;
                }
                sb_info.push(start);
                for b in chunk.chunks(SELECT_BLOCK) {
                    blk_start.push(b[0] - start);
                    let bspan = (b[b.len() - 1] - b[0]) as usize + 1;
                    let sparse = bspan > SPARSE_BLOCK_SPAN;
                    blk_sparse.push(sparse);
                    if sparse {
                        blk_pos.extend(b.iter().map(|&p| p - start));
                        blk_pos.resize(blk_pos.len().next_multiple_of(SELECT_BLOCK), 0);
                    }
                }
            }
        }
        sb_first.push(sb_info.len() as u64);
        blk_first.push(blk_start.len() as u64);

        Self {
            width: w,
            digits,
            nodes,
            sb_counts,
            blk_counts,
            sb_first,
            sb_info,
            sb_positions: PackedSequence::from_values(bits_for(n as u64), sb_pos),
            blk_first,
            blk_start: PackedSequence::from_values(REL_BITS, blk_start),
            blk_sparse: BitVector::from_bits(blk_sparse),
            blk_positions: PackedSequence::from_values(REL_BITS, blk_pos),
        }
    }

    #[inline]
    fn node_start(&self, prefix: u64) -> usize {
        self.nodes.as_ref().map_or(0, |ix| ix.start(prefix))
    }

    /// Occurrences of `d` before the start of rank block `b`.
    #[inline]
    fn rank_at_block(&self, d: usize, b: usize, blk: usize, sb: usize) -> usize {
        let r = self.arity();
        self.sb_counts[b * blk / sb * r + d] as usize + self.blk_counts[b * r + d] as usize
    }

    /// Occurrences of `d` among the first `x` digits. Scans from whichever
    /// block boundary is nearer.
    #[inline]
    fn rank(&self, d: u64, x: usize, blk: usize, sb: usize) -> usize {
        let b = x / blk;
        let from = b * blk;
        let n = self.digits.len();
        let next = from + blk;
        if x - from > blk / 2 && next <= n {
            self.rank_at_block(d as usize, b + 1, blk, sb) - self.count_in(d, x, next)
        } else {
            self.rank_at_block(d as usize, b, blk, sb) + self.count_in(d, from, x)
        }
    }

    /// Occurrences of `d` in digit positions `from..to`.
    #[inline]
    fn count_in(&self, d: u64, from: usize, to: usize) -> usize {
        let w = self.width;
        let per_word = (64 / w) as usize;
        let words = self.digits.words();
        let mut c = 0;
        let mut pos = from;
        while pos < to {
            let cnt = per_word.min(to - pos);
            let chunk = read_bits(words, pos * w as usize, cnt as u32 * w);
            c += popcount_fields(project_word(chunk, w, cnt as u32, d), w, cnt as u32) as usize;
            pos += cnt;
        }
        c
    }

    /// Position (0-based) of the `k`-th occurrence of `d` in the level.
    fn select(&self, d: u64, k: usize, blk: usize, sb: usize) -> usize {
        let d_us = d as usize;
        let info = self.sb_info[self.sb_first[d_us] as usize + (k - 1) / SELECT_SUPERBLOCK];
        if info & SPARSE_FLAG != 0 {
            let off = (info & !SPARSE_FLAG) as usize;
            return self.sb_positions.get(off + (k - 1) % SELECT_SUPERBLOCK) as usize;
        }
        let start = info as usize;
        let bi = self.blk_first[d_us] as usize + (k - 1) / SELECT_BLOCK;
        if self.blk_sparse.bit(bi) {
            let idx = self.blk_sparse.rank1_unchecked(bi);
            return start + self.blk_positions.get(idx * SELECT_BLOCK + (k - 1) % SELECT_BLOCK) as usize;
        }
        let p0 = start + self.blk_start.get(bi) as usize;
        if (k - 1) % SELECT_BLOCK == 0 {
            return p0;
        }
        // the answer lies within SPARSE_BLOCK_SPAN positions of p0
        let n = self.digits.len();
        let (mut lo, mut hi) = (p0 / blk, (p0 + SPARSE_BLOCK_SPAN).min(n) / blk);
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if self.rank_at_block(d_us, mid, blk, sb) < k {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let mut rem = k - self.rank_at_block(d_us, lo, blk, sb);
        let w = self.width;
        let per_word = (64 / w) as usize;
        let sub = select_fast_count(w) as usize;
        let words = self.digits.words();
        let mut pos = lo * blk;
        loop {
            // only a damaged directory sends the scan past the end
            assert!(pos < n, "select directory inconsistent with digits");
            let cnt = per_word.min(n - pos);
            let chunk = read_bits(words, pos * w as usize, cnt as u32 * w);
            let mask = project_word(chunk, w, cnt as u32, d);
            let c = popcount_fields(mask, w, cnt as u32) as usize;
            if rem <= c {
                let mut s = 0;
                loop {
                    let nb = sub.min(cnt - s);
                    let part = (mask >> (s as u32 * w)) & low_mask(nb as u32 * w);
                    let pc = popcount_fields(part, w, nb as u32) as usize;
                    if rem <= pc {
                        let f = select_in_block_unchecked(part, w, nb as u32, rem as u32) as usize;
                        return pos + s + f - 1;
                    }
                    rem -= pc;
                    s += nb;
                }
            }
            rem -= c;
            pos += cnt;
        }
    }

    fn rank_dir_bits(&self) -> usize {
        self.sb_counts.len() * 64 + self.blk_counts.len() * 16
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WaveletSequence {
    n: usize,
    sigma: u64,
    params: WaveletParams,
    levels: Vec<Level>,
}

impl WaveletSequence {
    pub fn new(symbols: &[u64], sigma: u64) -> Result<Self> {
        Self::with_params(symbols, sigma, WaveletParams::default())
    }

    /// `symbols` in `[1, sigma]`.
    pub fn with_params(symbols: &[u64], sigma: u64, params: WaveletParams) -> Result<Self> {
        params.validate()?;
        validate_symbols(symbols, sigma)?;
        let n = symbols.len();
        let total_bits = ceil_log2(sigma).max(1);
        let l = params.digit_bits;
        let h = total_bits.div_ceil(l);
        let first = total_bits - (h - 1) * l;

        let vals: Vec<u64> = symbols.iter().map(|&s| s - 1).collect();
        let mut order: Vec<u32> = (0..n as u32).collect();
        let mut levels = Vec::with_capacity(h as usize);
        let mut consumed = 0;
        for k in 0..h {
            let width = if k == 0 { first } else { l };
            let nodes = (k > 0).then(|| {
                NodeIndex::build(vals.iter().map(|&v| v >> (total_bits - consumed)), consumed, n)
            });
            let shift = total_bits - consumed - width;
            let digits = PackedSequence::from_values(
                width,
                order
                    .iter()
                    .map(|&i| (vals[i as usize] >> shift) & low_mask(width))
                    .collect::<Vec<_>>(),
            );
            levels.push(Level::build(digits, nodes, &params));
            consumed += width;
            if k + 1 < h {
                order.sort_by_key(|&i| vals[i as usize] >> (total_bits - consumed));
            }
        }
        Ok(Self {
            n,
            sigma,
            params,
            levels,
        })
    }

    pub fn params(&self) -> WaveletParams {
        self.params
    }

    pub fn height(&self) -> usize {
        self.levels.len()
    }

    /// Digits of level `k` (0-based), in level order.
    pub fn level_digits(&self, k: usize) -> Vec<u64> {
        self.levels[k].digits.iter().collect()
    }

    fn total_bits(&self) -> u32 {
        self.levels.iter().map(|l| l.width).sum()
    }

    /// Shift of level `k`'s digit inside a padded symbol.
    fn shift(&self, k: usize) -> u32 {
        self.levels[k + 1..].iter().map(|l| l.width).sum()
    }

    /// Payload bits (the digit arrays), `n * ceil(lg sigma)`.
    pub fn payload_bits(&self) -> usize {
        self.levels.iter().map(|l| l.digits.bit_len()).sum()
    }

    /// In-memory directory bits: rank, select and node offsets.
    pub fn directory_bits(&self) -> usize {
        self.levels
            .iter()
            .map(|l| {
                let nodes = match &l.nodes {
                    None => 0,
                    Some(NodeIndex::Dense(s)) => s.bit_len(),
                    Some(NodeIndex::Sparse { prefixes, starts }) => prefixes.bit_len() + starts.bit_len(),
                };
                l.rank_dir_bits()
                    + (l.sb_first.len() + l.sb_info.len() + l.blk_first.len()) * 64
                    + l.sb_positions.bit_len()
                    + l.blk_start.bit_len()
                    + l.blk_sparse.len()
                    + l.blk_sparse.directory_bits()
                    + l.blk_positions.bit_len()
                    + nodes
            })
            .sum()
    }

    fn dirs(&self) -> (usize, usize) {
        (self.params.block, self.params.superblock())
    }
}

impl SequenceOps for WaveletSequence {
    fn len(&self) -> usize {
        self.n
    }

    fn sigma(&self) -> u64 {
        self.sigma
    }

    fn access(&self, i: usize) -> Result<u64> {
        check_access(self.n, i)?;
        let (blk, sb) = self.dirs();
        let mut pos = i - 1;
        let mut prefix = 0u64;
        let h = self.levels.len();
        for (k, level) in self.levels.iter().enumerate() {
            let d = level.digits.get(pos);
            if k + 1 < h {
                let start = level.node_start(prefix);
                let within = level.rank(d, pos, blk, sb) - level.rank(d, start, blk, sb);
                prefix = (prefix << level.width) | d;
                pos = self.levels[k + 1].node_start(prefix) + within;
            } else {
                prefix = (prefix << level.width) | d;
            }
        }
        Ok(prefix + 1)
    }

    fn rank(&self, a: u64, i: usize) -> Result<usize> {
        check_rank(self.n, self.sigma, a, i)?;
        let (blk, sb) = self.dirs();
        let v = a - 1;
        let (mut start, mut end) = (0usize, i);
        let mut prefix = 0u64;
        let h = self.levels.len();
        for (k, level) in self.levels.iter().enumerate() {
            let d = (v >> self.shift(k)) & low_mask(level.width);
            let c = level.rank(d, end, blk, sb) - level.rank(d, start, blk, sb);
            if c == 0 || k + 1 == h {
                return Ok(c);
            }
            prefix = (prefix << level.width) | d;
            start = self.levels[k + 1].node_start(prefix);
            end = start + c;
        }
        unreachable!("a wavelet tree has at least one level")
    }

    fn select(&self, a: u64, j: usize) -> Result<usize> {
        check_select(self.sigma, a, j)?;
        let (blk, sb) = self.dirs();
        let v = a - 1;
        let h = self.levels.len();
        let mut starts = Vec::with_capacity(h);
        let mut prefix = 0u64;
        for (k, level) in self.levels.iter().enumerate() {
            starts.push(level.node_start(prefix));
            prefix = (prefix << level.width) | ((v >> self.shift(k)) & low_mask(level.width));
        }
        let last = &self.levels[h - 1];
        let d_last = v & low_mask(last.width);
        let node = prefix >> last.width;
        let end = if h == 1 { self.n } else { last.node_start(node + 1) };
        let total = last.rank(d_last, end, blk, sb) - last.rank(d_last, starts[h - 1], blk, sb);
        if j > total {
            return Err(not_found(a, j as u64, total as u64));
        }
        let mut rel = j;
        for k in (0..h).rev() {
            let level = &self.levels[k];
            let d = (v >> self.shift(k)) & low_mask(level.width);
            let target = level.rank(d, starts[k], blk, sb) + rel;
            rel = level.select(d, target, blk, sb) - starts[k] + 1;
        }
        Ok(rel)
    }
}

impl Persist for WaveletSequence {
    fn write(&self, enc: &mut Encoder) {
        enc.section("header", |e| {
            e.put_usize(self.n);
            e.put_u64(self.sigma);
            e.put_u64(u64::from(self.params.digit_bits));
            e.put_usize(self.params.block);
            e.put_usize(self.levels.len());
            for l in &self.levels {
                e.put_u64(u64::from(l.width));
            }
        });
        enc.section("levels", |e| {
            for l in &self.levels {
                e.put_packed(&l.digits);
            }
        });
        enc.section("rank directory", |e| {
            for l in &self.levels {
                e.put_words(&l.sb_counts);
                e.put_u16s(&l.blk_counts);
            }
        });
        enc.section("select directory", |e| {
            for l in &self.levels {
                e.put_words(&l.sb_first);
                e.put_words(&l.sb_info);
                e.put_packed(&l.sb_positions);
                e.put_words(&l.blk_first);
                e.put_packed(&l.blk_start);
                e.put_bitvec(&l.blk_sparse);
                e.put_packed(&l.blk_positions);
            }
        });
        enc.section("node offsets", |e| {
            for l in &self.levels {
                match &l.nodes {
                    None => e.put_u64(0),
                    Some(ix) => ix.write(e),
                }
            }
        });
    }

    fn read(dec: &mut Decoder<'_>) -> Result<Self> {
        let n = dec.get_usize()?;
        let sigma = dec.get_u64()?;
        let digit_bits = u32::try_from(dec.get_u64()?).map_err(|_| Error::Format("digit width".into()))?;
        let block = dec.get_usize()?;
        let params = WaveletParams { digit_bits, block };
        params.validate().map_err(|e| Error::Format(e.to_string()))?;
        let h = dec.get_usize()?;
        if h == 0 || h > 64 {
            return Err(Error::Format(format!("wavelet height {h} invalid")));
        }
        let widths = (0..h).map(|_| dec.get_u64()).collect::<Result<Vec<_>>>()?;
        let digits = (0..h).map(|_| dec.get_packed()).collect::<Result<Vec<_>>>()?;
        let mut rank_dirs = Vec::with_capacity(h);
        for _ in 0..h {
            rank_dirs.push((dec.get_words()?, dec.get_u16s()?));
        }
        let mut select_dirs = Vec::with_capacity(h);
        for _ in 0..h {
            select_dirs.push((
                dec.get_words()?,
                dec.get_words()?,
                dec.get_packed()?,
                dec.get_words()?,
                dec.get_packed()?,
                dec.get_bitvec()?,
                dec.get_packed()?,
            ));
        }
        let nodes = (0..h).map(|_| NodeIndex::read(dec)).collect::<Result<Vec<_>>>()?;

        let mut levels = Vec::with_capacity(h);
        let iter = widths.into_iter().zip(digits).zip(rank_dirs).zip(select_dirs).zip(nodes);
        for ((((w, digits), (sb_counts, blk_counts)), sel), nodes) in iter {
            let r = 1usize << w.min(16);
            if w == 0 || w > u64::from(digit_bits) || digits.width() as u64 != w || digits.len() != n {
                return Err(Error::Format("wavelet level shape inconsistent".into()));
            }
            if sb_counts.len() != (n / params.superblock() + 1) * r
                || blk_counts.len() != (n / block + 1) * r
                || sel.0.len() != r + 1
                || sel.3.len() != r + 1
            {
                return Err(Error::Format("wavelet directory sizes inconsistent".into()));
            }
            let (sb_first, sb_info, sb_positions, blk_first, blk_start, blk_sparse, blk_positions) = sel;
            levels.push(Level {
                width: w as u32,
                digits,
                nodes,
                sb_counts,
                blk_counts,
                sb_first,
                sb_info,
                sb_positions,
                blk_first,
                blk_start,
                blk_sparse,
                blk_positions,
            });
        }
        let ws = Self {
            n,
            sigma,
            params,
            levels,
        };
        if sigma == 0 || ws.total_bits() != ceil_log2(sigma).max(1) || ws.levels[0].nodes.is_some() {
            return Err(Error::Format("wavelet levels do not match the alphabet".into()));
        }
        Ok(ws)
    }
}
