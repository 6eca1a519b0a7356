//! Recursive predecessor search with rank, over a static set of keys.
//!
//! A key of `l` bits splits into a high half `h(x)` and a low half `l(x)`.
//! A node keeps the distinct high halves `P` (sorted), a hash dictionary
//! from `p` to its tuple, and for every tuple the rank `r_m` of the group's
//! minimum. All low halves are kept in one packed array in key order, so the
//! group of `p` occupies ranks `r_m..=r_M` and `m`, `M` are read from it.
//! Groups whose interior has more than `t` keys get a child node over the
//! interior low halves; `P` gets a summary node when it has more than `t`
//! entries. Anything of at most `t` keys is searched directly in the packed
//! array.
//!
//! The top level splits the keys into `n' = 2^floor(lg n)` partitions by
//! their top `lg n'` bits; a unary bitvector `B` of partition sizes turns a
//! partition number into the rank of its first key.

use crate::bitvec::{unary_concat, BitVector};
use crate::error::{Error, Result};
use crate::packed::{bits_for, low_mask, PackedSequence};
use crate::persist::{Decoder, Encoder, Persist};

pub const DEFAULT_BASE_SIZE: usize = 64;

const HASH_MUL: u64 = 0x9E37_79B9_7F4A_7C15;

/// Bits with rank by per-word cumulative counts.
#[derive(Debug, Clone, PartialEq, Eq)]
struct RankedBits {
    words: Vec<u64>,
    before: PackedSequence,
}

impl RankedBits {
    fn new(bits: &[bool]) -> Self {
        let mut words = vec![0u64; bits.len().div_ceil(64)];
        for (k, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
            words[k / 64] |= 1 << (k % 64);
        }
        let total = bits.iter().filter(|&&b| b).count();
        let mut acc = 0u64;
        let before = PackedSequence::from_values(
            bits_for(total as u64),
            words
                .iter()
                .map(|w| {
                    let b = acc;
                    acc += u64::from(w.count_ones());
                    b
                })
                .collect::<Vec<_>>(),
        );
        Self { words, before }
    }

    #[inline]
    fn get(&self, k: usize) -> bool {
        self.words[k / 64] >> (k % 64) & 1 == 1
    }

    /// Ones strictly before `k`.
    #[inline]
    fn rank(&self, k: usize) -> usize {
        let w = k / 64;
        let within = (self.words[w] & low_mask((k % 64) as u32)).count_ones();
        self.before.get(w) as usize + within as usize
    }

    fn write(&self, enc: &mut Encoder) {
        enc.put_words(&self.words);
        enc.put_packed(&self.before);
    }

    fn read(dec: &mut Decoder<'_>) -> Result<Self> {
        let words = dec.get_words()?;
        let before = dec.get_packed()?;
        if before.len() != words.len() {
            return Err(Error::Format("rank counters do not match bit words".into()));
        }
        Ok(Self { words, before })
    }
}

/// Number of entries of `seq[lo..hi]` that are `<= y`; the slice is sorted.
#[inline]
fn count_le(seq: &PackedSequence, lo: usize, hi: usize, y: u64) -> usize {
    let (mut a, mut b) = (lo, hi);
    while a < b {
        let mid = (a + b) / 2;
        if seq.get(mid) <= y {
            a = mid + 1;
        } else {
            b = mid;
        }
    }
    a - lo
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Node {
    half: u32,
    len: usize,
    highs: PackedSequence,
    rank_min: PackedSequence,
    lows: PackedSequence,
    slots: PackedSequence,
    has_child: RankedBits,
    children: PackedSequence,
    summary: Option<u32>,
}

impl Node {
    fn slot_of(p: u64, slot_bits: u32) -> usize {
        if slot_bits == 0 {
            0
        } else {
            (p.wrapping_mul(HASH_MUL) >> (64 - slot_bits)) as usize
        }
    }

    /// Tuple index of high half `p`.
    #[inline]
    fn lookup(&self, p: u64) -> Option<usize> {
        let cap = self.slots.len();
        let mut s = Self::slot_of(p, cap.trailing_zeros());
        loop {
            let v = self.slots.get(s);
            if v == 0 {
                return None;
            }
            let idx = v as usize - 1;
            if self.highs.get(idx) == p {
                return Some(idx);
            }
            s = (s + 1) & (cap - 1);
        }
    }

    #[inline]
    fn rank_max(&self, idx: usize) -> usize {
        if idx + 1 < self.highs.len() {
            self.rank_min.get(idx + 1) as usize - 1
        } else {
            self.len
        }
    }
}

/// Static predecessor structure answering `(predecessor, rank)` queries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredecessorSet {
    universe: u64,
    len: usize,
    base_size: usize,
    low_bits: u32,
    sizes: BitVector,
    lows: PackedSequence,
    big: RankedBits,
    roots: PackedSequence,
    nodes: Vec<Node>,
}

fn build_node(keys: &[u64], width: u32, t: usize, nodes: &mut Vec<Node>) -> u32 {
    debug_assert!(keys.len() > t && width >= 2);
    let half = width / 2;
    let mask = low_mask(half);
    let mut highs = Vec::new();
    let mut rank_min = Vec::new();
    let mut groups = Vec::new();
    let mut start = 0;
    while start < keys.len() {
        let p = keys[start] >> half;
        let mut end = start + 1;
        while end < keys.len() && keys[end] >> half == p {
            end += 1;
        }
        highs.push(p);
        rank_min.push(start as u64 + 1);
        groups.push(start..end);
        start = end;
    }

    let mut has_child = Vec::with_capacity(groups.len());
    let mut children = Vec::new();
    for g in &groups {
        let interior = g.len().saturating_sub(2);
        let big = interior > t;
        has_child.push(big);
        if big {
            let inner: Vec<u64> = keys[g.start + 1..g.end - 1].iter().map(|&k| k & mask).collect();
            children.push(u64::from(build_node(&inner, half, t, nodes)));
        }
    }
    let summary = (highs.len() > t).then(|| build_node(&highs, width - half, t, nodes));

    let cap = (highs.len() + highs.len() / 2 + 1).next_power_of_two();
    let mut slots = PackedSequence::new(bits_for(highs.len() as u64), cap);
    for (idx, &p) in highs.iter().enumerate() {
        let mut s = Node::slot_of(p, cap.trailing_zeros());
        while slots.get(s) != 0 {
            s = (s + 1) & (cap - 1);
        }
        slots.set(s, idx as u64 + 1);
    }

    let node = Node {
        half,
        len: keys.len(),
        highs: PackedSequence::from_values(bits_for(low_mask(width - half)), highs),
        rank_min: PackedSequence::from_values(bits_for(keys.len() as u64), rank_min),
        lows: PackedSequence::from_values(half.max(1), keys.iter().map(|&k| k & mask).collect::<Vec<_>>()),
        slots,
        has_child: RankedBits::new(&has_child),
        children: PackedSequence::from_values(bits_for(nodes.len() as u64 + 1), children),
        summary,
    };
    nodes.push(node);
    (nodes.len() - 1) as u32
}

/// Key length for a recursion root: the smallest `5 * 2^i` covering `bits`.
fn root_width(bits: u32) -> u32 {
    let mut l = 5;
    while l < bits {
        l *= 2;
    }
    l
}

impl PredecessorSet {
    pub fn new(keys: &[u64], universe: u64) -> Result<Self> {
        Self::with_base_size(keys, universe, DEFAULT_BASE_SIZE)
    }

    /// `base_size` is the largest set answered by a direct search instead of
    /// a recursive node.
    pub fn with_base_size(keys: &[u64], universe: u64, base_size: usize) -> Result<Self> {
        if base_size < 2 {
            return Err(Error::Validation("base size must be at least 2".into()));
        }
        if universe == 0 {
            return Err(Error::Validation("universe must be at least 1".into()));
        }
        if keys.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Validation("keys must be strictly increasing".into()));
        }
        if let Some(&k) = keys.iter().find(|&&k| k == 0 || k > universe) {
            return Err(Error::Validation(format!("key {k} outside [1, {universe}]")));
        }

        let n = keys.len();
        let key_bits = bits_for(universe);
        let top_bits = if n == 0 { 0 } else { n.ilog2().min(key_bits) };
        let low_bits = key_bits - top_bits;
        let parts = 1usize << top_bits;
        let mask = low_mask(low_bits);

        let mut sizes = vec![0usize; parts];
        for &k in keys {
            sizes[(k >> low_bits) as usize] += 1;
        }
        let mut nodes = Vec::new();
        let mut big = Vec::with_capacity(parts);
        let mut roots = Vec::new();
        let mut start = 0;
        for &s in &sizes {
            let is_big = s > base_size;
            big.push(is_big);
            if is_big {
                let lows: Vec<u64> = keys[start..start + s].iter().map(|&k| k & mask).collect();
                roots.push(u64::from(build_node(&lows, root_width(low_bits), base_size, &mut nodes)));
            }
            start += s;
        }

        Ok(Self {
            universe,
            len: n,
            base_size,
            low_bits,
            sizes: unary_concat(&sizes),
            lows: PackedSequence::from_values(low_bits.max(1), keys.iter().map(|&k| k & mask).collect::<Vec<_>>()),
            big: RankedBits::new(&big),
            roots: PackedSequence::from_values(bits_for(nodes.len() as u64), roots),
            nodes,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn universe(&self) -> u64 {
        self.universe
    }

    pub fn base_size(&self) -> usize {
        self.base_size
    }

    pub fn partitions(&self) -> usize {
        self.sizes.count_zeros()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// `(y, r)`: the largest key `y <= x` and its 1-based rank, or `(0, 0)`.
    pub fn pred_query(&self, x: u64) -> Result<(u64, usize)> {
        crate::error::check_range("key", x, 1, self.universe)?;
        Ok(self.query(x))
    }

    /// As `pred_query`, for any `x`: `0` has no predecessor and keys above
    /// the universe behave like the universe.
    pub fn query(&self, x: u64) -> (u64, usize) {
        if self.len == 0 || x == 0 {
            return (0, 0);
        }
        let x = x.min(self.universe);
        let p = (x >> self.low_bits) as usize;
        let y = x & low_mask(self.low_bits);
        let r0 = if p == 0 { 0 } else { self.sizes.select_unchecked(false, p) - p };
        let r1 = self.sizes.select_unchecked(false, p + 1) - (p + 1);
        if r1 > r0 {
            let (v, r) = if self.big.get(p) {
                let root = self.roots.get(self.big.rank(p)) as usize;
                self.query_node(root, y)
            } else {
                let c = count_le(&self.lows, r0, r1, y);
                (if c == 0 { 0 } else { self.lows.get(r0 + c - 1) }, c)
            };
            if r > 0 {
                return (((p as u64) << self.low_bits) | v, r0 + r);
            }
        }
        if r0 == 0 {
            return (0, 0);
        }
        // the last key of an earlier partition
        let q = self.sizes.select_unchecked(true, r0) - r0;
        (((q as u64) << self.low_bits) | self.lows.get(r0 - 1), r0)
    }

    fn query_node(&self, id: usize, x: u64) -> (u64, usize) {
        let node = &self.nodes[id];
        let p = x >> node.half;
        let y = x & low_mask(node.half);
        let Some(idx) = node.lookup(p) else {
            return self.below_group(node, p);
        };
        let rm = node.rank_min.get(idx) as usize;
        let rmax = node.rank_max(idx);
        let m = node.lows.get(rm - 1);
        let big_m = node.lows.get(rmax - 1);
        let join = |low: u64| (p << node.half) | low;
        if y < m {
            self.below_group(node, p)
        } else if y == m {
            (join(m), rm)
        } else if y >= big_m {
            (join(big_m), rmax)
        } else if node.has_child.get(idx) {
            let child = node.children.get(node.has_child.rank(idx)) as usize;
            match self.query_node(child, y) {
                (_, 0) => (join(m), rm),
                (cy, cr) => (join(cy), rm + cr),
            }
        } else {
            // interior keys sit at ranks rm+1 ..= rmax-1
            let c = count_le(&node.lows, rm, rmax - 1, y);
            (join(node.lows.get(rm - 1 + c)), rm + c)
        }
    }

    /// Maximum of the last group whose high half is below `p`.
    fn below_group(&self, node: &Node, p: u64) -> (u64, usize) {
        if p == 0 {
            return (0, 0);
        }
        let r = match node.summary {
            Some(s) => self.query_node(s as usize, p - 1).1,
            None => count_le(&node.highs, 0, node.highs.len(), p - 1),
        };
        if r == 0 {
            return (0, 0);
        }
        let idx = r - 1;
        let rmax = node.rank_max(idx);
        ((node.highs.get(idx) << node.half) | node.lows.get(rmax - 1), rmax)
    }
}

impl Persist for PredecessorSet {
    fn write(&self, enc: &mut Encoder) {
        enc.section("header", |e| {
            e.put_u64(self.universe);
            e.put_usize(self.len);
            e.put_usize(self.base_size);
            e.put_u64(u64::from(self.low_bits));
        });
        enc.section("partition sizes", |e| e.put_bitvec(&self.sizes));
        enc.section("low parts", |e| e.put_packed(&self.lows));
        enc.section("roots", |e| {
            self.big.write(e);
            e.put_packed(&self.roots);
        });
        enc.section("nodes", |e| {
            e.put_usize(self.nodes.len());
            for node in &self.nodes {
                e.put_u64(u64::from(node.half));
                e.put_usize(node.len);
                e.put_u64(node.summary.map_or(0, |s| u64::from(s) + 1));
                e.put_packed(&node.highs);
                e.put_packed(&node.rank_min);
                e.put_packed(&node.lows);
                e.put_packed(&node.slots);
                node.has_child.write(e);
                e.put_packed(&node.children);
            }
        });
    }

    fn read(dec: &mut Decoder<'_>) -> Result<Self> {
        let universe = dec.get_u64()?;
        let len = dec.get_usize()?;
        let base_size = dec.get_usize()?;
        let low_bits = dec.get_u64()? as u32;
        let sizes = dec.get_bitvec()?;
        let lows = dec.get_packed()?;
        let big = RankedBits::read(dec)?;
        let roots = dec.get_packed()?;
        let n_nodes = dec.get_usize()?;
        let mut nodes = Vec::new();
        for _ in 0..n_nodes {
            let half = dec.get_u64()? as u32;
            let node_len = dec.get_usize()?;
            let summary = match dec.get_u64()? {
                0 => None,
                s => Some((s - 1) as u32),
            };
            let highs = dec.get_packed()?;
            let rank_min = dec.get_packed()?;
            let node_lows = dec.get_packed()?;
            let slots = dec.get_packed()?;
            let has_child = RankedBits::read(dec)?;
            let children = dec.get_packed()?;
            if !slots.len().is_power_of_two() || slots.len() <= highs.len() || node_lows.len() != node_len {
                return Err(Error::Format("malformed predecessor node".into()));
            }
            nodes.push(Node {
                half,
                len: node_len,
                highs,
                rank_min,
                lows: node_lows,
                slots,
                has_child,
                children,
                summary,
            });
        }
        if universe == 0 || lows.len() != len || sizes.count_ones() != len || low_bits > 64 {
            return Err(Error::Format("predecessor header inconsistent".into()));
        }
        Ok(Self {
            universe,
            len,
            base_size,
            low_bits,
            sizes,
            lows,
            big,
            roots,
            nodes,
        })
    }
}
