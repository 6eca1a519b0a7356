//! Huffman-shaped binary wavelet tree for small alphabets. A symbol with
//! `n_a` occurrences sits at depth about `lg(n/n_a)`, so the bitmaps hold
//! fewer than `n(H_0 + 1)` bits. Used for the class sequence of the
//! alphabet partition, whose alphabet is a few dozen classes.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::bitvec::BitVector;
use crate::error::{not_found, Error, Result};
use crate::persist::{Decoder, Encoder, Persist};
use crate::seqcore::{check_access, check_rank, check_select, validate_symbols, SequenceOps};

/// Largest alphabet accepted; per-symbol paths are kept in memory.
pub const MAX_SIGMA: u64 = 1 << 20;

const LEAF: u64 = 1 << 63;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HuffmanWavelet {
    n: usize,
    sigma: u64,
    /// Child codes: `LEAF | symbol` or an internal node index.
    root: Option<u64>,
    children: Vec<(u64, u64)>,
    bits: Vec<BitVector>,
    /// Per symbol, the internal nodes on its root-to-leaf path and the branch taken.
    paths: Vec<Vec<(u32, bool)>>,
    counts: Vec<usize>,
}

impl HuffmanWavelet {
    pub fn new(symbols: &[u64], sigma: u64) -> Result<Self> {
        validate_symbols(symbols, sigma)?;
        if sigma > MAX_SIGMA {
            return Err(Error::Validation(format!("alphabet {sigma} above {MAX_SIGMA}")));
        }
        let mut counts = vec![0usize; sigma as usize];
        for &s in symbols {
            counts[(s - 1) as usize] += 1;
        }
        // ties broken by creation order so the shape is deterministic
        let mut heap: BinaryHeap<Reverse<(usize, u64, u64)>> = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(a, &c)| Reverse((c, a as u64, LEAF | (a as u64 + 1))))
            .collect();
        let mut children = Vec::new();
        let mut order = sigma;
        while heap.len() > 1 {
            let Reverse((c0, _, left)) = heap.pop().unwrap();
            let Reverse((c1, _, right)) = heap.pop().unwrap();
            children.push((left, right));
            heap.push(Reverse((c0 + c1, order, children.len() as u64 - 1)));
            order += 1;
        }
        let root = heap.pop().map(|Reverse((_, _, code))| code);
        let paths = paths_of(root, &children, sigma)?;
        let mut raw = vec![Vec::new(); children.len()];
        for &s in symbols {
            for &(node, b) in &paths[(s - 1) as usize] {
                raw[node as usize].push(b);
            }
        }
        let bits = raw.into_iter().map(BitVector::from_bits).collect();
        Ok(Self {
            n: symbols.len(),
            sigma,
            root,
            children,
            bits,
            paths,
            counts,
        })
    }

    pub fn payload_bits(&self) -> usize {
        self.bits.iter().map(BitVector::len).sum()
    }

    pub fn directory_bits(&self) -> usize {
        self.bits.iter().map(BitVector::directory_bits).sum()
    }

    /// Depth of the leaf of `a`; 0 when `a` is absent or the only symbol.
    pub fn code_len(&self, a: u64) -> Result<usize> {
        check_rank(self.n, self.sigma, a, 0)?;
        Ok(self.paths[(a - 1) as usize].len())
    }

    fn present(&self, a: u64) -> bool {
        self.counts[(a - 1) as usize] > 0
    }
}

fn paths_of(root: Option<u64>, children: &[(u64, u64)], sigma: u64) -> Result<Vec<Vec<(u32, bool)>>> {
    let mut paths = vec![Vec::new(); sigma as usize];
    let Some(root) = root else {
        return Ok(paths);
    };
    let mut seen = vec![false; children.len()];
    let mut stack = vec![(root, Vec::new())];
    while let Some((code, path)) = stack.pop() {
        if code & LEAF != 0 {
            let a = code & !LEAF;
            if a == 0 || a > sigma || !paths[(a - 1) as usize].is_empty() {
                return Err(Error::Format(format!("bad leaf {a} in wavelet shape")));
            }
            paths[(a - 1) as usize] = path;
            continue;
        }
        let node = code as usize;
        if node >= children.len() || seen[node] {
            return Err(Error::Format("wavelet shape is not a tree".into()));
        }
        seen[node] = true;
        let (l, r) = children[node];
        let mut pl = path.clone();
        pl.push((node as u32, false));
        let mut pr = path;
        pr.push((node as u32, true));
        stack.push((l, pl));
        stack.push((r, pr));
    }
    if seen.iter().any(|&s| !s) {
        return Err(Error::Format("unreachable node in wavelet shape".into()));
    }
    Ok(paths)
}

#[inline]
fn rank_bit(bv: &BitVector, b: bool, i: usize) -> usize {
    let ones = bv.rank1_unchecked(i);
    if b {
        ones
    } else {
        i - ones
    }
}

impl SequenceOps for HuffmanWavelet {
    fn len(&self) -> usize {
        self.n
    }

    fn sigma(&self) -> u64 {
        self.sigma
    }

    fn access(&self, i: usize) -> Result<u64> {
        check_access(self.n, i)?;
        let mut code = self.root.expect("nonempty sequence has a root");
        let mut i = i;
        while code & LEAF == 0 {
            let bv = &self.bits[code as usize];
            let b = bv.bit(i - 1);
            i = rank_bit(bv, b, i);
            let (l, r) = self.children[code as usize];
            code = if b { r } else { l };
        }
        Ok(code & !LEAF)
    }

    fn rank(&self, a: u64, i: usize) -> Result<usize> {
        check_rank(self.n, self.sigma, a, i)?;
        if !self.present(a) {
            return Ok(0);
        }
        let mut i = i;
        for &(node, b) in &self.paths[(a - 1) as usize] {
            i = rank_bit(&self.bits[node as usize], b, i);
        }
        Ok(i)
    }

    fn select(&self, a: u64, j: usize) -> Result<usize> {
        check_select(self.sigma, a, j)?;
        let count = self.counts[(a - 1) as usize];
        if j > count {
            return Err(not_found(a, j as u64, count as u64));
        }
        let mut j = j;
        for &(node, b) in self.paths[(a - 1) as usize].iter().rev() {
            j = self.bits[node as usize].select_unchecked(b, j);
        }
        Ok(j)
    }
}

impl Persist for HuffmanWavelet {
    fn write(&self, enc: &mut Encoder) {
        enc.section("header", |e| {
            e.put_usize(self.n);
            e.put_u64(self.sigma);
            e.put_u64(self.root.map_or(0, |c| c + 1));
        });
        enc.section("shape", |e| {
            let flat: Vec<u64> = self.children.iter().flat_map(|&(l, r)| [l, r]).collect();
            e.put_words(&flat);
        });
        enc.section("bitmaps", |e| {
            for bv in &self.bits {
                e.put_bitvec(bv);
            }
        });
    }

    fn read(dec: &mut Decoder<'_>) -> Result<Self> {
        let n = dec.get_usize()?;
        let sigma = dec.get_u64()?;
        if sigma == 0 || sigma > MAX_SIGMA {
            return Err(Error::Format(format!("alphabet {sigma} out of range")));
        }
        let root = dec.get_u64()?.checked_sub(1);
        let flat = dec.get_words()?;
        if flat.len() % 2 != 0 || (root.is_none() && (n != 0 || !flat.is_empty())) {
            return Err(Error::Format("bad wavelet shape".into()));
        }
        let children: Vec<(u64, u64)> = flat.chunks(2).map(|c| (c[0], c[1])).collect();
        let bits = (0..children.len())
            .map(|_| dec.get_bitvec())
            .collect::<Result<Vec<_>>>()?;
        let paths = paths_of(root, &children, sigma)?;
        // each node holds exactly the symbols below it
        let mut counts = vec![0usize; sigma as usize];
        let mut expect = vec![None; children.len()];
        if let Some(r) = root {
            if r & LEAF == 0 {
                expect[r as usize] = Some(n);
            }
        }
        // parents are created after their children
        for (node, &(l, r)) in children.iter().enumerate().rev() {
            let bv = &bits[node];
            if expect[node] != Some(bv.len()) {
                return Err(Error::Format("wavelet bitmap lengths disagree".into()));
            }
            for (code, len) in [(l, bv.count_zeros()), (r, bv.count_ones())] {
                if code & LEAF != 0 {
                    counts[((code & !LEAF) - 1) as usize] = len;
                } else {
                    expect[code as usize] = Some(len);
                }
            }
        }
        if let Some(r) = root {
            if r & LEAF != 0 {
                counts[((r & !LEAF) - 1) as usize] = n;
            }
        }
        Ok(Self {
            n,
            sigma,
            root,
            children,
            bits,
            paths,
            counts,
        })
    }
}
