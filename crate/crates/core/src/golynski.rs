//! Large-alphabet sequences cut into chunks of length `sigma`.
//!
//! The chunk bitmap `A` reduces every query to one chunk. Inside chunk `k`,
//! `X` lists the symbol counts in unary and `pi` lists the positions of the
//! occurrences of symbol 1, then symbol 2, and so on, left to right. One of
//! `pi` and `pi^-1` is stored plainly and the other is reached through cycle
//! shortcuts, which trades constant-time select for constant-time access.
//! Rank samples every `s`-th occurrence of each symbol into one predecessor
//! structure, then binary searches the remaining window of fewer than `s`
//! occurrences through `pi`.
//!
//! Everything is global: `X` concatenates the chunks' bitmaps, `pi` is one
//! block-diagonal permutation, and the samples are keyed by
//! `(k * sigma + a - 1) * L + position`.

use crate::bitvec::{BitVector, BitVectorBuilder};
use crate::chunks::ChunkCounts;
use crate::error::{not_found, Error, Result};
use crate::permutation::PermutationWithShortcuts;
use crate::persist::{Decoder, Encoder, Persist};
use crate::predecessor::PredecessorSet;
use crate::seqcore::{check_access, check_rank, check_select, validate_symbols, SequenceOps};

pub const DEFAULT_F: u32 = 4;
const LG_W: f64 = 6.0;
const MAX_SIGMA: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GolynskiMode {
    /// `pi` stored plainly: select in O(1), access through shortcuts.
    ConstantSelect,
    /// `pi^-1` stored plainly: access in O(1), select through shortcuts.
    ConstantAccess,
}

impl GolynskiMode {
    fn tag(self) -> u64 {
        match self {
            GolynskiMode::ConstantSelect => 0,
            GolynskiMode::ConstantAccess => 1,
        }
    }

    fn from_tag(t: u64) -> Result<Self> {
        match t {
            0 => Ok(GolynskiMode::ConstantSelect),
            1 => Ok(GolynskiMode::ConstantAccess),
            _ => Err(Error::Format(format!("unknown chunked mode {t}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GolynskiParams {
    pub mode: GolynskiMode,
    /// Stands in for the superconstant `f(n, sigma)`; also the shortcut period.
    pub f: u32,
}

impl Default for GolynskiParams {
    fn default() -> Self {
        Self {
            mode: GolynskiMode::ConstantSelect,
            f: DEFAULT_F,
        }
    }
}

/// Sampling step: `lg sigma / lg w` occurrences in constant-select mode,
/// its `1/f`-th power in constant-access mode, at least 1.
pub fn sample_step(sigma: u64, params: GolynskiParams) -> usize {
    let ratio = (sigma.max(1) as f64).log2() / LG_W;
    let v = match params.mode {
        GolynskiMode::ConstantSelect => ratio,
        GolynskiMode::ConstantAccess => ratio.powf(1.0 / f64::from(params.f)),
    };
    ((v - 1e-9).ceil() as usize).max(1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GolynskiSequence {
    n: usize,
    sigma: u64,
    params: GolynskiParams,
    step: usize,
    a: ChunkCounts,
    x: BitVector,
    perm: PermutationWithShortcuts,
    samples: PredecessorSet,
}

impl GolynskiSequence {
    pub fn new(symbols: &[u64], sigma: u64) -> Result<Self> {
        Self::with_params(symbols, sigma, GolynskiParams::default())
    }

    /// `symbols` in `[1, sigma]`, not empty.
    pub fn with_params(symbols: &[u64], sigma: u64, params: GolynskiParams) -> Result<Self> {
        Self::with_step(symbols, sigma, params, sample_step(sigma, params))
    }

    /// Like `with_params` with an explicit sampling step, for sequences
    /// whose step follows a larger enclosing alphabet.
    pub fn with_step(symbols: &[u64], sigma: u64, params: GolynskiParams, step: usize) -> Result<Self> {
        let n = symbols.len();
        if n == 0 {
            return Err(Error::Validation("cannot build over an empty sequence".into()));
        }
        if params.f == 0 {
            return Err(Error::Validation("f must be at least 1".into()));
        }
        if sigma > MAX_SIGMA {
            return Err(Error::Validation(format!("alphabet {sigma} above 2^32")));
        }
        validate_symbols(symbols, sigma)?;
        let len = sigma as usize;
        let chunks = n.div_ceil(len);
        if step == 0 {
            return Err(Error::Validation("sampling step must be at least 1".into()));
        }
        let universe = (chunks as u64 * sigma)
            .checked_mul(len as u64)
            .ok_or_else(|| Error::Validation("sample universe overflows".into()))?;

        let mut counts = vec![0usize; len];
        let mut next = vec![0usize; len];
        let mut pi = vec![0usize; n];
        let mut keys = Vec::new();
        let mut xb = BitVectorBuilder::new();
        for k in 0..chunks {
            let base = k * len;
            let chunk = &symbols[base..(base + len).min(n)];
            for &s in chunk {
                counts[s as usize - 1] += 1;
            }
            let mut acc = 0;
            for a in 0..len {
                xb.push_run(true, counts[a]);
                xb.push(false);
                next[a] = acc;
                acc += counts[a];
            }
            for (p, &s) in chunk.iter().enumerate() {
                let o = &mut next[s as usize - 1];
                pi[base + *o] = base + p;
                *o += 1;
            }
            let mut start = 0;
            for a in 0..len {
                let key_base = ((k * len + a) * len) as u64;
                for o in (step..=counts[a]).step_by(step) {
                    keys.push(key_base + (pi[base + start + o - 1] - base + 1) as u64);
                }
                start += counts[a];
                counts[a] = 0;
            }
        }

        let period = params.f as usize;
        let perm = match params.mode {
            GolynskiMode::ConstantSelect => PermutationWithShortcuts::new(&pi, len, period)?,
            GolynskiMode::ConstantAccess => {
                let mut inv = vec![0usize; n];
                for (o, &p) in pi.iter().enumerate() {
                    inv[p] = o;
                }
                PermutationWithShortcuts::new(&inv, len, period)?
            }
        };
        Ok(Self {
            n,
            sigma,
            params,
            step,
            a: ChunkCounts::new(symbols.iter().map(|&s| s - 1), n, sigma, len),
            x: xb.build(),
            perm,
            samples: PredecessorSet::new(&keys, universe)?,
        })
    }

    pub fn params(&self) -> GolynskiParams {
        self.params
    }

    pub fn sample_step(&self) -> usize {
        self.step
    }

    pub fn chunk_len(&self) -> usize {
        self.sigma as usize
    }

    pub fn chunks(&self) -> usize {
        self.a.chunks()
    }

    /// True when `sigma >= n`, so the whole string is one (short) chunk and
    /// the `sigma`-sized bitmaps dominate the space.
    pub fn single_chunk(&self) -> bool {
        self.chunks() == 1 && self.sigma as usize >= self.n
    }

    pub fn count_bitmap(&self) -> &BitVector {
        &self.x
    }

    pub fn sample_count(&self) -> usize {
        self.samples.len()
    }

    /// `pi` over global occurrence indices, 0-based.
    #[inline]
    fn pi(&self, g: usize) -> usize {
        match self.params.mode {
            GolynskiMode::ConstantSelect => self.perm.apply_unchecked(g),
            GolynskiMode::ConstantAccess => self.perm.inverse_unchecked(g),
        }
    }

    #[inline]
    fn pi_inv(&self, p: usize) -> usize {
        match self.params.mode {
            GolynskiMode::ConstantSelect => self.perm.inverse_unchecked(p),
            GolynskiMode::ConstantAccess => self.perm.apply_unchecked(p),
        }
    }

    /// Ones of `X` before its `z`-th zero: the first occurrence index of
    /// the `z + 1`-th (chunk, symbol) cell.
    #[inline]
    fn cell_start(&self, z: usize) -> usize {
        if z == 0 {
            0
        } else {
            self.x.select_unchecked(false, z) - z
        }
    }

    /// Width of the binary-search window a rank query on chunk-local
    /// position `ip` ends with, for symbol `a` in chunk `k`. Exposed for
    /// tests of the sampling bound.
    pub fn rank_window(&self, a: u64, i: usize) -> usize {
        let (_, _, lo, hi) = self.rank_parts(a, i);
        hi - lo
    }

    /// `(chunk prefix, occurrence start, lo, hi)`: occurrences `1..=lo` of
    /// the chunk are known to precede `i`, the answer lies in `lo..=hi`.
    fn rank_parts(&self, a: u64, i: usize) -> (usize, usize, usize, usize) {
        let len = self.sigma as usize;
        let k = (i - 1) / len;
        let ip = i - k * len;
        let before = self.a.prefix(a, k);
        let z = k * len + a as usize - 1;
        let start = self.cell_start(z);
        let n_a = self.cell_start(z + 1) - start;
        if n_a < self.step {
            return (before, start, 0, n_a);
        }
        let key_base = (z * len) as u64;
        let q = self.samples.query(key_base + ip as u64).1 - self.samples.query(key_base).1;
        let lo = q * self.step;
        (before, start, lo, (lo + self.step - 1).min(n_a))
    }
}

impl SequenceOps for GolynskiSequence {
    fn len(&self) -> usize {
        self.n
    }

    fn sigma(&self) -> u64 {
        self.sigma
    }

    fn access(&self, i: usize) -> Result<u64> {
        check_access(self.n, i)?;
        let len = self.sigma as usize;
        let g = self.pi_inv(i - 1);
        let zeros = self.x.select_unchecked(true, g + 1) - (g + 1);
        Ok((zeros - (i - 1) / len * len) as u64 + 1)
    }

    fn rank(&self, a: u64, i: usize) -> Result<usize> {
        check_rank(self.n, self.sigma, a, i)?;
        if i == 0 {
            return Ok(0);
        }
        let (before, start, mut lo, mut hi) = self.rank_parts(a, i);
        // last occurrence in lo..=hi at or before i; occurrence lo is known to be
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if self.pi(start + mid - 1) < i {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        Ok(before + lo)
    }

    fn select(&self, a: u64, j: usize) -> Result<usize> {
        check_select(self.sigma, a, j)?;
        let total = self.a.total(a);
        if j > total {
            return Err(not_found(a, j as u64, total as u64));
        }
        let (k, jj) = self.a.locate(a, j);
        let z = k * self.sigma as usize + a as usize - 1;
        Ok(self.pi(self.cell_start(z) + jj - 1) + 1)
    }
}

impl Persist for GolynskiSequence {
    fn write(&self, enc: &mut Encoder) {
        enc.section("header", |e| {
            e.put_usize(self.n);
            e.put_u64(self.sigma);
            e.put_u64(self.params.mode.tag());
            e.put_u64(u64::from(self.params.f));
            e.put_usize(self.step);
        });
        enc.section("chunk bitmap", |e| self.a.write(e));
        enc.section("count bitmap", |e| e.put_bitvec(&self.x));
        self.perm.write(enc);
        enc.section("samples", |e| self.samples.write(e));
    }

    fn read(dec: &mut Decoder<'_>) -> Result<Self> {
        let n = dec.get_usize()?;
        let sigma = dec.get_u64()?;
        let mode = GolynskiMode::from_tag(dec.get_u64()?)?;
        let f = u32::try_from(dec.get_u64()?).map_err(|_| Error::Format("f out of range".into()))?;
        let step = dec.get_usize()?;
        let a = ChunkCounts::read(dec)?;
        let x = dec.get_bitvec()?;
        let perm = PermutationWithShortcuts::read(dec)?;
        let samples = PredecessorSet::read(dec)?;
        let params = GolynskiParams { mode, f };
        if n == 0
            || sigma == 0
            || sigma > MAX_SIGMA
            || f == 0
            || step == 0
            || perm.len() != n
            || perm.period() != f as usize
            || x.count_ones() != n
            || x.count_zeros() as u64 != a.chunks() as u64 * sigma
            || a.chunk_len() as u64 != sigma
            || a.chunks() != n.div_ceil(sigma as usize)
        {
            return Err(Error::Format("chunked sequence components disagree".into()));
        }
        Ok(Self {
            n,
            sigma,
            params,
            step,
            a,
            x,
            perm,
            samples,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::Sequence;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const MODES: [GolynskiMode; 2] = [GolynskiMode::ConstantSelect, GolynskiMode::ConstantAccess];

    fn check_all(symbols: &[u64], sigma: u64, params: GolynskiParams) {
        let gs = GolynskiSequence::with_params(symbols, sigma, params).unwrap();
        let oracle = Sequence::new(symbols.to_vec(), sigma).unwrap();
        let n = symbols.len();
        for i in 1..=n {
            assert_eq!(gs.access(i).unwrap(), symbols[i - 1]);
        }
        for a in 1..=sigma {
            for i in 0..=n {
                assert_eq!(gs.rank(a, i).unwrap(), oracle.oracle_rank(a, i).unwrap(), "rank a={a} i={i}");
                if i > 0 {
                    assert!(gs.rank_window(a, i) < gs.sample_step().max(2));
                }
            }
            let total = oracle.oracle_rank(a, n).unwrap();
            for j in 1..=total {
                assert_eq!(gs.select(a, j).unwrap(), oracle.oracle_select(a, j).unwrap());
            }
            assert!(matches!(gs.select(a, total + 1), Err(Error::NotFound { .. })));
        }
    }

    #[test]
    fn chunk_example() {
        let s = [3u64, 1, 3, 2];
        for mode in MODES {
            let gs = GolynskiSequence::with_params(&s, 4, GolynskiParams { mode, f: 4 }).unwrap();
            let bits: String = gs.count_bitmap().iter().map(|b| if b { '1' } else { '0' }).collect();
            assert_eq!(bits, "10101100");
            let pi: Vec<usize> = (0..4).map(|g| gs.pi(g) + 1).collect();
            assert_eq!(pi, [2, 4, 1, 3]);
            assert_eq!(gs.select(3, 1).unwrap(), 1);
            assert_eq!(gs.access(3).unwrap(), 3);
            assert_eq!(gs.rank(3, 3).unwrap(), 2);
            assert_eq!(gs.rank(1, 0).unwrap(), 0);
        }
    }

    #[test]
    fn bbcab_queries() {
        let s = Sequence::from_letters("bbcab").unwrap();
        for mode in MODES {
            let gs = GolynskiSequence::with_params(s.symbols(), 3, GolynskiParams { mode, f: 4 }).unwrap();
            assert_eq!(gs.rank(2, 3).unwrap(), 2);
            assert_eq!(gs.rank(3, 2).unwrap(), 0);
            assert_eq!(gs.chunks(), 2);
        }
    }

    #[test]
    fn sample_steps() {
        let sel = |s| sample_step(s, GolynskiParams { mode: GolynskiMode::ConstantSelect, f: 4 });
        let acc = |s, f| sample_step(s, GolynskiParams { mode: GolynskiMode::ConstantAccess, f });
        assert_eq!(sel(1 << 6), 1);
        assert_eq!(sel(1 << 8), 2);
        assert_eq!(sel(1 << 16), 3);
        assert_eq!(sel(1 << 24), 4);
        assert_eq!(acc(1 << 24, 2), 2);
        assert_eq!(acc(1 << 16, 1), 3);
        assert_eq!(acc(1 << 16, 4), 2);
    }

    #[test]
    fn exhaustive_small_both_modes() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for round in 0..40 {
            let sigma = [2u64, 3, 4, 16, 64, 5, 33][round % 7];
            let n = rng.random_range(1..=400);
            // skewed so some symbols are absent from chunks and others dense
            let s: Vec<u64> = (0..n)
                .map(|_| if rng.random_bool(0.5) { 1 } else { rng.random_range(1..=sigma) })
                .collect();
            let mode = MODES[round % 2];
            let f = [1u32, 2, 4, 8][round % 4];
            check_all(&s, sigma, GolynskiParams { mode, f });
        }
    }

    #[test]
    fn large_alphabet_sampling_paths() {
        // sigma = 2^12 gives step 2; a skewed string makes long occurrence
        // lists so the sampled path is exercised
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let sigma = 1u64 << 12;
        let n = 20_000;
        let s: Vec<u64> = (0..n)
            .map(|_| if rng.random_bool(0.3) { rng.random_range(1..=8) } else { rng.random_range(1..=sigma) })
            .collect();
        let oracle = Sequence::new(s.clone(), sigma).unwrap();
        for mode in MODES {
            for f in [1, 4] {
                let gs = GolynskiSequence::with_params(&s, sigma, GolynskiParams { mode, f }).unwrap();
                assert!(gs.sample_count() > 0);
                for _ in 0..5000 {
                    let a = if rng.random_bool(0.5) { rng.random_range(1..=8) } else { rng.random_range(1..=sigma) };
                    let i = rng.random_range(0..=n);
                    assert_eq!(gs.rank(a, i).unwrap(), oracle.oracle_rank(a, i).unwrap());
                    let p = rng.random_range(1..=n);
                    assert_eq!(gs.access(p).unwrap(), s[p - 1]);
                    let total = oracle.oracle_rank(a, n).unwrap();
                    if total > 0 {
                        let j = rng.random_range(1..=total);
                        assert_eq!(gs.select(a, j).unwrap(), oracle.oracle_select(a, j).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn single_chunk_when_alphabet_exceeds_length() {
        let s = [700u64, 3, 700, 1000, 1];
        let gs = GolynskiSequence::new(&s, 1000).unwrap();
        assert!(gs.single_chunk());
        check_all(&s, 1000, GolynskiParams::default());
    }

    #[test]
    fn persist_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let s: Vec<u64> = (0..5000).map(|_| rng.random_range(1..=300)).collect();
        for mode in MODES {
            let gs = GolynskiSequence::with_params(&s, 300, GolynskiParams { mode, f: 3 }).unwrap();
            let words = gs.to_words();
            let back = GolynskiSequence::from_words(&words).unwrap();
            assert_eq!(back, gs);
            assert_eq!(back.to_words(), words);
        }
    }
}
