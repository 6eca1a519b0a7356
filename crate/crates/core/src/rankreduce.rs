//! Rank through predecessor search.
//!
//! Each `S[c]` becomes the point `(S[c] - 1) * n + c` of a row-major
//! `sigma x n` matrix. The points go into a predecessor structure, and the
//! `p`-th smallest point carries a pair `<row, v>` where `v` is the rank of
//! that occurrence inside its length-`sigma` chunk. `rank_a(i)` is then one
//! predecessor query on `(a - 1) * n + i` plus the count of `a` in earlier
//! chunks, read from the chunk bitmap `A`.
//!
//! `ColoredPredSet` goes the other way: a colored predecessor query on a
//! point set becomes one rank query on a string.

use crate::bitvec::{unary_concat, BitVector};
use crate::chunks::ChunkCounts;
use crate::error::{check_range, not_found, Error, Result};
use crate::packed::{bits_for, ceil_log2, low_mask, PackedSequence};
use crate::persist::{Decoder, Encoder, Persist};
use crate::predecessor::PredecessorSet;
use crate::seqcore::{check_access, check_rank, check_select, validate_symbols, SequenceOps};
use crate::wavelet::WaveletSequence;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankReduceSeq {
    n: usize,
    sigma: u64,
    /// Occurring symbols, sorted; present only when `sigma > n`.
    symbol_map: Option<PackedSequence>,
    pset: PredecessorSet,
    pairs: PackedSequence,
    offsets: PackedSequence,
    chunks: ChunkCounts,
    plain: PackedSequence,
}

impl RankReduceSeq {
    /// `symbols` in `[1, sigma]`.
    pub fn new(symbols: &[u64], sigma: u64) -> Result<Self> {
        let n = symbols.len();
        if n == 0 {
            return Err(Error::Validation("cannot build over an empty sequence".into()));
        }
        validate_symbols(symbols, sigma)?;

        let (symbol_map, rows) = if sigma > n as u64 {
            let mut occ = symbols.to_vec();
            occ.sort_unstable();
            occ.dedup();
            let rows = occ.len() as u64;
            (Some(PackedSequence::from_values(bits_for(sigma), occ)), rows)
        } else {
            (None, sigma)
        };
        let dense: Vec<u64> = match &symbol_map {
            Some(map) => symbols
                .iter()
                .map(|&s| count_le(map, s) as u64 - 1)
                .collect(),
            None => symbols.iter().map(|&s| s - 1).collect(),
        };

        let chunk_len = rows as usize;
        let chunks = ChunkCounts::new(dense.iter().copied(), n, rows, chunk_len);

        // positions grouped by row, each group left to right
        let mut starts = vec![0usize; rows as usize + 1];
        for &s in &dense {
            starts[s as usize + 1] += 1;
        }
        for r in 0..rows as usize {
            starts[r + 1] += starts[r];
        }
        let mut by_row = vec![0usize; n];
        let mut fill = starts.clone();
        for (c, &s) in dense.iter().enumerate() {
            by_row[fill[s as usize]] = c;
            fill[s as usize] += 1;
        }

        let w = ceil_log2(rows).max(1);
        let mut points = Vec::with_capacity(n);
        let mut pairs = PackedSequence::new(2 * w, n);
        let mut offsets = PackedSequence::new(bits_for(chunk_len as u64 - 1), n);
        for r in 0..rows as usize {
            let mut chunk = usize::MAX;
            let mut v = 0u64;
            for k in starts[r]..starts[r + 1] {
                let c = by_row[k];
                if c / chunk_len != chunk {
                    chunk = c / chunk_len;
                    v = 0;
                }
                v += 1;
                points.push(r as u64 * n as u64 + c as u64 + 1);
                pairs.set(k, r as u64 | (v - 1) << w);
                offsets.set(k, (c % chunk_len) as u64);
            }
        }
        let pset = PredecessorSet::new(&points, n as u64 * rows)?;
        let plain = PackedSequence::from_values(bits_for(sigma - 1), symbols.iter().map(|&s| s - 1).collect::<Vec<_>>());

        Ok(Self {
            n,
            sigma,
            symbol_map,
            pset,
            pairs,
            offsets,
            chunks,
            plain,
        })
    }

    fn rows(&self) -> u64 {
        match &self.symbol_map {
            Some(m) => m.len() as u64,
            None => self.sigma,
        }
    }

    fn chunk_len(&self) -> usize {
        self.chunks.chunk_len()
    }

    fn pair_width(&self) -> u32 {
        self.pairs.width() / 2
    }

    /// Row (1-based) of symbol `a`, or `None` if `a` never occurs and rows
    /// are restricted to occurring symbols.
    fn row_of(&self, a: u64) -> Option<u64> {
        match &self.symbol_map {
            None => Some(a),
            Some(map) => {
                let r = count_le(map, a);
                (r > 0 && map.get(r - 1) == a).then_some(r as u64)
            }
        }
    }

    /// The stored pair of the `p`-th point: row and rank within its chunk.
    pub fn stored_pair(&self, p: usize) -> (u64, usize) {
        let raw = self.pairs.get(p - 1);
        let w = self.pair_width();
        ((raw & low_mask(w)) + 1, (raw >> w) as usize + 1)
    }

    /// Chunk (0-based) of the `p`-th point.
    fn chunk_of_point(&self, p: usize, row: u64) -> usize {
        let zeros = self.chunks.bits().select_unchecked(true, p) - p;
        zeros - (row as usize - 1) * self.chunks.chunks()
    }

    /// The pair of the `p`-th point with the rank made global to its row,
    /// `<row, rank of the occurrence in S>`.
    pub fn pair(&self, p: usize) -> (u64, usize) {
        let (r, v) = self.stored_pair(p);
        (r, self.chunks.prefix(r, self.chunk_of_point(p, r)) + v)
    }

    /// The `p`-th smallest point.
    pub fn point(&self, p: usize) -> u64 {
        let (r, _) = self.stored_pair(p);
        let col = self.chunk_of_point(p, r) * self.chunk_len() + self.offsets.get(p - 1) as usize + 1;
        (r - 1) * self.n as u64 + col as u64
    }

    pub fn predecessor_set(&self) -> &PredecessorSet {
        &self.pset
    }

    pub fn chunk_counts(&self) -> &ChunkCounts {
        &self.chunks
    }
}

/// Entries of the sorted `seq` that are `<= y`.
fn count_le(seq: &PackedSequence, y: u64) -> usize {
    let (mut a, mut b) = (0, seq.len());
    while a < b {
        let mid = (a + b) / 2;
        if seq.get(mid) <= y {
            a = mid + 1;
        } else {
            b = mid;
        }
    }
    a
}

impl SequenceOps for RankReduceSeq {
    fn len(&self) -> usize {
        self.n
    }

    fn sigma(&self) -> u64 {
        self.sigma
    }

    fn access(&self, i: usize) -> Result<u64> {
        check_access(self.n, i)?;
        Ok(self.plain.get(i - 1) + 1)
    }

    fn rank(&self, a: u64, i: usize) -> Result<usize> {
        check_rank(self.n, self.sigma, a, i)?;
        if i == 0 {
            return Ok(0);
        }
        let Some(row) = self.row_of(a) else {
            return Ok(0);
        };
        let k = (i - 1) / self.chunk_len();
        let before = self.chunks.prefix(row, k);
        let (y, p) = self.pset.query((row - 1) * self.n as u64 + i as u64);
        if p == 0 {
            return Ok(before);
        }
        let (r, v) = self.stored_pair(p);
        let col = (y - (r - 1) * self.n as u64) as usize;
        if r == row && (col - 1) / self.chunk_len() == k {
            Ok(before + v)
        } else {
            Ok(before)
        }
    }

    fn select(&self, a: u64, j: usize) -> Result<usize> {
        check_select(self.sigma, a, j)?;
        let Some(row) = self.row_of(a) else {
            return Err(not_found(a, j as u64, 0));
        };
        let total = self.chunks.total(row);
        if j > total {
            return Err(not_found(a, j as u64, total as u64));
        }
        let p = self.chunks.row_start(row) + j;
        let (k, _) = self.chunks.locate(row, j);
        Ok(k * self.chunk_len() + self.offsets.get(p - 1) as usize + 1)
    }
}

impl Persist for RankReduceSeq {
    fn write(&self, enc: &mut Encoder) {
        enc.section("header", |e| {
            e.put_usize(self.n);
            e.put_u64(self.sigma);
        });
        enc.section("symbol map", |e| match &self.symbol_map {
            Some(m) => {
                e.put_u64(1);
                e.put_packed(m);
            }
            None => e.put_u64(0),
        });
        enc.section("points", |e| self.pset.write(e));
        enc.section("pairs", |e| e.put_packed(&self.pairs));
        enc.section("chunk offsets", |e| e.put_packed(&self.offsets));
        enc.section("chunk bitmap", |e| self.chunks.write(e));
        enc.section("plain copy", |e| e.put_packed(&self.plain));
    }

    fn read(dec: &mut Decoder<'_>) -> Result<Self> {
        let n = dec.get_usize()?;
        let sigma = dec.get_u64()?;
        let symbol_map = match dec.get_u64()? {
            0 => None,
            _ => Some(dec.get_packed()?),
        };
        let pset = PredecessorSet::read(dec)?;
        let pairs = dec.get_packed()?;
        let offsets = dec.get_packed()?;
        let chunks = ChunkCounts::read(dec)?;
        let plain = dec.get_packed()?;
        if n == 0 || sigma == 0 || pairs.len() != n || offsets.len() != n || plain.len() != n || pset.len() != n {
            return Err(Error::Format("rank-reduction components disagree on length".into()));
        }
        let seq = Self {
            n,
            sigma,
            symbol_map,
            pset,
            pairs,
            offsets,
            chunks,
            plain,
        };
        if seq.chunks.bits().count_zeros() != seq.rows() as usize * seq.chunks.chunks() {
            return Err(Error::Format("chunk bitmap does not match alphabet".into()));
        }
        Ok(seq)
    }
}

/// Colored predecessor search answered by a rank query: the reduction run
/// in the other direction.
///
/// Elements of `[1, n*sigma]` are points `(r, c)` of a `sigma x n` matrix.
/// Empty columns are dropped and a column holding several points is
/// expanded into one column per point, in increasing row order. The row of
/// each mapped column forms a string `S` over `[1, sigma]`; `R` and `C`
/// hold the row and column counts in unary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredPredSet {
    n: usize,
    sigma: u64,
    colors: BitVector,
    rows: BitVector,
    cols: BitVector,
    string: WaveletSequence,
}

impl ColoredPredSet {
    /// `elements` strictly increasing in `[1, n * sigma]`, one color each.
    pub fn new(elements: &[u64], colors: &[bool], n: usize, sigma: u64) -> Result<Self> {
        if n == 0 || sigma == 0 {
            return Err(Error::Validation("grid needs n >= 1 and sigma >= 1".into()));
        }
        if elements.len() != colors.len() {
            return Err(Error::Validation(format!(
                "{} elements but {} colors",
                elements.len(),
                colors.len()
            )));
        }
        let universe = (n as u64)
            .checked_mul(sigma)
            .ok_or_else(|| Error::Validation("n * sigma overflows".into()))?;
        for (k, &x) in elements.iter().enumerate() {
            check_range("element", x, 1, universe)?;
            if k > 0 && elements[k - 1] >= x {
                return Err(Error::Validation(format!("elements not strictly increasing at {}", k + 1)));
            }
        }
        let mut row_counts = vec![0usize; sigma as usize];
        let mut col_counts = vec![0usize; n];
        // (column, row) in column-major order, rows increasing within a column
        let mut by_col: Vec<(usize, u64)> = Vec::with_capacity(elements.len());
        for &x in elements {
            let (r, c) = ((x - 1) / n as u64 + 1, ((x - 1) % n as u64) as usize + 1);
            row_counts[r as usize - 1] += 1;
            col_counts[c - 1] += 1;
            by_col.push((c, r));
        }
        by_col.sort_unstable();
        let s: Vec<u64> = by_col.iter().map(|&(_, r)| r).collect();
        Ok(Self {
            n,
            sigma,
            colors: BitVector::from_bits(colors.iter().copied()),
            rows: unary_concat(&row_counts),
            cols: unary_concat(&col_counts),
            string: WaveletSequence::new(&s, sigma)?,
        })
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn rows(&self) -> &BitVector {
        &self.rows
    }

    pub fn cols(&self) -> &BitVector {
        &self.cols
    }

    /// The column-mapped string.
    pub fn string(&self) -> &WaveletSequence {
        &self.string
    }

    /// Elements in rows `1..=r`.
    fn count(&self, r: u64) -> usize {
        if r == 0 {
            0
        } else {
            self.rows.select_unchecked(false, r as usize) - r as usize
        }
    }

    /// Mapped columns up to and including original column `c`.
    fn col(&self, c: usize) -> usize {
        self.cols.select_unchecked(false, c) - c
    }

    /// Rank of the predecessor of `x` and its color; `(0, None)` when no
    /// element is `<= x`.
    pub fn query(&self, x: u64) -> Result<(usize, Option<bool>)> {
        check_range("key", x, 1, self.n as u64 * self.sigma)?;
        let (r, c) = ((x - 1) / self.n as u64 + 1, ((x - 1) % self.n as u64) as usize + 1);
        let p = self.count(r - 1) + self.string.rank(r, self.col(c))?;
        Ok((p, (p > 0).then(|| self.colors.bit(p - 1))))
    }
}

impl Persist for ColoredPredSet {
    fn write(&self, enc: &mut Encoder) {
        enc.section("header", |e| {
            e.put_usize(self.n);
            e.put_u64(self.sigma);
        });
        enc.section("colors", |e| e.put_bitvec(&self.colors));
        enc.section("row counts", |e| e.put_bitvec(&self.rows));
        enc.section("column counts", |e| e.put_bitvec(&self.cols));
        enc.section("mapped string", |e| self.string.write(e));
    }

    fn read(dec: &mut Decoder<'_>) -> Result<Self> {
        let n = dec.get_usize()?;
        let sigma = dec.get_u64()?;
        let colors = dec.get_bitvec()?;
        let rows = dec.get_bitvec()?;
        let cols = dec.get_bitvec()?;
        let string = WaveletSequence::read(dec)?;
        let m = colors.len();
        if rows.count_ones() != m
            || rows.count_zeros() as u64 != sigma
            || cols.count_ones() != m
            || cols.count_zeros() != n
            || string.len() != m
            || string.sigma() != sigma
        {
            return Err(Error::Format("colored predecessor components disagree".into()));
        }
        Ok(Self {
            n,
            sigma,
            colors,
            rows,
            cols,
            string,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::Sequence;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check_all(symbols: &[u64], sigma: u64) {
        let rs = RankReduceSeq::new(symbols, sigma).unwrap();
        let oracle = Sequence::new(symbols.to_vec(), sigma).unwrap();
        let n = symbols.len();
        for i in 1..=n {
            assert_eq!(rs.access(i).unwrap(), symbols[i - 1]);
        }
        let alphabet: Vec<u64> = if sigma <= 300 {
            (1..=sigma).collect()
        } else {
            let mut v = symbols.to_vec();
            v.extend([1, sigma, sigma / 2]);
            v
        };
        for &a in &alphabet {
            let mut count = 0;
            assert_eq!(rs.rank(a, 0).unwrap(), 0);
            for i in 1..=n {
                if symbols[i - 1] == a {
                    count += 1;
                    assert_eq!(rs.select(a, count).unwrap(), i);
                }
                assert_eq!(rs.rank(a, i).unwrap(), count, "a={a} i={i}");
            }
            assert!(matches!(rs.select(a, count + 1), Err(Error::NotFound { .. })));
            assert_eq!(oracle.oracle_rank(a, n).unwrap(), count);
        }
    }

    #[test]
    fn bbcab_pairs_and_points() {
        let s = Sequence::from_letters("bbcab").unwrap();
        let rs = RankReduceSeq::new(s.symbols(), 3).unwrap();
        let points: Vec<u64> = (1..=5).map(|p| rs.point(p)).collect();
        assert_eq!(points, vec![4, 6, 7, 10, 13]);
        let pairs: Vec<(u64, usize)> = (1..=5).map(|p| rs.pair(p)).collect();
        assert_eq!(pairs, vec![(1, 1), (2, 1), (2, 2), (2, 3), (3, 1)]);
        // point 4 is the first b of the second chunk
        assert_eq!(rs.stored_pair(4), (2, 1));
        assert_eq!(rs.predecessor_set().query(8), (7, 3));
        assert_eq!(rs.predecessor_set().query(12), (10, 4));
        assert_eq!(rs.rank(2, 3).unwrap(), 2);
        assert_eq!(rs.rank(3, 2).unwrap(), 0);
        assert_eq!(rs.access(4).unwrap(), 1);
        assert_eq!(rs.select(2, 3).unwrap(), 5);
        assert!(rs.select(1, 2).is_err());
        check_all(s.symbols(), 3);
    }

    #[test]
    fn singleton() {
        let rs = RankReduceSeq::new(&[1], 1).unwrap();
        assert_eq!(rs.point(1), 1);
        assert_eq!(rs.pair(1), (1, 1));
        check_all(&[1], 1);
        assert!(RankReduceSeq::new(&[], 3).is_err());
    }

    #[test]
    fn pair_width_is_twice_log_sigma() {
        let s: Vec<u64> = (0..1000).map(|k| k % 200 + 1).collect();
        let rs = RankReduceSeq::new(&s, 200).unwrap();
        assert_eq!(rs.pairs.width(), 16);
        assert_eq!(rs.pairs.bit_len(), 1000 * 16);
    }

    #[test]
    fn exhaustive_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let n = rng.random_range(1..=200);
            let sigma = *[2u64, 3, 4, 7, 16, 64, 255, 256, 1000].get(rng.random_range(0..9)).unwrap();
            let s: Vec<u64> = (0..n).map(|_| rng.random_range(1..=sigma)).collect();
            check_all(&s, sigma);
        }
    }

    #[test]
    fn random_large() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 10_000;
        let sigma = 256;
        let s: Vec<u64> = (0..n).map(|_| rng.random_range(1..=sigma)).collect();
        let oracle = Sequence::new(s.clone(), sigma).unwrap();
        let rs = RankReduceSeq::new(&s, sigma).unwrap();
        for _ in 0..20_000 {
            let a = rng.random_range(1..=sigma);
            let i = rng.random_range(0..=n);
            assert_eq!(rs.rank(a, i).unwrap(), oracle.oracle_rank(a, i).unwrap());
        }
    }

    #[test]
    fn persist_roundtrip() {
        let s: Vec<u64> = (0..3000u64).map(|k| (k * k) % 97 + 1).collect();
        let rs = RankReduceSeq::new(&s, 100).unwrap();
        let words = rs.to_words();
        let back = RankReduceSeq::from_words(&words).unwrap();
        assert_eq!(back, rs);
        assert_eq!(back.to_words(), words);
    }

    fn scan_pred(elements: &[u64], x: u64) -> usize {
        elements.iter().filter(|&&e| e <= x).count()
    }

    #[test]
    fn bbcab_colored() {
        let elements = [5u64, 6, 7, 10, 12];
        let colors = [true, false, false, true, false];
        let cp = ColoredPredSet::new(&elements, &colors, 5, 3).unwrap();
        let s = cp.string().to_symbols();
        assert_eq!(s, Sequence::from_letters("bbcab").unwrap().symbols());
        let bits = |b: &BitVector| b.iter().map(|x| if x { '1' } else { '0' }).collect::<String>();
        assert_eq!(bits(cp.rows()), "10111010");
        assert_eq!(bits(cp.cols()), "1011000110");
        assert_eq!(cp.query(9).unwrap(), (3, Some(colors[2])));
        assert_eq!(cp.query(4).unwrap(), (0, None));
        for x in 1..=15 {
            assert_eq!(cp.query(x).unwrap().0, scan_pred(&elements, x));
        }
        assert!(matches!(cp.query(16), Err(Error::OutOfRange { .. })));
        assert!(ColoredPredSet::new(&[16], &[true], 5, 3).is_err());
    }

    #[test]
    fn colored_single_element() {
        let cp = ColoredPredSet::new(&[1], &[true], 1, 1).unwrap();
        assert_eq!(cp.string().len(), 1);
        assert_eq!(cp.query(1).unwrap(), (1, Some(true)));
    }

    #[test]
    fn colored_random_against_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..30 {
            let n = rng.random_range(1..=1000usize);
            let sigma = rng.random_range(1..=40u64);
            let u = n as u64 * sigma;
            let m = rng.random_range(1..=(u as usize).min(800));
            let mut el: Vec<u64> = (0..m).map(|_| rng.random_range(1..=u)).collect();
            el.sort_unstable();
            el.dedup();
            let colors: Vec<bool> = el.iter().map(|_| rng.random_bool(0.5)).collect();
            let cp = ColoredPredSet::new(&el, &colors, n, sigma).unwrap();
            for x in 1..=u.min(4000) {
                let (p, c) = cp.query(x).unwrap();
                assert_eq!(p, scan_pred(&el, x));
                assert_eq!(c, (p > 0).then(|| colors[p - 1]));
            }
            let back = ColoredPredSet::from_words(&cp.to_words()).unwrap();
            assert_eq!(back, cp);
        }
    }

    #[test]
    fn colored_over_rank_points() {
        // the point set of a string, queried at (a-1)*n + i, gives the
        // occurrences of smaller symbols plus rank_a(i)
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..10 {
            let n = rng.random_range(1..=300usize);
            let sigma = rng.random_range(1..=20u64);
            let s: Vec<u64> = (0..n).map(|_| rng.random_range(1..=sigma)).collect();
            let rs = RankReduceSeq::new(&s, sigma).unwrap();
            let points: Vec<u64> = (1..=n).map(|p| rs.point(p)).collect();
            let cp = ColoredPredSet::new(&points, &vec![false; n], n, sigma).unwrap();
            for a in 1..=sigma {
                let below = s.iter().filter(|&&x| x < a).count();
                for i in 1..=n {
                    let x = (a - 1) * n as u64 + i as u64;
                    assert_eq!(cp.query(x).unwrap().0, below + rs.rank(a, i).unwrap());
                }
            }
        }
    }
}
