//! Zeroth-order compression by alphabet partitioning.
//!
//! Symbol `a` with `n_a` occurrences goes to class `min(ceil(lg(n/n_a)), c_max)`,
//! so frequencies inside a class differ by less than a factor of two. The
//! string becomes a class sequence (a Huffman-shaped wavelet tree, so it
//! costs about `n H_0` of the classes) plus, per class, the subsequence of its
//! symbols renamed to dense local ids. A class whose local alphabet reaches
//! the threshold is stored with the chunked large-alphabet structure, the
//! rest with wavelet trees.
//!
//! The renaming itself is a wavelet tree over the alphabet: entry `a` is the
//! class of `a` (or a final "absent" class), so the local id of `a` is a
//! rank and the symbol with local id `x` is a select. Within a class, local
//! ids follow symbol order.

use crate::error::{check_range, not_found, Error, Result};
use crate::golynski::{sample_step, GolynskiMode, GolynskiParams, GolynskiSequence};
use crate::huffwt::HuffmanWavelet;
use crate::persist::{Decoder, Encoder, Persist};
use crate::seqcore::{check_access, check_rank, check_select, validate_symbols, SequenceOps};
use crate::wavelet::WaveletSequence;

pub const DEFAULT_THRESHOLD: u64 = 64;
pub const DEFAULT_MAX_CLASS: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ApParams {
    /// Local alphabets of at least this size use the chunked structure.
    pub threshold: u64,
    /// Cap on the class number.
    pub max_class: u32,
    /// Parameters of the chunked members; their sampling step follows the
    /// full alphabet.
    pub chunked: GolynskiParams,
}

impl Default for ApParams {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            max_class: DEFAULT_MAX_CLASS,
            chunked: GolynskiParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Member {
    Wavelet(WaveletSequence),
    Chunked(GolynskiSequence),
}

impl Member {
    fn ops(&self) -> &dyn SequenceOps {
        match self {
            Member::Wavelet(w) => w,
            Member::Chunked(g) => g,
        }
    }
}

/// `min(ceil(lg(n / count)), max_class)` for `count >= 1`.
pub fn class_number(n: usize, count: usize, max_class: u32) -> u32 {
    let mut c = 0;
    while ((count as u128) << c) < n as u128 {
        c += 1;
    }
    c.min(max_class)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassPartition {
    n: usize,
    sigma: u64,
    params: ApParams,
    /// Raw class number of each dense class id.
    class_numbers: Vec<u32>,
    /// Over `[1, sigma]`: dense class of each symbol, `classes + 1` if absent.
    class_map: WaveletSequence,
    class_seq: HuffmanWavelet,
    members: Vec<Member>,
}

impl ClassPartition {
    pub fn new(symbols: &[u64], sigma: u64) -> Result<Self> {
        Self::with_params(symbols, sigma, ApParams::default())
    }

    pub fn with_params(symbols: &[u64], sigma: u64, params: ApParams) -> Result<Self> {
        let n = symbols.len();
        if n == 0 {
            return Err(Error::Validation("cannot build over an empty sequence".into()));
        }
        if params.threshold == 0 || params.chunked.f == 0 {
            return Err(Error::Validation("threshold and f must be positive".into()));
        }
        validate_symbols(symbols, sigma)?;
        let mut counts = vec![0usize; sigma as usize];
        for &s in symbols {
            counts[s as usize - 1] += 1;
        }
        let raw: Vec<Option<u32>> = counts
            .iter()
            .map(|&c| (c > 0).then(|| class_number(n, c, params.max_class)))
            .collect();
        let mut class_numbers: Vec<u32> = raw.iter().flatten().copied().collect();
        class_numbers.sort_unstable();
        class_numbers.dedup();
        let classes = class_numbers.len() as u64;
        let dense = |c: u32| class_numbers.binary_search(&c).expect("class present") as u64 + 1;
        let map: Vec<u64> = raw.iter().map(|c| c.map_or(classes + 1, dense)).collect();
        let class_map = WaveletSequence::new(&map, classes + 1)?;

        let mut local_size = vec![0u64; classes as usize];
        let mut local_of = vec![0u64; sigma as usize];
        for (a, &c) in map.iter().enumerate() {
            if c <= classes {
                local_size[c as usize - 1] += 1;
                local_of[a] = local_size[c as usize - 1];
            }
        }
        let mut class_ids = Vec::with_capacity(n);
        let mut parts: Vec<Vec<u64>> = vec![Vec::new(); classes as usize];
        for &s in symbols {
            let c = map[s as usize - 1];
            class_ids.push(c);
            parts[c as usize - 1].push(local_of[s as usize - 1]);
        }
        let class_seq = HuffmanWavelet::new(&class_ids, classes)?;
        let step = sample_step(sigma, params.chunked);
        let members = parts
            .iter()
            .zip(&local_size)
            .map(|(part, &size)| {
                Ok(if size >= params.threshold {
                    Member::Chunked(GolynskiSequence::with_step(part, size, params.chunked, step)?)
                } else {
                    Member::Wavelet(WaveletSequence::new(part, size)?)
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n,
            sigma,
            params,
            class_numbers,
            class_map,
            class_seq,
            members,
        })
    }

    pub fn params(&self) -> ApParams {
        self.params
    }

    pub fn classes(&self) -> usize {
        self.members.len()
    }

    /// Class number of symbol `a`, or `None` when `a` does not occur.
    pub fn class_of(&self, a: u64) -> Result<Option<u32>> {
        check_range("symbol", a, 1, self.sigma)?;
        let c = self.class_map.access(a as usize)?;
        Ok(self.class_numbers.get(c as usize - 1).copied())
    }

    pub fn class_sequence(&self) -> &HuffmanWavelet {
        &self.class_seq
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    /// Dense class and local id of an occurring symbol.
    fn locate(&self, a: u64) -> Result<Option<(u64, u64)>> {
        let c = self.class_map.access(a as usize)?;
        if c as usize > self.members.len() {
            return Ok(None);
        }
        Ok(Some((c, self.class_map.rank(c, a as usize)? as u64)))
    }
}

impl SequenceOps for ClassPartition {
    fn len(&self) -> usize {
        self.n
    }

    fn sigma(&self) -> u64 {
        self.sigma
    }

    fn access(&self, i: usize) -> Result<u64> {
        check_access(self.n, i)?;
        let c = self.class_seq.access(i)?;
        let k = self.class_seq.rank(c, i)?;
        let local = self.members[c as usize - 1].ops().access(k)?;
        Ok(self.class_map.select(c, local as usize)? as u64)
    }

    fn rank(&self, a: u64, i: usize) -> Result<usize> {
        check_rank(self.n, self.sigma, a, i)?;
        let Some((c, local)) = self.locate(a)? else {
            return Ok(0);
        };
        let k = self.class_seq.rank(c, i)?;
        if k == 0 {
            return Ok(0);
        }
        self.members[c as usize - 1].ops().rank(local, k)
    }

    fn select(&self, a: u64, j: usize) -> Result<usize> {
        check_select(self.sigma, a, j)?;
        let Some((c, local)) = self.locate(a)? else {
            return Err(not_found(a, j as u64, 0));
        };
        let member = self.members[c as usize - 1].ops();
        let p = member.select(local, j).map_err(|e| match e {
            Error::NotFound { available, .. } => not_found(a, j as u64, available),
            e => e,
        })?;
        self.class_seq.select(c, p)
    }
}

impl Persist for ClassPartition {
    fn write(&self, enc: &mut Encoder) {
        enc.section("header", |e| {
            e.put_usize(self.n);
            e.put_u64(self.sigma);
            e.put_u64(self.params.threshold);
            e.put_u64(u64::from(self.params.max_class));
            e.put_u64(match self.params.chunked.mode {
                GolynskiMode::ConstantSelect => 0,
                GolynskiMode::ConstantAccess => 1,
            });
            e.put_u64(u64::from(self.params.chunked.f));
            e.put_usize(self.class_numbers.len());
            for &c in &self.class_numbers {
                e.put_u64(u64::from(c));
            }
        });
        enc.section("class map", |e| self.class_map.write(e));
        enc.section("class sequence", |e| self.class_seq.write(e));
        enc.section("members", |e| {
            for m in &self.members {
                match m {
                    Member::Wavelet(w) => {
                        e.put_u64(1);
                        w.write(e);
                    }
                    Member::Chunked(g) => {
                        e.put_u64(2);
                        g.write(e);
                    }
                }
            }
        });
    }

    fn read(dec: &mut Decoder<'_>) -> Result<Self> {
        let n = dec.get_usize()?;
        let sigma = dec.get_u64()?;
        let threshold = dec.get_u64()?;
        let max_class = u32::try_from(dec.get_u64()?).map_err(|_| Error::Format("class cap".into()))?;
        let mode = match dec.get_u64()? {
            0 => GolynskiMode::ConstantSelect,
            1 => GolynskiMode::ConstantAccess,
            t => return Err(Error::Format(format!("unknown chunked mode {t}"))),
        };
        let f = u32::try_from(dec.get_u64()?).map_err(|_| Error::Format("f out of range".into()))?;
        let classes = dec.get_usize()?;
        if classes > 128 {
            return Err(Error::Format(format!("{classes} classes")));
        }
        let class_numbers = (0..classes)
            .map(|_| dec.get_u64().map(|c| c as u32))
            .collect::<Result<Vec<_>>>()?;
        let class_map = WaveletSequence::read(dec)?;
        let class_seq = HuffmanWavelet::read(dec)?;
        let mut members = Vec::with_capacity(classes);
        for _ in 0..classes {
            members.push(match dec.get_u64()? {
                1 => Member::Wavelet(WaveletSequence::read(dec)?),
                2 => Member::Chunked(GolynskiSequence::read(dec)?),
                t => return Err(Error::Format(format!("unknown member kind {t}"))),
            });
        }
        let total: usize = members.iter().map(|m| m.ops().len()).sum();
        if n == 0
            || class_map.len() as u64 != sigma
            || class_map.sigma() != classes as u64 + 1
            || class_seq.len() != n
            || class_seq.sigma() != classes as u64
            || total != n
        {
            return Err(Error::Format("partition components disagree".into()));
        }
        Ok(Self {
            n,
            sigma,
            params: ApParams {
                threshold,
                max_class,
                chunked: GolynskiParams { mode, f },
            },
            class_numbers,
            class_map,
            class_seq,
            members,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::Sequence;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check_all(symbols: &[u64], sigma: u64, params: ApParams) {
        let ap = ClassPartition::with_params(symbols, sigma, params).unwrap();
        let oracle = Sequence::new(symbols.to_vec(), sigma).unwrap();
        let n = symbols.len();
        assert_eq!(ap.to_symbols(), symbols);
        for a in 1..=sigma {
            for i in 0..=n {
                assert_eq!(ap.rank(a, i).unwrap(), oracle.oracle_rank(a, i).unwrap());
            }
            let total = oracle.oracle_rank(a, n).unwrap();
            for j in 1..=total {
                assert_eq!(ap.select(a, j).unwrap(), oracle.oracle_select(a, j).unwrap());
            }
            assert!(matches!(ap.select(a, total + 1), Err(Error::NotFound { .. })));
        }
    }

    #[test]
    fn bbcab_classes() {
        let s = Sequence::from_letters("bbcab").unwrap();
        let ap = ClassPartition::new(s.symbols(), 3).unwrap();
        assert_eq!(ap.class_of(2).unwrap(), Some(1));
        assert_eq!(ap.class_of(1).unwrap(), Some(3));
        assert_eq!(ap.class_of(3).unwrap(), Some(3));
        assert_eq!(ap.classes(), 2);
        assert_eq!(ap.rank(2, 3).unwrap(), 2);
        assert_eq!(ap.rank(3, 2).unwrap(), 0);
        check_all(s.symbols(), 3, ApParams::default());
    }

    #[test]
    fn class_numbers() {
        assert_eq!(class_number(5, 3, 64), 1);
        assert_eq!(class_number(5, 1, 64), 3);
        assert_eq!(class_number(8, 8, 64), 0);
        assert_eq!(class_number(8, 4, 64), 1);
        assert_eq!(class_number(8, 3, 64), 2);
        assert_eq!(class_number(1 << 20, 1, 5), 5);
    }

    #[test]
    fn uniform_is_one_class() {
        let s: Vec<u64> = (0..400).map(|k| k % 8 + 1).collect();
        let ap = ClassPartition::new(&s, 8).unwrap();
        assert_eq!(ap.classes(), 1);
        assert_eq!(ap.class_of(5).unwrap(), Some(3));
        check_all(&s, 8, ApParams::default());
    }

    #[test]
    fn absent_symbols_and_singletons() {
        let s = [7u64, 7, 7, 2, 7];
        let ap = ClassPartition::new(&s, 10).unwrap();
        assert_eq!(ap.class_of(1).unwrap(), None);
        assert_eq!(ap.rank(1, 5).unwrap(), 0);
        assert!(matches!(ap.select(1, 1), Err(Error::NotFound { .. })));
        assert_eq!(ap.access(4).unwrap(), 2);
        check_all(&s, 10, ApParams::default());
    }

    #[test]
    fn chunked_members() {
        // a low threshold forces chunked members on small inputs
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for round in 0..12 {
            let sigma = [16u64, 255, 256, 512][round % 4];
            let n = rng.random_range(1..=500);
            let s: Vec<u64> = (0..n)
                .map(|_| {
                    let r: f64 = rng.random();
                    ((sigma as f64).powf(r * r) as u64).clamp(1, sigma)
                })
                .collect();
            let params = ApParams {
                threshold: [2, 4, 64][round % 3],
                max_class: [64, 3][round % 2],
                chunked: GolynskiParams {
                    mode: [GolynskiMode::ConstantSelect, GolynskiMode::ConstantAccess][round % 2],
                    f: 4,
                },
            };
            check_all(&s, sigma, params);
        }
    }

    #[test]
    fn persist_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let s: Vec<u64> = (0..20_000)
            .map(|_| {
                let r: f64 = rng.random();
                ((1000f64).powf(r * r * r) as u64).clamp(1, 1000)
            })
            .collect();
        let ap = ClassPartition::with_params(&s, 1000, ApParams { threshold: 16, ..ApParams::default() }).unwrap();
        assert!(ap.members().iter().any(|m| matches!(m, Member::Chunked(_))));
        let words = ap.to_words();
        let back = ClassPartition::from_words(&words).unwrap();
        assert_eq!(back, ap);
        assert_eq!(back.to_words(), words);
        for i in (1..=s.len()).step_by(97) {
            assert_eq!(back.access(i).unwrap(), s[i - 1]);
        }
    }
}
