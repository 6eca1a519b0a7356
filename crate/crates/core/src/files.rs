//! On-disk formats. All integers are little-endian 64-bit words after an
//! 8-byte preamble (6-byte magic, version, one more byte).
//!
//! Sequence file: `SSEQ1\0`, version, flags (0), n, sigma, then `n` values
//! `s - 1` in `ceil(lg sigma)`-bit fields, least significant bit first,
//! zero-padded to a whole word.
//!
//! Structure file: `SSDS1\0`, version, backend tag, the parameter block as a
//! length-prefixed word array, the component count, then per component its
//! name (byte length, bytes zero-padded to a word) and its length-prefixed
//! words. The components are the top-level sections of the structure's word
//! stream, so concatenating them gives that stream back.

use std::fmt;
use std::path::Path;

use crate::apcompress::{ApParams, ClassPartition};
use crate::error::{Error, Result};
use crate::golynski::{GolynskiMode, GolynskiParams, GolynskiSequence};
use crate::packed::{bits_for, read_bits, write_bits};
use crate::persist::{Encoder, Persist, Section};
use crate::predecessor::PredecessorSet;
use crate::rankreduce::RankReduceSeq;
use crate::seqcore::{validate_symbols, Sequence, SequenceOps};
use crate::wavelet::{WaveletParams, WaveletSequence};

pub const SEQUENCE_MAGIC: &[u8; 6] = b"SSEQ1\0";
pub const STRUCTURE_MAGIC: &[u8; 6] = b"SSDS1\0";
pub const VERSION: u8 = 1;

/// Field width of a sequence file: `ceil(lg sigma)`.
pub fn symbol_width(sigma: u64) -> u32 {
    if sigma <= 1 {
        0
    } else {
        bits_for(sigma - 1)
    }
}

pub fn encode_sequence(symbols: &[u64], sigma: u64) -> Result<Vec<u8>> {
    validate_symbols(symbols, sigma)?;
    let width = symbol_width(sigma);
    let total = symbols.len() as u128 * u128::from(width);
    let mut words = vec![0u64; total.div_ceil(64) as usize];
    for (k, &s) in symbols.iter().enumerate() {
        write_bits(&mut words, k * width as usize, width, s - 1);
    }
    let mut out = Vec::with_capacity(24 + 8 * words.len());
    out.extend_from_slice(SEQUENCE_MAGIC);
    out.push(VERSION);
    out.push(0);
    out.extend_from_slice(&(symbols.len() as u64).to_le_bytes());
    out.extend_from_slice(&sigma.to_le_bytes());
    for w in words {
        out.extend_from_slice(&w.to_le_bytes());
    }
    Ok(out)
}

fn le_words(bytes: &[u8]) -> Result<Vec<u64>> {
    if bytes.len() % 8 != 0 {
        return Err(Error::Format(format!("{} bytes is not a whole number of words", bytes.len())));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

fn check_preamble(bytes: &[u8], magic: &[u8; 6], what: &str) -> Result<u8> {
    if bytes.len() < 8 || &bytes[..6] != magic {
        return Err(Error::Format(format!("not a {what} file (bad magic)")));
    }
    if bytes[6] != VERSION {
        return Err(Error::Format(format!("unsupported {what} file version {}", bytes[6])));
    }
    Ok(bytes[7])
}

pub fn decode_sequence(bytes: &[u8]) -> Result<Sequence> {
    let flags = check_preamble(bytes, SEQUENCE_MAGIC, "sequence")?;
    if flags != 0 {
        return Err(Error::Format(format!("unknown sequence flags {flags:#x}")));
    }
    let words = le_words(&bytes[8..])?;
    if words.len() < 2 {
        return Err(Error::Format("truncated sequence header".into()));
    }
    let (n, sigma) = (words[0], words[1]);
    if sigma == 0 {
        return Err(Error::Format("alphabet size 0".into()));
    }
    let width = symbol_width(sigma);
    let body = &words[2..];
    let need = u128::from(n) * u128::from(width);
    if need.div_ceil(64) != body.len() as u128 {
        return Err(Error::Format(format!(
            "sequence body has {} words, header needs {}",
            body.len(),
            need.div_ceil(64)
        )));
    }
    let n = usize::try_from(n).map_err(|_| Error::Format("length does not fit usize".into()))?;
    let symbols: Vec<u64> = (0..n)
        .map(|k| read_bits(body, k * width as usize, width) + 1)
        .collect();
    if let Some(k) = symbols.iter().position(|&s| s > sigma) {
        return Err(Error::Format(format!("symbol {} at position {} exceeds sigma {sigma}", symbols[k], k + 1)));
    }
    Sequence::new(symbols, sigma).map_err(|e| Error::Format(e.to_string()))
}

pub fn write_sequence(path: &Path, seq: &Sequence) -> Result<()> {
    std::fs::write(path, encode_sequence(seq.symbols(), seq.sigma())?)?;
    Ok(())
}

pub fn read_sequence(path: &Path) -> Result<Sequence> {
    decode_sequence(&std::fs::read(path)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Backend {
    Wavelet,
    Golynski,
    Rankreduce,
    Apcompress,
    /// Key set of the sequence's prefix sums; answers predecessor queries.
    Predecessor,
}

impl Backend {
    pub const ALL: [Backend; 5] = [
        Backend::Wavelet,
        Backend::Golynski,
        Backend::Rankreduce,
        Backend::Apcompress,
        Backend::Predecessor,
    ];

    pub fn tag(self) -> u8 {
        match self {
            Backend::Wavelet => 1,
            Backend::Golynski => 2,
            Backend::Rankreduce => 3,
            Backend::Apcompress => 4,
            Backend::Predecessor => 5,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|b| b.tag() == tag)
            .ok_or_else(|| Error::Format(format!("unknown backend tag {tag}")))
    }

    pub fn name(self) -> &'static str {
        match self {
            Backend::Wavelet => "wavelet",
            Backend::Golynski => "golynski",
            Backend::Rankreduce => "rankreduce",
            Backend::Apcompress => "apcompress",
            Backend::Predecessor => "predecessor",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Construction parameters for every backend; each uses its own part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BuildParams {
    pub wavelet: WaveletParams,
    pub golynski: GolynskiParams,
    pub apcompress: ApParams,
}

/// Strictly increasing prefix sums of the symbols, the key set the
/// predecessor backend stores for a sequence.
pub fn prefix_sum_keys(symbols: &[u64]) -> Vec<u64> {
    symbols
        .iter()
        .scan(0u64, |acc, &s| {
            *acc += s;
            Some(*acc)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyStructure {
    Wavelet(WaveletSequence),
    Golynski(GolynskiSequence),
    RankReduce(RankReduceSeq),
    ApCompress(ClassPartition),
    Predecessor(PredecessorSet),
}

fn mode_tag(mode: GolynskiMode) -> u64 {
    match mode {
        GolynskiMode::ConstantSelect => 0,
        GolynskiMode::ConstantAccess => 1,
    }
}

fn mode_name(mode: GolynskiMode) -> &'static str {
    match mode {
        GolynskiMode::ConstantSelect => "select",
        GolynskiMode::ConstantAccess => "access",
    }
}

impl AnyStructure {
    pub fn build(backend: Backend, seq: &Sequence, params: &BuildParams) -> Result<Self> {
        if seq.is_empty() {
            return Err(Error::Validation("cannot build over an empty sequence".into()));
        }
        let (s, sigma) = (seq.symbols(), seq.sigma());
        Ok(match backend {
            Backend::Wavelet => Self::Wavelet(WaveletSequence::with_params(s, sigma, params.wavelet)?),
            Backend::Golynski => Self::Golynski(GolynskiSequence::with_params(s, sigma, params.golynski)?),
            Backend::Rankreduce => Self::RankReduce(RankReduceSeq::new(s, sigma)?),
            Backend::Apcompress => Self::ApCompress(ClassPartition::with_params(s, sigma, params.apcompress)?),
            Backend::Predecessor => {
                let keys = prefix_sum_keys(s);
                let u = *keys.last().unwrap();
                Self::Predecessor(PredecessorSet::new(&keys, u)?)
            }
        })
    }

    pub fn backend(&self) -> Backend {
        match self {
            Self::Wavelet(_) => Backend::Wavelet,
            Self::Golynski(_) => Backend::Golynski,
            Self::RankReduce(_) => Backend::Rankreduce,
            Self::ApCompress(_) => Backend::Apcompress,
            Self::Predecessor(_) => Backend::Predecessor,
        }
    }

    /// The sequence interface, for every backend except predecessor.
    pub fn as_sequence(&self) -> Option<&dyn SequenceOps> {
        match self {
            Self::Wavelet(x) => Some(x),
            Self::Golynski(x) => Some(x),
            Self::RankReduce(x) => Some(x),
            Self::ApCompress(x) => Some(x),
            Self::Predecessor(_) => None,
        }
    }

    /// Number of elements: symbols, or keys for predecessor.
    pub fn len(&self) -> usize {
        match self {
            Self::Predecessor(p) => p.len(),
            _ => self.as_sequence().unwrap().len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Alphabet size, or the universe for predecessor.
    pub fn sigma(&self) -> u64 {
        match self {
            Self::Predecessor(p) => p.universe(),
            _ => self.as_sequence().unwrap().sigma(),
        }
    }

    /// The parameter block written to the file.
    pub fn param_words(&self) -> Vec<u64> {
        match self {
            Self::Wavelet(w) => {
                let p = w.params();
                vec![u64::from(p.digit_bits), p.block as u64]
            }
            Self::Golynski(g) => {
                let p = g.params();
                vec![mode_tag(p.mode), u64::from(p.f), g.sample_step() as u64]
            }
            Self::RankReduce(_) => Vec::new(),
            Self::ApCompress(a) => {
                let p = a.params();
                vec![p.threshold, u64::from(p.max_class), mode_tag(p.chunked.mode), u64::from(p.chunked.f)]
            }
            Self::Predecessor(p) => vec![p.universe(), p.base_size() as u64],
        }
    }

    /// Parameters as one comma-free token, for tables.
    pub fn param_string(&self) -> String {
        match self {
            Self::Wavelet(w) => {
                let p = w.params();
                format!("l={} block={}", p.digit_bits, p.block)
            }
            Self::Golynski(g) => {
                let p = g.params();
                format!("mode={} f={} step={}", mode_name(p.mode), p.f, g.sample_step())
            }
            Self::RankReduce(_) => "-".into(),
            Self::ApCompress(a) => {
                let p = a.params();
                format!(
                    "threshold={} max_class={} mode={} f={}",
                    p.threshold,
                    p.max_class,
                    mode_name(p.chunked.mode),
                    p.chunked.f
                )
            }
            Self::Predecessor(p) => format!("u={} base={}", p.universe(), p.base_size()),
        }
    }

    pub fn encode(&self) -> Encoder {
        let mut enc = Encoder::new();
        match self {
            Self::Wavelet(x) => x.write(&mut enc),
            Self::Golynski(x) => x.write(&mut enc),
            Self::RankReduce(x) => x.write(&mut enc),
            Self::ApCompress(x) => x.write(&mut enc),
            Self::Predecessor(x) => x.write(&mut enc),
        }
        enc
    }

    fn decode(backend: Backend, words: &[u64]) -> Result<Self> {
        Ok(match backend {
            Backend::Wavelet => Self::Wavelet(WaveletSequence::from_words(words)?),
            Backend::Golynski => Self::Golynski(GolynskiSequence::from_words(words)?),
            Backend::Rankreduce => Self::RankReduce(RankReduceSeq::from_words(words)?),
            Backend::Apcompress => Self::ApCompress(ClassPartition::from_words(words)?),
            Backend::Predecessor => Self::Predecessor(PredecessorSet::from_words(words)?),
        })
    }

    /// Size of the structure's word stream in bits (the file minus framing).
    pub fn payload_bits(&self) -> u64 {
        self.encode().words().len() as u64 * 64
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let enc = self.encode();
        let mut out = Vec::new();
        out.extend_from_slice(STRUCTURE_MAGIC);
        out.push(VERSION);
        out.push(self.backend().tag());
        let mut put = |w: u64| out.extend_from_slice(&w.to_le_bytes());
        let params = self.param_words();
        put(params.len() as u64);
        params.iter().for_each(|&w| put(w));
        let comps = components(&enc);
        put(comps.len() as u64);
        for (name, range) in comps {
            let mut name_bytes = name.as_bytes().to_vec();
            put(name_bytes.len() as u64);
            name_bytes.resize(name_bytes.len().div_ceil(8) * 8, 0);
            for c in name_bytes.chunks_exact(8) {
                put(u64::from_le_bytes(c.try_into().unwrap()));
            }
            put(range.len() as u64);
            enc.words()[range].iter().for_each(|&w| put(w));
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Ok(StructureFile::parse(bytes)?.structure)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

/// Top-level sections as word ranges. Every structure writes its whole
/// stream inside top-level sections, so they tile it.
fn components(enc: &Encoder) -> Vec<(String, std::ops::Range<usize>)> {
    let mut at = 0;
    let mut out = Vec::new();
    for s in enc.sections().iter().filter(|s| s.depth == 0) {
        let len = (s.bits / 64) as usize;
        out.push((s.path.clone(), at..at + len));
        at += len;
    }
    assert_eq!(at, enc.words().len(), "structure wrote words outside its sections");
    out
}

/// A parsed structure file with its framing kept for `info`.
#[derive(Debug, Clone)]
pub struct StructureFile {
    pub backend: Backend,
    pub params: Vec<u64>,
    /// Component names and sizes in bits, in file order.
    pub components: Vec<(String, u64)>,
    pub structure: AnyStructure,
}

impl StructureFile {
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let tag = check_preamble(bytes, STRUCTURE_MAGIC, "structure")?;
        let backend = Backend::from_tag(tag)?;
        let words = le_words(&bytes[8..])?;
        let mut pos = 0;
        let mut next = |what: &str| -> Result<u64> {
            let w = *words
                .get(pos)
                .ok_or_else(|| Error::Format(format!("truncated structure file ({what})")))?;
            pos += 1;
            Ok(w)
        };
        let n_params = next("parameter count")?;
        let params = (0..n_params)
            .map(|_| next("parameters"))
            .collect::<Result<Vec<_>>>()?;
        let n_comps = next("component count")?;
        let mut components = Vec::new();
        let mut stream = Vec::new();
        for _ in 0..n_comps {
            let name_len = next("component name")?;
            if name_len > 256 {
                return Err(Error::Format("component name too long".into()));
            }
            let mut name = Vec::new();
            for _ in 0..name_len.div_ceil(8) {
                name.extend_from_slice(&next("component name")?.to_le_bytes());
            }
            name.truncate(name_len as usize);
            let name = String::from_utf8(name).map_err(|_| Error::Format("component name is not UTF-8".into()))?;
            let len = next("component length")?;
            if len > (words.len() as u64) {
                return Err(Error::Format(format!("component {name} longer than the file")));
            }
            for _ in 0..len {
                stream.push(next("component words")?);
            }
            components.push((name, len * 64));
        }
        if pos != words.len() {
            return Err(Error::Format(format!("{} trailing words in structure file", words.len() - pos)));
        }
        let structure = AnyStructure::decode(backend, &stream)?;
        if structure.param_words() != params {
            return Err(Error::Format("parameter block disagrees with the structure".into()));
        }
        Ok(Self {
            backend,
            params,
            components,
            structure,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read(path)?)
    }
}

/// Section sizes with repeated paths (per-level or per-class parts)
/// summed, in first-seen order.
pub fn merged_sections(sections: &[Section]) -> Vec<Section> {
    let mut out: Vec<Section> = Vec::new();
    for s in sections {
        match out.iter_mut().find(|o| o.path == s.path) {
            Some(o) => o.bits += s.bits,
            None => out.push(s.clone()),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_bytes_layout() {
        let bytes = encode_sequence(&[2, 2, 3, 1, 2], 3).unwrap();
        assert_eq!(&bytes[..8], b"SSEQ1\0\x01\x00");
        assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), 5);
        assert_eq!(u64::from_le_bytes(bytes[16..24].try_into().unwrap()), 3);
        // 2-bit fields of s-1: 1,1,2,0,1 least significant first
        let w = u64::from_le_bytes(bytes[24..32].try_into().unwrap());
        assert_eq!(w, 0b01_00_10_01_01);
        assert_eq!(bytes.len(), 32);
        let back = decode_sequence(&bytes).unwrap();
        assert_eq!(back.symbols(), &[2, 2, 3, 1, 2]);
        assert_eq!(encode_sequence(back.symbols(), back.sigma()).unwrap(), bytes);
    }

    #[test]
    fn sequence_edge_cases() {
        let bytes = encode_sequence(&[1, 1, 1], 1).unwrap();
        assert_eq!(bytes.len(), 24);
        assert_eq!(decode_sequence(&bytes).unwrap().symbols(), &[1, 1, 1]);
        let empty = encode_sequence(&[], 7).unwrap();
        assert!(decode_sequence(&empty).unwrap().is_empty());
        // sigma 5 uses 3-bit fields, so a stored 7 decodes to 8 > sigma
        let mut bad = encode_sequence(&[1], 5).unwrap();
        bad[24] = 7;
        assert!(matches!(decode_sequence(&bad), Err(Error::Format(_))));
        let mut bad = encode_sequence(&[1], 5).unwrap();
        bad[0] = b'X';
        assert!(matches!(decode_sequence(&bad), Err(Error::Format(_))));
        let good = encode_sequence(&[1, 2], 5).unwrap();
        assert!(decode_sequence(&good[..good.len() - 8]).is_err());
    }

    #[test]
    fn structures_roundtrip_byte_identically() {
        let seq = Sequence::from_letters("bbcab").unwrap();
        for backend in Backend::ALL {
            let s = AnyStructure::build(backend, &seq, &BuildParams::default()).unwrap();
            let bytes = s.to_bytes();
            let file = StructureFile::parse(&bytes).unwrap();
            assert_eq!(file.backend, backend);
            assert_eq!(file.structure, s);
            assert_eq!(file.structure.to_bytes(), bytes);
            let total: u64 = file.components.iter().map(|c| c.1).sum();
            assert_eq!(total, s.payload_bits());
            if let Some(q) = s.as_sequence() {
                assert_eq!(q.rank(2, 3).unwrap(), 2);
                assert_eq!(q.rank(3, 2).unwrap(), 0);
            }
        }
    }

    #[test]
    fn structure_file_rejects_damage() {
        let seq = Sequence::from_letters("bbcab").unwrap();
        let bytes = AnyStructure::build(Backend::Wavelet, &seq, &BuildParams::default())
            .unwrap()
            .to_bytes();
        assert!(StructureFile::parse(&bytes[..bytes.len() - 8]).is_err());
        let mut b = bytes.clone();
        b[7] = 9;
        assert!(StructureFile::parse(&b).is_err());
        let mut b = bytes.clone();
        b[6] = 2;
        assert!(StructureFile::parse(&b).is_err());
        // parameter block says l = 3
        let mut b = bytes;
        b[16] = 3;
        assert!(StructureFile::parse(&b).is_err());
        let empty = Sequence::new(vec![], 3).unwrap();
        assert!(AnyStructure::build(Backend::Wavelet, &empty, &BuildParams::default()).is_err());
    }
}
