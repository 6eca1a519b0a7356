//! Word-stream encoding shared by every structure. Arrays are written as a
//! length word followed by their words; named sections record how many
//! bits each component contributes so `info` can print a breakdown.

use crate::bitvec::BitVector;
use crate::error::{Error, Result};
use crate::packed::PackedSequence;

/// Bits written under one named section. `depth` 0 sections partition the
/// whole stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub path: String,
    pub depth: usize,
    pub bits: u64,
}

#[derive(Debug, Default)]
pub struct Encoder {
    words: Vec<u64>,
    sections: Vec<Section>,
    path: Vec<String>,
}

impl Encoder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn into_words(self) -> Vec<u64> {
        self.words
    }

    pub fn sections(&self) -> &[Section] {
        &self.sections
    }

    /// Runs `f`, attributing everything it writes to `name`.
    pub fn section(&mut self, name: &str, f: impl FnOnce(&mut Self)) {
        let start = self.words.len();
        let slot = self.sections.len();
        self.path.push(name.to_string());
        self.sections.push(Section {
            path: self.path.join("/"),
            depth: self.path.len() - 1,
            bits: 0,
        });
        f(self);
        self.path.pop();
        self.sections[slot].bits = ((self.words.len() - start) * 64) as u64;
    }

    pub fn put_u64(&mut self, v: u64) {
        self.words.push(v);
    }

    pub fn put_usize(&mut self, v: usize) {
        self.words.push(v as u64);
    }

    pub fn put_words(&mut self, ws: &[u64]) {
        self.words.push(ws.len() as u64);
        self.words.extend_from_slice(ws);
    }

    /// Sixteen-bit values, four per word.
    pub fn put_u16s(&mut self, vs: &[u16]) {
        self.words.push(vs.len() as u64);
        for chunk in vs.chunks(4) {
            let w = chunk
                .iter()
                .enumerate()
                .fold(0u64, |w, (k, &v)| w | u64::from(v) << (16 * k));
            self.words.push(w);
        }
    }

    pub fn put_packed(&mut self, p: &PackedSequence) {
        self.put_u64(u64::from(p.width()));
        self.put_usize(p.len());
        self.put_words(p.words());
    }

    /// Payload and directories, stored as built so a load never recomputes
    /// them.
    pub fn put_bitvec(&mut self, b: &BitVector) {
        self.put_usize(b.len());
        self.put_words(b.words());
        self.put_words(b.superblocks());
        self.put_u16s(b.blocks());
        self.put_words(b.select1_samples());
        self.put_words(b.select0_samples());
    }
}

pub struct Decoder<'a> {
    words: &'a [u64],
    pos: usize,
}

impl<'a> Decoder<'a> {
    pub fn new(words: &'a [u64]) -> Self {
        Self { words, pos: 0 }
    }

    pub fn is_finished(&self) -> bool {
        self.pos == self.words.len()
    }

    pub fn finish(&self) -> Result<()> {
        if self.is_finished() {
            Ok(())
        } else {
            Err(Error::Format(format!(
                "{} trailing words after structure",
                self.words.len() - self.pos
            )))
        }
    }

    pub fn get_u64(&mut self) -> Result<u64> {
        let v = *self
            .words
            .get(self.pos)
            .ok_or_else(|| Error::Format("truncated structure stream".into()))?;
        self.pos += 1;
        Ok(v)
    }

    pub fn get_usize(&mut self) -> Result<usize> {
        let v = self.get_u64()?;
        usize::try_from(v).map_err(|_| Error::Format(format!("size {v} does not fit usize")))
    }

    /// A size that must not exceed the words left in the stream times
    /// `per_word`; guards allocations against corrupt lengths.
    fn get_len(&mut self, per_word: usize) -> Result<usize> {
        let len = self.get_usize()?;
        let left = self.words.len() - self.pos;
        if len.div_ceil(per_word) > left {
            return Err(Error::Format(format!("array of {len} exceeds remaining stream")));
        }
        Ok(len)
    }

    pub fn get_words(&mut self) -> Result<Vec<u64>> {
        let len = self.get_len(1)?;
        let v = self.words[self.pos..self.pos + len].to_vec();
        self.pos += len;
        Ok(v)
    }

    pub fn get_u16s(&mut self) -> Result<Vec<u16>> {
        let len = self.get_len(4)?;
        let n_words = len.div_ceil(4);
        let mut out = Vec::with_capacity(len);
        for k in 0..len {
            out.push((self.words[self.pos + k / 4] >> (16 * (k % 4))) as u16);
        }
        self.pos += n_words;
        Ok(out)
    }

    pub fn get_packed(&mut self) -> Result<PackedSequence> {
        let width = u32::try_from(self.get_u64()?)
            .map_err(|_| Error::Format("packed width too large".into()))?;
        let len = self.get_usize()?;
        let words = self.get_words()?;
        PackedSequence::from_raw(width, len, words)
    }

    pub fn get_bitvec(&mut self) -> Result<BitVector> {
        let n_bits = self.get_usize()?;
        let words = self.get_words()?;
        let superblocks = self.get_words()?;
        let blocks = self.get_u16s()?;
        let s1 = self.get_words()?;
        let s0 = self.get_words()?;
        BitVector::from_parts(words, n_bits, superblocks, blocks, s1, s0)
    }
}

/// Structures that serialize to a word stream.
pub trait Persist: Sized {
    fn write(&self, enc: &mut Encoder);
    fn read(dec: &mut Decoder<'_>) -> Result<Self>;

    fn to_words(&self) -> Vec<u64> {
        let mut enc = Encoder::new();
        self.write(&mut enc);
        enc.into_words()
    }

    fn from_words(words: &[u64]) -> Result<Self> {
        let mut dec = Decoder::new(words);
        let v = Self::read(&mut dec)?;
        dec.finish()?;
        Ok(v)
    }
}

impl Persist for BitVector {
    fn write(&self, enc: &mut Encoder) {
        enc.put_bitvec(self);
    }

    fn read(dec: &mut Decoder<'_>) -> Result<Self> {
        dec.get_bitvec()
    }
}

impl Persist for PackedSequence {
    fn write(&self, enc: &mut Encoder) {
        enc.put_packed(self);
    }

    fn read(dec: &mut Decoder<'_>) -> Result<Self> {
        dec.get_packed()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitvector_roundtrip() {
        let bv = BitVector::from_bits((0..100_000).map(|k| k % 7 == 0 || k % 11 == 0));
        let words = bv.to_words();
        let back = <BitVector as Persist>::from_words(&words).unwrap();
        assert_eq!(back, bv);
        assert_eq!(back.to_words(), words);
    }

    #[test]
    fn sections_partition_stream() {
        let mut enc = Encoder::new();
        enc.section("a", |e| {
            e.put_u64(1);
            e.section("inner", |e| e.put_words(&[1, 2, 3]));
        });
        enc.section("b", |e| e.put_u16s(&[1, 2, 3, 4, 5]));
        let top: u64 = enc.sections().iter().filter(|s| s.depth == 0).map(|s| s.bits).sum();
        assert_eq!(top, enc.words().len() as u64 * 64);
        assert_eq!(enc.sections()[1].path, "a/inner");
        assert_eq!(enc.sections()[1].bits, 4 * 64);
    }

    #[test]
    fn truncation_is_a_format_error() {
        let p = PackedSequence::from_values(5, (0..40u64).map(|k| k % 32).collect::<Vec<_>>());
        let words = p.to_words();
        for cut in 0..words.len() {
            assert!(matches!(
                <PackedSequence as Persist>::from_words(&words[..cut]),
                Err(Error::Format(_))
            ));
        }
        let mut long = words.clone();
        long.push(0);
        assert!(<PackedSequence as Persist>::from_words(&long).is_err());
    }
}
