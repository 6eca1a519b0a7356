//! A permutation with cycle shortcuts: `apply` reads the stored array, and
//! `inverse` walks forward along the cycle, using back-links planted every
//! `t` elements to jump, so it never evaluates more than `t` forward links.
//!
//! The permutation may be block diagonal: with block length `L`, element
//! `i` maps inside `[floor(i/L)*L, floor(i/L)*L + L)` and only the offset
//! inside the block is stored.

use crate::bitvec::BitVector;
use crate::error::{check_range, Error, Result};
use crate::packed::{bits_for, PackedSequence};
use crate::persist::{Decoder, Encoder, Persist};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationWithShortcuts {
    block: usize,
    period: usize,
    values: PackedSequence,
    marked: BitVector,
    /// For the `k`-th marked element, the element `period` steps back on its
    /// cycle, as a block offset.
    back: PackedSequence,
}

impl PermutationWithShortcuts {
    /// `perm` is 0-based and must map each length-`block` block onto itself.
    pub fn new(perm: &[usize], block: usize, period: usize) -> Result<Self> {
        let n = perm.len();
        if block == 0 || period == 0 {
            return Err(Error::Validation("block length and period must be positive".into()));
        }
        let mut seen = vec![false; n];
        for (i, &p) in perm.iter().enumerate() {
            if p >= n || p / block != i / block || seen[p] {
                return Err(Error::Validation(format!(
                    "not a block permutation at element {i}"
                )));
            }
            seen[p] = true;
        }

        let mut marked = vec![false; n];
        let mut back_of = vec![0usize; n];
        let mut visited = vec![false; n];
        let mut cycle = Vec::new();
        for start in 0..n {
            if visited[start] {
                continue;
            }
            cycle.clear();
            let mut x = start;
            while !visited[x] {
                visited[x] = true;
                cycle.push(x);
                x = perm[x];
            }
            let m = cycle.len();
            if m <= period {
                continue;
            }
            for k in (0..m).step_by(period) {
                marked[cycle[k]] = true;
                back_of[cycle[k]] = cycle[(k + m - period % m) % m];
            }
        }
        let width = bits_for(block.min(n.max(1)) as u64 - 1);
        let back: Vec<u64> = (0..n)
            .filter(|&i| marked[i])
            .map(|i| (back_of[i] % block) as u64)
            .collect();
        Ok(Self {
            block,
            period,
            values: PackedSequence::from_values(width, perm.iter().map(|&p| (p % block) as u64).collect::<Vec<_>>()),
            marked: BitVector::from_bits(marked),
            back: PackedSequence::from_values(width, back),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn shortcuts(&self) -> usize {
        self.back.len()
    }

    #[inline]
    pub(crate) fn apply_unchecked(&self, i: usize) -> usize {
        i / self.block * self.block + self.values.get(i) as usize
    }

    /// `pi(i)`, 0-based.
    pub fn apply(&self, i: usize) -> Result<usize> {
        check_range("element", i as u64, 0, self.len() as u64 - 1)?;
        Ok(self.apply_unchecked(i))
    }

    /// `pi^-1(j)` and the number of forward links followed.
    pub(crate) fn inverse_counted(&self, j: usize) -> (usize, usize) {
        let base = j / self.block * self.block;
        let mut x = j;
        let mut steps = 0;
        loop {
            if self.marked.bit(x) {
                let mut y = base + self.back.get(self.marked.rank1_unchecked(x)) as usize;
                for _ in 0..self.period - steps - 1 {
                    y = self.apply_unchecked(y);
                    steps += 1;
                }
                return (y, steps);
            }
            let nx = self.apply_unchecked(x);
            steps += 1;
            if nx == j {
                return (x, steps);
            }
            x = nx;
        }
    }

    #[inline]
    pub(crate) fn inverse_unchecked(&self, j: usize) -> usize {
        self.inverse_counted(j).0
    }

    /// `pi^-1(j)`, 0-based.
    pub fn inverse(&self, j: usize) -> Result<usize> {
        check_range("element", j as u64, 0, self.len() as u64 - 1)?;
        Ok(self.inverse_unchecked(j))
    }
}

impl Persist for PermutationWithShortcuts {
    fn write(&self, enc: &mut Encoder) {
        enc.section("permutation", |e| {
            e.put_usize(self.block);
            e.put_usize(self.period);
            e.put_packed(&self.values);
        });
        enc.section("shortcuts", |e| {
            e.put_bitvec(&self.marked);
            e.put_packed(&self.back);
        });
    }

    fn read(dec: &mut Decoder<'_>) -> Result<Self> {
        let block = dec.get_usize()?;
        let period = dec.get_usize()?;
        let values = dec.get_packed()?;
        let marked = dec.get_bitvec()?;
        let back = dec.get_packed()?;
        if block == 0 || period == 0 || marked.len() != values.len() || marked.count_ones() != back.len() {
            return Err(Error::Format("permutation components disagree".into()));
        }
        Ok(Self {
            block,
            period,
            values,
            marked,
            back,
        })
    }
}
