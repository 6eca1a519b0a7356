//! The shared query contract, the naive reference oracle and zeroth-order
//! entropy accounting.
//!
//! Positions are 1-based throughout the public API: `rank(a, i)` counts the
//! occurrences of `a` in `S[1..=i]`, `select(a, j)` returns the position of
//! the `j`-th occurrence of `a`, and `access(i)` returns `S[i]`. Symbols live
//! in `[1, sigma]`.

use crate::error::{check_range, not_found, Error, Result};

/// Operations every sequence representation supports.
pub trait SequenceOps {
    /// Number of symbols.
    fn len(&self) -> usize;

    /// Alphabet size; symbols are in `[1, sigma]`.
    fn sigma(&self) -> u64;

    fn access(&self, i: usize) -> Result<u64>;

    fn rank(&self, a: u64, i: usize) -> Result<usize>;

    fn select(&self, a: u64, j: usize) -> Result<usize>;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All symbols in order, through `access`.
    fn to_symbols(&self) -> Vec<u64> {
        (1..=self.len()).map(|i| self.access(i).expect("position in range")).collect()
    }
}

pub(crate) fn check_access(len: usize, i: usize) -> Result<()> {
    check_range("position", i as u64, 1, len as u64)
}

pub(crate) fn check_rank(len: usize, sigma: u64, a: u64, i: usize) -> Result<()> {
    check_range("symbol", a, 1, sigma)?;
    check_range("position", i as u64, 0, len as u64)
}

pub(crate) fn check_select(sigma: u64, a: u64, j: usize) -> Result<()> {
    check_range("symbol", a, 1, sigma)?;
    if j == 0 {
        return Err(not_found(a, 0, 0));
    }
    Ok(())
}

/// Checks `sigma >= 1` and every symbol in `[1, sigma]`.
pub fn validate_symbols(symbols: &[u64], sigma: u64) -> Result<()> {
    if sigma == 0 {
        return Err(Error::Validation("alphabet size must be at least 1".into()));
    }
    if let Some((k, &s)) = symbols
        .iter()
        .enumerate()
        .find(|(_, &s)| s == 0 || s > sigma)
    {
        return Err(Error::Validation(format!(
            "symbol {s} at position {} outside [1, {sigma}]",
            k + 1
        )));
    }
    Ok(())
}

/// A plain sequence over `[1, sigma]`. Doubles as the brute-force oracle
/// that every structure is checked against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence {
    symbols: Vec<u64>,
    sigma: u64,
}

impl Sequence {
    pub fn new(symbols: Vec<u64>, sigma: u64) -> Result<Self> {
        validate_symbols(&symbols, sigma)?;
        Ok(Self { symbols, sigma })
    }

    /// Builds a sequence whose alphabet is the largest symbol present.
    pub fn from_symbols(symbols: Vec<u64>) -> Result<Self> {
        let sigma = symbols.iter().copied().max().unwrap_or(1);
        Self::new(symbols, sigma)
    }

    /// Maps letters `a`, `b`, `c`, ... to symbols `1`, `2`, `3`, ...
    pub fn from_letters(text: &str) -> Result<Self> {
        let symbols = text
            .bytes()
            .map(|b| {
                if b.is_ascii_lowercase() {
                    Ok(u64::from(b - b'a') + 1)
                } else {
                    Err(Error::Validation(format!("not a lowercase letter: {:?}", b as char)))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_symbols(symbols)
    }

    pub fn symbols(&self) -> &[u64] {
        &self.symbols
    }

    pub fn into_symbols(self) -> Vec<u64> {
        self.symbols
    }

    /// Occurrence count of every symbol, indexed by `symbol - 1`.
    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.sigma as usize];
        for &s in &self.symbols {
            counts[(s - 1) as usize] += 1;
        }
        counts
    }

    pub fn oracle_access(&self, i: usize) -> Result<u64> {
        check_access(self.symbols.len(), i)?;
        Ok(self.symbols[i - 1])
    }

    pub fn oracle_rank(&self, a: u64, i: usize) -> Result<usize> {
        check_rank(self.symbols.len(), self.sigma, a, i)?;
        Ok(self.symbols[..i].iter().filter(|&&s| s == a).count())
    }

    pub fn oracle_select(&self, a: u64, j: usize) -> Result<usize> {
        check_select(self.sigma, a, j)?;
        let mut seen = 0;
        for (k, &s) in self.symbols.iter().enumerate() {
            if s == a {
                seen += 1;
                if seen == j {
                    return Ok(k + 1);
                }
            }
        }
        Err(not_found(a, j as u64, seen as u64))
    }

    /// `H_0(S) = sum_a (n_a / n) lg(n / n_a)` in bits per symbol.
    pub fn zeroth_order_entropy(&self) -> Result<f64> {
        if self.symbols.is_empty() {
            return Err(Error::Undefined("entropy of an empty sequence"));
        }
        Ok(entropy_of_counts(&self.counts()))
    }
}

/// Zeroth-order entropy from occurrence counts; zero counts contribute nothing.
pub fn entropy_of_counts(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let c = c as f64;
            (c / n) * (n / c).log2()
        })
        .sum()
}

impl SequenceOps for Sequence {
    fn len(&self) -> usize {
        self.symbols.len()
    }

    fn sigma(&self) -> u64 {
        self.sigma
    }

    fn access(&self, i: usize) -> Result<u64> {
        self.oracle_access(i)
    }

    fn rank(&self, a: u64, i: usize) -> Result<usize> {
        self.oracle_rank(a, i)
    }

    fn select(&self, a: u64, j: usize) -> Result<usize> {
        self.oracle_select(a, j)
    }
}

/// Per-symbol occurrence lists: a fast oracle for long sequences, where the
/// scanning oracle of [`Sequence`] would be quadratic over many queries.
#[derive(Debug, Clone)]
pub struct OccurrenceIndex {
    symbols: Vec<u64>,
    sigma: u64,
    /// Positions (1-based) grouped by symbol, increasing within a group.
    positions: Vec<usize>,
    /// Sorted distinct symbols and where their group starts in `positions`.
    present: Vec<u64>,
    starts: Vec<usize>,
}

impl OccurrenceIndex {
    pub fn new(symbols: Vec<u64>, sigma: u64) -> Result<Self> {
        validate_symbols(&symbols, sigma)?;
        let mut order: Vec<usize> = (0..symbols.len()).collect();
        order.sort_by_key(|&k| symbols[k]);
        let mut present = Vec::new();
        let mut starts = Vec::new();
        for (g, &k) in order.iter().enumerate() {
            if present.last() != Some(&symbols[k]) {
                present.push(symbols[k]);
                starts.push(g);
            }
        }
        starts.push(order.len());
        let positions = order.into_iter().map(|k| k + 1).collect();
        Ok(Self {
            symbols,
            sigma,
            positions,
            present,
            starts,
        })
    }

    fn group(&self, a: u64) -> &[usize] {
        match self.present.binary_search(&a) {
            Ok(g) => &self.positions[self.starts[g]..self.starts[g + 1]],
            Err(_) => &[],
        }
    }

    /// Occurrences of `a` in the whole sequence.
    pub fn count(&self, a: u64) -> usize {
        self.group(a).len()
    }
}

impl SequenceOps for OccurrenceIndex {
    fn len(&self) -> usize {
        self.symbols.len()
    }

    fn sigma(&self) -> u64 {
        self.sigma
    }

    fn access(&self, i: usize) -> Result<u64> {
        check_access(self.symbols.len(), i)?;
        Ok(self.symbols[i - 1])
    }

    fn rank(&self, a: u64, i: usize) -> Result<usize> {
        check_rank(self.symbols.len(), self.sigma, a, i)?;
        Ok(self.group(a).partition_point(|&p| p <= i))
    }

    fn select(&self, a: u64, j: usize) -> Result<usize> {
        check_select(self.sigma, a, j)?;
        let g = self.group(a);
        g.get(j - 1).copied().ok_or_else(|| not_found(a, j as u64, g.len() as u64))
    }
}
