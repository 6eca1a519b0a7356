//! Seeded test corpora: uniform and Zipf strings, and byte text.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

use crate::error::{Error, Result};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn check_shape(n: usize, sigma: u64) -> Result<()> {
    if n == 0 || sigma == 0 {
        return Err(Error::Validation("corpus needs n >= 1 and sigma >= 1".into()));
    }
    Ok(())
}

pub fn uniform(n: usize, sigma: u64, seed: u64) -> Result<Vec<u64>> {
    check_shape(n, sigma)?;
    let mut r = rng(seed);
    Ok((0..n).map(|_| r.random_range(1..=sigma)).collect())
}

/// Symbol `k` drawn with probability proportional to `k^-s`.
pub fn zipf(n: usize, sigma: u64, s: f64, seed: u64) -> Result<Vec<u64>> {
    check_shape(n, sigma)?;
    let dist = Zipf::new(sigma as f64, s).map_err(|e| Error::Validation(e.to_string()))?;
    let mut r = rng(seed);
    Ok((0..n).map(|_| (dist.sample(&mut r) as u64).clamp(1, sigma)).collect())
}

/// Bytes as symbols `byte + 1` over an alphabet of 256.
pub fn from_text(bytes: &[u8]) -> Vec<u64> {
    bytes.iter().map(|&b| u64::from(b) + 1).collect()
}

/// Repeats `symbols` until it has length `n`.
pub fn cycle_to(symbols: &[u64], n: usize) -> Vec<u64> {
    symbols.iter().copied().cycle().take(n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_range() {
        let a = uniform(1000, 7, 5).unwrap();
        assert_eq!(a, uniform(1000, 7, 5).unwrap());
        assert!(a.iter().all(|&s| (1..=7).contains(&s)));
        let z = zipf(10_000, 100, 1.0, 5).unwrap();
        assert_eq!(z, zipf(10_000, 100, 1.0, 5).unwrap());
        assert!(z.iter().all(|&s| (1..=100).contains(&s)));
        // rank 1 is the most frequent under s = 1
        let ones = z.iter().filter(|&&s| s == 1).count();
        let tens = z.iter().filter(|&&s| s == 10).count();
        assert!(ones > 5 * tens);
    }

    #[test]
    fn zero_exponent_is_uniform() {
        let z = zipf(100_000, 4, 0.0, 9).unwrap();
        for a in 1..=4 {
            let c = z.iter().filter(|&&s| s == a).count();
            assert!((23_000..27_000).contains(&c), "symbol {a}: {c}");
        }
    }

    #[test]
    fn text_and_cycles() {
        assert_eq!(from_text(b"ab\0"), vec![98, 99, 1]);
        assert_eq!(cycle_to(&[1, 2, 3], 7), vec![1, 2, 3, 1, 2, 3, 1]);
        assert!(uniform(0, 3, 1).is_err());
    }
}
