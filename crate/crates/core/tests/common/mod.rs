#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use succinct_seq::corpus;
use succinct_seq::files::{AnyStructure, Backend, BuildParams};
use succinct_seq::{Sequence, SequenceOps};

pub const SEQ_BACKENDS: [Backend; 4] = [
    Backend::Wavelet,
    Backend::Golynski,
    Backend::Rankreduce,
    Backend::Apcompress,
];

pub fn bbcab() -> Sequence {
    Sequence::from_letters("bbcab").unwrap()
}

pub fn license_bytes() -> Vec<u8> {
    std::fs::read(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/license_texts.txt")).unwrap()
}

/// The license corpus as symbols over 256, cycled to `n`.
pub fn text(n: usize) -> Sequence {
    let s = corpus::cycle_to(&corpus::from_text(&license_bytes()), n);
    Sequence::new(s, 256).unwrap()
}

pub fn uniform(n: usize, sigma: u64, seed: u64) -> Sequence {
    Sequence::new(corpus::uniform(n, sigma, seed).unwrap(), sigma).unwrap()
}

pub fn zipf(n: usize, sigma: u64, seed: u64) -> Sequence {
    Sequence::new(corpus::zipf(n, sigma, 1.0, seed).unwrap(), sigma).unwrap()
}

pub fn build(backend: Backend, seq: &Sequence) -> AnyStructure {
    AnyStructure::build(backend, seq, &BuildParams::default()).unwrap()
}

/// Checks `rank(a, select(a, j)) = j`, `select(a, rank(a, i)) <= i` and
/// `sum_a rank(a, i) = i`: exhaustively when `exhaustive`, else on
/// `samples` random arguments and a few positions for the sum. Returns
/// the first violation.
pub fn roundtrip_violation(
    s: &dyn SequenceOps,
    seq: &Sequence,
    exhaustive: bool,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Option<String> {
    let n = seq.len();
    let sigma = seq.sigma();
    let counts = seq.counts();
    let select_rank = |a: u64, i: usize| -> Option<String> {
        let r = s.rank(a, i).unwrap();
        if r >= 1 {
            let p = s.select(a, r).unwrap();
            if p > i {
                return Some(format!("select(a={a}, rank(a, i={i})={r}) = {p} > i"));
            }
        }
        None
    };
    let rank_select = |a: u64, j: usize| -> Option<String> {
        let p = s.select(a, j).unwrap();
        let r = s.rank(a, p).unwrap();
        (r != j).then(|| format!("rank(a={a}, select(a, j={j})={p}) = {r}"))
    };
    let rank_sum = |i: usize| -> Option<String> {
        let total: usize = (1..=sigma).map(|a| s.rank(a, i).unwrap()).sum();
        (total != i).then(|| format!("sum of rank(a, i={i}) over a = {total}"))
    };
    if exhaustive {
        for a in 1..=sigma {
            for j in 1..=counts[(a - 1) as usize] {
                if let Some(v) = rank_select(a, j) {
                    return Some(v);
                }
            }
            for i in 0..=n {
                if let Some(v) = select_rank(a, i) {
                    return Some(v);
                }
            }
        }
        return (0..=n).find_map(rank_sum);
    }
    let symbols = seq.symbols();
    for _ in 0..samples {
        let a = symbols[rng.random_range(0..n)];
        let j = rng.random_range(1..=counts[(a - 1) as usize]);
        if let Some(v) = rank_select(a, j) {
            return Some(v);
        }
        let a = if rng.random_bool(0.5) { a } else { rng.random_range(1..=sigma) };
        if let Some(v) = select_rank(a, rng.random_range(0..=n)) {
            return Some(v);
        }
    }
    let positions = (2_000_000 / sigma).clamp(1, 20);
    (0..positions).find_map(|_| rank_sum(rng.random_range(0..=n)))
}
