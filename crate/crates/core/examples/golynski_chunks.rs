//! The chunked representation for large alphabets: chunk layout,
//! sampling step and both permutation modes.

use succinct_seq::corpus;
use succinct_seq::golynski::{GolynskiMode, GolynskiParams, GolynskiSequence, DEFAULT_F};
use succinct_seq::SequenceOps;

fn main() {
    let n = 200_000;
    for bits in [4u32, 10, 16] {
        let sigma = 1u64 << bits;
        let symbols = corpus::uniform(n, sigma, bits as u64).unwrap();
        for mode in [GolynskiMode::ConstantSelect, GolynskiMode::ConstantAccess] {
            let params = GolynskiParams { mode, f: DEFAULT_F };
            let g = GolynskiSequence::with_params(&symbols, sigma, params).unwrap();
            let a = symbols[n / 2];
            let r = g.rank(a, n).unwrap();
            println!(
                "sigma 2^{bits:<2} {mode:?}: {} chunks of {}, sample step {}, {} samples; rank({a}, n) = {r}, select({a}, {r}) = {}",
                g.chunks(),
                g.chunk_len(),
                g.sample_step(),
                g.sample_count(),
                g.select(a, r).unwrap()
            );
        }
    }
}
