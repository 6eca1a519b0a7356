//! Rank latency of the chunked backend as the alphabet grows. Pass `n`
//! as the first argument (default 1e6).

use succinct_seq::cli::{bench, CSV_HEADER};
use succinct_seq::files::{AnyStructure, Backend, BuildParams};
use succinct_seq::{corpus, Sequence};

fn main() {
    let n: usize = std::env::args().nth(1).map_or(1_000_000, |a| a.parse().expect("n"));
    println!("{CSV_HEADER}");
    for bits in [8u32, 16, 24] {
        let sigma = 1u64 << bits;
        let seq = Sequence::new(corpus::uniform(n, sigma, 8).unwrap(), sigma).unwrap();
        let s = AnyStructure::build(Backend::Golynski, &seq, &BuildParams::default()).unwrap();
        for row in bench(&s, &seq, &["rank".to_string()], 100_000, 0).unwrap() {
            println!("{}", row.to_line(','));
        }
    }
}
