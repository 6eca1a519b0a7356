//! Symbols grouped into frequency classes on a skewed input: class
//! sizes, member kinds and space against the zeroth-order entropy.

use succinct_seq::apcompress::{ClassPartition, Member};
use succinct_seq::files::{AnyStructure, Backend, BuildParams};
use succinct_seq::{corpus, Sequence, SequenceOps};

fn main() {
    let (n, sigma) = (500_000, 1u64 << 16);
    let seq = Sequence::new(corpus::zipf(n, sigma, 1.0, 3).unwrap(), sigma).unwrap();
    let h0 = seq.zeroth_order_entropy().unwrap();

    let ap = ClassPartition::new(seq.symbols(), sigma).unwrap();
    println!("n = {n}, sigma = 2^16, H0 = {h0:.3} bits/symbol, {} classes", ap.classes());
    for (c, m) in ap.members().iter().enumerate() {
        let (kind, q): (&str, &dyn SequenceOps) = match m {
            Member::Wavelet(w) => ("wavelet", w),
            Member::Chunked(g) => ("chunked", g),
        };
        println!("  class {:>2}: {kind}, {} symbols, local alphabet {}", c + 1, q.len(), q.sigma());
    }
    for a in [1u64, 2, 100, 60_000] {
        println!("symbol {a:>5}: class {:?}", ap.class_of(a).unwrap());
    }

    for backend in [Backend::Apcompress, Backend::Wavelet] {
        let s = AnyStructure::build(backend, &seq, &BuildParams::default()).unwrap();
        println!("{backend}: {:.3} bits/symbol", s.payload_bits() as f64 / n as f64);
    }
}
