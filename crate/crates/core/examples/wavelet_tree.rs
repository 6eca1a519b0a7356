//! A multiary wavelet tree over a byte alphabet: level digits, space
//! split and a few queries.

use succinct_seq::corpus;
use succinct_seq::wavelet::{WaveletParams, WaveletSequence};
use succinct_seq::SequenceOps;

fn main() {
    let text = b"abracadabra, a wavelet tree splits symbols by digits";
    let symbols = corpus::from_text(text);
    for digit_bits in [2, 4, 8] {
        let params = WaveletParams::new(digit_bits, 512).unwrap();
        let w = WaveletSequence::with_params(&symbols, 256, params).unwrap();
        println!(
            "digit bits {digit_bits}: height {}, payload {} bits, directory {} bits",
            w.height(),
            w.payload_bits(),
            w.directory_bits()
        );
    }

    let w = WaveletSequence::new(&symbols, 256).unwrap();
    println!("\nfirst 12 digits per level with the default digit width:");
    for k in 0..w.height() {
        println!("  level {k}: {:?}", &w.level_digits(k)[..12]);
    }
    let a = u64::from(b'a') + 1;
    let total = w.rank(a, w.len()).unwrap();
    println!("\n'a' occurs {total} times; positions:");
    let positions: Vec<usize> = (1..=total).map(|j| w.select(a, j).unwrap()).collect();
    println!("  {positions:?}");
    assert!(positions.iter().all(|&p| w.access(p).unwrap() == a));
}
