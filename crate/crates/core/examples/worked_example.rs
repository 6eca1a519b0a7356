//! The five-symbol running example `bbcab` over {a, b, c}, queried on
//! every backend, plus the points and pairs of the rank reduction.

use succinct_seq::apcompress::ClassPartition;
use succinct_seq::golynski::GolynskiSequence;
use succinct_seq::rankreduce::RankReduceSeq;
use succinct_seq::wavelet::WaveletSequence;
use succinct_seq::{Sequence, SequenceOps};

fn main() {
    let s = Sequence::from_letters("bbcab").unwrap();
    let sigma = s.sigma();
    println!("S = bbcab as {:?}, sigma = {sigma}", s.symbols());

    let rr = RankReduceSeq::new(s.symbols(), sigma).unwrap();
    println!("\npoints (i-1)*sigma + S[i] and their (symbol, rank) pairs:");
    for p in 1..=s.len() {
        println!("  {:>2}  {:?}", rr.point(p), rr.pair(p));
    }
    for x in [8, 12] {
        let (key, idx) = rr.predecessor_set().query(x);
        println!("pred({x}) = {key}, the {idx}th point, pair {:?}", rr.pair(idx));
    }

    let backends: Vec<(&str, Box<dyn SequenceOps>)> = vec![
        ("wavelet", Box::new(WaveletSequence::new(s.symbols(), sigma).unwrap())),
        ("golynski", Box::new(GolynskiSequence::new(s.symbols(), sigma).unwrap())),
        ("rankreduce", Box::new(rr)),
        ("apcompress", Box::new(ClassPartition::new(s.symbols(), sigma).unwrap())),
    ];
    println!();
    for (name, q) in &backends {
        println!(
            "{name:>10}: access = {:?}  rank_b(3) = {}  rank_c(2) = {}  select_b(3) = {}  select_c(2) = {}",
            q.to_symbols(),
            q.rank(2, 3).unwrap(),
            q.rank(3, 2).unwrap(),
            q.select(2, 3).unwrap(),
            q.select(3, 2).map_or_else(|e| e.to_string(), |p| p.to_string()),
        );
    }
}
