//! Predecessor queries on a sparse set in a 2^40 universe, checked
//! against binary search.

use std::time::Instant;

use rand::Rng;
use succinct_seq::corpus;
use succinct_seq::predecessor::PredecessorSet;

fn main() {
    let universe = 1u64 << 40;
    let mut rng = corpus::rng(1);
    let mut keys: Vec<u64> = (0..100_000).map(|_| rng.random_range(1..=universe)).collect();
    keys.sort_unstable();
    keys.dedup();

    let t = Instant::now();
    let set = PredecessorSet::new(&keys, universe).unwrap();
    println!(
        "{} keys in [1, 2^40]: built in {:.1} ms, {} partitions, {} nodes, base size {}",
        set.len(),
        t.elapsed().as_secs_f64() * 1e3,
        set.partitions(),
        set.node_count(),
        set.base_size()
    );

    let queries: Vec<u64> = (0..1_000_000).map(|_| rng.random_range(0..=universe)).collect();
    let t = Instant::now();
    let mut agree = 0;
    for &x in &queries {
        let (key, idx) = set.query(x);
        let expect = keys.partition_point(|&k| k <= x);
        if idx == expect && (idx == 0 || key == keys[idx - 1]) {
            agree += 1;
        }
    }
    println!(
        "{agree} of {} queries agree with binary search ({:.0} ns each, including the check)",
        queries.len(),
        t.elapsed().as_secs_f64() * 1e9 / queries.len() as f64
    );
}
