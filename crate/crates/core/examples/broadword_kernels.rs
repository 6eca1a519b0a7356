//! Word-parallel field operations: projection, counting and selection
//! inside a packed block, and predecessor among packed keys.

use succinct_seq::broadword::{
    packed_predecessor, popcount_fields, project_block, select_in_block, select_in_word, FieldBlock,
    PackedKeySet,
};

fn main() {
    println!("select_in_word(0b1011_0100, k) for k = 0..4:");
    for k in 0..4 {
        print!(" {}", select_in_word(0b1011_0100, k));
    }
    println!();

    let fields = [3u64, 1, 3, 0, 2, 3, 3, 1];
    let blk = FieldBlock::from_fields(2, &fields).unwrap();
    println!("\nfields {fields:?} packed at width 2: {:#018x}", blk.words()[0]);
    for v in 0..4 {
        let mask = project_block(&blk, v)[0];
        let c = popcount_fields(mask, 2, 8);
        let first = select_in_block(mask, 2, 8, 1).map_or("-".into(), |p| p.to_string());
        println!("  value {v}: mask {mask:#018x}, {c} matches, first at field {first}");
    }

    let keys = [2u64, 9, 17, 40, 63];
    let ks = PackedKeySet::new(6, &keys).unwrap();
    println!("\nkeys {keys:?} at width 6, {} per word", ks.keys_per_word());
    for x in [0u64, 2, 10, 39, 63] {
        let (count, key) = packed_predecessor(&ks, x);
        println!("  pred({x:>2}): {count} keys <= x, largest {key}");
    }
}
