//! Colored predecessor through a grid of rows and columns, on the
//! points of the running example.

use succinct_seq::rankreduce::ColoredPredSet;

fn main() {
    let elements = [5u64, 6, 7, 10, 12];
    let colors = [true, false, false, true, false];
    let cp = ColoredPredSet::new(&elements, &colors, 5, 3).unwrap();
    println!("elements {elements:?}, colors {colors:?}");
    println!("rows {:?}", cp.rows().iter().map(u8::from).collect::<Vec<_>>());
    println!("cols {:?}", cp.cols().iter().map(u8::from).collect::<Vec<_>>());
    for x in 1..=15 {
        let (rank, color) = cp.query(x).unwrap();
        println!("  pred({x:>2}) = rank {rank}, color {color:?}");
    }
}
