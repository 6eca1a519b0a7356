//! Sequence and structure files: write, reload, and list the stored
//! components.

use succinct_seq::files::{read_sequence, write_sequence, AnyStructure, Backend, BuildParams, StructureFile};
use succinct_seq::{corpus, Sequence};

fn main() {
    let dir = std::env::temp_dir().join(format!("succinct-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let seq = Sequence::new(corpus::uniform(10_000, 1000, 5).unwrap(), 1000).unwrap();
    let seq_path = dir.join("input.seq");
    write_sequence(&seq_path, &seq).unwrap();
    println!("{}: {} bytes", seq_path.display(), std::fs::metadata(&seq_path).unwrap().len());
    assert_eq!(read_sequence(&seq_path).unwrap(), seq);

    for backend in Backend::ALL {
        let s = AnyStructure::build(backend, &seq, &BuildParams::default()).unwrap();
        let path = dir.join(format!("{backend}.sds"));
        s.save(&path).unwrap();
        let file = StructureFile::read(&path).unwrap();
        assert_eq!(file.structure, s);
        let parts: Vec<String> = file.components.iter().map(|(name, bits)| format!("{name} {bits}")).collect();
        println!("{backend} ({}): {}", s.param_string(), parts.join(", "));
    }
    std::fs::remove_dir_all(&dir).unwrap();
}
