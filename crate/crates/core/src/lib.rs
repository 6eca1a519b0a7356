pub mod apcompress;
pub mod bitvec;
pub mod broadword;
pub mod chunks;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod files;
pub mod golynski;
pub mod huffwt;
pub mod packed;
pub mod permutation;
pub mod persist;
pub mod predecessor;
pub mod rankreduce;
pub mod seqcore;
pub mod wavelet;

pub use bitvec::BitVector;
pub use error::{Error, Result};
pub use seqcore::{OccurrenceIndex, Sequence, SequenceOps};
