//! Euler-quotient binary threshold sequences: generation, the defining
//! polynomial and trace representation over GF(2^N), and linear complexity.

pub mod defining;
pub mod error;
pub mod gf2;
pub mod io;
pub mod lincomp;
pub mod quotients;
pub mod sequences;
pub mod verify;

pub use defining::{BuildOptions, DefiningData, TraceOptions};
pub use error::{Error, Result};
pub use gf2::{BitPoly, FieldContext, FieldElement};
pub use lincomp::LinearComplexityReport;
pub use quotients::{ClassIndex, CyclotomicPartition, NormalizedRoot, Params, TwoOrderProfile};
pub use sequences::BinarySequence;
