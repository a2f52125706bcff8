#![allow(clippy::needless_range_loop)]

pub mod automata;
pub mod bitset;
pub mod bounds;
pub mod error;
pub mod graph;
pub mod npo;
pub mod qfa;
pub mod spectral;
pub mod verify;

pub use automata::{PartialDfa, SimplifiedDfa};
pub use error::{Error, Result};
pub use graph::Graph;
pub use verify::{check_code_floodfill, check_code_product, CodeVerdict};
