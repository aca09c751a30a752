//! Minimal A∞ models for the cochains on `BG`, `G = Z/p^n ⋊ Z/q`, over `F_p`,
//! and their Koszul duals on the loop-space side.

pub mod ainf;
pub mod dga;
pub mod error;
pub mod glin;
pub mod grp;
pub mod koszul;
pub mod pipeline;
pub mod transfer;

pub use error::{Error, Result};
