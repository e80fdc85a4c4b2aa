//! Symbolic kinship benchmark core.
//!
//! Everything here is `no_std` with `alloc`: knowledge-base types, the exact
//! reasoners, the tree generator, symbol renamings, prompt rendering, answer
//! parsing and metrics. I/O lives in the `symtree` crate.

#![no_std]

extern crate alloc;

pub mod kb;
pub mod reasoner;
pub mod dataset;
pub mod treegen;
pub mod transforms;
pub mod render;
pub mod proofwriter;
pub mod eval;
