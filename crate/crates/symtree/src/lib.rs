//! Tree generation front end, LLM gateway, experiment harness and CLI on top
//! of `symtree-core`.

pub use symtree_core as core;

pub mod gateway;
pub mod io;
pub mod harness;
pub mod cli;
