//! Research toolkit for Shellsort gap sequences of the form
//! `h_k = ceil((g^k - 1) / (g - 1))`.
//!
//! * [`gapseq`] generates gamma-, Tokuda and Ciura sequences.
//! * [`exactroots`] locates, orders and enumerates the parameter values at
//!   which a truncated gamma-sequence changes, using exact arithmetic only.
//! * [`sortbench`] counts comparisons of an instrumented Shellsort over
//!   reproducible random permutations.
//! * [`searchpipe`] runs the stepwise narrowing search for a good gamma.
//! * [`cli`] wires everything to the `gapforge` binary.

pub mod cli;
pub mod error;
pub mod exactroots;
pub mod gapseq;
pub mod searchpipe;
pub mod sortbench;

pub use error::{Error, Result};
