//! Analytics, ground-fact knowledge base and FOIL-style rule induction for
//! traffic-violation open data.
//!
//! The crate is `no_std` and only needs `alloc`. Reading files, CSV parsing
//! and the command-line pipeline live in the `traffic-ilp` crate.

#![no_std]
extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analytics;
pub mod ilp;
pub mod kb;
pub mod model;
pub mod text;

#[cfg(test)]
mod testutil;
