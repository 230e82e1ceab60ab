//! Monochromatic island partitions of colored planar point sets.
//!
//! The crate computes island covers and partitions with three greedy
//! strategies, maintains island arrangements, checks results against exact
//! brute-force oracles, and generates the classic lower-bound instances.

// errors carry exact coordinates
#![allow(clippy::result_large_err)]

pub mod algos;
pub mod arrangement;
pub mod generators;
pub mod geom;
pub mod island;
pub mod oracles;
