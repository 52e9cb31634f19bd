//! Exact and approximate matching distance between two-parameter persistence
//! modules given by finite graded presentations.

pub mod approx;
pub mod arrangement;
pub mod bottleneck;
pub mod cli;
pub mod diagram;
pub mod error;
pub mod exact;
pub mod numeric;
pub mod presentation;
pub mod slice;

#[cfg(test)]
mod testing;
