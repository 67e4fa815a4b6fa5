//! Multi-programming toolchain: run several small quantum circuits on
//! disjoint regions of one device and measure what that costs in fidelity
//! and saves in budget and runtime.
//!
//! The pipeline is `rebase → allocate → route → merge → schedule → sample`,
//! with [`metrics`] turning sampled histograms into success probabilities
//! and [`qaoa`] running parallel Max-Cut ansätze on top of it.

pub mod circuit;
pub mod compiler;
pub mod device;
pub mod metrics;
pub mod qaoa;
pub mod sim;
