//! Reduction workbench: compiles 3-CNF formulas into Hamiltonian Path
//! instances together with a linear order of bounded mim-width, and checks
//! the construction with exact oracles.

mod bitset;
pub mod canon;
pub mod counterexample;
pub mod formula;
pub mod gadgets;
pub mod graph;
pub mod ham;
pub mod mim;
pub mod reduction;
pub mod witness;
