//! Entropy-production statistics for a small zoo of models: finite
//! Markov chains, the mean-field lattice gas, the one-dimensional
//! Ising chain, and the tent map with its square. The crate computes
//! finite-time Rényi entropies, entropic pressures, and
//! large-deviation rate functions, and ships brute-force oracles to
//! verify the finite-time and asymptotic fluctuation relations.

pub mod cli;
pub mod convex;
pub mod error;
pub mod exponents;
pub mod grid;
pub mod ising;
pub mod markov;
pub mod meanfield;
pub mod rng;
pub mod sum;
pub mod tent;
pub mod verify;

pub use error::{Error, Result};
pub use grid::GridFunction;
