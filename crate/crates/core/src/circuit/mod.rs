//! The Floquet period: a brickwork of two-qubit Cliffords followed by Haar
//! rotations on a random subset of sites, plus staircase re-slicings of it.

mod floquet;
mod reduced;
mod setups;

pub use floquet::{BondGate, Bricking, EdgeGate, FloquetCircuit, Rotation};
pub use reduced::{brick_window, reduce_staircase, BrickWindow, ReducedCircuit};
pub(crate) use reduced::staircase_words;
pub use setups::{setup_circuit, wall_centre, Setup};
