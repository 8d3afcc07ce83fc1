//! Linear algebra over GF(2) for Pauli operators and their symplectic images.

mod bits;
mod pauli;
mod subspace;
mod symplectic;
mod words;

pub use bits::BitVector;
pub use pauli::{Pauli, PauliString};
pub use subspace::Subspace;
pub(crate) use words::WordSpan;
pub use symplectic::{
    closure, matrix_order, order_on, symplectic_check, LinearAction, Order, SymplecticMatrix,
    DEFAULT_ORDER_CAP,
};
