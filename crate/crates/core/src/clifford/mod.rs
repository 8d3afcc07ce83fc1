//! Single- and two-qubit Cliffords with sign tracking, the two-qubit class
//! taxonomy and the sampling measure over non-product gates.

mod single;
mod two;

pub use single::SingleQubitClifford;
pub use two::{classify, classify_rows, enumerate_sp4, CliffordClass, Dressing, TwoQubitClifford};
