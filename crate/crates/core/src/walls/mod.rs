//! Walls: windows of the circuit that operators cannot cross.

mod detect;
mod localisation;
mod scan;

pub use detect::{
    conserved_charges, internal_subspaces, is_irreducible, is_wall, is_wall_bruteforce,
    two_sided_check, ConservedCharge, Side, WallReport,
};
pub(crate) use detect::{is_irreducible_gates, is_wall_gates};
pub(crate) use localisation::ratio_f64;
pub use localisation::{
    exact_rationals, kwall_bounds, localisation_length, localisation_length_one_wall,
    localisation_length_with, stopping_probability, WallProbabilities,
};
pub use scan::{fragment_decomposition, scan_circuit, Fragment, FragmentDecomposition, SweepWall};
