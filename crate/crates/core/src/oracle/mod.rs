//! Independent numerical oracles: finite-difference solutions of the radial
//! problems and a two-dimensional solve on the perturbed annulus.

pub mod annulus;
pub mod radial;
pub mod tridiag;

pub use annulus::{expansion_check_2d, solve_annulus, AnnulusField, ExpansionReport, ExpansionRow};
pub use radial::{
    max_rel_err, oracle_agreement, oracle_table, solve_pressure_bvp, solve_q_bvp, solve_sigma_bvp,
    OracleRow, PressureProfile, RadialProfile,
};
