//! Squeezing in collective su(2J+1) spin systems.
//!
//! The crate builds the spin and multipole generators of su(2J+1), derives
//! the root system and the Dynkin-diagram classification of su(2)
//! subalgebras, evaluates one-axis-twisting dynamics of coherent states in
//! closed form, and checks everything against an exact simulation in the
//! symmetric Fock space.

pub mod classification;
pub mod cli;
pub mod coherent_dynamics;
pub mod error;
pub mod exact_oracle;
pub mod lie_algebra;
pub mod operator;
pub mod root_system;
pub mod scan_fit;
pub mod spin;

pub use error::{Error, Result};
pub use operator::HermitianOperator;
pub use spin::SpinQuantum;
