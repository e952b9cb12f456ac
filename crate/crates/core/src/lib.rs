//! One-dimensional quantum heterostructure solvers.
//!
//! Two families of problems are covered:
//!
//! * scattering by stacks of constant-potential layers, through closed forms
//!   for the single barrier, the single-well double barrier and the
//!   double-well triple barrier ([`analytic`]), and through a general
//!   transfer-matrix engine ([`tmm`]) that doubles as their oracle;
//! * bound states of an infinite well containing an arbitrary potential,
//!   through the matrix Numerov method ([`numerov`]), including a
//!   position-dependent effective mass under the von Roos family of kinetic
//!   operators ([`pdm`]).
//!
//! Units are fixed throughout: energies in eV, lengths in nm, masses as
//! ratios to the free electron mass.

// `!(x > 0.0)` is how NaN inputs get rejected along with the rest
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cli;
pub mod config;
mod eigen;
pub mod error;
pub mod grid;
pub mod numerov;
pub mod output;
pub mod pdm;
pub mod scattering;
pub mod structure;
pub mod tmm;
pub mod units;
pub mod validate;

pub use error::{Error, Result};
pub use grid::{build_grid, EnergyGrid, MassSpec, PotentialGrid, PotentialSpec};
pub use numerov::EigenPair;
pub use scattering::{ScatteringResult, SweepRow, SweepTable};
pub use structure::{Layer, LayeredStructure};
pub use units::{wavenumber, HBAR2_OVER_2ME};
