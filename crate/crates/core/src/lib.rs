//! Exact aggregated feasible regions (AFRs) of storage-like flexible resources.
//!
//! A fleet's AFR is bounded by one pair of inequalities per nonempty subset of
//! intervals, each a sum of per-resource support values; everything is
//! computed in exact rationals. The FME oracle, the LP core and the theorem
//! checks exist to verify that claim on concrete instances.

pub mod afr;
pub mod flex;
pub mod fme;
pub mod gen;
pub mod linear;
pub mod rational;
pub mod scaling;
pub mod theorem;

pub use afr::{build_afr, build_afr_with, AfrError, AfrModel, BuildOptions, DirectionIndex};
pub use flex::{FlexError, FlexResource, ResourceSet};
pub use linear::{Constraint, LinearSystem, Relation};
pub use rational::Rational;
