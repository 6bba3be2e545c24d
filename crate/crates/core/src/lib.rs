//! Optimal asymmetric cloning of pure states under the SU(2) and SU(d)
//! symmetry of the input ensemble.
//!
//! The crate is `no_std` with `alloc`. It provides representation-theory
//! primitives ([`repr`]), coupling-scheme intertwiners ([`intertwiner`]), the
//! fidelity engine for covariant machines ([`engine`]), the trade-off
//! optimiser ([`optimizer`]), analytic curves ([`closed_form`]), a Fock-space
//! simulator for the optical schemes ([`optical`]) and a brute-force
//! reference solver ([`oracle`]).

#![no_std]

extern crate alloc;

pub mod closed_form;
pub mod engine;
mod error;
pub mod intertwiner;
mod linalg;
pub mod optical;
pub mod optimizer;
pub mod oracle;
pub mod repr;
pub mod rng;

pub use error::{Error, Result};
