//! Exact-arithmetic engine for Batalin-Vilkovisky and Gerstenhaber structures
//! on Tor/Ext of coisotropic intersections in affine Poisson space.
//!
//! The crate is `no_std` (alloc only); everything is computed over ℚ or 𝔽_p,
//! never floating point. IO, scenario files and the CLI live in the companion
//! `coiso-bv` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod algebra;
pub mod bar;
pub mod deform;
pub mod hochschild;
pub mod homology;
pub mod poisson;
pub mod rng;
pub mod scenario;
pub mod structures;
pub mod verify;

pub use algebra::scalar::{FieldSpec, Scalar};
