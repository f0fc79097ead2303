//! Dense-Sparse LPN workbench.
//!
//! GF(2) linear algebra, the sampling layer, parameter derivation, the
//! gadget and error-correcting-code building blocks, the hash and all-but-one
//! lossy trapdoor constructions, and a cryptanalysis harness.

pub mod crhf;
pub mod cryptanalysis;
pub mod ecc;
pub mod gadget;
pub mod gf2;
pub mod ltdf;
pub mod params;
pub mod sampling;
