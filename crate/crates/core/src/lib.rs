//! Exact enumeration of Frobenius-invariant 7-arcs and Fano subplanes in
//! projective planes over finite fields of characteristic 2.

pub mod arcs;
pub mod fano;
pub mod field;
pub mod formulas;
pub mod harness;
pub mod jobs;
pub mod orbits;
pub mod plane;
pub mod report;
