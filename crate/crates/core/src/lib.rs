//! Majority-lifted set-cover hard instances for monotone PAC learning.
//!
//! A set-cover instance `S` yields a partial target `Γ_ℓ` and a distribution `D_ℓ` over
//! `({0,1}^ℓ)^n`. This crate builds both exactly, checks their combinatorial properties by
//! enumeration, and runs the set-cover distinguisher against pluggable learners.

pub mod combinadic;
pub mod construction;
pub mod dnf;
pub mod learners;
pub mod oracle;
pub mod point;
pub mod rational;
pub mod reduction;
pub mod sampler;
pub mod setcover;
pub mod suite;
