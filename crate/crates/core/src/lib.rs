//! Exact arithmetic for the refined Stark conjecture over constant field
//! extensions `K = F_{q^nu}(t)` of `k = F_q(t)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`zlinalg`]: integer Hermite/Smith forms, kernels and lattice membership.
//! * [`ffield`]: finite fields, polynomial factorisation, discrete logarithms.
//! * [`grpring`]: the group ring `Z[G]` for `G` cyclic, ideals as lattices,
//!   Fitting ideals and exact power-series division.
//! * [`places`]: places of `k` and `K`, splitting data and Galois action.
//! * [`lfunc`]: the Stickelberger polynomial, Euler products and leading terms.
//! * [`units`]: `(S,T)`-unit lattices and the Dirichlet map.
//! * [`classgrp`]: certified presentations of `(S,T)`-class groups.
//! * [`laws`]: executable algebraic laws for randomized testing.
//! * [`rubin`]: exterior powers over the group ring, regulators, the lattice
//!   `Lambda_{S,T}` and membership verdicts.

pub mod classgrp;
pub mod ffield;
pub mod grpring;
pub mod laws;
pub mod lfunc;
pub mod places;
pub mod rubin;
pub mod units;
pub mod zlinalg;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
