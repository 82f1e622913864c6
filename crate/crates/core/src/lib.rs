//! Numerical realization of the L² Hardy-type remainder identities.
//!
//! Each identity is evaluated term by term (left side, main term, remainder)
//! for product-form test functions `f(x) = φ(|x|) ψ(x/|x|)` and for
//! one-dimensional profiles, with an independent integration-by-parts route
//! for every left side. The [`sharpness`] module sweeps truncated extremizer
//! families toward the sharp constants and measures the logarithmic
//! divergence of the exact extremizer forms.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod functions;
pub mod hilbert;
pub mod identities;
pub mod quadrature;
pub mod sharpness;
pub mod suite;
