//! Numerics for the q^Volume measure on lozenge tilings of an N×N×N hexagon.
//!
//! The crate is organised in layers:
//!
//! | module | contents |
//! |--------|----------|
//! | [`qcore`] | exact q-series, moments and the orthogonal polynomials P_n(z; q, N) |
//! | [`equilibrium`] | arc geometry, the density ψ, the g-function, V, ν and the Szegő function |
//! | [`asymptotics`] | weight approximation, zeros of P_N and Plancherel–Rotach checks |
//! | [`arctic`] | phase function, saddle quartic, arctic curve, curvature, c*, edge constants |
//! | [`kernel`] | the finite-N correlation kernel, the extended Airy kernel, edge scaling |
//! | [`sampler`] | plane-partition enumeration, path bijection, Glauber dynamics |
//! | [`io`] | CSV, JSON and SVG writers shared by the examples and the `qhex` binary |
//!
//! Exact computations use [`num_rational::BigRational`]; asymptotic ones use
//! `Complex64`, with [`numeric::hp`] multiprecision floats wherever the
//! finite-N quantities cancel catastrophically in double precision.

pub mod arctic;
pub mod asymptotics;
pub mod equilibrium;
pub mod error;
pub mod io;
pub mod kernel;
pub mod numeric;
pub mod poly;
pub mod qcore;
pub mod sampler;
pub mod scalar;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use num_rational::BigRational;
