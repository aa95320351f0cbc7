//! Numerical building blocks: quadrature, special functions, multiprecision
//! helpers and polynomial root finding.

pub mod airy;
pub mod dilog;
pub mod hp;
pub mod quad;
pub mod roots;
