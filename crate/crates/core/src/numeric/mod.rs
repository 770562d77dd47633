//! Scalar numerics shared by the geometric constructions.

pub mod bump;
pub mod ode;
pub mod quadrature;
pub mod roots;
