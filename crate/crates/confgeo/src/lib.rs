//! Symbolic/numeric engine for conformable (alpha-deformed) differential
//! geometry and Hamiltonian dynamics.
//!
//! The crate computes curvature tensors for alpha-deformed metrics
//! (Minkowski, Schwarzschild, FLRW), realizes the alpha-Poisson bracket and
//! its bi-Hamiltonian companions, builds recursion operators with their
//! Nijenhuis torsion and trace invariants, derives Hamilton-Jacobi
//! separation constants, and integrates the associated flows while
//! monitoring first integrals. Everything symbolic is an immutable
//! [`expr::Expr`]; every identity is checked numerically on seeded interior
//! points rather than by canonicalization.

pub mod chart;
pub mod domain;
pub mod dsl;
pub mod expr;
pub mod fields;
pub mod flow;
pub mod hierarchy;
pub mod hj;
pub mod metric;
pub mod oracle;
pub mod parse;
pub mod poisson;
pub mod recursion;
pub mod report;
pub mod sample;
pub mod suites;

pub use chart::Chart;
pub use domain::DomainBox;
pub use expr::Expr;
