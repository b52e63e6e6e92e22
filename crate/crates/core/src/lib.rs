//! Spectral laboratory for bi-Laplace boundary problems on Euclidean balls
//! and spherical caps.
//!
//! The crate is organized bottom-up:
//!
//! * [`poly`]: exact multivariate polynomials and the differential operators
//!   on them (Laplacian, Euler operator, sphere reduction).
//! * [`moments`]: exact ball/sphere integrals and bilinear form assembly.
//! * [`harmonic`]: bases of harmonic homogeneous polynomials.
//! * [`wentzell`]: closed-form spectrum and exact certificates for the
//!   Wentzell bi-Laplace problem on the unit ball.
//! * [`ritz`]: constrained Rayleigh-Ritz solver for the ball problems.
//! * [`cap`]: Chebyshev collocation for radial problems on geodesic caps.
//! * [`harness`]: the bound-verification report.

pub mod cap;
pub mod exact;
pub mod harmonic;
pub mod harness;
pub mod moments;
pub mod oracle;
pub mod poly;
pub mod ritz;
pub mod wentzell;

/// Exact rational scalar used throughout the polynomial layer.
pub type Rational = num_rational::BigRational;
