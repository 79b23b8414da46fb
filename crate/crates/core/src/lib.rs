//! Exact Varchenko determinants of oriented matroid fibers.
//!
//! Oriented matroids are handled as covector sets ([`signvec`]). The Varchenko
//! matrix of a topal fiber is built over sparse integer polynomials ([`poly`]),
//! and its determinant is compared against the product of `(1 - b_v)^{β_v}`
//! over the fiber's non-tope covectors ([`varchenko`]). Covector sets come from
//! rational hyperplane arrangements ([`realizable`]) or pseudoline wiring
//! diagrams ([`wiring`]).

pub mod cli;
pub mod cov;
pub mod error;
pub mod fm;
pub mod modp;
mod packed;
pub mod poly;
pub mod realizable;
pub mod signvec;
pub mod varchenko;
pub mod wiring;

pub use error::{Error, Result};
pub use poly::{FactoredPoly, IntPolynomial, Monomial, Specialization, VarId, VarSpace};
pub use signvec::{AxiomReport, CovectorSet, FiberView, Sign, SignVector};
