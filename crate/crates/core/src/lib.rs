//! Twisted Lie algebroid cohomology on finite models.
//!
//! Everything in the cohomology pipeline is exact over the rationals:
//! Chevalley–Eilenberg complexes of Lie algebras with coefficients in a
//! representation ([`ce`]), the polynomial cylinder complex with its homotopy
//! operator ([`cylinder`]), short exact sequences and Čech–CE gluing
//! ([`homological`]) and the Künneth map ([`kunneth`]). The ODE side
//! (homotopies of Lie algebra morphisms, flows, gauge transport) lives in
//! [`flows`] and runs in `f64`, with exact rational fallbacks for nilpotent
//! data.

pub mod ce;
pub mod cylinder;
pub mod error;
pub mod exterior;
pub mod flows;
pub mod homological;
pub mod io;
pub mod kunneth;
pub mod liealg;
pub mod par;
pub mod qlinalg;

pub use error::{Error, Result};
pub use liealg::{LieAlgebra, LieMorphism, Representation};
pub use qlinalg::{QMatrix, Rational};
