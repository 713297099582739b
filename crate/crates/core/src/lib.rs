//! Exact Mermin-Svetlichny polynomial algebra, communication-model maxima,
//! quantum violation engines for GHZ and W states, a seeded derivative-free
//! optimizer, and multipartite nonlocality certificates.
//!
//! The crate is organized around a single encoding: a joint measurement
//! choice for `n` parties is a little-endian bitmask whose bit `j` is party
//! `j+1`'s setting. Polynomial coefficients live in the exact ring of
//! half-integer powers of two; strategy maxima are computed and compared
//! exactly in `Z[sqrt(2)]` before any floating-point conversion.

pub mod classify;
pub mod error;
pub mod exact;
pub mod models;
pub mod optimize;
pub mod poly;
pub mod quantum;

pub use error::{Error, Result};
pub use exact::{Coefficient, Radical2};
pub use poly::{
    algebraic_bound, build_kind, build_m, build_m_pm, build_s, evaluate, local_bound, model_bound,
    prime, relabel_party, restrict, CorrelationTable, MsPolynomial, PolyKind, PolyLabel, Sign,
};
