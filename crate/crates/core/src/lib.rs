//! Exact arithmetic and the modular-method elimination pipeline for the
//! generalised Fermat equation `A a^p + B b^p = C c^3` over imaginary
//! quadratic fields `Q(sqrt(-d))`.
//!
//! Layout:
//! - [`arith`]: field elements with big-rational coordinates.
//! - [`ideal`] and [`classgroup`]: prime ideals, valuations, factorisation,
//!   class numbers.
//! - [`frey`]: the Frey curve, its invariants and local reduction data.
//! - [`sunit`]: the S-unit equation and the valuation case analyses.
//! - [`hecke`], [`eliminate`]: Hecke-field arithmetic and newform elimination.
//! - [`newform`], [`basechange`], [`pipeline`], [`cli`]: data ingestion,
//!   fixture construction, configuration and the command-line front end.

pub mod arith;
pub mod basechange;
pub mod classgroup;
pub mod cli;
pub mod eliminate;
pub mod error;
pub mod factor;
pub mod frey;
pub mod hecke;
pub mod ideal;
pub mod newform;
pub mod pipeline;
pub mod sunit;

pub use arith::{BigRat, FieldCtx, OmegaKind, QuadElem};
pub use error::{Error, Result};
pub use ideal::{PrimeIdeal, SplitKind};
