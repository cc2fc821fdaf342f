//! Inverse-design engine for alloy exploration.
//!
//! - [`data`]: ingestion, zero-fill, subsampling, min-max normalization and a
//!   seeded synthetic generator.
//! - [`filter`]: classify rows against target ranges as match / soft match /
//!   no match.
//! - [`neighbors`]: exact top-k nearest rows in normalized space, used when no
//!   row satisfies every bound.
//! - [`surrogate`]: PReLU MLP surrogate with training, exact input Jacobians
//!   and sensitivity curves.
//! - [`session`]: exploration sessions and the HTTP/JSON service.

pub mod cli;
pub mod data;
pub mod error;
pub mod filter;
pub mod neighbors;
pub mod session;
pub mod surrogate;

pub use error::{Error, Result};
