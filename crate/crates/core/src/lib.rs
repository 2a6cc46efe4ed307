//! Constructive density machinery over exact rationals.
//!
//! The crate is layered bottom-up:
//!
//! * [`exactnum`]: rationals, outward-rounded rational intervals and
//!   refinable enclosures of a small family of computable reals.
//! * [`engel`]: Engel expansion digits with certified truncation bounds.
//! * [`density`]: witnesses `z = q·r + s → 0` and the additive solver over
//!   `{m + nq}`.
//! * [`muldensity`]: approximation over `{±p^m q^n}` with exact error checks.
//! * [`certify`]: denominator-bound irrationality certificates and their
//!   verifiers.
//! * [`haarcheck`]: numerical audit of dilation-invariant integrals.

// Budget failures hand back partial results by value.
#![allow(clippy::result_large_err)]

pub mod certify;
pub mod density;
pub mod engel;
pub mod error;
pub mod exactnum;
pub mod haarcheck;
pub mod limits;
pub mod muldensity;

pub use error::{Error, Exhausted, Result};
pub use exactnum::{approximate, certified_floor, integer_nth_root, Interval, Rational, RealSpec};
pub use limits::Limits;
