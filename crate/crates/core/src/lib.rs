//! Spread indicators for sets of software architecture design alternatives.
//!
//! Solutions produced by a multi-objective optimizer carry both objective
//! values and the refactoring sequence that derived them from the initial
//! architecture. This crate scores a set of such solutions in both spaces:
//!
//! * [`indicators::max_spread`] measures the extent of the set in objective space;
//! * [`indicators::max_architectural_spread`] measures how far apart the
//!   solutions are in architectural space, using the distance between their
//!   refactoring sequences ([`distance`]), normalized to `[0, 1]`.
//!
//! [`projection`] embeds the architectural distances in the plane, [`io`]
//! reads analysis bundles and writes reports and SVG charts, and [`synth`]
//! generates seeded test data along with brute-force reference computations.

pub mod analysis;
pub mod distance;
pub mod encoding;
pub mod error;
pub mod indicators;
pub mod io;
pub mod model;
pub mod projection;
pub mod synth;

pub use error::{Error, Result};
