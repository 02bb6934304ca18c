//! Self-calibrating PIN entry.
//!
//! The user sees the ten digits colored yellow or grey and presses a button
//! meaning "my digit is this color". Which button means which color is the
//! user's private choice. The engine keeps one hypothesis per digit and
//! drops any hypothesis under which the user would have used one button for
//! both colors; the lone survivor is the digit, and its evidence is the
//! user's button mapping.
//!
//! - [`engine`]: belief state and elimination.
//! - [`policy`]: per-round colorings.
//! - [`session`]: multi-digit entry, views, transcripts.
//! - [`sim`]: simulated users and Monte Carlo batches.
//! - [`cracker`]: PIN recovery from an observed transcript.
//! - [`bridge`]: newline-delimited JSON protocol for the browser UI.
//! - [`demo`]: terminal front end.

pub mod bridge;
pub mod cracker;
pub mod demo;
pub mod engine;
mod error;
pub mod policy;
pub mod rng;
pub mod session;
pub mod sim;

pub use error::{Error, Result};
