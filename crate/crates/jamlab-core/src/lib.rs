//! Baseband jamming laboratory.
//!
//! Everything needed to study jamming of square-QAM links at the symbol
//! level: constellations with Gray labels and exact decision-cell geometry
//! ([`constellation`]), a seeded AWGN channel and power bookkeeping
//! ([`channel`]), a trained feed-forward demodulator with input gradients
//! ([`demod`]), minimal-norm gradient attacks against it ([`adversary`]),
//! five jamming strategies with duty-cycled power budgeting ([`jammers`]),
//! and a Monte-Carlo SER/SJR sweep harness with CSV and SVG output
//! ([`harness`]).
//!
//! All randomness is ChaCha8-seeded, so every result is reproducible from
//! its configuration alone.

pub mod adversary;
pub mod channel;
pub mod constellation;
mod error;
pub mod demod;
pub mod harness;
pub mod iq;
pub mod jammers;
pub mod rng;

pub use constellation::ConstellationSpec;
pub use error::{Error, Result};
pub use iq::IqSample;
