//! Numerical lab for the distance-2 (surface-7) error-detecting surface code.
//!
//! Layers, bottom up: [`engine`] (density matrices), [`code`] (stabilizers and
//! logical operators), [`noise`] (device table and Models 0–5), [`circuits`]
//! (timed schedules and their execution), [`tomography`], [`calibration`] and
//! [`experiments`]. [`cli`] is the front end of the `surface7` binary.

pub mod calibration;
pub mod circuits;
pub mod cli;
pub mod code;
pub mod engine;
pub mod experiments;
pub mod error;
pub mod noise;
pub mod tomography;

pub use error::{Error, Result};

/// Deterministic generator for `seed`, with an independent stream per `salt`.
pub fn seeded_rng(seed: u64, salt: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(salt);
    r
}
