//! End-to-end experiments and the tables and curves they produce.

pub mod ablation;
pub mod init;
pub mod report;
pub mod stabilize;
pub mod sweeps;

pub use ablation::*;
pub use init::*;
pub use report::*;
pub use stabilize::*;
pub use sweeps::*;

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Hex SHA-256 of the canonical JSON form of `cfg`.
pub fn config_hash<T: Serialize>(cfg: &T) -> String {
    let bytes = serde_json::to_vec(cfg).expect("config serialises");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}
