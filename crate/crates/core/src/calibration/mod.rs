//! Fits and calibration procedures: detection-rate fits, parity-check benchmarks,
//! Ramsey-based CZ phase solving and leakage estimation from readout voltages.

pub mod decay;
pub mod leakage;
pub mod markov;
pub mod parity;
pub mod ramsey;

pub use decay::*;
pub use leakage::*;
pub use markov::*;
pub use parity::*;
pub use ramsey::*;
