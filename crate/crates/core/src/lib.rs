//! Lumped RLGC model of a signal/ground through-silicon via pair, its
//! three-port Z and S parameters, Touchstone I/O, and a substrate-coupled
//! oscillator spur estimate.
//!
//! Ports: 1 is the bottom of the signal via, 2 the substrate node, 3 the
//! top of the signal via. The ground via is the reference.
//!
//! ```
//! use tsv_core::{network, sparams, physics::TsvModel};
//!
//! let model = TsvModel::reference();
//! let z = network::z_matrix_at(1e9, &model.rlgc_at(1e9).unwrap()).unwrap();
//! let s = sparams::z_to_s(&z, 50.0).unwrap();
//! assert!(s.s21_db() < -30.0);
//! ```

pub mod config;
pub mod error;
pub mod export;
pub mod network;
pub mod physics;
pub mod sparams;
pub mod spur;
pub mod touchstone;

pub use error::{Error, Result};
pub use network::{FrequencyGrid, Port, ThreePortZ};
pub use physics::{MaterialParams, RlgcElements, TsvGeometry, TsvModel};
pub use sparams::ThreePortS;
