//! Exact and Monte Carlo simulation of teleportation-based universal
//! quantum cloning and the universal NOT gate.
//!
//! * [`linalg`]: small dense complex matrices, Kronecker products, partial traces.
//! * [`quantum`]: states, density matrices, Bell states, projectors, Kraus channels.
//! * [`protocols`]: standard teleportation, the dichotomic cloning/U-NOT
//!   protocol, the transpose variant and mixed-ancilla cloning.
//! * [`photonics`]: the two-photon beamsplitter experiment with post-selection,
//!   delay scans and seeded Monte Carlo counting.
//! * [`selftest`]: the invariant suite behind the `selftest` command.

pub mod linalg;
pub mod par;
pub mod photonics;
pub mod protocols;
pub mod quantum;
pub mod selftest;

pub use linalg::{ComplexMatrix, Layout, SubsystemLabel, C64};
pub use par::Execution;
pub use quantum::{BellState, DensityMatrix, Pauli, PureState, QuantumChannel};
