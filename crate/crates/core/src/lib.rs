//! Simulator and pulse-sequence compiler for deterministic photon-state
//! synthesis with a SQUID charge qubit coupled to a single microwave cavity
//! mode, plus a device-physics estimator for the relevant timescales.
//!
//! The quantum engine is generic over the real scalar ([`Real`]: `f32` or
//! `f64`); the `*64` / `*32` aliases below name the common instantiations.

pub mod compiler;
pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod lindblad;
pub mod physics;
pub mod scalar;

pub use compiler::{
    binary_superposition, fock_sequence, reachable, simulate_sequence, simulate_sequence_with, synthesize, Engine,
    PulseSequence, PulseStep, Reachability, TargetState,
};
pub use dynamics::{PulseKind, RabiRates};
pub use error::{Error, Result};
pub use hilbert::{fidelity, BasisIndex, Ket, Operator, Qubit};
pub use lindblad::{DecayChannels, DensityMatrix};
pub use scalar::Real;

pub type Ket64 = Ket<f64>;
pub type Ket32 = Ket<f32>;
pub type Operator64 = Operator<f64>;
pub type Operator32 = Operator<f32>;
pub type RabiRates64 = RabiRates<f64>;
pub type RabiRates32 = RabiRates<f32>;
pub type PulseSequence64 = PulseSequence<f64>;
pub type PulseSequence32 = PulseSequence<f32>;
pub type TargetState64 = TargetState<f64>;
pub type TargetState32 = TargetState<f32>;
pub type DensityMatrix64 = DensityMatrix<f64>;
pub type DensityMatrix32 = DensityMatrix<f32>;
pub type DecayChannels64 = DecayChannels<f64>;
