//! Simulation and compilation toolkit for linear-optical passive (LOP) quantum state
//! engineering.
//!
//! * [`fock`]: Fock bases and the states defined over them.
//! * [`lop`]: the U(N) action on n-photon sectors, by permanents and by exponentiating the
//!   Jordan-Schwinger image of `log M`.
//! * [`engineering`]: post-selected state preparation with ancillas, including the optimal
//!   synthesis of two-photon two-mode targets.
//! * [`detector`]: on/off photodetection with finite efficiency.
//! * [`circuit`]: beam-splitter / phase-shifter / swap circuits and triangular decomposition.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*F64` / `*F32` aliases below
//! name the concrete instantiations.

pub mod acceptance;
pub mod circuit;
pub mod detector;
pub mod engineering;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod lop;
pub mod optimize;
pub mod permanent;
pub mod scalar;

pub use circuit::{decompose, element_matrix, recompose, Circuit, CircuitElement};
pub use detector::{
    conditional_click, conditional_no_click, fidelity_to_branch, povm_click, povm_no_click,
    tradeoff_sweep, DetectorModel, Protocol, TradeoffPoint,
};
pub use engineering::{
    build_extension_matrix, kraus_branches, multi_ancilla_bound_check, postselect,
    solve_target, success_probability, EngineeringSolution, ExtensionParams, KrausBranch,
    PostSelected,
};
pub use error::{LopError, Result};
pub use fock::{dimension, enumerate_basis, FockBasis, MixedState, OccupationVector, PureState};
pub use lop::{
    apply, js_operator_matrix, lift_unitary, lift_via_js_exponential, AlgebraElement,
    LiftedUnitary, ModeUnitary,
};
pub use permanent::permanent;
pub use scalar::Real;

pub type PureStateF64 = PureState<f64>;
pub type PureStateF32 = PureState<f32>;
pub type MixedStateF64 = MixedState<f64>;
pub type MixedStateF32 = MixedState<f32>;
pub type ModeUnitaryF64 = ModeUnitary<f64>;
pub type ModeUnitaryF32 = ModeUnitary<f32>;
pub type LiftedUnitaryF64 = LiftedUnitary<f64>;
pub type LiftedUnitaryF32 = LiftedUnitary<f32>;
pub type CircuitF64 = Circuit<f64>;
pub type EngineeringSolutionF64 = EngineeringSolution<f64>;
pub type TradeoffPointF64 = TradeoffPoint<f64>;
