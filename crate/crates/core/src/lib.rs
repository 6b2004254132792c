//! Entanglement-witness search from expectation-value data.
//!
//! Given the expectations of a subset of an orthonormal Hermitian product
//! basis on a bipartite system, the solver either returns a witness in the
//! span of the measured observables that separates the data point from the
//! (projected) separable set, or asserts approximate membership.
//!
//! The pieces, bottom-up:
//!
//! * [`hermitian`]: dense Hermitian operators and a cyclic Jacobi eigensolver.
//! * [`basis`]: generalized Gell-Mann product bases and the operator/coefficient
//!   isomorphism.
//! * [`states`]: Bell states, Werner states, product states and the PPT test.
//! * [`optimizer`]: multistart seesaw over product states (the optimization
//!   oracle behind every threshold).
//! * [`witness`] and [`upb`]: witness classification and constructions from
//!   unextendible product bases.
//! * [`separation`]: polar-set separation and the ellipsoid cutting-plane engine.
//! * [`ingest`] and [`demo`]: file ingestion, run configuration and canned
//!   scenarios used by the command-line front end.

// `!(x > y)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod demo;
pub mod error;
pub mod hermitian;
pub mod ingest;
pub mod optimizer;
mod par;
pub mod separation;
pub mod states;
pub mod upb;
pub mod witness;

pub use basis::{CoeffVector, ObservableBasis};
pub use error::{Error, Result};
pub use hermitian::{HermitianOp, Spectrum, C64};
pub use optimizer::{OptConfig, OptResult};
pub use separation::{SeparationVerdict, SolverConfig, TargetPoint, WsepReport};
pub use states::{BellState, DensityMatrix, ProductState};
pub use witness::{Handedness, Witness};

/// Whether this build was compiled with the rayon-backed `parallel` feature.
pub const PARALLEL_ENABLED: bool = cfg!(feature = "parallel");
