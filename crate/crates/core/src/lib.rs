//! Numerical and exact-arithmetic tools for deciding how well causally ordered
//! quantum circuits can simulate the quantum switch.
//!
//! The crate is organised bottom-up:
//!
//! * [`tensor`]: labeled-subsystem matrices (partial trace, transpose, trace-and-replace).
//! * [`exact`]: Gaussian-rational scalars and exact matrix routines.
//! * [`channels`], [`switch`]: Kraus/Choi conversions and the switch itself.
//! * [`comb`], [`gellmann`]: causal-structure projectors and their sparse characterisation.
//! * [`basis`]: spanning sets for k copies of qubit channels.
//! * [`sdp`]: scenario description, problem assembly and a native conic solver.
//! * [`certify`]: exact dual certificates and their verifier.
//! * [`circuits`]: the explicit simulation circuits and their checks.
//! * [`cli`]: command implementations used by the `switchcert` binary.

pub mod basis;
pub mod certify;
pub mod channels;
pub mod circuits;
pub mod cli;
pub mod comb;
pub mod error;
pub mod exact;
pub mod gellmann;
pub mod io;
pub mod sdp;
pub mod switch;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::{LabeledMatrix, Operator, SpaceLayout};
