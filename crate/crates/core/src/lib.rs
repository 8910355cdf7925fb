//! Second-moment simulator for continuous-variable quantum teleportation of
//! optical quadrature amplitudes.
//!
//! The model tracks every observable as a linear combination of independent
//! Gaussian source variables (shot-noise units, vacuum variance 1), so the
//! full protocol chain — entanglement generation on a 50/50 beamsplitter,
//! Alice's joint measurement, the classical feedforward channel, Bob's
//! reconstruction — reduces to exact closed-form variance arithmetic.
//! A Monte Carlo layer cross-checks the algebra by direct sampling.

// Validation guards are written `!(x > 0.0)` so NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod metrics;
pub mod montecarlo;
pub mod noise;
pub mod optics;
pub mod teleporter;

pub use error::{Error, Result};
pub use metrics::{reference_limits, MetricsReport, ReferenceLimits};
pub use noise::{FieldMode, LinearForm, NoiseBasis, SourceKind, VarId};
pub use optics::{EprPair, Orientation, SqueezerSpec};
pub use teleporter::{BobCoupling, InputState, TeleportOutcome, TeleporterConfig};
