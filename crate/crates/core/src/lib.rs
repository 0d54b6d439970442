//! Asymptotic secret-key rates for mode-pairing quantum key
//! distribution, with and without advantage distillation.
//!
//! The library is organized as a pipeline:
//!
//! * [`model`] turns system parameters and an operating point (distance,
//!   intensity) into closed-form channel statistics;
//! * [`rates`] evaluates three key-rate estimates on those statistics: a
//!   device-level formula, an information-theoretic bound minimized over
//!   the unobserved channel decomposition, and a variant that distills
//!   blocks of key bits to suppress errors at long distance;
//! * [`scan`] optimizes the intensity per operating point, sweeps
//!   distance and error-rate ranges, and locates zero-rate thresholds;
//! * [`mc`] cross-checks the analytic pairing rate and block statistics
//!   by simulation and exhaustive enumeration.
//!
//! All computations are deterministic; the Monte Carlo oracles are keyed
//! by explicit seeds and reproduce bit-identically across thread counts.

mod error;
mod numeric;

pub mod mc;
pub mod model;
pub mod rates;
pub mod scan;

pub use error::Error;
pub use mc::McEstimate;
pub use model::{ChannelDerived, EzzModel, SystemParams};
pub use rates::{AdOutcome, LambdaVector, RateComponents, RateResult};
pub use scan::{Engine, MuPolicy, QberRow, QberTable, ScanRow, ScanSpec, ScanTable};
