//! Asymptotic key rates for continuous-variable measurement-device-independent
//! QKD with k-photon subtraction on Alice's EPR source.
//!
//! The crate is layered bottom-up:
//!
//! * [`gaussian`]: thermal entropy and the two-mode symplectic spectrum,
//! * [`source`]: heralding probability and covariance of the subtracted state,
//! * [`fock`]: a truncated Fock-space oracle for the source model,
//! * [`channel`]: the equivalent one-way channel of the two relay links,
//! * [`keyrate`]: mutual information, Holevo bound, key rate and PLOB bound,
//! * [`studies`]: sweeps, root finders, optimizers and figure presets.

// `!(x >= lo)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod keyrate;
pub mod source;
pub mod studies;

pub use channel::{EffectiveChannel, LinkParams};
pub use error::{Error, Result};
pub use gaussian::BipartiteCovariance;
pub use keyrate::{plob_bound, secret_key_rate, ProtocolConfig, RateReport};
pub use source::{SourceParams, SubtractedSource};
pub use studies::{Geometry, TpsPolicy};
