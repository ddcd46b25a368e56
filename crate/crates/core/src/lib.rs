//! Curvature-tensor algebra for symmetric vector-valued bilinear forms,
//! index-restricted integrals over the unit sphere of the target space, and
//! numerical estimation of the associated pinching constants.
//!
//! The crate is organised bottom-up:
//!
//! - [`forms`]: bilinear forms, Kulkarni–Nomizu products, flatness, nullity.
//! - [`curvature`]: `R`, `Ric`, `scal`, Schouten `L`, Weyl `W`, the pinching
//!   functionals and the umbilic / conformally-flat decompositions.
//! - [`sphere`]: shape operators, index bands and the integral `ψ`.
//! - [`estimate`]: the scale-free objective, the multi-start optimizer and the
//!   derived theorem constants.
//! - [`catalog`]: homogeneous immersions with closed-form second fundamental
//!   forms and the integral inequality checks.
//! - [`morse`]: height-function Morse data and total curvature.
//! - [`report`] and [`cli`]: JSON envelopes, CSV tables and the command line.

pub mod error;
pub mod forms;
pub mod curvature;
pub mod sampling;
pub mod sphere;
pub mod estimate;
pub mod catalog;
pub mod morse;
pub mod hexfloat;
pub mod report;
pub mod props;
pub mod cli;

pub use error::{Error, Result};
