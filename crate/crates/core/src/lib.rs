//! Half-space scalar Green's functions via the discrete complex image
//! method, and effective degrees of freedom (EDoF) of near-field MIMO links
//! above an impedance ground.
//!
//! The crate is organized around the pipeline:
//!
//! 1. [`spectral`] — impedance ground model, reflection coefficient, and the
//!    deformed contour in the complex k_z plane;
//! 2. [`prony`] — sampling of the reflection deviation on the contour and
//!    its modified-Prony exponential fit, transformed into complex-image
//!    coefficients;
//! 3. [`greens`] — closed-form complex-image Green's function (fast path)
//!    and the [`sommerfeld`] quadrature oracle (reference path);
//! 4. [`channel`] / [`continuous`] — discrete- and continuous-aperture EDoF
//!    functionals built on top of the Green's function.
//!
//! [`bessel`] and [`quadrature`] supply the special-function and
//! integration kernels used throughout.

pub mod bessel;
pub mod channel;
pub mod continuous;
pub mod error;
pub mod greens;
pub mod prony;
pub mod quadrature;
pub mod sommerfeld;
pub mod spectral;

pub use channel::{ChannelMatrix, GreensFn, LinkGeometry, UlaGeometry};
pub use continuous::LineQuadrature;
pub use error::{Error, Result};
pub use greens::{GreensEvaluator, GreensMode, Point3};
pub use prony::{ExponentialFit, ImageExpansion, ReflectionSamples};
pub use sommerfeld::QuadratureSpec;
pub use spectral::{ContourSpec, GroundModel};
