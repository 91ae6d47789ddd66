use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the numerical kernels.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A constructor or operation received a parameter outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Bessel argument outside the supported evaluation range.
    #[error("bessel argument with |z| = {modulus:.3e} outside supported domain")]
    UnsupportedDomain { modulus: f64 },

    /// Evaluation requested at (or too close to) the reflection-coefficient pole.
    #[error("reflection coefficient pole near k_z = {kz}")]
    SingularReflection { kz: Complex64 },

    /// The integration contour passes too close to the reflection pole.
    #[error("contour passes within {dist:.3e}*k0 of the reflection pole")]
    ContourNearPole { dist: f64 },

    /// Adaptive tail quadrature ran out of panels before reaching the
    /// requested tolerance. The best available estimate is attached.
    #[error("tail quadrature stalled at {achieved:.3e} relative after {panels} panels")]
    TailNotConverged {
        estimate: Complex64,
        achieved: f64,
        panels: usize,
    },

    /// Doubling the quadrature order moved the result more than tolerated.
    #[error("quadrature not converged: estimate {estimate:.6e} changed by {rel_change:.3e} on order doubling")]
    QuadratureNotConverged { estimate: f64, rel_change: f64 },

    /// Exponential fit failed (degenerate root, clustered roots, aliasing).
    #[error("exponential fit is ill-conditioned: {0}")]
    IllConditionedFit(String),

    /// Source and receiver (or receiver and an image) coincide.
    #[error("singular geometry: source and receiver coincide")]
    Singularity,

    /// Channel matrix carries no energy; EDoF is undefined.
    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),
}

pub type Result<T> = std::result::Result<T, Error>;
