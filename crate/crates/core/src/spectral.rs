//! Spectral-domain building blocks: the impedance ground model, the
//! plane-wave reflection coefficient, wavenumber branch rules, and the
//! deformed integration contour in the complex k_z plane.
//!
//! The ground occupies z < 0 and is characterized by a normalized surface
//! impedance eta (admittance beta = 1/eta). A spectral component with
//! transverse wavenumber k reflects with coefficient
//!
//! ```text
//! C(k) = (k_z - k0*beta) / (k_z + k0*beta),    k_z = sqrt(k0^2 - k^2).
//! ```
//!
//! The deformed contour k_z = k0*(i*xi + 1 - xi/T), xi in [0, T], starts on
//! the real axis at k0 and ends at i*k0*T. Sampling C(k)-1 along it turns an
//! oscillatory function of k into a smooth decaying function of xi, which is
//! what the exponential fit in `prony` consumes.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Physical environment: wavelength and the impedance ground.
///
/// `beta` is the canonical field (it is what enters the reflection
/// coefficient); `eta` is kept for display and provenance. `beta = 0`
/// models the perfect-image limit where C(k) is identically 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundModel {
    wavelength: f64,
    k0: f64,
    eta: Complex64,
    beta: Complex64,
}

impl GroundModel {
    /// Build from wavelength and normalized surface impedance eta.
    pub fn new(wavelength: f64, eta: Complex64) -> Result<Self> {
        if !(wavelength > 0.0) || !wavelength.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "wavelength must be positive and finite, got {wavelength}"
            )));
        }
        if eta.norm() == 0.0 || !eta.is_finite() {
            return Err(Error::InvalidParameter(
                "eta must be nonzero and finite (use from_beta for beta = 0)".into(),
            ));
        }
        if eta.re < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "passive ground requires Re(eta) >= 0, got {eta}"
            )));
        }
        Ok(Self {
            wavelength,
            k0: 2.0 * PI / wavelength,
            eta,
            beta: eta.finv(),
        })
    }

    /// Build from wavelength and normalized admittance beta.
    ///
    /// `beta = 0` is allowed: it is the quasi-static perfect-image limit
    /// (eta is then reported as infinite).
    pub fn from_beta(wavelength: f64, beta: Complex64) -> Result<Self> {
        if !(wavelength > 0.0) || !wavelength.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "wavelength must be positive and finite, got {wavelength}"
            )));
        }
        if !beta.is_finite() {
            return Err(Error::InvalidParameter("beta must be finite".into()));
        }
        let eta = if beta.norm() == 0.0 {
            Complex64::new(f64::INFINITY, 0.0)
        } else {
            let eta = beta.finv();
            if eta.re < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "passive ground requires Re(eta) >= 0, got {eta}"
                )));
            }
            eta
        };
        Ok(Self {
            wavelength,
            k0: 2.0 * PI / wavelength,
            eta,
            beta,
        })
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn eta(&self) -> Complex64 {
        self.eta
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }
}

/// Deformed-contour parameters: real-axis intercept scale T, sample count W,
/// and exponential expansion order Q.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContourSpec {
    t_scaled: OrderedT,
    w: usize,
    q: usize,
}

// T is stored bit-exactly so ContourSpec can derive Eq for config comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct OrderedT(u64);

impl ContourSpec {
    /// The paper's choice for near-field work: T=10, W=10, Q=5.
    pub fn paper_default() -> Self {
        Self::new(10.0, 10, 5).expect("defaults are valid")
    }

    pub fn new(t: f64, w: usize, q: usize) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "contour parameter T must be positive, got {t}"
            )));
        }
        if q == 0 || w == 0 {
            return Err(Error::InvalidParameter(
                "contour sample count W and order Q must be positive".into(),
            ));
        }
        if w < 2 * q {
            return Err(Error::InvalidParameter(format!(
                "need W >= 2Q samples for the difference-equation system, got W={w}, Q={q}"
            )));
        }
        Ok(Self {
            t_scaled: OrderedT(t.to_bits()),
            w,
            q,
        })
    }

    pub fn t(&self) -> f64 {
        f64::from_bits(self.t_scaled.0)
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Largest transverse wavenumber reached by the contour,
    /// k_max = k0*sqrt(1 + T^2).
    pub fn k_max(&self, k0: f64) -> f64 {
        k0 * (1.0 + self.t() * self.t()).sqrt()
    }

    /// Refuse contours that pass close to the reflection pole k_z = -k0*beta.
    ///
    /// The contour is the straight segment from k0 to i*k0*T; for passive
    /// grounds the pole sits in the left half-plane and stays far away, but
    /// the check guards arbitrary user-supplied beta.
    pub fn check_pole_clearance(&self, ground: &GroundModel) -> Result<()> {
        let beta = ground.beta();
        if beta.norm() == 0.0 {
            // C(k) = 1 identically; there is no pole.
            return Ok(());
        }
        let k0 = ground.k0();
        let pole = -k0 * beta;
        let a = Complex64::new(k0, 0.0);
        let b = Complex64::new(0.0, k0 * self.t());
        let dist = point_segment_distance(pole, a, b) / k0;
        if dist < 1e-6 {
            return Err(Error::ContourNearPole { dist });
        }
        Ok(())
    }
}

fn point_segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    // Projection parameter of p onto the segment, clamped to [0, 1].
    let t = ((p - a).re * ab.re + (p - a).im * ab.im) / len2;
    let t = t.clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Vertical wavenumber k_z = sqrt(k0^2 - k^2).
///
/// Branch: principal square root flipped so Re(k_z) >= 0, with Im(k_z) >= 0
/// on the purely imaginary ray. For real k < k0 this yields a positive real
/// k_z (propagating waves); for real k > k0 a positive imaginary k_z
/// (decaying evanescent waves).
pub fn kz_from_k(k: Complex64, k0: f64) -> Complex64 {
    debug_assert!(k0 > 0.0);
    branch_sqrt(Complex64::new(k0 * k0, 0.0) - k * k)
}

/// Transverse wavenumber k = sqrt(k0^2 - k_z^2) with the same branch rule:
/// Re(k) >= 0, tie-broken to Im(k) >= 0 on the imaginary axis.
pub fn k_from_kz(kz: Complex64, k0: f64) -> Complex64 {
    debug_assert!(k0 > 0.0);
    branch_sqrt(Complex64::new(k0 * k0, 0.0) - kz * kz)
}

fn branch_sqrt(s: Complex64) -> Complex64 {
    let r = s.sqrt();
    if r.re < 0.0 || (r.re == 0.0 && r.im < 0.0) {
        -r
    } else {
        r
    }
}

/// Point on the deformed contour, k_z = k0*(i*xi + (1 - xi/T)).
pub fn kz_on_path(xi: f64, k0: f64, t: f64) -> Complex64 {
    assert!(
        (0.0..=t).contains(&xi),
        "path parameter xi = {xi} outside [0, {t}]"
    );
    Complex64::new(k0 * (1.0 - xi / t), k0 * xi)
}

/// Plane-wave reflection coefficient C(k) = (k_z - k0*beta)/(k_z + k0*beta).
///
/// Evaluation at (or numerically indistinguishable from) the pole
/// k_z = -k0*beta is reported as an error instead of returning inf/nan.
pub fn reflection_coefficient(kz: Complex64, k0: f64, beta: Complex64) -> Result<Complex64> {
    let shift = k0 * beta;
    let denom = kz + shift;
    let scale = k0 * (1.0 + beta.norm());
    if denom.norm() <= 1e-14 * scale {
        return Err(Error::SingularReflection { kz });
    }
    Ok((kz - shift) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const LAMBDA: f64 = 0.1;

    fn k0() -> f64 {
        2.0 * PI / LAMBDA
    }

    #[test]
    fn ground_model_links_eta_and_beta() {
        let g = GroundModel::new(LAMBDA, Complex64::new(0.3, -0.1)).unwrap();
        assert_relative_eq!(g.k0(), 2.0 * PI / LAMBDA, max_relative = 1e-15);
        let prod = g.beta() * g.eta();
        assert!((prod - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        // eta = 0.3 - 0.1i <=> beta = 3 + 1i
        assert!((g.beta() - Complex64::new(3.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn ground_model_rejects_active_ground() {
        assert!(GroundModel::new(LAMBDA, Complex64::new(-0.2, 0.1)).is_err());
        assert!(GroundModel::new(-1.0, Complex64::new(0.3, -0.1)).is_err());
    }

    #[test]
    fn ground_model_beta_zero_is_perfect_image_limit() {
        let g = GroundModel::from_beta(LAMBDA, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(g.beta(), Complex64::new(0.0, 0.0));
        assert!(g.eta().re.is_infinite());
    }

    #[test]
    fn contour_spec_validates_w_against_q() {
        assert!(ContourSpec::new(10.0, 10, 5).is_ok());
        assert!(ContourSpec::new(10.0, 9, 5).is_err());
        assert!(ContourSpec::new(0.0, 10, 5).is_err());
        let c = ContourSpec::paper_default();
        assert_eq!((c.t(), c.w(), c.q()), (10.0, 10, 5));
    }

    #[test]
    fn kz_branch_on_real_axis() {
        let k0 = k0();
        // k = 0 -> k0
        let kz = kz_from_k(Complex64::new(0.0, 0.0), k0);
        assert_relative_eq!(kz.re, k0, max_relative = 1e-15);
        assert_eq!(kz.im, 0.0);
        // k = k0 -> 0 (branch point)
        let kz = kz_from_k(Complex64::new(k0, 0.0), k0);
        assert!(kz.norm() < 1e-9 * k0);
        // k = 2 k0 -> i sqrt(3) k0
        let kz = kz_from_k(Complex64::new(2.0 * k0, 0.0), k0);
        assert!(kz.re.abs() < 1e-12 * k0);
        assert_relative_eq!(kz.im, 3.0f64.sqrt() * k0, max_relative = 1e-14);
    }

    #[test]
    fn path_endpoints_and_midpoint() {
        let k0 = k0();
        let t = 10.0;
        let start = kz_on_path(0.0, k0, t);
        assert_eq!(start, Complex64::new(k0, 0.0));
        let end = kz_on_path(t, k0, t);
        assert_eq!(end.re, 0.0);
        assert_relative_eq!(end.im, k0 * t, max_relative = 1e-15);
        let mid = kz_on_path(t / 2.0, k0, t);
        assert_relative_eq!(mid.re, 0.5 * k0, max_relative = 1e-15);
        assert_relative_eq!(mid.im, k0 * t / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn path_roundtrip_through_k() {
        // For any k_z on the contour, kz_from_k(k_from_kz(kz)) returns kz.
        let k0 = k0();
        let t = 10.0;
        for i in 0..=200 {
            let xi = t * i as f64 / 200.0;
            let kz = kz_on_path(xi, k0, t);
            let k = k_from_kz(kz, k0);
            assert!(k.re >= 0.0);
            let back = kz_from_k(k, k0);
            assert!(
                (back - kz).norm() <= 1e-12 * kz.norm().max(k0),
                "xi={xi}: {back} != {kz}"
            );
        }
    }

    #[test]
    fn reflection_examples() {
        let k0 = k0();
        // beta = 0: C = 1 for any kz != 0.
        let c = reflection_coefficient(Complex64::new(0.7 * k0, 0.2 * k0), k0, Complex64::ZERO)
            .unwrap();
        assert!((c - Complex64::ONE).norm() < 1e-15);

        // kz = k0, beta = 3 + i: (1 - (3+i))/(1 + (3+i)) = (-2-i)/(4+i) = (-9-2i)/17.
        let c = reflection_coefficient(Complex64::new(k0, 0.0), k0, Complex64::new(3.0, 1.0))
            .unwrap();
        let expected = Complex64::new(-9.0 / 17.0, -2.0 / 17.0);
        assert!((c - expected).norm() < 1e-14);
        assert_relative_eq!(c.re, -0.529412, max_relative = 1e-5);
        assert_relative_eq!(c.im, -0.117647, max_relative = 1e-5);

        // kz -> infinity: C -> 1.
        let c = reflection_coefficient(
            Complex64::new(1e12 * k0, 0.0),
            k0,
            Complex64::new(3.0, 1.0),
        )
        .unwrap();
        assert!((c - Complex64::ONE).norm() < 1e-10);
    }

    #[test]
    fn reflection_pole_is_reported() {
        let k0 = k0();
        let beta = Complex64::new(3.0, 1.0);
        let err = reflection_coefficient(-k0 * beta, k0, beta).unwrap_err();
        assert!(matches!(err, Error::SingularReflection { .. }));
    }

    #[test]
    fn passivity_on_the_contour() {
        // |C| <= 1 along the whole deformed path when Re(beta) > 0.
        let k0 = k0();
        let beta = Complex64::new(3.0, 1.0);
        for i in 0..=1000 {
            let xi = 10.0 * i as f64 / 1000.0;
            let kz = kz_on_path(xi, k0, 10.0);
            let c = reflection_coefficient(kz, k0, beta).unwrap();
            assert!(c.norm() <= 1.0 + 1e-12, "xi={xi}, |C|={}", c.norm());
        }
    }

    #[test]
    fn pole_clearance_for_paper_ground() {
        let g = GroundModel::new(LAMBDA, Complex64::new(0.3, -0.1)).unwrap();
        let c = ContourSpec::paper_default();
        c.check_pole_clearance(&g).unwrap();

        // beta = -10i is passive (Re eta = 0) but its pole -k0*beta = 10i*k0
        // is exactly the contour endpoint; the contour must be refused.
        let bad = GroundModel::from_beta(LAMBDA, Complex64::new(0.0, -10.0)).unwrap();
        let err = c.check_pole_clearance(&bad).unwrap_err();
        assert!(matches!(err, Error::ContourNearPole { .. }));
    }
}
