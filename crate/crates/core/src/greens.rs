//! Free-space and half-space scalar Green's functions.
//!
//! The half-space function comes in two flavors:
//!
//! * the closed-form complex-image sum (fast path): source term, perfect
//!   mirror image, and Q images at complex depths b_n fitted by `prony`;
//! * the spectral quadrature oracle (reference path) built on `sommerfeld`.
//!
//! Both depend on the geometry only through rho (horizontal separation) and
//! z_r + z_s, which is what makes a single (a_n, b_n) set valid anywhere in
//! the upper half-space.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::prony::ImageExpansion;
use crate::sommerfeld::{reflected_integral_oracle, QuadratureSpec};
use crate::spectral::{ContourSpec, GroundModel};

/// Two points closer than this (meters) count as coincident.
pub const COINCIDENCE_TOL: f64 = 1e-9;

/// A point in the upper half-space (meters).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn distance(&self, other: &Point3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    /// Mirror image through the ground plane z = 0.
    pub fn mirrored(&self) -> Point3 {
        Point3::new(self.x, self.y, -self.z)
    }
}

/// Free-space Green's function e^{i k0 D} / (4 pi D).
pub fn g_free(r_r: &Point3, r_s: &Point3, k0: f64) -> Result<Complex64> {
    let d = r_r.distance(r_s);
    if d < COINCIDENCE_TOL {
        return Err(Error::Singularity);
    }
    Ok(Complex64::new(0.0, k0 * d).exp() / (4.0 * PI * d))
}

/// Complex image distance R = sqrt(rho^2 + (z_sum + i b)^2) with Re(R) > 0
/// (Im(R) >= 0 on the purely imaginary tie).
pub fn complex_image_distance(rho: f64, z_sum: f64, b: Complex64) -> Result<Complex64> {
    let depth = Complex64::new(z_sum, 0.0) + Complex64::new(0.0, 1.0) * b;
    let radicand = Complex64::new(rho * rho, 0.0) + depth * depth;
    let r = radicand.sqrt();
    let r = if r.re < 0.0 || (r.re == 0.0 && r.im < 0.0) {
        -r
    } else {
        r
    };
    if r.norm() < COINCIDENCE_TOL {
        return Err(Error::Singularity);
    }
    Ok(r)
}

/// Closed-form half-space Green's function: source + quasi-static image +
/// complex images.
pub fn g_half_closed(
    r_r: &Point3,
    r_s: &Point3,
    ground: &GroundModel,
    expansion: &ImageExpansion,
) -> Result<Complex64> {
    if r_r.z < 0.0 || r_s.z < 0.0 {
        return Err(Error::InvalidParameter(
            "half-space points must have z >= 0".into(),
        ));
    }
    let k0 = ground.k0();
    let direct = g_free(r_r, r_s, k0)?;
    let mirror = r_s.mirrored();
    let image = g_free(r_r, &mirror, k0)?;

    let dx = r_r.x - r_s.x;
    let dy = r_r.y - r_s.y;
    let rho = (dx * dx + dy * dy).sqrt();
    let z_sum = r_r.z + r_s.z;
    let mut sum = direct + image;
    for (&a, &b) in expansion.amplitudes().iter().zip(expansion.offsets()) {
        if a == Complex64::ZERO {
            continue;
        }
        let rn = complex_image_distance(rho, z_sum, b)?;
        sum += a * (Complex64::new(0.0, k0) * rn).exp() / (4.0 * PI * rn);
    }
    Ok(sum)
}

/// Reference half-space Green's function: the two analytic image terms plus
/// the reflected spectral integral evaluated by quadrature.
pub fn g_half_oracle(
    r_r: &Point3,
    r_s: &Point3,
    ground: &GroundModel,
    contour: &ContourSpec,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    if r_r.z < 0.0 || r_s.z < 0.0 {
        return Err(Error::InvalidParameter(
            "half-space points must have z >= 0".into(),
        ));
    }
    let z_sum = r_r.z + r_s.z;
    if !(z_sum > 0.0) {
        return Err(Error::InvalidParameter(
            "oracle needs z_r + z_s > 0 for a decaying tail".into(),
        ));
    }
    let k0 = ground.k0();
    let direct = g_free(r_r, r_s, k0)?;
    let mirror = r_s.mirrored();
    let image = g_free(r_r, &mirror, k0)?;

    let dx = r_r.x - r_s.x;
    let dy = r_r.y - r_s.y;
    let rho = (dx * dx + dy * dy).sqrt();
    let reflected = reflected_integral_oracle(rho, z_sum, ground, contour, quad)?;
    Ok(direct + image + reflected)
}

/// Which Green's function a [`GreensEvaluator`] computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreensMode {
    FreeSpace,
    HalfSpaceClosed,
    HalfSpaceOracle,
}

impl GreensMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            GreensMode::FreeSpace => "free_space",
            GreensMode::HalfSpaceClosed => "half_space_closed",
            GreensMode::HalfSpaceOracle => "half_space_oracle",
        }
    }
}

/// Immutable Green's-function evaluator; safe to share across threads.
#[derive(Debug, Clone)]
pub struct GreensEvaluator {
    ground: GroundModel,
    mode: GreensMode,
    expansion: Option<ImageExpansion>,
    contour: ContourSpec,
    quad: QuadratureSpec,
}

impl GreensEvaluator {
    pub fn free_space(ground: GroundModel) -> Self {
        Self {
            ground,
            mode: GreensMode::FreeSpace,
            expansion: None,
            contour: ContourSpec::paper_default(),
            quad: QuadratureSpec::default(),
        }
    }

    /// Closed-form evaluator from an existing fit. The fit must have been
    /// made for this ground's wavenumber.
    pub fn half_space_closed(ground: GroundModel, expansion: ImageExpansion) -> Result<Self> {
        let rel = (expansion.k0() - ground.k0()).abs() / ground.k0();
        if rel > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "expansion was fitted for k0 = {}, ground has k0 = {}",
                expansion.k0(),
                ground.k0()
            )));
        }
        Ok(Self {
            ground,
            mode: GreensMode::HalfSpaceClosed,
            expansion: Some(expansion),
            contour: ContourSpec::paper_default(),
            quad: QuadratureSpec::default(),
        })
    }

    /// Closed-form evaluator, fitting the image expansion on `contour`.
    pub fn half_space_fitted(ground: GroundModel, contour: ContourSpec) -> Result<Self> {
        let expansion = ImageExpansion::fit(&ground, &contour)?;
        let mut ev = Self::half_space_closed(ground, expansion)?;
        ev.contour = contour;
        Ok(ev)
    }

    pub fn half_space_oracle(
        ground: GroundModel,
        contour: ContourSpec,
        quad: QuadratureSpec,
    ) -> Result<Self> {
        contour.check_pole_clearance(&ground)?;
        Ok(Self {
            ground,
            mode: GreensMode::HalfSpaceOracle,
            expansion: None,
            contour,
            quad,
        })
    }

    pub fn ground(&self) -> &GroundModel {
        &self.ground
    }

    pub fn mode(&self) -> GreensMode {
        self.mode
    }

    pub fn expansion(&self) -> Option<&ImageExpansion> {
        self.expansion.as_ref()
    }

    pub fn evaluate(&self, r_r: &Point3, r_s: &Point3) -> Result<Complex64> {
        match self.mode {
            GreensMode::FreeSpace => g_free(r_r, r_s, self.ground.k0()),
            GreensMode::HalfSpaceClosed => g_half_closed(
                r_r,
                r_s,
                &self.ground,
                self.expansion.as_ref().expect("closed mode has a fit"),
            ),
            GreensMode::HalfSpaceOracle => {
                g_half_oracle(r_r, r_s, &self.ground, &self.contour, &self.quad)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const LAMBDA: f64 = 0.1;

    fn ground() -> GroundModel {
        GroundModel::new(LAMBDA, Complex64::new(0.3, -0.1)).unwrap()
    }

    #[test]
    fn free_space_examples() {
        let k0 = 2.0 * PI / LAMBDA;
        // D1 = lambda: phase wraps to 2 pi, value is 1 / (4 pi lambda).
        let a = Point3::new(0.0, 0.0, 1.0);
        let b = Point3::new(LAMBDA, 0.0, 1.0);
        let g = g_free(&a, &b, k0).unwrap();
        assert_relative_eq!(g.re, 1.0 / (4.0 * PI * LAMBDA), max_relative = 1e-12);
        assert!(g.im.abs() < 1e-12);

        // |G| = 1/(4 pi D) and swap symmetry.
        let p = Point3::new(1.0, -2.0, 3.0);
        let q = Point3::new(-0.5, 0.7, 5.0);
        let g1 = g_free(&p, &q, k0).unwrap();
        assert_relative_eq!(
            g1.norm(),
            1.0 / (4.0 * PI * p.distance(&q)),
            max_relative = 1e-13
        );
        assert_eq!(g1, g_free(&q, &p, k0).unwrap());

        assert!(matches!(g_free(&p, &p, k0), Err(Error::Singularity)));
    }

    #[test]
    fn image_distance_cases() {
        let r = complex_image_distance(3.0, 4.0, Complex64::ZERO).unwrap();
        assert_relative_eq!(r.re, 5.0, max_relative = 1e-14);
        assert_eq!(r.im, 0.0);

        let r = complex_image_distance(0.0, 2.0, Complex64::ZERO).unwrap();
        assert_relative_eq!(r.re, 2.0, max_relative = 1e-14);

        let b = Complex64::new(-0.3, 0.2);
        let r = complex_image_distance(1.0, 1.0, b).unwrap();
        assert!(r.re > 0.0);
        let depth = Complex64::new(1.0, 0.0) + Complex64::new(0.0, 1.0) * b;
        let radicand = Complex64::new(1.0, 0.0) + depth * depth;
        assert!((r * r - radicand).norm() <= 1e-12 * radicand.norm());
    }

    #[test]
    fn beta_zero_reduces_to_source_plus_mirror() {
        let pec = GroundModel::from_beta(LAMBDA, Complex64::ZERO).unwrap();
        let contour = ContourSpec::paper_default();
        let ev = GreensEvaluator::half_space_fitted(pec, contour).unwrap();
        let k0 = pec.k0();
        let r_s = Point3::new(0.0, 0.0, 2.0);
        let r_r = Point3::new(3.0, 1.0, 4.0);
        let closed = ev.evaluate(&r_r, &r_s).unwrap();
        let expect = g_free(&r_r, &r_s, k0).unwrap() + g_free(&r_r, &r_s.mirrored(), k0).unwrap();
        assert!((closed - expect).norm() <= 1e-10 * expect.norm());

        // The oracle agrees too: the reflected integral vanishes.
        let oracle =
            g_half_oracle(&r_r, &r_s, &pec, &contour, &QuadratureSpec::default()).unwrap();
        assert!((oracle - expect).norm() <= 1e-10 * expect.norm());
    }

    #[test]
    fn closed_matches_oracle_at_paper_point() {
        let ground = ground();
        let contour = ContourSpec::paper_default();
        let quad = QuadratureSpec::default();
        let r_s = Point3::new(0.0, 0.0, 5.0);
        let r_r = Point3::new(10.0, 0.0, 5.0);
        let ev = GreensEvaluator::half_space_fitted(ground, contour).unwrap();
        let closed = ev.evaluate(&r_r, &r_s).unwrap();
        let oracle = g_half_oracle(&r_r, &r_s, &ground, &contour, &quad).unwrap();
        let rel = (closed - oracle).norm() / oracle.norm();
        assert!(rel <= 1e-2, "closed vs oracle: {rel:.3e}");
    }

    #[test]
    fn reciprocity() {
        let ground = ground();
        let contour = ContourSpec::paper_default();
        let ev = GreensEvaluator::half_space_fitted(ground, contour).unwrap();
        let a = Point3::new(0.0, 1.0, 2.0);
        let b = Point3::new(7.0, -3.0, 6.0);
        let g1 = ev.evaluate(&a, &b).unwrap();
        let g2 = ev.evaluate(&b, &a).unwrap();
        assert!((g1 - g2).norm() <= 1e-12 * g1.norm());

        let quad = QuadratureSpec::default();
        let o1 = g_half_oracle(&a, &b, &ground, &contour, &quad).unwrap();
        let o2 = g_half_oracle(&b, &a, &ground, &contour, &quad).unwrap();
        assert!((o1 - o2).norm() <= 1e-10 * o1.norm());
    }

    #[test]
    fn free_space_dominates_at_height() {
        // With rho fixed, raising both endpoints pushes the image terms away.
        let ground = ground();
        let ev = GreensEvaluator::half_space_fitted(ground, ContourSpec::paper_default()).unwrap();
        let mut last = f64::INFINITY;
        for &z in &[5.0, 20.0, 50.0] {
            let r_s = Point3::new(0.0, 0.0, z);
            let r_r = Point3::new(10.0, 0.0, z);
            let half = ev.evaluate(&r_r, &r_s).unwrap();
            let free = g_free(&r_r, &r_s, ground.k0()).unwrap();
            let rel = (half - free).norm() / free.norm();
            assert!(rel < last, "z={z}: {rel} !< {last}");
            last = rel;
        }
    }

    #[test]
    fn up_down_asymmetry_of_half_space() {
        // Fig. 3 geometry: source at (0,0,5), observation plane x = 10.
        let ground = ground();
        let ev = GreensEvaluator::half_space_fitted(ground, ContourSpec::paper_default()).unwrap();
        let src = Point3::new(0.0, 0.0, 5.0);
        let low = ev.evaluate(&Point3::new(10.0, 0.0, 2.0), &src).unwrap();
        let high = ev.evaluate(&Point3::new(10.0, 0.0, 8.0), &src).unwrap();
        assert!(
            (low - high).norm() > 1e-6 * low.norm().max(high.norm()),
            "mirror symmetry should be broken: {low} vs {high}"
        );

        // Free space is symmetric about the source height.
        let free = GreensEvaluator::free_space(ground);
        let f_low = free.evaluate(&Point3::new(10.0, 0.0, 2.0), &src).unwrap();
        let f_high = free.evaluate(&Point3::new(10.0, 0.0, 8.0), &src).unwrap();
        assert!((f_low - f_high).norm() <= 1e-13 * f_low.norm());
    }

    #[test]
    fn evaluator_rejects_mismatched_wavenumber() {
        let fit_ground = ground();
        let expansion =
            ImageExpansion::fit(&fit_ground, &ContourSpec::paper_default()).unwrap();
        let other = GroundModel::new(0.2, Complex64::new(0.3, -0.1)).unwrap();
        assert!(GreensEvaluator::half_space_closed(other, expansion).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn image_distances_have_positive_real_part(
            rho in 0.0f64..60.0,
            z_sum in 0.01f64..120.0,
        ) {
            let expansion = ImageExpansion::fit(&ground(), &ContourSpec::paper_default()).unwrap();
            for &b in expansion.offsets() {
                let r = complex_image_distance(rho, z_sum, b).unwrap();
                prop_assert!(r.re > 0.0, "rho={rho} z={z_sum} b={b}: R={r}");
            }
        }
    }
}
