//! Bessel function of the first kind, order zero, for complex arguments.
//!
//! Every spectral integrand evaluates J0(k*rho) and k may be complex, so the
//! usual real-argument library routines do not apply. Two classical regimes:
//!
//! * power series for |z| <= 12,
//!   J0(z) = sum_m (-1)^m (z/2)^(2m) / (m!)^2, with compensated summation;
//! * Hankel asymptotic expansion for |z| > 12, written through
//!   H0^(1) + H0^(2) so a single term recurrence serves both sums.
//!
//! The switch radius 12 keeps the series cancellation below ~5 digits while
//! the asymptotic tail is already at machine precision; the crossover test
//! below pins the continuity of the seam.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Series/asymptotic switch radius. Tunable; validated by the
/// crossover-continuity test.
const SWITCH_RADIUS: f64 = 12.0;

/// Largest supported |z|. Integrands in this crate stay far below it.
const MAX_MODULUS: f64 = 1e4;

/// J0 grows like e^|Im z|; past this the value overflows f64.
const MAX_IMAG: f64 = 700.0;

/// J0(z) for complex z.
///
/// Relative error <= 1e-10 for |z| <= 100 and <= 1e-8 up to |z| = 1e4.
/// Arguments with |z| > 1e4, or |Im z| large enough that the result cannot
/// be represented in f64, are rejected as unsupported.
pub fn j0(z: Complex64) -> Result<Complex64> {
    let modulus = z.norm();
    if !modulus.is_finite() || modulus > MAX_MODULUS {
        return Err(Error::UnsupportedDomain { modulus });
    }
    if z.im.abs() > MAX_IMAG {
        return Err(Error::UnsupportedDomain { modulus });
    }
    // J0 is even; fold to Re(z) >= 0 so both halves share one evaluation
    // path (this also makes j0(-z) == j0(z) exact by construction).
    let w = if z.re < 0.0 || (z.re == 0.0 && z.im < 0.0) {
        -z
    } else {
        z
    };
    if modulus <= SWITCH_RADIUS {
        Ok(j0_series(w))
    } else {
        Ok(j0_asymptotic(w))
    }
}

/// Power series with Kahan-compensated accumulation.
fn j0_series(z: Complex64) -> Complex64 {
    let q = -z * z * 0.25;
    let mut term = Complex64::ONE;
    let mut sum = Complex64::ONE;
    let mut comp = Complex64::ZERO;
    for m in 1..=60 {
        term = term * q / ((m * m) as f64);
        // Kahan step on both components.
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if term.norm() <= 1e-17 * sum.norm().max(1e-300) {
            break;
        }
    }
    sum
}

/// Hankel asymptotic expansion, J0 = (H0^(1) + H0^(2)) / 2, valid for
/// |arg z| < pi (inputs are folded to Re(z) >= 0 before the call).
fn j0_asymptotic(z: Complex64) -> Complex64 {
    let inv = (2.0 * z).finv();
    let plus = Complex64::new(0.0, 1.0) * inv; //  i/(2z)
    let minus = -plus;

    let mut s_plus = Complex64::ONE;
    let mut s_minus = Complex64::ONE;
    let mut c = 1.0; // Hankel coefficient (0,m)
    let mut p_plus = Complex64::ONE;
    let mut p_minus = Complex64::ONE;
    let mut last = f64::INFINITY;
    for m in 0..20 {
        // (0, m+1) = (0, m) * -(2m+1)^2 / (8 (m+1))
        let f = 2 * m + 1;
        c *= -((f * f) as f64) / (8.0 * (m + 1) as f64);
        p_plus *= plus;
        p_minus *= minus;
        let mag = c.abs() * p_plus.norm();
        if mag >= last {
            break; // divergent asymptotic tail: stop at the smallest term
        }
        last = mag;
        s_plus += c * p_plus;
        s_minus += c * p_minus;
        if mag <= 1e-17 {
            break;
        }
    }

    let chi = z - FRAC_PI_4;
    let i_chi = Complex64::new(0.0, 1.0) * chi;
    let amp = (Complex64::new(2.0 * PI, 0.0) * z).finv().sqrt();
    amp * (i_chi.exp() * s_plus + (-i_chi).exp() * s_minus)
}

/// Integral-representation oracle, (1/pi) * int_0^pi cos(z sin t) dt.
///
/// Independent of the series/asymptotic route; used to cross-check `j0`
/// in tests. Needs |z| modest (the integrand magnitude is ~ e^|Im z|).
pub fn j0_oracle(z: Complex64, nodes: usize) -> Complex64 {
    assert!(nodes >= 64, "oracle needs >= 64 quadrature nodes");
    assert!(z.norm() <= 50.0, "oracle supports |z| <= 50");
    let rule = GaussLegendre::new(nodes);
    let integral = rule.integrate_complex(0.0, PI, |theta| (z * theta.sin()).cos());
    integral / PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn value_at_zero() {
        assert_eq!(j0(Complex64::ZERO).unwrap(), Complex64::ONE);
    }

    #[test]
    fn imaginary_axis_matches_i0() {
        // J0(3i) = I0(3) = 4.880792585865...
        let v = j0(Complex64::new(0.0, 3.0)).unwrap();
        assert_relative_eq!(v.re, 4.880792585865, max_relative = 1e-11);
        assert!(v.im.abs() < 1e-12);
    }

    #[test]
    fn first_real_zero() {
        // Located by bisection on the series oracle; j0 must vanish there.
        let mut lo = 2.0;
        let mut hi = 3.0;
        let f = |x: f64| j0_oracle(Complex64::new(x, 0.0), 128).re;
        assert!(f(lo) > 0.0 && f(hi) < 0.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let root = 0.5 * (lo + hi);
        assert_relative_eq!(root, 2.404825557696, max_relative = 1e-10);
        assert!(j0(Complex64::new(root, 0.0)).unwrap().norm() < 1e-10);
    }

    #[test]
    fn oracle_agrees_with_implementation() {
        let v = j0_oracle(Complex64::new(1.0, 0.0), 128);
        assert_relative_eq!(v.re, 0.765197686558, max_relative = 1e-11);

        let z = Complex64::new(2.0, 2.0);
        let a = j0(z).unwrap();
        let b = j0_oracle(z, 256);
        assert!((a - b).norm() <= 1e-9 * b.norm());
    }

    #[test]
    fn oracle_agrees_on_grid() {
        // Both regimes, real and complex points.
        for &re in &[0.0, 0.5, 3.0, 8.0, 11.9, 14.0, 25.0, 40.0] {
            for &im in &[0.0, -0.7, 1.3, 4.0] {
                let z = Complex64::new(re, im);
                if z.norm() > 45.0 {
                    continue;
                }
                let a = j0(z).unwrap();
                let b = j0_oracle(z, 512);
                assert!(
                    (a - b).norm() <= 1e-10 * b.norm().max(1.0),
                    "z={z}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn crossover_continuity() {
        // Values just below and above the switch radius agree.
        for &angle in &[0.0f64, 0.4, 1.0, 1.5] {
            let dir = Complex64::new(angle.cos(), angle.sin());
            let below = j0(dir * (SWITCH_RADIUS - 1e-9)).unwrap();
            let above = j0(dir * (SWITCH_RADIUS + 1e-9)).unwrap();
            assert!(
                (below - above).norm() <= 1e-10 * below.norm(),
                "angle={angle}: {below} vs {above}"
            );
        }
    }

    #[test]
    fn large_real_arguments() {
        // J0(1000) = 0.024786686152420169... (standard reference value)
        let v = j0(Complex64::new(1000.0, 0.0)).unwrap();
        assert_relative_eq!(v.re, 0.024786686152420, max_relative = 1e-9);
        // J0(10000) = -0.0070963083... ; allow the documented 1e-8
        let v = j0(Complex64::new(1e4, 0.0)).unwrap();
        assert_relative_eq!(v.re, -0.007096342052453, max_relative = 1e-7);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(matches!(
            j0(Complex64::new(2e4, 0.0)),
            Err(Error::UnsupportedDomain { .. })
        ));
        assert!(j0(Complex64::new(100.0, 800.0)).is_err());
    }

    proptest! {
        #[test]
        fn evenness_and_conjugate_symmetry(re in -40.0f64..40.0, im in -8.0f64..8.0) {
            let z = Complex64::new(re, im);
            let v = j0(z).unwrap();
            let v_neg = j0(-z).unwrap();
            prop_assert!((v - v_neg).norm() <= 1e-14 * v.norm().max(1.0));
            let v_conj = j0(z.conj()).unwrap();
            prop_assert!((v.conj() - v_conj).norm() <= 1e-13 * v.norm().max(1.0));
        }
    }
}
