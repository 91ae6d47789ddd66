//! Direct numerical evaluation of the Sommerfeld-type spectral integrals.
//!
//! These quadratures are the ground truth the closed-form complex-image
//! Green's function is validated against, plus a numerical check of the
//! Sommerfeld identity itself.
//!
//! Both integrals run over k in [0, inf). The propagating range k in
//! [0, k0] is evaluated after the change of variable to k_z (which maps it
//! to the real segment k_z in [0, k0] and cancels the 1/k_z branch-point
//! singularity exactly: (k/k_z) dk = -dk_z). The evanescent range uses
//! u = sqrt(k^2 - k0^2), again removing the singularity at k = k0:
//!
//! ```text
//! i * int_0^inf J0(k rho) e^{i k_z zeta} (k/k_z) dk
//!   = i * int_0^k0 J0(k(k_z) rho) e^{i k_z zeta} dk_z
//!   + int_0^inf J0(sqrt(k0^2+u^2) rho) e^{-u zeta} du.
//! ```
//!
//! Every integrand factor is then evaluated at real wavenumbers only, where
//! J0 stays bounded; panel counts scale with the total oscillation
//! k0*(rho + zeta) so the rule keeps a fixed number of nodes per radian.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::spectral::{k_from_kz, reflection_coefficient, ContourSpec, GroundModel};
use crate::bessel::j0;

/// Quadrature configuration for the spectral integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    panel_nodes: usize,
    path_panels: usize,
    tail_rel_tol: f64,
    max_tail_panels: usize,
}

impl QuadratureSpec {
    pub fn new(
        panel_nodes: usize,
        path_panels: usize,
        tail_rel_tol: f64,
        max_tail_panels: usize,
    ) -> Result<Self> {
        if panel_nodes < 4 {
            return Err(Error::InvalidParameter(format!(
                "panel_nodes must be >= 4, got {panel_nodes}"
            )));
        }
        if path_panels == 0 || max_tail_panels == 0 {
            return Err(Error::InvalidParameter(
                "panel counts must be positive".into(),
            ));
        }
        if !(tail_rel_tol > 0.0 && tail_rel_tol <= 1e-3) {
            return Err(Error::InvalidParameter(format!(
                "tail_rel_tol must lie in (0, 1e-3], got {tail_rel_tol}"
            )));
        }
        Ok(Self {
            panel_nodes,
            path_panels,
            tail_rel_tol,
            max_tail_panels,
        })
    }

    pub fn panel_nodes(&self) -> usize {
        self.panel_nodes
    }

    pub fn path_panels(&self) -> usize {
        self.path_panels
    }

    pub fn tail_rel_tol(&self) -> f64 {
        self.tail_rel_tol
    }

    pub fn max_tail_panels(&self) -> usize {
        self.max_tail_panels
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            panel_nodes: 32,
            path_panels: 64,
            tail_rel_tol: 1e-10,
            max_tail_panels: 256,
        }
    }
}

/// Right-hand side of the Sommerfeld identity,
/// i * int_0^inf J0(k rho) e^{i k_z zeta} (k / k_z) dk with zeta = z + z'.
///
/// Equals e^{i k0 R} / R, R = sqrt(rho^2 + zeta^2), to quadrature accuracy;
/// the residual against that closed form is the standard health check.
pub fn sommerfeld_identity_rhs(
    rho: f64,
    zeta: f64,
    k0: f64,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    if !(zeta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "zeta must be positive for a decaying tail, got {zeta}"
        )));
    }
    if !(rho >= 0.0) || !(k0 > 0.0) {
        return Err(Error::InvalidParameter(
            "rho must be >= 0 and k0 > 0".into(),
        ));
    }

    let propagating = integrate_propagating(rho, zeta, k0, quad, |_| Ok(Complex64::ONE))?;
    let tail = integrate_tail(rho, zeta, k0, quad, |_| Ok(Complex64::ONE))?;
    Ok(Complex64::new(0.0, 1.0) * propagating + tail)
}

/// Reflected-correction integral of the half-space Green's function,
/// (i/4pi) * int_0^inf e^{i k_z z_sum} k J0(k rho) / k_z * (C(k) - 1) dk,
/// with z_sum = z_r + z_s.
pub fn reflected_integral_oracle(
    rho: f64,
    z_sum: f64,
    ground: &GroundModel,
    contour: &ContourSpec,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    if !(z_sum > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "z_sum must be positive, got {z_sum}"
        )));
    }
    if !(rho >= 0.0) {
        return Err(Error::InvalidParameter("rho must be >= 0".into()));
    }
    contour.check_pole_clearance(ground)?;

    let beta = ground.beta();
    if beta.norm() == 0.0 {
        // C(k) = 1 identically: the integrand vanishes.
        return Ok(Complex64::ZERO);
    }
    let k0 = ground.k0();

    let deviation =
        |kz: Complex64| -> Result<Complex64> { Ok(reflection_coefficient(kz, k0, beta)? - 1.0) };
    let propagating = integrate_propagating(rho, z_sum, k0, quad, deviation)?;
    let tail = integrate_tail(rho, z_sum, k0, quad, deviation)?;
    Ok((Complex64::new(0.0, 1.0) * propagating + tail) / (4.0 * PI))
}

/// int_0^k0 J0(k(k_z) rho) e^{i k_z zeta} * factor(k_z) dk_z over real k_z,
/// split into panels sized by the total phase k0*(rho + zeta).
fn integrate_propagating<F>(
    rho: f64,
    zeta: f64,
    k0: f64,
    quad: &QuadratureSpec,
    factor: F,
) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let phase = k0 * (rho + zeta);
    let panels = quad
        .path_panels
        .max((phase / quad.panel_nodes as f64).ceil() as usize);
    let rule = GaussLegendre::new(quad.panel_nodes);
    let width = k0 / panels as f64;
    let mut total = Complex64::ZERO;
    for p in 0..panels {
        let a = p as f64 * width;
        let b = a + width;
        let mut panel = Complex64::ZERO;
        for (kz, w) in rule.mapped(a, b) {
            let kzc = Complex64::new(kz, 0.0);
            let k = k_from_kz(kzc, k0);
            let value =
                j0(k * rho)? * (Complex64::new(0.0, kz * zeta)).exp() * factor(kzc)?;
            panel += value * w;
        }
        total += panel;
    }
    Ok(total)
}

/// int_0^inf J0(sqrt(k0^2+u^2) rho) e^{-u zeta} * factor(i u) du, panel by
/// panel until the contribution falls below tail_rel_tol of the total.
fn integrate_tail<F>(
    rho: f64,
    zeta: f64,
    k0: f64,
    quad: &QuadratureSpec,
    factor: F,
) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let rule = GaussLegendre::new(quad.panel_nodes);
    // Keep phase (rho) plus decay (zeta) per panel near the node count.
    let width = (quad.panel_nodes as f64 / (rho + zeta)).min(k0);
    let mut total = Complex64::ZERO;
    let mut small_run = 0;
    for p in 0..quad.max_tail_panels {
        let a = p as f64 * width;
        let b = a + width;
        let mut panel = Complex64::ZERO;
        for (u, w) in rule.mapped(a, b) {
            let k = (k0 * k0 + u * u).sqrt();
            let value = j0(Complex64::new(k * rho, 0.0))?
                * (-u * zeta).exp()
                * factor(Complex64::new(0.0, u))?;
            panel += value * w;
        }
        total += panel;
        if panel.norm() <= quad.tail_rel_tol * total.norm() {
            small_run += 1;
            // Two consecutive negligible panels guard against an
            // oscillation zero masquerading as convergence.
            if small_run >= 2 {
                return Ok(total);
            }
        } else {
            small_run = 0;
        }
    }
    let achieved = if total.norm() > 0.0 {
        // Estimate from the last panel width: the next panel is bounded by
        // the decay factor over one width.
        (-(quad.max_tail_panels as f64) * width * zeta).exp()
    } else {
        f64::INFINITY
    };
    Err(Error::TailNotConverged {
        estimate: total,
        achieved,
        panels: quad.max_tail_panels,
    })
}
