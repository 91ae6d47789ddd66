//! Modified Prony method: fit the reflection deviation C(k) - 1 on the
//! deformed contour as a sum of Q complex exponentials, and transform the
//! fit into complex-image coefficients (a_n, b_n).
//!
//! The pipeline mirrors the classical method:
//!
//! 1. sample F(w) = C(k_z(xi_w)) - 1 uniformly at xi_w = T w / W, w = 1..W;
//! 2. the samples satisfy a Q-th order linear difference equation whose
//!    characteristic polynomial has roots zeta_n = exp(B_n T / W); solve the
//!    shifted-sample linear system for the polynomial coefficients by
//!    orthogonal-factorization least squares;
//! 3. extract the roots as eigenvalues of the companion matrix;
//! 4. recover exponents B_n = (W/T) log zeta_n (principal branch) and solve
//!    the Vandermonde system F(w) = sum_n A_n zeta_n^w for the amplitudes,
//!    again by least squares;
//! 5. map (A_n, B_n) into the closed-form image coefficients
//!    a_n = A_n exp(B_n T / (1 - iT)),  b_n = B_n T / (k0 (1 - iT)).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral::{kz_on_path, reflection_coefficient, ContourSpec, GroundModel};

/// Uniform samples of C(k) - 1 along the deformed contour.
#[derive(Debug, Clone)]
pub struct ReflectionSamples {
    contour: ContourSpec,
    values: Vec<Complex64>,
}

impl ReflectionSamples {
    pub fn contour(&self) -> &ContourSpec {
        &self.contour
    }

    /// F(w) for w = 1..W; `values()[w-1]` is the sample at xi = T w / W.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// Sample F(w) = C(k_z(T w / W)) - 1 for w = 1..W.
pub fn sample_reflection(ground: &GroundModel, contour: &ContourSpec) -> Result<ReflectionSamples> {
    contour.check_pole_clearance(ground)?;
    let k0 = ground.k0();
    let beta = ground.beta();
    let t = contour.t();
    let w_count = contour.w();
    let mut values = Vec::with_capacity(w_count);
    for w in 1..=w_count {
        let xi = t * w as f64 / w_count as f64;
        let kz = kz_on_path(xi, k0, t);
        let c = reflection_coefficient(kz, k0, beta)?;
        let v = c - 1.0;
        if !v.is_finite() {
            return Err(Error::IllConditionedFit(format!(
                "non-finite reflection sample at w = {w}"
            )));
        }
        values.push(v);
    }
    Ok(ReflectionSamples {
        contour: *contour,
        values,
    })
}

/// Result of the exponential fit K(xi) ~ sum_n A_n exp(B_n xi).
#[derive(Debug, Clone)]
pub struct ExponentialFit {
    amplitudes: Vec<Complex64>,
    exponents: Vec<Complex64>,
    residual: f64,
}

impl ExponentialFit {
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn exponents(&self) -> &[Complex64] {
        &self.exponents
    }

    /// Max absolute misfit over the W samples, fixed at construction.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// K(xi) = sum_n A_n exp(B_n xi).
    pub fn evaluate(&self, xi: f64) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&self.exponents)
            .map(|(&a, &b)| a * (b * xi).exp())
            .sum()
    }
}

/// Fit Q complex exponentials to the contour samples.
pub fn fit_exponentials(samples: &ReflectionSamples, q: usize) -> Result<ExponentialFit> {
    let w_count = samples.values().len();
    if q == 0 || w_count < 2 * q {
        return Err(Error::InvalidParameter(format!(
            "need W >= 2Q, got W = {w_count}, Q = {q}"
        )));
    }
    let f = samples.values();
    let t = samples.contour().t();
    let scale = f.iter().map(|v| v.norm()).fold(0.0, f64::max);

    // Zero function: short-circuit to the all-zero fit.
    if scale < 1e-300 {
        return Ok(ExponentialFit {
            amplitudes: vec![Complex64::ZERO; q],
            exponents: vec![Complex64::ZERO; q],
            residual: 0.0,
        });
    }

    // Constant samples make the shifted-sample matrix rank one; treat them
    // as a single exponential with B = 0.
    let spread = f
        .iter()
        .map(|v| (v - f[0]).norm())
        .fold(0.0, f64::max);
    if spread <= 1e-14 * scale {
        let mean = f.iter().sum::<Complex64>() / w_count as f64;
        let mut amplitudes = vec![Complex64::ZERO; q];
        amplitudes[0] = mean;
        let exponents = vec![Complex64::ZERO; q];
        let residual = f.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max);
        return Ok(ExponentialFit {
            amplitudes,
            exponents,
            residual,
        });
    }

    // Difference-equation system: rows w = 1..W-Q of
    //   F(w+Q) + C_{Q-1} F(w+Q-1) + ... + C_0 F(w) = 0.
    let rows = w_count - q;
    let a = DMatrix::from_fn(rows, q, |i, j| f[i + j]);
    let rhs = DVector::from_fn(rows, |i, _| -f[i + q]);
    let coeffs = least_squares(&a, &rhs)?;

    // Roots of x^Q + C_{Q-1} x^{Q-1} + ... + C_0 from the companion matrix.
    let roots = companion_eigenvalues(coeffs.as_slice(), 1e-12, 500)?;
    for (i, zi) in roots.iter().enumerate() {
        if zi.norm() < 1e-12 {
            return Err(Error::IllConditionedFit(
                "difference-equation root at zero (degenerate exponent)".into(),
            ));
        }
        for zj in &roots[..i] {
            if (zi - zj).norm() < 1e-8 {
                return Err(Error::IllConditionedFit(format!(
                    "repeated roots near {zi}"
                )));
            }
        }
    }

    // B_n = (W/T) log zeta_n, principal branch. The true exponent is only
    // recoverable when it lies inside the principal strip; a root on the
    // negative real axis sits exactly on the boundary and is ambiguous.
    let samples_per = w_count as f64 / t;
    let mut exponents = Vec::with_capacity(q);
    for z in &roots {
        let b = z.ln() * samples_per;
        if b.im.abs() / samples_per >= PI * (1.0 - 1e-12) {
            return Err(Error::IllConditionedFit(format!(
                "exponent {b} aliases across the principal branch"
            )));
        }
        exponents.push(b);
    }

    // Amplitudes from F(w) = sum_n A_n zeta_n^w, w = 1..W.
    let mut vand = DMatrix::zeros(w_count, q);
    for (j, z) in roots.iter().enumerate() {
        let mut p = Complex64::ONE;
        for i in 0..w_count {
            p *= z;
            vand[(i, j)] = p;
        }
    }
    let fvec = DVector::from_column_slice(f);
    let amplitudes = least_squares(&vand, &fvec)?;

    let amplitudes: Vec<Complex64> = amplitudes.iter().copied().collect();
    let fit = ExponentialFit {
        amplitudes,
        exponents,
        residual: 0.0,
    };
    let residual = f
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let xi = t * (i + 1) as f64 / w_count as f64;
            (fit.evaluate(xi) - v).norm()
        })
        .fold(0.0, f64::max);
    Ok(ExponentialFit { residual, ..fit })
}

/// Complex-image coefficients: C(k) - 1 ~ sum_n a_n exp(-b_n k_z).
#[derive(Debug, Clone)]
pub struct ImageExpansion {
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    k0: f64,
    ground: GroundModel,
    residual: f64,
}

impl ImageExpansion {
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.a
    }

    /// Complex image offsets b_n, in meters.
    pub fn offsets(&self) -> &[Complex64] {
        &self.b
    }

    pub fn order(&self) -> usize {
        self.a.len()
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn ground(&self) -> &GroundModel {
        &self.ground
    }

    /// On-grid residual inherited from the underlying exponential fit.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// sum_n a_n exp(-b_n k_z), the fitted model of C(k) - 1.
    pub fn evaluate(&self, kz: Complex64) -> Complex64 {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(&a, &b)| a * (-b * kz).exp())
            .sum()
    }

    /// Full pipeline: sample the reflection deviation on the contour, fit
    /// Q exponentials, and transform into image coefficients.
    pub fn fit(ground: &GroundModel, contour: &ContourSpec) -> Result<Self> {
        let samples = sample_reflection(ground, contour)?;
        let fit = fit_exponentials(&samples, contour.q())?;
        Ok(to_image_coefficients(&fit, contour, ground))
    }
}

/// Transform the xi-domain fit (A_n, B_n) into k_z-domain image
/// coefficients: a_n = A_n exp(B_n T/(1-iT)), b_n = B_n T/(k0 (1-iT)).
pub fn to_image_coefficients(
    fit: &ExponentialFit,
    contour: &ContourSpec,
    ground: &GroundModel,
) -> ImageExpansion {
    let t = contour.t();
    let k0 = ground.k0();
    let denom = Complex64::new(1.0, -t); // 1 - iT
    let a = fit
        .amplitudes()
        .iter()
        .zip(fit.exponents())
        .map(|(&amp, &b)| amp * (b * t / denom).exp())
        .collect();
    let b = fit
        .exponents()
        .iter()
        .map(|&bn| bn * t / (k0 * denom))
        .collect();
    ImageExpansion {
        a,
        b,
        k0,
        ground: *ground,
        residual: fit.residual(),
    }
}

/// Least squares min ||Ax - b|| by Householder QR (never normal equations:
/// squaring the condition number of the shifted-sample matrix would cost
/// half the digits the fit needs).
fn least_squares(a: &DMatrix<Complex64>, b: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    let qr = a.clone().qr();
    let qtb = qr.q().adjoint() * b;
    qr.r()
        .solve_upper_triangular(&qtb)
        .ok_or_else(|| Error::IllConditionedFit("rank-deficient least-squares system".into()))
}

/// Eigenvalues of the companion matrix of the monic polynomial
/// x^n + c[n-1] x^(n-1) + ... + c[0], by shifted Hessenberg QR iteration.
fn companion_eigenvalues(
    coeffs: &[Complex64],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<Complex64>> {
    let n = coeffs.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![-coeffs[0]]);
    }
    let mut h = DMatrix::zeros(n, n);
    for i in 1..n {
        h[(i, i - 1)] = Complex64::ONE;
    }
    for i in 0..n {
        h[(i, n - 1)] = -coeffs[i];
    }

    let mut eigs = Vec::with_capacity(n);
    let mut hi = n;
    let mut iters = 0;
    while hi > 0 {
        if hi == 1 {
            eigs.push(h[(0, 0)]);
            break;
        }
        // Deflate negligible subdiagonal entries and locate the active block.
        let mut lo = 0;
        for m in (1..hi).rev() {
            let s = h[(m - 1, m - 1)].norm() + h[(m, m)].norm();
            let s = if s == 0.0 { 1.0 } else { s };
            if h[(m, m - 1)].norm() <= tol * s {
                h[(m, m - 1)] = Complex64::ZERO;
                lo = m;
                break;
            }
        }
        if lo == hi - 1 {
            eigs.push(h[(hi - 1, hi - 1)]);
            hi -= 1;
            continue;
        }
        if lo == hi - 2 {
            let (e1, e2) = eig_2x2(
                h[(lo, lo)],
                h[(lo, lo + 1)],
                h[(lo + 1, lo)],
                h[(lo + 1, lo + 1)],
            );
            eigs.push(e1);
            eigs.push(e2);
            hi -= 2;
            continue;
        }

        iters += 1;
        if iters > max_iter {
            return Err(Error::IllConditionedFit(format!(
                "companion eigenvalue iteration did not converge in {max_iter} steps"
            )));
        }
        let shift = wilkinson_shift(
            h[(hi - 2, hi - 2)],
            h[(hi - 2, hi - 1)],
            h[(hi - 1, hi - 2)],
            h[(hi - 1, hi - 1)],
        );
        qr_hessenberg_step(&mut h, lo, hi, shift);
    }
    Ok(eigs)
}

/// Eigenvalues of [[a, b], [c, d]].
fn eig_2x2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let mean = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powi(2) + b * c;
    let root = disc.sqrt();
    (mean + root, mean - root)
}

/// Eigenvalue of the trailing 2x2 closest to the corner entry d.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let (e1, e2) = eig_2x2(a, b, c, d);
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// One explicit single-shift QR sweep on the Hessenberg block [lo, hi).
fn qr_hessenberg_step(h: &mut DMatrix<Complex64>, lo: usize, hi: usize, shift: Complex64) {
    let n = hi - lo;
    if n < 2 {
        return;
    }
    for i in lo..hi {
        h[(i, i)] -= shift;
    }
    // Left Givens sweep annihilating the subdiagonal.
    let mut rotations = Vec::with_capacity(n - 1);
    for m in lo..hi - 1 {
        let (c, s) = givens(h[(m, m)], h[(m + 1, m)]);
        rotations.push((c, s));
        for col in m..hi {
            let x = h[(m, col)];
            let y = h[(m + 1, col)];
            h[(m, col)] = x * c + y * s;
            h[(m + 1, col)] = -x * s.conj() + y * c;
        }
    }
    // Right multiplication by the adjoint rotations: H <- R Q + shift.
    for (idx, &(c, s)) in rotations.iter().enumerate() {
        let m = lo + idx;
        let top = (m + 2).min(hi);
        for row in lo..top {
            let x = h[(row, m)];
            let y = h[(row, m + 1)];
            h[(row, m)] = x * c + y * s.conj();
            h[(row, m + 1)] = -x * s + y * c;
        }
    }
    for i in lo..hi {
        h[(i, i)] += shift;
    }
}

/// Complex Givens rotation: returns (c real, s) such that
/// [[c, s], [-conj(s), c]] * [a, b]^T = [r, 0]^T.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, Complex64::ZERO);
    }
    if na == 0.0 {
        return (0.0, Complex64::ONE);
    }
    let r = na.hypot(nb);
    let c = na / r;
    let s = a * b.conj() / (na * r);
    (c, s)
}
