//! Discrete-aperture link geometry, channel-matrix assembly, and the
//! discrete EDoF functional Xi(R) = (tr R / ||R||_F)^2 with R = H^H H.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::greens::{GreensEvaluator, Point3};

/// Anything that can evaluate a scalar Green's function between two points.
///
/// The channel and continuous-aperture machinery is written against this
/// trait so tests can inject synthetic fields.
pub trait GreensFn: Sync {
    fn green(&self, r_r: &Point3, r_s: &Point3) -> Result<Complex64>;
}

impl GreensFn for GreensEvaluator {
    fn green(&self, r_r: &Point3, r_s: &Point3) -> Result<Complex64> {
        self.evaluate(r_r, r_s)
    }
}

/// Adapter turning a closure into a [`GreensFn`].
pub struct FnGreens<F>(pub F);

impl<F> GreensFn for FnGreens<F>
where
    F: Fn(&Point3, &Point3) -> Result<Complex64> + Sync,
{
    fn green(&self, r_r: &Point3, r_s: &Point3) -> Result<Complex64> {
        (self.0)(r_r, r_s)
    }
}

/// A uniform linear aperture extending along the y axis at a fixed height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UlaGeometry {
    length: f64,
    height: f64,
    center_x: f64,
    center_y: f64,
}

impl UlaGeometry {
    pub fn new(length: f64, height: f64, center_x: f64, center_y: f64) -> Result<Self> {
        if !(length >= 0.0) || !(height >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "aperture length and height must be >= 0, got L={length}, z={height}"
            )));
        }
        Ok(Self {
            length,
            height,
            center_x,
            center_y,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn center_x(&self) -> f64 {
        self.center_x
    }

    pub fn center_y(&self) -> f64 {
        self.center_y
    }

    /// Point at parameter s in [-1/2, 1/2] along the aperture.
    pub fn point_at(&self, s: f64) -> Point3 {
        Point3::new(self.center_x, self.center_y + s * self.length, self.height)
    }
}

/// Two parallel apertures separated horizontally along x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    source: UlaGeometry,
    receiver: UlaGeometry,
    rho: f64,
}

impl LinkGeometry {
    /// Source centered at the origin, receiver at horizontal distance rho;
    /// both arrays run along y with centers aligned at y = 0.
    pub fn new(
        source_length: f64,
        source_height: f64,
        receiver_length: f64,
        receiver_height: f64,
        rho: f64,
    ) -> Result<Self> {
        if !(rho > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "horizontal separation must be positive, got {rho}"
            )));
        }
        Ok(Self {
            source: UlaGeometry::new(source_length, source_height, 0.0, 0.0)?,
            receiver: UlaGeometry::new(receiver_length, receiver_height, rho, 0.0)?,
            rho,
        })
    }

    pub fn source(&self) -> &UlaGeometry {
        &self.source
    }

    pub fn receiver(&self) -> &UlaGeometry {
        &self.receiver
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

/// Antenna positions: the center for a single element, otherwise a uniform
/// endpoints-inclusive grid along the aperture.
pub fn ula_positions(geom: &UlaGeometry, count: usize) -> Vec<Point3> {
    assert!(count >= 1, "antenna count must be positive");
    if count == 1 {
        return vec![geom.point_at(0.0)];
    }
    (0..count)
        .map(|i| geom.point_at(-0.5 + i as f64 / (count - 1) as f64))
        .collect()
}

/// Channel matrix H with H[(m, n)] = G(receiver m, source n).
#[derive(Debug, Clone)]
pub struct ChannelMatrix(DMatrix<Complex64>);

impl ChannelMatrix {
    pub fn from_matrix(h: DMatrix<Complex64>) -> Self {
        Self(h)
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn receivers(&self) -> usize {
        self.0.nrows()
    }

    pub fn sources(&self) -> usize {
        self.0.ncols()
    }
}

/// Assemble the M x N channel matrix; entries are independent Green's
/// evaluations and are computed in parallel.
pub fn build_channel_matrix<G: GreensFn>(
    link: &LinkGeometry,
    n_sources: usize,
    m_receivers: usize,
    green: &G,
) -> Result<ChannelMatrix> {
    let sources = ula_positions(link.source(), n_sources);
    let receivers = ula_positions(link.receiver(), m_receivers);
    let rows: Vec<Vec<Complex64>> = receivers
        .par_iter()
        .map(|r| {
            sources
                .iter()
                .map(|s| green.green(r, s))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    for row in &rows {
        for v in row {
            if !v.is_finite() {
                return Err(Error::DegenerateChannel(
                    "non-finite channel entry".into(),
                ));
            }
        }
    }
    Ok(ChannelMatrix(DMatrix::from_fn(
        m_receivers,
        n_sources,
        |i, j| rows[i][j],
    )))
}

/// Forming R = H^H H explicitly is cheap up to this many sources; beyond,
/// ||R||_F is accumulated column-pair by column-pair to bound memory.
const EXPLICIT_CORRELATION_LIMIT: usize = 2000;

/// Discrete EDoF, Xi = (tr R / ||R||_F)^2, computed from traces and norms
/// without an eigendecomposition.
pub fn edof_discrete(h: &ChannelMatrix) -> Result<f64> {
    let m = &h.0;
    let trace: f64 = m.iter().map(|v| v.norm_sqr()).sum(); // tr(H^H H) = ||H||_F^2
    if trace <= 0.0 {
        return Err(Error::DegenerateChannel("channel matrix is zero".into()));
    }
    let n = m.ncols();
    let fro_sq: f64 = if n <= EXPLICIT_CORRELATION_LIMIT {
        let r = m.adjoint() * m;
        r.iter().map(|v| v.norm_sqr()).sum()
    } else {
        (0..n)
            .into_par_iter()
            .map(|n1| {
                let c1 = m.column(n1);
                let mut acc = c1.dot(&c1).norm_sqr();
                for n2 in (n1 + 1)..n {
                    // R is Hermitian: off-diagonal pairs contribute twice.
                    acc += 2.0 * c1.dotc(&m.column(n2)).norm_sqr();
                }
                acc
            })
            .sum()
    };
    Ok(trace * trace / fro_sq)
}

/// Test oracle: the same functional through the eigenvalues of R.
/// Only intended for small matrices.
pub fn edof_from_eigenvalues(h: &ChannelMatrix) -> Result<f64> {
    let r = h.0.adjoint() * &h.0;
    let eigs = r
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect::<Vec<f64>>();
    let sum: f64 = eigs.iter().sum();
    let sum_sq: f64 = eigs.iter().map(|s| s * s).sum();
    if sum_sq <= 0.0 {
        return Err(Error::DegenerateChannel("channel matrix is zero".into()));
    }
    Ok(sum * sum / sum_sq)
}
