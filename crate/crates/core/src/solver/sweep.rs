use rayon::prelude::*;

use super::maxwell::Prepared;
use crate::fem::{BoundaryConditions, Sources};
use crate::material::MaterialSet;
use crate::mesh::TetMesh;
use crate::{Error, Result};

/// Default absorption for sweeps.
pub const DEFAULT_SWEEP_DELTA: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub eta: f64,
    pub linear_tol: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            eta: crate::fem::DEFAULT_ETA,
            linear_tol: super::DEFAULT_LINEAR_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub omega: f64,
    /// `‖E‖_{L²}`; infinite where the system was singular.
    pub response: f64,
    /// `ω ĒᵀB(Σ_η)E`; NaN where the system was singular.
    pub boundary_absorption: f64,
    /// Relative mismatch of the energy identity; NaN where the system was singular.
    pub energy_mismatch: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Index of the sample that is a strict local maximum.
    pub index: usize,
    pub omega: f64,
    /// Vertex of the parabola through the peak and its two neighbours.
    pub refined_omega: f64,
    pub response: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub delta: f64,
    pub points: Vec<SweepPoint>,
    pub peaks: Vec<Peak>,
}

/// One solve per frequency; peaks of the response are strict interior local maxima.
pub fn frequency_sweep(
    mesh: &TetMesh,
    materials: &MaterialSet,
    bcs: &BoundaryConditions,
    sources: &Sources,
    omegas: &[f64],
    delta: f64,
    options: &SweepOptions,
) -> Result<SweepReport> {
    if omegas.is_empty() {
        return Err(Error::InvalidArgument("frequency list is empty".into()));
    }
    if omegas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("frequencies must be strictly increasing".into()));
    }
    let prepared = Prepared::new(mesh, materials, bcs, sources, options.eta)?;
    let points: Vec<SweepPoint> = omegas
        .par_iter()
        .map(|&omega| match prepared.solve(omega, delta, options.linear_tol) {
            Ok(s) => Ok(SweepPoint {
                omega,
                response: s.l2_norm,
                boundary_absorption: s.energy.boundary_absorbed,
                energy_mismatch: s.energy.mismatch,
            }),
            Err(Error::NearResonance { .. } | Error::Singular(_)) => Ok(SweepPoint {
                omega,
                response: f64::INFINITY,
                boundary_absorption: f64::NAN,
                energy_mismatch: f64::NAN,
            }),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let peaks = find_peaks(&points);
    Ok(SweepReport {
        delta,
        points,
        peaks,
    })
}

/// Strict interior local maxima, refined by a 3-point parabola where all three values are finite.
pub fn find_peaks(points: &[SweepPoint]) -> Vec<Peak> {
    let mut peaks = Vec::new();
    for i in 1..points.len().saturating_sub(1) {
        let (a, b, c) = (&points[i - 1], &points[i], &points[i + 1]);
        if !(b.response > a.response && b.response > c.response) {
            continue;
        }
        let refined = if b.response.is_finite() {
            parabola_vertex((a.omega, a.response), (b.omega, b.response), (c.omega, c.response))
        } else {
            b.omega
        };
        peaks.push(Peak {
            index: i,
            omega: b.omega,
            refined_omega: refined,
            response: b.response,
        });
    }
    peaks
}

/// Abscissa of the vertex of the parabola through three points.
pub fn parabola_vertex(p0: (f64, f64), p1: (f64, f64), p2: (f64, f64)) -> f64 {
    let (x0, y0) = p0;
    let (x1, y1) = p1;
    let (x2, y2) = p2;
    let num = (x1 - x0).powi(2) * (y1 - y2) - (x1 - x2).powi(2) * (y1 - y0);
    let den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    if den == 0.0 {
        x1
    } else {
        (x1 - 0.5 * num / den).clamp(x0, x2)
    }
}
