use rayon::prelude::*;

use super::maxwell::{check_schedule, compute_delta0, Delta0Policy, FieldSolution, Prepared};
use crate::fem::{l2_norm, BoundaryConditions, Sources};
use crate::helmholtz::project_div_free_in;
use crate::material::MaterialSet;
use crate::mesh::TetMesh;
use crate::sparse::sub;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct AbsorptionOptions {
    pub eta: f64,
    pub linear_tol: f64,
    pub policy: Delta0Policy,
    /// Also solve at δ = 0 and measure every iterate against it.
    pub compare_direct: bool,
}

impl Default for AbsorptionOptions {
    fn default() -> Self {
        Self {
            eta: crate::fem::DEFAULT_ETA,
            linear_tol: super::DEFAULT_LINEAR_TOL,
            policy: Delta0Policy::Enforce,
            compare_direct: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AbsorptionStep {
    pub delta: f64,
    pub solution: FieldSolution,
    /// `‖E_δ‖_{L²}`
    pub norm: f64,
    /// `‖E_δ − E_previous‖_{L²}`; `None` for the first step.
    pub gap_to_previous: Option<f64>,
    /// `‖∇ψ_δ‖_{L²}` of the ε-Helmholtz splitting `E_δ = v + ∇ψ_δ`.
    pub gradient_norm: f64,
    /// `‖E_δ − E₀‖_{L²}` against the direct δ = 0 solve, when available.
    pub gap_to_direct: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct AbsorptionReport {
    pub omega: f64,
    pub delta0: f64,
    /// Scheduled values above δ₀ (only possible under [`Delta0Policy::Report`]).
    pub above_delta0: Vec<f64>,
    pub steps: Vec<AbsorptionStep>,
    /// The last iterate, taken as the limit field.
    pub limit: FieldSolution,
    pub direct: Option<FieldSolution>,
    /// Why the direct solve is missing, when it was requested.
    pub direct_failure: Option<String>,
    pub resonance_suspected: bool,
}

impl AbsorptionReport {
    /// Least-squares slope of `log gap_to_direct` against `log δ`.
    pub fn direct_gap_slope(&self) -> Option<f64> {
        let pts: Option<Vec<(f64, f64)>> = self
            .steps
            .iter()
            .map(|s| s.gap_to_direct.map(|g| (s.delta, g)))
            .collect();
        pts.and_then(|p| loglog_slope(&p))
    }

    /// Least-squares slope of `log ‖∇ψ_δ‖` against `log δ`.
    pub fn gradient_slope(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self.steps.iter().map(|s| (s.delta, s.gradient_norm)).collect();
        loglog_slope(&pts)
    }
}

/// Least-squares slope of `log y` against `log x`; `None` with fewer than two
/// points or any non-positive value.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return None;
    }
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Solves the absorbing problem along a decreasing δ schedule and records the
/// convergence diagnostics of the continuation towards δ = 0.
pub fn limiting_absorption(
    mesh: &TetMesh,
    materials: &MaterialSet,
    bcs: &BoundaryConditions,
    sources: &Sources,
    omega: f64,
    schedule: &[f64],
    options: &AbsorptionOptions,
) -> Result<AbsorptionReport> {
    if schedule.is_empty() {
        return Err(Error::InvalidArgument("δ schedule is empty".into()));
    }
    check_schedule(schedule)?;
    let delta0 = compute_delta0(omega, materials.eps_bound());
    let above: Vec<f64> = schedule.iter().copied().filter(|&d| d >= delta0).collect();
    if !above.is_empty() && options.policy == Delta0Policy::Enforce {
        return Err(Error::InvalidArgument(format!(
            "δ = {} is not below δ₀ = {delta0:.6e}",
            above[0]
        )));
    }

    let prepared = Prepared::new(mesh, materials, bcs, sources, options.eta)?;
    let solutions: Vec<FieldSolution> = schedule
        .par_iter()
        .map(|&d| prepared.solve(omega, d, options.linear_tol))
        .collect::<Result<_>>()?;

    let (direct, direct_failure) = if options.compare_direct {
        match prepared.solve(omega, 0.0, options.linear_tol) {
            Ok(s) => (Some(s), None),
            Err(e @ (Error::NearResonance { .. } | Error::Residual { .. })) => (None, Some(e.to_string())),
            Err(e) => return Err(e),
        }
    } else {
        (None, None)
    };

    let steps: Vec<AbsorptionStep> = solutions
        .into_par_iter()
        .enumerate()
        .map(|(k, solution)| {
            let split = project_div_free_in(&prepared.nodal, mesh, materials, &solution.e)?;
            let gradient_norm = l2_norm(mesh, &split.gradient);
            let gap_to_direct = direct.as_ref().map(|d| l2_norm(mesh, &sub(&solution.e, &d.e)));
            Ok(AbsorptionStep {
                delta: schedule[k],
                norm: solution.l2_norm,
                gap_to_previous: None,
                gradient_norm,
                gap_to_direct,
                solution,
            })
        })
        .collect::<Result<_>>()?;
    let mut steps = steps;
    for k in 1..steps.len() {
        let gap = l2_norm(mesh, &sub(&steps[k].solution.e, &steps[k - 1].solution.e));
        steps[k].gap_to_previous = Some(gap);
    }

    let gaps: Vec<f64> = steps.iter().filter_map(|s| s.gap_to_previous).collect();
    let gaps_grow = gaps.windows(2).any(|w| w[1] > w[0]);
    let first = steps[0].norm;
    let last = steps[steps.len() - 1].norm;
    let resonance_suspected = gaps_grow || last > 10.0 * first.max(f64::MIN_POSITIVE) || direct_failure.is_some();

    Ok(AbsorptionReport {
        omega,
        delta0,
        above_delta0: above,
        limit: steps[steps.len() - 1].solution.clone(),
        steps,
        direct,
        direct_failure,
        resonance_suspected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [1e-1, 1e-2, 1e-3].iter().map(|&d| (d, 3.0 * d * d)).collect();
        assert!((loglog_slope(&pts).unwrap() - 2.0).abs() < 1e-12);
        assert!(loglog_slope(&pts[..1]).is_none());
        assert!(loglog_slope(&[(1.0, 0.0), (2.0, 1.0)]).is_none());
    }
}
