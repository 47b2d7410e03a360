use num_complex::Complex64;

use super::linear::{solve_linear, DEFAULT_LINEAR_TOL};
use crate::fem::{
    assemble_blocks, assemble_rhs, check_frequency, recover_h, BoundaryConditions, DofMap, Sources,
    SystemBlocks, DEFAULT_ETA,
};
use crate::helmholtz::{reduce_source_in, NodalSpace};
use crate::linalg::CVec3;
use crate::material::MaterialSet;
use crate::mesh::TetMesh;
use crate::sparse::{dotc, ComplexVector};
use crate::{Error, Result};

/// Largest relative mismatch accepted by [`power_balance`].
pub const BALANCE_TOL: f64 = 1e-8;

/// What to do when a scheduled absorption exceeds the guaranteed-coercive bound δ₀.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Delta0Policy {
    /// Reject the schedule.
    #[default]
    Enforce,
    /// Accept the schedule and report which entries exceed δ₀.
    Report,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub omega: f64,
    pub delta: f64,
    pub eta: f64,
    pub linear_tol: f64,
    /// Strictly decreasing absorptions for continuation runs.
    pub delta_schedule: Vec<f64>,
    pub delta0_policy: Delta0Policy,
}

impl SolveConfig {
    pub fn new(omega: f64) -> Self {
        Self {
            omega,
            delta: 0.0,
            eta: DEFAULT_ETA,
            linear_tol: DEFAULT_LINEAR_TOL,
            delta_schedule: Vec::new(),
            delta0_policy: Delta0Policy::Enforce,
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_schedule(mut self, schedule: Vec<f64>) -> Self {
        self.delta_schedule = schedule;
        self
    }

    pub fn with_policy(mut self, policy: Delta0Policy) -> Self {
        self.delta0_policy = policy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_frequency(self.omega, self.delta)?;
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidArgument(format!("η must be positive, got {}", self.eta)));
        }
        if !(self.linear_tol > 0.0) {
            return Err(Error::InvalidArgument("linear tolerance must be positive".into()));
        }
        check_schedule(&self.delta_schedule)
    }
}

pub(crate) fn check_schedule(schedule: &[f64]) -> Result<()> {
    if let Some(d) = schedule.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
        return Err(Error::InvalidArgument(format!("scheduled δ must be positive, got {d}")));
    }
    if schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("δ schedule must be strictly decreasing".into()));
    }
    Ok(())
}

/// The terms of the discrete energy identity
/// `−δ ĒᵀM(I)E − ω ĒᵀB(Σ_η)E = Im(Ēᵀb)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    /// `−Im(Ēᵀb)`: power delivered by the sources.
    pub source_power: f64,
    /// `δ ĒᵀM(I)E`
    pub volume_absorbed: f64,
    /// `ω ĒᵀB(Σ_η)E`
    pub boundary_absorbed: f64,
    /// `|lhs − rhs| / (1 + |rhs|)`
    pub mismatch: f64,
}

/// Evaluates the energy identity for a solution `e` (free edges) of the system with right-hand side `b`.
pub fn power_balance(
    blocks: &SystemBlocks,
    omega: f64,
    delta: f64,
    e: &[Complex64],
    b: &[Complex64],
) -> Result<EnergyReport> {
    let report = energy_terms(blocks, omega, delta, e, b);
    if !(report.mismatch <= BALANCE_TOL) {
        return Err(Error::Consistency(format!(
            "energy identity violated: mismatch {:.3e} (source {:.6e}, volume {:.6e}, boundary {:.6e})",
            report.mismatch, report.source_power, report.volume_absorbed, report.boundary_absorbed
        )));
    }
    Ok(report)
}

pub(crate) fn energy_terms(
    blocks: &SystemBlocks,
    omega: f64,
    delta: f64,
    e: &[Complex64],
    b: &[Complex64],
) -> EnergyReport {
    let volume = delta * blocks.mass_identity.quad_form(e).re;
    let boundary = omega * blocks.boundary.quad_form(e).re;
    // Im of the Hermitian blocks is part of the check, not dropped.
    let k = blocks.stiffness.quad_form(e).im;
    let m = blocks.mass_eps.quad_form(e).im;
    let lhs = k - omega * omega * m - volume - boundary;
    let rhs = dotc(e, b).im;
    EnergyReport {
        source_power: -rhs,
        volume_absorbed: volume,
        boundary_absorbed: boundary,
        mismatch: (lhs - rhs).abs() / (1.0 + rhs.abs()),
    }
}

#[derive(Debug, Clone)]
pub struct FieldSolution {
    pub omega: f64,
    pub delta: f64,
    /// Edge coefficients on every edge (zero on eliminated edges).
    pub e: ComplexVector,
    /// Element-wise magnetic field.
    pub h: Vec<CVec3>,
    /// Potential removed from `f_e` before the solve.
    pub chi: ComplexVector,
    pub dofs: DofMap,
    /// Relative residual `‖Ax − b‖/‖b‖` of the final iterate.
    pub residual: f64,
    pub energy: EnergyReport,
    /// `‖E‖_{L²}`
    pub l2_norm: f64,
}

/// Assembled data reusable across frequencies and absorptions.
pub struct Prepared<'a> {
    pub mesh: &'a TetMesh,
    pub materials: &'a MaterialSet,
    pub sources: &'a Sources,
    pub blocks: SystemBlocks,
    pub nodal: NodalSpace,
}

impl<'a> Prepared<'a> {
    pub fn new(
        mesh: &'a TetMesh,
        materials: &'a MaterialSet,
        bcs: &BoundaryConditions,
        sources: &'a Sources,
        eta: f64,
    ) -> Result<Self> {
        let blocks = assemble_blocks(mesh, materials, bcs, eta)?;
        let nodal = NodalSpace::new(mesh, materials)?;
        Ok(Self {
            mesh,
            materials,
            sources,
            blocks,
            nodal,
        })
    }

    /// Source reduction, solve, field recovery and energy check at one `(ω, δ)`.
    pub fn solve(&self, omega: f64, delta: f64, linear_tol: f64) -> Result<FieldSolution> {
        check_frequency(omega, delta)?;
        let reduced = reduce_source_in(&self.nodal, self.mesh, self.materials, omega, &self.sources.f_e)?;
        let sources = Sources {
            f_e: reduced.f_e,
            f_h: self.sources.f_h.clone(),
        };
        let dofs = &self.blocks.dofs;
        let b = assemble_rhs(self.mesh, dofs, &sources, self.materials, omega)?;
        let a = self.blocks.matrix(omega, delta);
        let x = match solve_linear(&a, &b, linear_tol) {
            Ok(x) => x,
            Err(Error::Singular(_)) if delta == 0.0 => return Err(Error::NearResonance { omega }),
            Err(e) => return Err(e),
        };
        let b_norm = crate::sparse::norm2(&b);
        let residual = super::linear::relative_residual(&a, &x, &b, b_norm);
        let energy = power_balance(&self.blocks, omega, delta, &x, &b)?;
        let l2 = self.blocks.mass_identity.quad_form(&x).re.max(0.0).sqrt();
        let e = dofs.expand(&x);
        let h = recover_h(self.mesh, &e, &self.sources.f_h, self.materials, omega)?;
        Ok(FieldSolution {
            omega,
            delta,
            e,
            h,
            chi: reduced.chi,
            dofs: dofs.clone(),
            residual,
            energy,
            l2_norm: l2,
        })
    }
}

/// Solves the absorbing cavity problem at `config.omega`, `config.delta`.
///
/// `f_e` is first replaced by its divergence-free part; the returned field
/// solves the discrete system for that reduced source and the original `f_h`.
pub fn solve_maxwell(
    mesh: &TetMesh,
    materials: &MaterialSet,
    bcs: &BoundaryConditions,
    sources: &Sources,
    config: &SolveConfig,
) -> Result<FieldSolution> {
    config.validate()?;
    Prepared::new(mesh, materials, bcs, sources, config.eta)?.solve(
        config.omega,
        config.delta,
        config.linear_tol,
    )
}

/// Positive root of `δ² + 2ω²‖ε‖δ − 1 = 0`, the largest δ with
/// `1 − δ² ≥ 2δω²‖ε‖`.
pub fn compute_delta0(omega: f64, eps_bound: f64) -> f64 {
    let a = omega * omega * eps_bound;
    // 1 / (a + √(a² + 1)) is the same root without cancellation for large a
    1.0 / (a + a.hypot(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta0_values() {
        assert!((compute_delta0(3.0, 0.0) - 1.0).abs() < 1e-15);
        assert!((compute_delta0(1.0, 1.0) - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        for (w, e) in [(0.1, 2.0), (3.0, 1.4), (50.0, 10.0)] {
            let d = compute_delta0(w, e);
            assert!((1.0 - d * d - 2.0 * d * w * w * e).abs() < 1e-12);
        }
    }

    #[test]
    fn schedule_checks() {
        assert!(check_schedule(&[1e-1, 1e-2]).is_ok());
        assert!(check_schedule(&[1e-2, 1e-1]).is_err());
        assert!(check_schedule(&[1e-2, 0.0]).is_err());
        assert!(SolveConfig::new(0.0).validate().is_err());
        assert!(SolveConfig::new(1.0).with_eta(0.0).validate().is_err());
    }
}
