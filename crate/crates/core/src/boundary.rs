//! Pointwise algebra of the impedance coefficient.
//!
//! An impedance matrix Λ relates the tangential traces, `E × ν = Λ((H × ν) × ν)`.
//! When Λ is singular the condition mixes a perfect-conductor constraint on
//! `Z = ker Λ` with an impedance law on `Z⊥`. The weak form instead uses the pair
//!
//! * `Θ = Π_Z`, the orthogonal projector onto the kernel (essential constraint
//!   `Θ(ν × E) = 0`), and
//! * `Σ`, the inverse of `Λ|_{Z⊥}` extended by zero on `Z` (natural boundary term).
//!
//! Λ is admissible when (i) `ν ∈ Z`, (ii) `R(Λ) ⊂ Z⊥`, (iii) Λ is Hermitian and
//! coercive on `Z⊥`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::linalg::{
    c, hermitian_part, max_abs, outer_real, spectral_norm, to_complex, CVec3, ComplexMat3, Vec3,
};
use crate::{Error, Result};

/// Relative singular-value cut used to decide the kernel of Λ.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Orthonormal bases of `ker Λ` and of its orthogonal complement.
#[derive(Debug, Clone)]
pub struct KernelDecomposition {
    pub kernel: Vec<CVec3>,
    pub complement: Vec<CVec3>,
    pub rank: usize,
    pub tol: f64,
}

impl KernelDecomposition {
    pub fn kernel_projector(&self) -> ComplexMat3 {
        projector(&self.kernel)
    }

    pub fn complement_projector(&self) -> ComplexMat3 {
        projector(&self.complement)
    }
}

fn projector(basis: &[CVec3]) -> ComplexMat3 {
    basis
        .iter()
        .fold(ComplexMat3::zeros(), |acc, v| acc + v * v.adjoint())
}

/// Splits `C³` into `ker Λ ⊕ (ker Λ)⊥` using the SVD of Λ. Singular values
/// below `tol · σ_max` count as zero; `Λ = 0` has the whole space as kernel.
pub fn kernel_decomposition(lambda: &ComplexMat3, tol: f64) -> KernelDecomposition {
    let tol = tol.max(0.0);
    let svd = lambda.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let sigma_max = svd.singular_values.max();
    let mut kernel = Vec::new();
    let mut complement = Vec::new();
    for k in 0..3 {
        let v: CVec3 = v_t.row(k).adjoint();
        let s = svd.singular_values[k];
        if sigma_max > 0.0 && s > tol * sigma_max {
            complement.push(v);
        } else {
            kernel.push(v);
        }
    }
    KernelDecomposition {
        rank: complement.len(),
        kernel,
        complement,
        tol,
    }
}

/// Matrix of `P^H M P` for the orthonormal columns `P`.
fn compress(m: &ComplexMat3, basis: &[CVec3]) -> DMatrix<Complex64> {
    let r = basis.len();
    DMatrix::from_fn(r, r, |i, j| (basis[i].adjoint() * m * basis[j])[(0, 0)])
}

fn expand(block: &DMatrix<Complex64>, basis: &[CVec3]) -> ComplexMat3 {
    let mut out = ComplexMat3::zeros();
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            out += basis[i] * basis[j].adjoint() * block[(i, j)];
        }
    }
    out
}

/// Builds `(Σ, Θ)` from an admissible Λ.
pub fn build_sigma_theta(lambda: &ComplexMat3, tol: f64) -> Result<(ComplexMat3, ComplexMat3)> {
    let dec = kernel_decomposition(lambda, tol);
    let theta = dec.kernel_projector();
    if dec.rank == 0 {
        return Ok((ComplexMat3::zeros(), theta));
    }
    let block = compress(lambda, &dec.complement);
    let block_svd = block.clone().svd(false, false);
    let smallest = block_svd.singular_values.min();
    let scale = spectral_norm(lambda);
    if !(smallest > tol * scale) {
        return Err(Error::Admissibility(format!(
            "restriction of the impedance to the kernel complement is singular \
             (smallest singular value {smallest:e}, norm {scale:e})"
        )));
    }
    let inv = block
        .try_inverse()
        .ok_or_else(|| Error::Admissibility("kernel-complement block is not invertible".into()))?;
    Ok((expand(&inv, &dec.complement), theta))
}

/// One named pass/fail entry of a [`ValidationReport`].
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// The measured quantity the check compares against its threshold.
    pub value: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, prefix: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name.starts_with(prefix))
    }

    fn push(&mut self, name: &str, passed: bool, value: f64, detail: String) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            value,
            detail,
        });
    }

    pub fn summary(&self) -> String {
        let failed: Vec<String> = self
            .failures()
            .map(|c| format!("{} ({})", c.name, c.detail))
            .collect();
        if failed.is_empty() {
            "all conditions hold".to_string()
        } else {
            failed.join("; ")
        }
    }
}

pub const CONDITION_NORMAL_IN_KERNEL: &str = "condition (i): normal lies in ker Λ";
pub const CONDITION_RANGE: &str = "condition (ii): range of Λ orthogonal to ker Λ";
pub const CONDITION_COERCIVE: &str = "condition (iii): Λ Hermitian and coercive on (ker Λ)⊥";

/// Checks admissibility of Λ at a boundary point with outward normal `normal`.
/// Deviations are measured against `tol · (1 + ‖Λ‖)`.
pub fn validate_lambda(lambda: &ComplexMat3, normal: &Vec3, c0: f64, tol: f64) -> ValidationReport {
    let mut report = ValidationReport::default();
    let scale = 1.0 + spectral_norm(lambda);
    let nu = to_complex(normal);

    let lam_nu = (lambda * nu).norm();
    report.push(
        CONDITION_NORMAL_IN_KERNEL,
        lam_nu <= tol * scale,
        lam_nu,
        format!("|Λν| = {lam_nu:.3e}"),
    );

    let dec = kernel_decomposition(lambda, tol);
    let leak = spectral_norm(&(dec.kernel_projector() * lambda));
    report.push(
        CONDITION_RANGE,
        leak <= tol * scale,
        leak,
        format!("|Π_Z Λ| = {leak:.3e}"),
    );

    if dec.rank == 0 {
        report.push(CONDITION_COERCIVE, true, f64::INFINITY, "Λ = 0, Z⊥ = {0}".into());
    } else {
        let block = compress(lambda, &dec.complement);
        let skew = (&block - block.adjoint()).norm() * 0.5;
        let herm = (&block + block.adjoint()) * c(0.5, 0.0);
        let min_eig = herm.symmetric_eigenvalues().min();
        let passed = skew <= tol * scale && min_eig >= c0;
        let detail = if skew > tol * scale {
            format!("not Hermitian on Z⊥, skew part {skew:.3e}")
        } else {
            format!("min eigenvalue on Z⊥ = {min_eig:.6e}, required {c0:.3e}")
        };
        report.push(CONDITION_COERCIVE, passed, min_eig, detail);
    }
    report
}

pub const CONDITION_SUM_HERMITIAN: &str = "Σ+Θ Hermitian";
pub const CONDITION_SUM_COERCIVE: &str = "Σ+Θ coercive";

/// Checks that `Σ + Θ` is Hermitian and coercive with constant `c0` on all of `C³`.
pub fn validate_sigma_theta(
    sigma: &ComplexMat3,
    theta: &ComplexMat3,
    c0: f64,
    tol: f64,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    let sum = sigma + theta;
    let skew = max_abs(&(sum - sum.adjoint())) * 0.5;
    report.push(
        CONDITION_SUM_HERMITIAN,
        skew <= tol * (1.0 + max_abs(&sum)),
        skew,
        format!("max |skew part| = {skew:.3e}"),
    );
    let min_eig = hermitian_part(&sum).symmetric_eigenvalues().min();
    report.push(
        CONDITION_SUM_COERCIVE,
        min_eig >= c0,
        min_eig,
        format!("min eigenvalue = {min_eig:.6e}, required {c0:.3e}"),
    );
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatchKind {
    /// `Λ = 0`: perfect electric conductor, `ν × E = 0`.
    Pec,
    /// `ker Λ = span{ν}`: impedance in every tangential polarisation.
    FullImpedance,
    /// Reflection in some tangential polarisation, impedance in the others.
    Mixed,
}

impl PatchKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PatchKind::Pec => "pec",
            PatchKind::FullImpedance => "full_impedance",
            PatchKind::Mixed => "mixed",
        }
    }
}

/// Boundary coefficient of one patch, evaluated for a given outward normal.
#[derive(Debug, Clone)]
pub struct ImpedancePatch {
    pub id: u32,
    pub normal: Vec3,
    pub lambda: ComplexMat3,
    pub decomposition: KernelDecomposition,
    pub theta: ComplexMat3,
    pub sigma: ComplexMat3,
    /// Regularisation added on the tangential part of the kernel; 0 if none.
    pub eta: f64,
    pub kind: PatchKind,
}

fn kind_of(rank: usize) -> PatchKind {
    match rank {
        0 => PatchKind::Pec,
        2 => PatchKind::FullImpedance,
        _ => PatchKind::Mixed,
    }
}

impl ImpedancePatch {
    /// Validates Λ against `normal` and builds Σ, Θ.
    pub fn new(id: u32, lambda: ComplexMat3, normal: Vec3, c0: f64, tol: f64) -> Result<Self> {
        let report = validate_lambda(&lambda, &normal, c0, tol);
        if !report.passed() {
            return Err(Error::Admissibility(format!("patch {id}: {}", report.summary())));
        }
        let decomposition = kernel_decomposition(&lambda, tol);
        let (sigma, theta) = build_sigma_theta(&lambda, tol)?;
        Ok(Self {
            id,
            normal,
            lambda,
            kind: kind_of(decomposition.rank),
            decomposition,
            theta,
            sigma,
            eta: 0.0,
        })
    }

    /// Orthogonal projector onto the tangential part `Z ∩ ν⊥` of the kernel.
    pub fn tangential_kernel_projector(&self) -> ComplexMat3 {
        self.theta - outer_real(&self.normal)
    }
}

/// Replaces Λ by `Λ_η = Λ + η Π_{Z∩ν⊥}`, so that only the normal direction
/// stays in the kernel and `Σ_η = Σ + η⁻¹ Π_{Z∩ν⊥}`.
pub fn regularize_lambda(patch: &ImpedancePatch, eta: f64, normal: &Vec3) -> Result<ImpedancePatch> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "regularisation must be positive, got {eta}"
        )));
    }
    let nn = outer_real(normal);
    let tangential = patch.theta - nn;
    let lambda = patch.lambda + tangential * c(eta, 0.0);
    let sigma = patch.sigma + tangential * c(1.0 / eta, 0.0);

    // Z∩ν⊥ basis: kernel vectors with the normal component removed.
    let nu = to_complex(normal);
    let mut extra: Vec<CVec3> = Vec::new();
    for z in &patch.decomposition.kernel {
        let mut v = z - nu * nu.dotc(z);
        for e in &extra {
            v -= e * e.dotc(&v);
        }
        let n = v.norm();
        if n > 1e-8 {
            extra.push(v / c(n, 0.0));
        }
    }
    let mut complement = patch.decomposition.complement.clone();
    complement.extend(extra);
    let decomposition = KernelDecomposition {
        rank: complement.len(),
        kernel: vec![nu],
        complement,
        tol: patch.decomposition.tol,
    };
    Ok(ImpedancePatch {
        id: patch.id,
        normal: *normal,
        lambda,
        kind: kind_of(decomposition.rank),
        decomposition,
        theta: nn,
        sigma,
        eta,
    })
}
