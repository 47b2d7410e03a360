//! Bulk coefficients ε and μ, constant per mesh region.

use std::collections::BTreeMap;

use crate::boundary::ValidationReport;
use crate::linalg::{hermitian_part, max_abs, spectral_norm, ComplexMat3};
use crate::mesh::TetMesh;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    pub eps: ComplexMat3,
    pub mu: ComplexMat3,
}

impl Material {
    pub fn vacuum() -> Self {
        Self {
            eps: ComplexMat3::identity(),
            mu: ComplexMat3::identity(),
        }
    }
}

/// Materials keyed by region id, with μ⁻¹ precomputed.
#[derive(Debug, Clone)]
pub struct MaterialSet {
    regions: BTreeMap<u32, (Material, ComplexMat3)>,
}

impl MaterialSet {
    pub fn new(materials: impl IntoIterator<Item = (u32, Material)>) -> Result<Self> {
        let mut regions = BTreeMap::new();
        for (id, m) in materials {
            let mu_inv = m.mu.try_inverse().ok_or_else(|| {
                Error::Validation(format!("region {id}: μ is not invertible"))
            })?;
            if regions.insert(id, (m, mu_inv)).is_some() {
                return Err(Error::Validation(format!("region {id} defined twice")));
            }
        }
        Ok(Self { regions })
    }

    /// The same material in every region `0..` present in `mesh`.
    pub fn uniform(mesh: &TetMesh, m: Material) -> Result<Self> {
        Self::new(mesh.regions().into_iter().map(|r| (r, m.clone())))
    }

    pub fn vacuum(mesh: &TetMesh) -> Self {
        Self::uniform(mesh, Material::vacuum()).expect("identity is invertible")
    }

    pub fn get(&self, region: u32) -> Option<&Material> {
        self.regions.get(&region).map(|(m, _)| m)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &Material)> {
        self.regions.iter().map(|(&id, (m, _))| (id, m))
    }

    fn entry(&self, region: u32) -> &(Material, ComplexMat3) {
        self.regions
            .get(&region)
            .unwrap_or_else(|| panic!("no material for region {region}"))
    }

    pub fn eps(&self, region: u32) -> &ComplexMat3 {
        &self.entry(region).0.eps
    }

    pub fn mu(&self, region: u32) -> &ComplexMat3 {
        &self.entry(region).0.mu
    }

    pub fn mu_inv(&self, region: u32) -> &ComplexMat3 {
        &self.entry(region).1
    }

    /// `max_x ‖ε(x)‖` over all regions (spectral norm).
    pub fn eps_bound(&self) -> f64 {
        self.regions
            .values()
            .map(|(m, _)| spectral_norm(&m.eps))
            .fold(0.0, f64::max)
    }

    /// Every region of `mesh` must have exactly one material.
    pub fn check_covers(&self, mesh: &TetMesh) -> Result<()> {
        for r in mesh.regions() {
            if !self.regions.contains_key(&r) {
                return Err(Error::Validation(format!("no material for mesh region {r}")));
            }
        }
        Ok(())
    }

    /// Coercivity of ε and μ in every region: Hermitian within `tol` and
    /// smallest eigenvalue at least `c0`.
    pub fn validate(&self, c0: f64, tol: f64) -> ValidationReport {
        let mut report = ValidationReport::default();
        for (&id, (m, _)) in &self.regions {
            for (name, mat) in [("ε", &m.eps), ("μ", &m.mu)] {
                let r = coercivity(mat, c0, tol);
                report.checks.push(crate::boundary::Check {
                    name: format!("region {id}: {name} coercive"),
                    passed: r.0,
                    value: r.1,
                    detail: r.2,
                });
            }
        }
        report
    }
}

/// `(passed, min eigenvalue, detail)` for the coercivity of a single matrix.
pub fn coercivity(m: &ComplexMat3, c0: f64, tol: f64) -> (bool, f64, String) {
    let skew = max_abs(&(m - m.adjoint())) * 0.5;
    let min_eig = hermitian_part(m).symmetric_eigenvalues().min();
    if skew > tol * (1.0 + max_abs(m)) {
        (false, min_eig, format!("not Hermitian, skew part {skew:.3e}"))
    } else {
        (
            min_eig >= c0,
            min_eig,
            format!("min eigenvalue {min_eig:.6e}, required {c0:.3e}"),
        )
    }
}
