use std::collections::BTreeMap;

use crate::boundary::{
    regularize_lambda, validate_lambda, validate_sigma_theta, ImpedancePatch, PatchKind,
    ValidationReport, DEFAULT_RANK_TOL,
};
use crate::linalg::{outer_real, ComplexMat3, Vec3};
use crate::mesh::TetMesh;
use crate::{Error, Result};

/// Default regularisation of tangential kernel directions.
pub const DEFAULT_ETA: f64 = 1e-6;

/// Λ on one boundary patch, with an optional per-patch regularisation.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchCoefficient {
    pub id: u32,
    pub lambda: ComplexMat3,
    pub eta: Option<f64>,
}

/// Impedance coefficients for every boundary patch of a mesh.
#[derive(Debug, Clone)]
pub struct BoundaryConditions {
    patches: BTreeMap<u32, PatchCoefficient>,
    /// Coercivity constant required of Λ on its kernel complement.
    pub c0: f64,
    pub rank_tol: f64,
}

/// The boundary coefficient seen by one facet after regularisation.
#[derive(Debug, Clone)]
pub struct FacetCoefficient {
    pub kind: PatchKind,
    pub normal: Vec3,
    /// `Σ_η`; zero on perfect-conductor facets.
    pub sigma: ComplexMat3,
}

impl BoundaryConditions {
    pub fn new(patches: impl IntoIterator<Item = PatchCoefficient>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for p in patches {
            if let Some(eta) = p.eta {
                if !(eta > 0.0 && eta.is_finite()) {
                    return Err(Error::InvalidArgument(format!(
                        "patch {}: regularisation must be positive, got {eta}",
                        p.id
                    )));
                }
            }
            let id = p.id;
            if map.insert(id, p).is_some() {
                return Err(Error::Validation(format!("patch {id} defined twice")));
            }
        }
        Ok(Self {
            patches: map,
            c0: 1e-12,
            rank_tol: DEFAULT_RANK_TOL,
        })
    }

    /// The same Λ on every patch of `mesh`.
    pub fn uniform(mesh: &TetMesh, lambda: ComplexMat3) -> Self {
        Self::new(mesh.patches().iter().map(|p| PatchCoefficient {
            id: p.id,
            lambda,
            eta: None,
        }))
        .expect("mesh patch ids are unique")
    }

    /// Perfect conductor (`Λ = 0`) on every patch.
    pub fn pec(mesh: &TetMesh) -> Self {
        Self::uniform(mesh, ComplexMat3::zeros())
    }

    /// `Λ = λ (I − ννᵀ)` on every patch, which must therefore be planar.
    pub fn tangential(mesh: &TetMesh, lambda: f64) -> Result<Self> {
        let mut patches = Vec::new();
        for p in mesh.patches() {
            patches.push(PatchCoefficient {
                id: p.id,
                lambda: tangential_impedance(lambda, &Self::planar_normal(mesh, p.id)?),
                eta: None,
            });
        }
        Self::new(patches)
    }

    /// The common normal of a planar patch.
    pub fn planar_normal(mesh: &TetMesh, id: u32) -> Result<Vec3> {
        match Self::patch_normals(mesh, id)?.as_slice() {
            [n] => Ok(*n),
            [] => Err(Error::Validation(format!("patch {id} has no facets"))),
            _ => Err(Error::Validation(format!("patch {id} is not planar"))),
        }
    }

    pub fn with_c0(mut self, c0: f64) -> Self {
        self.c0 = c0;
        self
    }

    pub fn set(&mut self, id: u32, lambda: ComplexMat3, eta: Option<f64>) {
        self.patches.insert(id, PatchCoefficient { id, lambda, eta });
    }

    pub fn get(&self, id: u32) -> Option<&PatchCoefficient> {
        self.patches.get(&id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &PatchCoefficient> {
        self.patches.values()
    }

    fn coefficient(&self, id: u32) -> Result<&PatchCoefficient> {
        self.patches
            .get(&id)
            .ok_or_else(|| Error::Validation(format!("no impedance given for patch {id}")))
    }

    /// Distinct outward normals of the facets of patch `id`.
    pub fn patch_normals(mesh: &TetMesh, id: u32) -> Result<Vec<Vec3>> {
        let mut normals: Vec<Vec3> = Vec::new();
        for f in 0..mesh.num_facets() {
            if mesh.facets()[f].patch != id {
                continue;
            }
            let n = mesh.facet_frame(f)?.normal;
            if !normals.iter().any(|m| (m - n).norm() < 1e-12) {
                normals.push(n);
            }
        }
        Ok(normals)
    }

    /// Admissibility of Λ and coercivity of `Σ + Θ` for every patch of `mesh`,
    /// checked against each distinct facet normal of the patch.
    pub fn validate(&self, mesh: &TetMesh) -> ValidationReport {
        let mut report = ValidationReport::default();
        for tag in mesh.patches() {
            let Some(p) = self.patches.get(&tag.id) else {
                report.checks.push(crate::boundary::Check {
                    name: format!("patch {}: impedance given", tag.id),
                    passed: false,
                    value: 0.0,
                    detail: "no Λ for this patch".into(),
                });
                continue;
            };
            let normals = match Self::patch_normals(mesh, tag.id) {
                Ok(n) => n,
                Err(e) => {
                    report.checks.push(crate::boundary::Check {
                        name: format!("patch {}: facet geometry", tag.id),
                        passed: false,
                        value: 0.0,
                        detail: e.to_string(),
                    });
                    continue;
                }
            };
            for nu in normals {
                let r = validate_lambda(&p.lambda, &nu, self.c0, self.rank_tol);
                let mut checks = r.checks;
                if let Ok(patch) = ImpedancePatch::new(p.id, p.lambda, nu, self.c0, self.rank_tol) {
                    let s = validate_sigma_theta(&patch.sigma, &patch.theta, f64::EPSILON, self.rank_tol);
                    checks.extend(s.checks);
                }
                for mut ch in checks {
                    ch.name = format!("patch {}: {}", p.id, ch.name);
                    report.checks.push(ch);
                }
            }
        }
        report
    }

    /// Validated, regularised coefficient of every boundary facet of `mesh`.
    /// `eta` applies to patches without their own override.
    pub fn facet_coefficients(&self, mesh: &TetMesh, eta: f64) -> Result<Vec<FacetCoefficient>> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "regularisation must be positive, got {eta}"
            )));
        }
        let mut cache: Vec<(u32, Vec3, FacetCoefficient)> = Vec::new();
        let mut out = Vec::with_capacity(mesh.num_facets());
        for f in 0..mesh.num_facets() {
            let id = mesh.facets()[f].patch;
            let nu = mesh.facet_frame(f)?.normal;
            if let Some((_, _, fc)) = cache
                .iter()
                .find(|(pid, n, _)| *pid == id && (n - nu).norm() < 1e-13)
            {
                out.push(fc.clone());
                continue;
            }
            let p = self.coefficient(id)?;
            let patch = ImpedancePatch::new(id, p.lambda, nu, self.c0, self.rank_tol)?;
            let fc = if patch.kind == PatchKind::Pec {
                FacetCoefficient {
                    kind: PatchKind::Pec,
                    normal: nu,
                    sigma: ComplexMat3::zeros(),
                }
            } else {
                let reg = regularize_lambda(&patch, p.eta.unwrap_or(eta), &nu)?;
                FacetCoefficient {
                    kind: patch.kind,
                    normal: nu,
                    sigma: reg.sigma,
                }
            };
            cache.push((id, nu, fc.clone()));
            out.push(fc);
        }
        Ok(out)
    }
}

/// `λ (I − ννᵀ)`: isotropic tangential impedance for a facet with normal `nu`.
pub fn tangential_impedance(lambda: f64, nu: &Vec3) -> ComplexMat3 {
    (ComplexMat3::identity() - outer_real(nu)) * crate::linalg::c(lambda, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::mesh::generate_box_mesh;

    #[test]
    fn pec_box_validates_and_has_zero_sigma() {
        let m = generate_box_mesh(1, 1, 1, [1.0; 3]).unwrap();
        let bc = BoundaryConditions::pec(&m);
        assert!(bc.validate(&m).passed());
        let fc = bc.facet_coefficients(&m, DEFAULT_ETA).unwrap();
        assert_eq!(fc.len(), m.num_facets());
        assert!(fc.iter().all(|f| f.kind == PatchKind::Pec));
    }

    #[test]
    fn isotropic_impedance_needs_per_patch_normals() {
        let m = generate_box_mesh(1, 1, 1, [1.0; 3]).unwrap();
        // Λ = I − e₃e₃ᵀ is admissible only on the z faces
        let bc = BoundaryConditions::uniform(&m, tangential_impedance(1.0, &Vec3::z()));
        let r = bc.validate(&m);
        assert!(!r.passed());
        assert!(r.failures().all(|f| !f.name.starts_with("patch 4") && !f.name.starts_with("patch 5")));
        assert!(bc.facet_coefficients(&m, DEFAULT_ETA).is_err());
    }

    #[test]
    fn mixed_patch_gets_penalty() {
        let m = generate_box_mesh(1, 1, 1, [1.0; 3]).unwrap();
        let mut bc = BoundaryConditions::pec(&m);
        let l = outer_real(&Vec3::x()) * c(2.0, 0.0);
        bc.set(4, l, Some(1e-3));
        let fc = bc.facet_coefficients(&m, DEFAULT_ETA).unwrap();
        let f = m.facets().iter().position(|f| f.patch == 4).unwrap();
        assert_eq!(fc[f].kind, PatchKind::Mixed);
        let expected = outer_real(&Vec3::x()) * c(0.5, 0.0) + outer_real(&Vec3::y()) * c(1e3, 0.0);
        assert!((fc[f].sigma - expected).norm() < 1e-8);
    }

    #[test]
    fn missing_patch_is_reported() {
        let m = generate_box_mesh(1, 1, 1, [1.0; 3]).unwrap();
        let bc = BoundaryConditions::new([]).unwrap();
        assert!(!bc.validate(&m).passed());
        assert!(matches!(bc.facet_coefficients(&m, 1e-6), Err(Error::Validation(_))));
    }
}
