//! Discrete Helmholtz decompositions on continuous piecewise-linear elements.
//!
//! Gradients of the nodal hat functions are exactly the edge fields `G p`, so
//! the splitting `u = v + ∇ψ` with `v` ε-orthogonal to all interior gradients is
//! exact at the discrete level. Boundary vertices carry homogeneous Dirichlet data.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::fem::{dot_real, field_at, SourceField, TetGeometry};
use crate::linalg::{c, CVec3, I};
use crate::material::MaterialSet;
use crate::mesh::TetMesh;
use crate::quadrature::tet_order2;
use crate::solver::solve_linear;
use crate::sparse::{ComplexSparseMatrix, ComplexVector};
use crate::Result;

/// Tolerance of the scalar solves.
pub const NODAL_SOLVE_TOL: f64 = 1e-12;

/// Interior-vertex P1 space with its ε-weighted stiffness matrix.
#[derive(Debug, Clone)]
pub struct NodalSpace {
    index: Vec<Option<usize>>,
    interior: Vec<usize>,
    stiffness: ComplexSparseMatrix,
}

impl NodalSpace {
    /// Stiffness `S[k][m] = ∫ ε∇λₘ · ∇λₖ` over interior vertices.
    pub fn new(mesh: &TetMesh, materials: &MaterialSet) -> Result<Self> {
        materials.check_covers(mesh)?;
        let on_boundary = mesh.boundary_vertex_mask();
        let mut index = vec![None; mesh.num_vertices()];
        let mut interior = Vec::new();
        for v in 0..mesh.num_vertices() {
            if !on_boundary[v] {
                index[v] = Some(interior.len());
                interior.push(v);
            }
        }
        let local: Vec<_> = (0..mesh.num_tets())
            .into_par_iter()
            .map(|t| {
                let geo = TetGeometry::new(&mesh.tet_points(t))?;
                let eps = materials.eps(mesh.tets()[t].region);
                let g = geo.grads.map(|v| v.map(|x| c(x, 0.0)));
                let mut s = [[c(0.0, 0.0); 4]; 4];
                for m in 0..4 {
                    let eg: CVec3 = eps * g[m];
                    for k in 0..4 {
                        s[k][m] = g[k].dot(&eg) * geo.volume;
                    }
                }
                Ok(s)
            })
            .collect::<Result<_>>()?;
        let mut triplets = Vec::new();
        for (t, s) in local.iter().enumerate() {
            let vs = mesh.tets()[t].vertices;
            for k in 0..4 {
                let Some(rk) = index[vs[k]] else { continue };
                for m in 0..4 {
                    if let Some(rm) = index[vs[m]] {
                        triplets.push((rk, rm, s[k][m]));
                    }
                }
            }
        }
        let n = interior.len();
        Ok(Self {
            index,
            interior,
            stiffness: ComplexSparseMatrix::from_triplets(n, n, &triplets),
        })
    }

    pub fn num_dofs(&self) -> usize {
        self.interior.len()
    }

    pub fn index(&self, vertex: usize) -> Option<usize> {
        self.index[vertex]
    }

    pub fn indices(&self) -> &[Option<usize>] {
        &self.index
    }

    pub fn stiffness(&self) -> &ComplexSparseMatrix {
        &self.stiffness
    }

    /// Vertex vector with zeros on the boundary.
    pub fn expand(&self, nodal: &[Complex64]) -> ComplexVector {
        let mut full = vec![c(0.0, 0.0); self.index.len()];
        for (k, &v) in self.interior.iter().enumerate() {
            full[v] = nodal[k];
        }
        full
    }

    pub fn restrict(&self, full: &[Complex64]) -> ComplexVector {
        self.interior.iter().map(|&v| full[v]).collect()
    }

    /// `∫ f · ∇λₖ` for every interior vertex `k`.
    pub fn gradient_moments(&self, mesh: &TetMesh, f: &SourceField) -> Result<ComplexVector> {
        let mut out = vec![c(0.0, 0.0); self.num_dofs()];
        if f.is_zero() {
            return Ok(out);
        }
        let (qp, qw) = tet_order2();
        let local: Vec<[Complex64; 4]> = (0..mesh.num_tets())
            .into_par_iter()
            .map(|t| {
                let geo = TetGeometry::new(&mesh.tet_points(t))?;
                let mut m = [c(0.0, 0.0); 4];
                for (l, w) in qp.iter().zip(qw) {
                    let fx = f.eval(t, &geo.point(l));
                    for k in 0..4 {
                        m[k] += dot_real(&fx, &geo.grads[k]) * (w * geo.volume);
                    }
                }
                Ok(m)
            })
            .collect::<Result<_>>()?;
        self.scatter(mesh, &local, &mut out);
        Ok(out)
    }

    fn scatter(&self, mesh: &TetMesh, local: &[[Complex64; 4]], out: &mut [Complex64]) {
        for (t, m) in local.iter().enumerate() {
            for (k, &v) in mesh.tets()[t].vertices.iter().enumerate() {
                if let Some(r) = self.index[v] {
                    out[r] += m[k];
                }
            }
        }
    }

    /// `∫ ε u · ∇λₖ` for an edge field `u` and every interior vertex `k`.
    pub fn eps_edge_moments(
        &self,
        mesh: &TetMesh,
        materials: &MaterialSet,
        u: &[Complex64],
    ) -> Result<ComplexVector> {
        let (qp, qw) = tet_order2();
        let local: Vec<[Complex64; 4]> = (0..mesh.num_tets())
            .into_par_iter()
            .map(|t| {
                let geo = TetGeometry::new(&mesh.tet_points(t))?;
                let eps = materials.eps(mesh.tets()[t].region);
                let mut m = [c(0.0, 0.0); 4];
                for (l, w) in qp.iter().zip(qw) {
                    let eu: CVec3 = eps * field_at(mesh, t, l, u);
                    for k in 0..4 {
                        m[k] += dot_real(&eu, &geo.grads[k]) * (w * geo.volume);
                    }
                }
                Ok(m)
            })
            .collect::<Result<_>>()?;
        let mut out = vec![c(0.0, 0.0); self.num_dofs()];
        self.scatter(mesh, &local, &mut out);
        Ok(out)
    }

    fn solve(&self, rhs: &[Complex64]) -> Result<ComplexVector> {
        if self.num_dofs() == 0 {
            return Ok(Vec::new());
        }
        solve_linear(&self.stiffness, rhs, NODAL_SOLVE_TOL)
    }
}

/// Per-element constant `∇p` of a vertex vector `p`.
pub fn nodal_gradients(mesh: &TetMesh, p: &[Complex64]) -> Result<Vec<CVec3>> {
    (0..mesh.num_tets())
        .into_par_iter()
        .map(|t| {
            let geo = TetGeometry::new(&mesh.tet_points(t))?;
            let vs = mesh.tets()[t].vertices;
            Ok((0..4).fold(CVec3::zeros(), |acc, k| {
                acc + geo.grads[k].map(|x| c(x, 0.0)) * p[vs[k]]
            }))
        })
        .collect()
}

/// `f_e` with its discrete gradient part removed.
#[derive(Debug, Clone)]
pub struct ReducedSource {
    /// `f̃_e = f_e − iωε∇χ`
    pub f_e: SourceField,
    /// χ at every vertex (zero on the boundary).
    pub chi: ComplexVector,
}

/// Solves `∫ε∇χ·∇ψ = (iω)⁻¹ ∫ f_e·∇ψ` for all interior hats ψ and returns
/// `f̃_e = f_e − iωε∇χ`, which is orthogonal to every interior gradient.
pub fn reduce_source(
    mesh: &TetMesh,
    materials: &MaterialSet,
    omega: f64,
    f_e: &SourceField,
) -> Result<ReducedSource> {
    let space = NodalSpace::new(mesh, materials)?;
    reduce_source_in(&space, mesh, materials, omega, f_e)
}

pub(crate) fn reduce_source_in(
    space: &NodalSpace,
    mesh: &TetMesh,
    materials: &MaterialSet,
    omega: f64,
    f_e: &SourceField,
) -> Result<ReducedSource> {
    if f_e.is_zero() || space.num_dofs() == 0 {
        return Ok(ReducedSource {
            f_e: f_e.clone(),
            chi: vec![c(0.0, 0.0); mesh.num_vertices()],
        });
    }
    let iw = I * omega;
    let rhs: ComplexVector = space
        .gradient_moments(mesh, f_e)?
        .into_iter()
        .map(|m| m / iw)
        .collect();
    let chi = space.expand(&space.solve(&rhs)?);
    let grads = nodal_gradients(mesh, &chi)?;
    let correction: Vec<CVec3> = grads
        .iter()
        .enumerate()
        .map(|(t, g)| -(materials.eps(mesh.tets()[t].region) * g) * iw)
        .collect();
    Ok(ReducedSource {
        f_e: SourceField::Sum(vec![f_e.clone(), SourceField::per_element(correction)]),
        chi,
    })
}

/// `u = v + Gψ` with `v` ε-orthogonal to every interior discrete gradient.
#[derive(Debug, Clone)]
pub struct Decomposition {
    /// Edge coefficients of the divergence-free part.
    pub v: ComplexVector,
    /// ψ at every vertex (zero on the boundary).
    pub psi: ComplexVector,
    /// Edge coefficients of the gradient part `Gψ`.
    pub gradient: ComplexVector,
}

/// ε-weighted discrete Helmholtz splitting of the edge field `u` (one entry per edge).
pub fn project_div_free(
    mesh: &TetMesh,
    materials: &MaterialSet,
    u: &[Complex64],
) -> Result<Decomposition> {
    let space = NodalSpace::new(mesh, materials)?;
    project_div_free_in(&space, mesh, materials, u)
}

pub(crate) fn project_div_free_in(
    space: &NodalSpace,
    mesh: &TetMesh,
    materials: &MaterialSet,
    u: &[Complex64],
) -> Result<Decomposition> {
    assert_eq!(u.len(), mesh.num_edges(), "edge vector length");
    let rhs = space.eps_edge_moments(mesh, materials, u)?;
    let psi = space.expand(&space.solve(&rhs)?);
    let gradient: ComplexVector = mesh.edges().iter().map(|&[a, b]| psi[b] - psi[a]).collect();
    let v = u.iter().zip(&gradient).map(|(x, g)| x - g).collect();
    Ok(Decomposition { v, psi, gradient })
}
