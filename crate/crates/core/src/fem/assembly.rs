use num_complex::Complex64;
use rayon::prelude::*;

use super::conditions::{BoundaryConditions, FacetCoefficient};
use super::source::Sources;
use super::whitney::{facet_sigma_matrix, mass, stiffness, TetGeometry};
use crate::boundary::PatchKind;
use crate::linalg::{c, ComplexMat3, CVec3, I};
use crate::material::MaterialSet;
use crate::mesh::{EdgeRef, TetMesh};
use crate::quadrature::tet_order2;
use crate::sparse::{ComplexSparseMatrix, ComplexVector};
use crate::{Error, Result};

type Triplets = Vec<(usize, usize, Complex64)>;

/// Edge degrees of freedom after strong elimination of perfect-conductor edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofMap {
    to_reduced: Vec<Option<usize>>,
    free: Vec<usize>,
}

impl DofMap {
    /// Every edge free.
    pub fn all(num_edges: usize) -> Self {
        Self::from_eliminated(&vec![false; num_edges])
    }

    pub fn from_eliminated(eliminated: &[bool]) -> Self {
        let mut to_reduced = vec![None; eliminated.len()];
        let mut free = Vec::new();
        for (e, &gone) in eliminated.iter().enumerate() {
            if !gone {
                to_reduced[e] = Some(free.len());
                free.push(e);
            }
        }
        Self { to_reduced, free }
    }

    /// Eliminates every edge lying on a perfect-conductor facet.
    pub fn from_facets(mesh: &TetMesh, facets: &[FacetCoefficient]) -> Self {
        let mut eliminated = vec![false; mesh.num_edges()];
        for (f, fc) in facets.iter().enumerate() {
            if fc.kind == PatchKind::Pec {
                for r in mesh.facet_edges(f) {
                    eliminated[r.edge] = true;
                }
            }
        }
        Self::from_eliminated(&eliminated)
    }

    pub fn num_edges(&self) -> usize {
        self.to_reduced.len()
    }

    pub fn num_free(&self) -> usize {
        self.free.len()
    }

    pub fn reduced(&self, edge: usize) -> Option<usize> {
        self.to_reduced[edge]
    }

    pub fn global(&self, reduced: usize) -> usize {
        self.free[reduced]
    }

    pub fn is_eliminated(&self, edge: usize) -> bool {
        self.to_reduced[edge].is_none()
    }

    /// Full edge vector with zeros on eliminated edges.
    pub fn expand(&self, reduced: &[Complex64]) -> ComplexVector {
        assert_eq!(reduced.len(), self.free.len(), "reduced vector length");
        let mut full = vec![c(0.0, 0.0); self.num_edges()];
        for (r, &e) in self.free.iter().enumerate() {
            full[e] = reduced[r];
        }
        full
    }

    pub fn restrict(&self, full: &[Complex64]) -> ComplexVector {
        assert_eq!(full.len(), self.num_edges(), "full vector length");
        self.free.iter().map(|&e| full[e]).collect()
    }
}

/// The separately assembled blocks of the system matrix, all on free edges.
#[derive(Debug, Clone)]
pub struct SystemBlocks {
    pub dofs: DofMap,
    /// `∫ μ⁻¹ curl φⱼ · curl φᵢ`
    pub stiffness: ComplexSparseMatrix,
    /// `∫ ε φⱼ · φᵢ`
    pub mass_eps: ComplexSparseMatrix,
    /// `∫ φⱼ · φᵢ`
    pub mass_identity: ComplexSparseMatrix,
    /// `∫_Γ Σ_η (ν×φⱼ) · (ν×φᵢ)`
    pub boundary: ComplexSparseMatrix,
    /// `∫_Γ (ν×φⱼ) · (ν×φᵢ)` over the whole boundary.
    pub boundary_identity: ComplexSparseMatrix,
}

impl SystemBlocks {
    /// `K − ω² M(ε) − iδ M(I) − iω B(Σ_η)`.
    pub fn matrix(&self, omega: f64, delta: f64) -> ComplexSparseMatrix {
        ComplexSparseMatrix::linear_combination(&[
            (c(1.0, 0.0), &self.stiffness),
            (c(-omega * omega, 0.0), &self.mass_eps),
            (c(0.0, -delta), &self.mass_identity),
            (c(0.0, -omega), &self.boundary),
        ])
    }
}

fn scatter<const N: usize>(
    dofs: &DofMap,
    refs: &[EdgeRef; N],
    entry: impl Fn(usize, usize) -> Complex64,
    out: &mut Triplets,
) {
    for i in 0..N {
        let Some(ri) = dofs.reduced(refs[i].edge) else { continue };
        for j in 0..N {
            let Some(rj) = dofs.reduced(refs[j].edge) else { continue };
            let s = refs[i].sign_f64() * refs[j].sign_f64();
            out.push((ri, rj, entry(i, j) * s));
        }
    }
}

/// Checks materials and boundary data before any assembly work.
pub fn validate_problem(
    mesh: &TetMesh,
    materials: &MaterialSet,
    bcs: &BoundaryConditions,
) -> Result<()> {
    materials.check_covers(mesh)?;
    let r = materials.validate(f64::EPSILON, 1e-12);
    if !r.passed() {
        return Err(Error::Validation(r.summary()));
    }
    let r = bcs.validate(mesh);
    if !r.passed() {
        return Err(Error::Admissibility(r.summary()));
    }
    Ok(())
}

/// Assembles all blocks of the system on the free edges.
pub fn assemble_blocks(
    mesh: &TetMesh,
    materials: &MaterialSet,
    bcs: &BoundaryConditions,
    eta: f64,
) -> Result<SystemBlocks> {
    validate_problem(mesh, materials, bcs)?;
    let facets = bcs.facet_coefficients(mesh, eta)?;
    let dofs = DofMap::from_facets(mesh, &facets);
    let n = dofs.num_free();

    let element: Vec<_> = (0..mesh.num_tets())
        .into_par_iter()
        .map(|t| {
            let geo = TetGeometry::new(&mesh.tet_points(t))?;
            let region = mesh.tets()[t].region;
            Ok((
                stiffness(&geo, materials.mu_inv(region)),
                mass(&geo, materials.eps(region)),
                mass(&geo, &ComplexMat3::identity()),
            ))
        })
        .collect::<Result<_>>()?;

    let (mut tk, mut tm, mut ti) = (Triplets::new(), Triplets::new(), Triplets::new());
    for (t, (k, m, mi)) in element.iter().enumerate() {
        let refs = mesh.tet_edges(t);
        scatter(&dofs, refs, |i, j| k[(i, j)], &mut tk);
        scatter(&dofs, refs, |i, j| m[(i, j)], &mut tm);
        scatter(&dofs, refs, |i, j| mi[(i, j)], &mut ti);
    }

    let facet: Vec<_> = (0..mesh.num_facets())
        .into_par_iter()
        .map(|f| {
            let p = mesh.facet_points(f);
            let id = facet_sigma_matrix(&p, &ComplexMat3::identity())?;
            let sigma = match facets[f].kind {
                PatchKind::Pec => None,
                _ => Some(facet_sigma_matrix(&p, &facets[f].sigma)?),
            };
            Ok((sigma, id))
        })
        .collect::<Result<_>>()?;

    let (mut tb, mut tbi) = (Triplets::new(), Triplets::new());
    for (f, (sigma, id)) in facet.iter().enumerate() {
        let refs = mesh.facet_edges(f);
        if let Some(b) = sigma {
            scatter(&dofs, refs, |i, j| b[(i, j)], &mut tb);
        }
        scatter(&dofs, refs, |i, j| id[(i, j)], &mut tbi);
    }

    Ok(SystemBlocks {
        stiffness: ComplexSparseMatrix::from_triplets(n, n, &tk),
        mass_eps: ComplexSparseMatrix::from_triplets(n, n, &tm),
        mass_identity: ComplexSparseMatrix::from_triplets(n, n, &ti),
        boundary: ComplexSparseMatrix::from_triplets(n, n, &tb),
        boundary_identity: ComplexSparseMatrix::from_triplets(n, n, &tbi),
        dofs,
    })
}

/// The system matrix `A = K − ω²M(ε) − iδM(I) − iωB(Σ_η)` on the free edges.
pub fn assemble_system(
    mesh: &TetMesh,
    materials: &MaterialSet,
    bcs: &BoundaryConditions,
    omega: f64,
    delta: f64,
    eta: f64,
) -> Result<(ComplexSparseMatrix, DofMap)> {
    check_frequency(omega, delta)?;
    let blocks = assemble_blocks(mesh, materials, bcs, eta)?;
    Ok((blocks.matrix(omega, delta), blocks.dofs))
}

pub(crate) fn check_frequency(omega: f64, delta: f64) -> Result<()> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidArgument(format!("ω must be positive, got {omega}")));
    }
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!("δ must be non-negative, got {delta}")));
    }
    Ok(())
}

/// Curl-curl matrix on all edges, without boundary elimination.
pub fn assemble_full_stiffness(mesh: &TetMesh, materials: &MaterialSet) -> Result<ComplexSparseMatrix> {
    materials.check_covers(mesh)?;
    let dofs = DofMap::all(mesh.num_edges());
    let element: Vec<_> = (0..mesh.num_tets())
        .into_par_iter()
        .map(|t| {
            let geo = TetGeometry::new(&mesh.tet_points(t))?;
            Ok(stiffness(&geo, materials.mu_inv(mesh.tets()[t].region)))
        })
        .collect::<Result<_>>()?;
    let mut tk = Triplets::new();
    for (t, k) in element.iter().enumerate() {
        scatter(&dofs, mesh.tet_edges(t), |i, j| k[(i, j)], &mut tk);
    }
    let n = mesh.num_edges();
    Ok(ComplexSparseMatrix::from_triplets(n, n, &tk))
}

/// `b[i] = ∫ iω f_e · φᵢ + μ⁻¹ f_h · curl φᵢ` on the free edges.
pub fn assemble_rhs(
    mesh: &TetMesh,
    dofs: &DofMap,
    sources: &Sources,
    materials: &MaterialSet,
    omega: f64,
) -> Result<ComplexVector> {
    let mut b = vec![c(0.0, 0.0); dofs.num_free()];
    if sources.f_e.is_zero() && sources.f_h.is_zero() {
        return Ok(b);
    }
    let (qp, qw) = tet_order2();
    let local: Vec<[Complex64; 6]> = (0..mesh.num_tets())
        .into_par_iter()
        .map(|t| {
            let geo = TetGeometry::new(&mesh.tet_points(t))?;
            let mu_inv = materials.mu_inv(mesh.tets()[t].region);
            let curls = geo.curls();
            let mut out = [c(0.0, 0.0); 6];
            for (l, w) in qp.iter().zip(qw) {
                let x = geo.point(l);
                let fe: CVec3 = sources.f_e.eval(t, &x) * (I * omega);
                let fh: CVec3 = mu_inv * sources.f_h.eval(t, &x);
                let phi = geo.basis(l);
                for i in 0..6 {
                    let v = dot_real(&fe, &phi[i]) + dot_real(&fh, &curls[i]);
                    out[i] += v * (w * geo.volume);
                }
            }
            if out.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                Ok(out)
            } else {
                Err(Error::InvalidArgument(format!("source is not finite in tet {t}")))
            }
        })
        .collect::<Result<_>>()?;
    for (t, v) in local.iter().enumerate() {
        for (i, r) in mesh.tet_edges(t).iter().enumerate() {
            if let Some(k) = dofs.reduced(r.edge) {
                b[k] += v[i] * r.sign_f64();
            }
        }
    }
    Ok(b)
}

#[inline]
pub(crate) fn dot_real(a: &CVec3, b: &crate::linalg::Vec3) -> Complex64 {
    a.x * b.x + a.y * b.y + a.z * b.z
}

/// Edge × vertex incidence: `(G p)` on edge `(a, b)` is `p_b − p_a`.
pub fn discrete_gradient(mesh: &TetMesh) -> ComplexSparseMatrix {
    let mut t = Triplets::with_capacity(2 * mesh.num_edges());
    for (e, &[a, b]) in mesh.edges().iter().enumerate() {
        t.push((e, a, c(-1.0, 0.0)));
        t.push((e, b, c(1.0, 0.0)));
    }
    ComplexSparseMatrix::from_triplets(mesh.num_edges(), mesh.num_vertices(), &t)
}

/// Gradient restricted to free edges (rows) and the vertices with a nodal index (columns).
pub fn reduced_gradient(
    mesh: &TetMesh,
    dofs: &DofMap,
    nodal: &[Option<usize>],
    num_nodal: usize,
) -> ComplexSparseMatrix {
    let mut t = Triplets::new();
    for (e, &[a, b]) in mesh.edges().iter().enumerate() {
        let Some(r) = dofs.reduced(e) else { continue };
        if let Some(ka) = nodal[a] {
            t.push((r, ka, c(-1.0, 0.0)));
        }
        if let Some(kb) = nodal[b] {
            t.push((r, kb, c(1.0, 0.0)));
        }
    }
    ComplexSparseMatrix::from_triplets(dofs.num_free(), num_nodal, &t)
}
