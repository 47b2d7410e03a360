//! Slow reference implementations for cross-checking the main code paths.
//!
//! Nothing here reuses the basis, quadrature, boundary-algebra or elimination
//! code of [`crate::fem`]: barycentric coordinates come from inverting the
//! affine vertex matrix, integrals use collapsed Gauss–Legendre rules, `Σ_η` is
//! a Moore–Penrose pseudo-inverse, and conductor edges are re-derived from the
//! facet list.

mod gauss;

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, Matrix3, Matrix4, Vector4};
use num_complex::Complex64;

use crate::fem::{BoundaryConditions, Sources};
use crate::linalg::{CVec3, ComplexMat3, Vec3};
use crate::material::MaterialSet;
use crate::mesh::TetMesh;
use crate::{Error, Result};

pub use gauss::{gauss_legendre, triangle_rule, tet_rule};

/// Largest mesh the dense oracle accepts.
pub const MAX_ORACLE_EDGES: usize = 200;

/// Points per direction of the collapsed rules (exact to degree 7 per direction).
const GAUSS_POINTS: usize = 4;

/// Dense counterpart of the assembled system, on the surviving edges.
#[derive(Debug, Clone)]
pub struct DenseSystem {
    pub matrix: DMatrix<Complex64>,
    pub rhs: DVector<Complex64>,
    /// Global ids of the edges kept, in increasing order.
    pub free_edges: Vec<usize>,
}

impl DenseSystem {
    pub fn solve(&self) -> Result<DVector<Complex64>> {
        dense_solve(&self.matrix, &self.rhs)
    }
}

fn cplx(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Affine coefficients of the barycentric coordinates: `λ_k(x) = g_k · x + c_k`.
struct Barycentric {
    grads: [Vec3; 4],
    offsets: [f64; 4],
}

impl Barycentric {
    fn new(p: &[Vec3; 4]) -> Result<Self> {
        // columns (x_k, 1); λ = V⁻¹ (x, 1)
        let v = Matrix4::from_fn(|r, c| if r < 3 { p[c][r] } else { 1.0 });
        let inv = v
            .try_inverse()
            .ok_or_else(|| Error::Degenerate("flat tetrahedron".into()))?;
        let grads = [0, 1, 2, 3].map(|k| Vec3::new(inv[(k, 0)], inv[(k, 1)], inv[(k, 2)]));
        let offsets = [0, 1, 2, 3].map(|k| inv[(k, 3)]);
        Ok(Self { grads, offsets })
    }

    fn eval(&self, x: &Vec3) -> Vector4<f64> {
        Vector4::from_fn(|k, _| self.grads[k].dot(x) + self.offsets[k])
    }

    /// Whitney function of the edge running from local vertex `i` to local vertex `j`.
    fn whitney(&self, i: usize, j: usize, x: &Vec3) -> Vec3 {
        let l = self.eval(x);
        self.grads[j] * l[i] - self.grads[i] * l[j]
    }

    fn whitney_curl(&self, i: usize, j: usize) -> Vec3 {
        self.grads[i].cross(&self.grads[j]) * 2.0
    }
}

/// Local edges of a tet as `(local i, local j, global edge)` oriented from the
/// smaller to the larger global vertex index.
fn oriented_edges(
    tet: &[usize; 4],
    edge_ids: &HashMap<(usize, usize), usize>,
) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::with_capacity(6);
    for i in 0..4 {
        for j in 0..4 {
            if tet[i] < tet[j] {
                out.push((i, j, edge_ids[&(tet[i], tet[j])]));
            }
        }
    }
    out
}

fn edge_lookup(mesh: &TetMesh) -> HashMap<(usize, usize), usize> {
    mesh.edges()
        .iter()
        .enumerate()
        .map(|(k, &[a, b])| ((a.min(b), a.max(b)), k))
        .collect()
}

fn herm_dot(a: &CVec3, b: &CVec3) -> Complex64 {
    // unconjugated, basis functions are real
    a.x * b.x + a.y * b.y + a.z * b.z
}

fn real_c(v: &Vec3) -> CVec3 {
    v.map(cplx)
}

/// Whether Λ is the perfect-conductor coefficient.
fn is_zero(m: &ComplexMat3) -> bool {
    m.iter().all(|z| z.norm() == 0.0)
}

/// `Σ_η = (Λ + η Π)⁺` with Π the projector onto the tangential part of ker Λ.
pub fn oracle_sigma(lambda: &ComplexMat3, normal: &Vec3, eta: f64) -> ComplexMat3 {
    let range_proj = pseudo_inverse(lambda) * lambda;
    let nn = real_c(normal) * real_c(normal).transpose();
    let tangential_kernel = ComplexMat3::identity() - nn - range_proj;
    pseudo_inverse(&(lambda + tangential_kernel * cplx(eta)))
}

/// Moore–Penrose inverse, dropping singular values below `1e-9 σ_max`.
///
/// The singular triplets are read off the Hermitian eigenpairs of
/// `[[0, A], [Aᴴ, 0]]`: eigenvalue `σ` with eigenvector `(u, v)/√2` where
/// `A v = σ u`. This avoids the iterative complex SVD, which can stop early
/// on nearly repeated singular values.
pub fn pseudo_inverse(a: &ComplexMat3) -> ComplexMat3 {
    let h = DMatrix::<Complex64>::from_fn(6, 6, |r, c| match (r < 3, c < 3) {
        (true, false) => a[(r, c - 3)],
        (false, true) => a[(c, r - 3)].conj(),
        _ => cplx(0.0),
    });
    let eig = h.symmetric_eigen();
    let sigma_max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let mut out = ComplexMat3::zeros();
    if sigma_max == 0.0 {
        return out;
    }
    for (k, &s) in eig.eigenvalues.iter().enumerate() {
        if s <= 1e-9 * sigma_max {
            continue;
        }
        let w = eig.eigenvectors.column(k);
        let u = CVec3::new(w[0], w[1], w[2]);
        let v = CVec3::new(w[3], w[4], w[5]);
        out += v * u.adjoint() * cplx(2.0 / s);
    }
    out
}

/// Dense matrix `K − ω²M(ε) − iδM(I) − iωB(Σ_η)` and right-hand side on a small mesh.
pub fn dense_assemble(
    mesh: &TetMesh,
    materials: &MaterialSet,
    bcs: &BoundaryConditions,
    sources: &Sources,
    omega: f64,
    delta: f64,
    eta: f64,
) -> Result<DenseSystem> {
    let ne = mesh.num_edges();
    if ne > MAX_ORACLE_EDGES {
        return Err(Error::InvalidArgument(format!(
            "oracle limited to {MAX_ORACLE_EDGES} edges, mesh has {ne}"
        )));
    }
    let edge_ids = edge_lookup(mesh);
    let mut a = DMatrix::<Complex64>::zeros(ne, ne);
    let mut b = DVector::<Complex64>::zeros(ne);
    let rule = tet_rule(GAUSS_POINTS);
    let iw = Complex64::new(0.0, omega);

    for (t, tet) in mesh.tets().iter().enumerate() {
        let p = tet.vertices.map(|v| mesh.vertices()[v]);
        let bary = Barycentric::new(&p)?;
        let eps = materials.eps(tet.region);
        let mu_inv = materials
            .mu(tet.region)
            .try_inverse()
            .ok_or_else(|| Error::Validation("μ not invertible".into()))?;
        let edges = oriented_edges(&tet.vertices, &edge_ids);
        let jac = Matrix3::from_columns(&[p[1] - p[0], p[2] - p[0], p[3] - p[0]]);
        let det = jac.determinant().abs();
        for (xi, w) in &rule {
            let x = p[0] + jac * xi;
            let wx = w * det;
            let fe = sources.f_e.eval(t, &x);
            let fh = mu_inv * sources.f_h.eval(t, &x);
            for &(i, j, gi) in &edges {
                let phi_i = real_c(&bary.whitney(i, j, &x));
                let curl_i = real_c(&bary.whitney_curl(i, j));
                b[gi] += (herm_dot(&(fe * iw), &phi_i) + herm_dot(&fh, &curl_i)) * wx;
                for &(k, l, gj) in &edges {
                    let phi_j = real_c(&bary.whitney(k, l, &x));
                    let curl_j = real_c(&bary.whitney_curl(k, l));
                    let stiff = herm_dot(&curl_i, &(mu_inv * curl_j));
                    let mass_eps = herm_dot(&phi_i, &(eps * phi_j));
                    let mass_id = herm_dot(&phi_i, &phi_j);
                    a[(gi, gj)] += (stiff
                        - mass_eps * (omega * omega)
                        - mass_id * Complex64::new(0.0, delta))
                        * wx;
                }
            }
        }
    }

    let tri = triangle_rule(GAUSS_POINTS);
    let mut conductor = vec![false; ne];
    for facet in mesh.facets() {
        let coefficient = bcs
            .get(facet.patch)
            .ok_or_else(|| Error::Validation(format!("no impedance for patch {}", facet.patch)))?;
        let fv = facet.vertices;
        if is_zero(&coefficient.lambda) {
            for (u, v) in [(fv[0], fv[1]), (fv[0], fv[2]), (fv[1], fv[2])] {
                conductor[edge_ids[&(u.min(v), u.max(v))]] = true;
            }
            continue;
        }
        // The owning tet is the one containing all three facet vertices.
        let owner = mesh
            .tets()
            .iter()
            .find(|t| fv.iter().all(|v| t.vertices.contains(v)))
            .expect("boundary facet has an owning tet");
        let p = owner.vertices.map(|v| mesh.vertices()[v]);
        let bary = Barycentric::new(&p)?;
        let q = fv.map(|v| mesh.vertices()[v]);
        let cross = (q[1] - q[0]).cross(&(q[2] - q[0]));
        let area2 = cross.norm();
        let opposite = owner.vertices.iter().find(|v| !fv.contains(v)).unwrap();
        let mut normal = cross / area2;
        if normal.dot(&(q[0] - mesh.vertices()[*opposite])) < 0.0 {
            normal = -normal;
        }
        let sigma = oracle_sigma(&coefficient.lambda, &normal, coefficient.eta.unwrap_or(eta));
        let edges = oriented_edges(&owner.vertices, &edge_ids);
        for (st, w) in &tri {
            let x = q[0] + (q[1] - q[0]) * st.0 + (q[2] - q[0]) * st.1;
            let wx = w * area2;
            for &(i, j, gi) in &edges {
                let ti = real_c(&normal.cross(&bary.whitney(i, j, &x)));
                for &(k, l, gj) in &edges {
                    let tj = real_c(&normal.cross(&bary.whitney(k, l, &x)));
                    a[(gi, gj)] -= herm_dot(&ti, &(sigma * tj)) * iw * wx;
                }
            }
        }
    }

    let free_edges: Vec<usize> = (0..ne).filter(|&e| !conductor[e]).collect();
    let n = free_edges.len();
    let matrix = DMatrix::from_fn(n, n, |r, c| a[(free_edges[r], free_edges[c])]);
    let rhs = DVector::from_fn(n, |r, _| b[free_edges[r]]);
    Ok(DenseSystem {
        matrix,
        rhs,
        free_edges,
    })
}

/// Dense LU solve.
pub fn dense_solve(a: &DMatrix<Complex64>, b: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    if a.nrows() == 0 {
        return Ok(DVector::zeros(0));
    }
    a.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::Singular("dense LU: singular matrix".into()))
}

/// A PEC unit-cube eigenfrequency with the dimension of its eigenspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubeResonance {
    pub omega: f64,
    pub multiplicity: usize,
}

/// Eigenfrequencies `π√(m² + n² + p²)` of the unit cube with perfectly
/// conducting walls, `0 ≤ m, n, p ≤ max_index` with at least two indices
/// nonzero. Triples with all indices nonzero carry two polarisations.
pub fn analytic_cube_resonances(max_index: u32) -> Vec<CubeResonance> {
    let mut by_square: std::collections::BTreeMap<u32, usize> = Default::default();
    for m in 0..=max_index {
        for n in 0..=max_index {
            for p in 0..=max_index {
                let nonzero = [m, n, p].iter().filter(|&&k| k > 0).count();
                if nonzero >= 2 {
                    *by_square.entry(m * m + n * n + p * p).or_default() += if nonzero == 3 { 2 } else { 1 };
                }
            }
        }
    }
    by_square
        .into_iter()
        .map(|(s, multiplicity)| CubeResonance {
            omega: std::f64::consts::PI * f64::from(s).sqrt(),
            multiplicity,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_cube_resonances() {
        let r = analytic_cube_resonances(2);
        assert!((r[0].omega - 4.442_882_938_158_366).abs() < 1e-12);
        assert_eq!(r[0].multiplicity, 3);
        assert!((r[1].omega - std::f64::consts::PI * 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(r[1].multiplicity, 2);
        assert!(analytic_cube_resonances(0).is_empty());
    }

    #[test]
    fn pseudo_inverse_sigma_of_mixed_patch() {
        let mut l = ComplexMat3::zeros();
        l[(0, 0)] = cplx(2.0);
        let s = oracle_sigma(&l, &Vec3::z(), 1e-3);
        assert!((s[(0, 0)] - cplx(0.5)).norm() < 1e-12);
        assert!((s[(1, 1)] - cplx(1e3)).norm() < 1e-6);
        assert!(s[(2, 2)].norm() < 1e-12);
    }

    #[test]
    fn pseudo_inverse_penrose_conditions() {
        let a = ComplexMat3::new(
            Complex64::new(1.0, 0.5), Complex64::new(2.0, -1.0), Complex64::new(0.0, 0.3),
            Complex64::new(-0.5, 0.0), Complex64::new(0.2, 0.2), Complex64::new(1.0, 1.0),
            Complex64::new(0.5, 0.5), Complex64::new(2.2, -0.8), Complex64::new(1.0, 1.3),
        );
        for m in [a, a * a.adjoint(), ComplexMat3::zeros()] {
            let p = pseudo_inverse(&m);
            assert!((m * p * m - m).norm() < 1e-12 * (1.0 + m.norm()));
            assert!((p * m * p - p).norm() < 1e-12 * (1.0 + p.norm()));
            assert!(((m * p).adjoint() - m * p).norm() < 1e-12);
            assert!(((p * m).adjoint() - p * m).norm() < 1e-12);
        }
    }

    #[test]
    fn size_guard() {
        let m = crate::mesh::generate_box_mesh(4, 4, 4, [1.0; 3]).unwrap();
        let bcs = BoundaryConditions::pec(&m);
        let r = dense_assemble(&m, &MaterialSet::vacuum(&m), &bcs, &Sources::default(), 1.0, 0.0, 1e-6);
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }
}
