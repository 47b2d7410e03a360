use nalgebra::{Matrix3, SMatrix};
use num_complex::Complex64;

use crate::linalg::{c, ComplexMat3, CVec3, Vec3};
use crate::mesh::{TET_EDGES, TRI_EDGES};
use crate::quadrature::{tet_order2, tri_order2};
use crate::{Error, Result};

pub type ElementMatrix = SMatrix<Complex64, 6, 6>;
pub type FacetMatrix = Matrix3<Complex64>;

/// Barycentric gradients and volume of a tetrahedron.
#[derive(Debug, Clone, Copy)]
pub struct TetGeometry {
    pub points: [Vec3; 4],
    pub volume: f64,
    pub grads: [Vec3; 4],
}

impl TetGeometry {
    pub fn new(points: &[Vec3; 4]) -> Result<Self> {
        let jac = Matrix3::from_columns(&[
            points[1] - points[0],
            points[2] - points[0],
            points[3] - points[0],
        ]);
        let det = jac.determinant();
        let scale = (points[1] - points[0])
            .norm()
            .max((points[2] - points[0]).norm())
            .max((points[3] - points[0]).norm());
        if !(det.abs() > 1e-14 * scale.powi(3)) {
            return Err(Error::Degenerate(format!("tetrahedron with volume {:e}", det / 6.0)));
        }
        let inv = jac.try_inverse().ok_or_else(|| Error::Degenerate("singular Jacobian".into()))?;
        let g1: Vec3 = inv.row(0).transpose();
        let g2: Vec3 = inv.row(1).transpose();
        let g3: Vec3 = inv.row(2).transpose();
        Ok(Self {
            points: *points,
            volume: det.abs() / 6.0,
            grads: [-(g1 + g2 + g3), g1, g2, g3],
        })
    }

    /// Point with barycentric coordinates `l`.
    pub fn point(&self, l: &[f64; 4]) -> Vec3 {
        self.points[0] * l[0] + self.points[1] * l[1] + self.points[2] * l[2] + self.points[3] * l[3]
    }

    /// Local Whitney functions `λᵢ∇λⱼ − λⱼ∇λᵢ` at `l`, in [`TET_EDGES`] order.
    pub fn basis(&self, l: &[f64; 4]) -> [Vec3; 6] {
        TET_EDGES.map(|[i, j]| self.grads[j] * l[i] - self.grads[i] * l[j])
    }

    /// Local Whitney curls `2∇λᵢ × ∇λⱼ`, constant on the element.
    pub fn curls(&self) -> [Vec3; 6] {
        TET_EDGES.map(|[i, j]| self.grads[i].cross(&self.grads[j]) * 2.0)
    }
}

/// Local curl-curl and mass matrices of one tetrahedron with constant ε and μ:
/// `K[i][j] = ∫ μ⁻¹ curl φⱼ · curl φᵢ`, `M[i][j] = ∫ ε φⱼ · φᵢ`.
/// Rows and columns follow the local edge orientation (lower local index first).
pub fn element_matrices(
    points: &[Vec3; 4],
    eps: &ComplexMat3,
    mu: &ComplexMat3,
) -> Result<(ElementMatrix, ElementMatrix)> {
    let mu_inv = mu
        .try_inverse()
        .ok_or_else(|| Error::Validation("μ is not invertible".into()))?;
    let geo = TetGeometry::new(points)?;
    Ok((stiffness(&geo, &mu_inv), mass(&geo, eps)))
}

pub(crate) fn stiffness(geo: &TetGeometry, mu_inv: &ComplexMat3) -> ElementMatrix {
    let curls = geo.curls().map(|v| v.map(|x| c(x, 0.0)));
    let mut k = ElementMatrix::zeros();
    for j in 0..6 {
        let mc: CVec3 = mu_inv * curls[j];
        for i in 0..6 {
            k[(i, j)] = curls[i].dot(&mc) * geo.volume;
        }
    }
    k
}

pub(crate) fn mass(geo: &TetGeometry, eps: &ComplexMat3) -> ElementMatrix {
    let (points, weights) = tet_order2();
    let mut m = ElementMatrix::zeros();
    for (l, w) in points.iter().zip(weights) {
        let phi = geo.basis(l).map(|v| v.map(|x| c(x, 0.0)));
        for j in 0..6 {
            let ep: CVec3 = eps * phi[j];
            for i in 0..6 {
                m[(i, j)] += phi[i].dot(&ep) * (w * geo.volume);
            }
        }
    }
    m
}

/// Surface barycentric gradients of a triangle, together with its unit normal and area.
pub(crate) fn triangle_gradients(points: &[Vec3; 3]) -> Result<([Vec3; 3], Vec3, f64)> {
    let e1 = points[1] - points[0];
    let e2 = points[2] - points[0];
    let n = e1.cross(&e2);
    let twice_area = n.norm();
    let scale = e1.norm().max(e2.norm());
    if !(twice_area > 1e-14 * scale * scale) {
        return Err(Error::Degenerate("facet with zero area".into()));
    }
    let nu = n / twice_area;
    // ∇λ_k is perpendicular to the opposite side, scaled by 1 / height.
    let grads = [0, 1, 2].map(|k| {
        let opp = points[(k + 2) % 3] - points[(k + 1) % 3];
        nu.cross(&opp) / twice_area
    });
    Ok((grads, nu, 0.5 * twice_area))
}

/// Facet boundary matrix `B[i][j] = ∫ Σ (ν×φⱼ) · (ν×φᵢ)` over the three facet edges,
/// in [`TRI_EDGES`] order with local orientation. The `iω` factor is not included.
pub fn facet_sigma_matrix(points: &[Vec3; 3], sigma: &ComplexMat3) -> Result<FacetMatrix> {
    let (grads, nu, area) = triangle_gradients(points)?;
    let (qp, qw) = tri_order2();
    let mut b = FacetMatrix::zeros();
    for (l, w) in qp.iter().zip(qw) {
        let traces: [CVec3; 3] = TRI_EDGES.map(|[i, j]| {
            let phi = grads[j] * l[i] - grads[i] * l[j];
            nu.cross(&phi).map(|x| c(x, 0.0))
        });
        for j in 0..3 {
            let st: CVec3 = sigma * traces[j];
            for i in 0..3 {
                b[(i, j)] += traces[i].dot(&st) * (w * area);
            }
        }
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real_mat3;

    fn reference() -> [Vec3; 4] {
        [
            Vec3::zeros(),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(0.0, 0.0, 1.0),
        ]
    }

    #[test]
    fn reference_tet_curl_and_diagonal() {
        let geo = TetGeometry::new(&reference()).unwrap();
        assert!((geo.curls()[0] - Vec3::new(0.0, -2.0, 2.0)).norm() < 1e-14);
        let id = ComplexMat3::identity();
        let (k, m) = element_matrices(&reference(), &id, &id).unwrap();
        assert!((k[(0, 0)] - c(4.0 / 3.0, 0.0)).norm() < 1e-14);
        assert!((k - k.transpose()).norm() < 1e-14);
        assert!((m - m.transpose()).norm() < 1e-14);
        assert!(k.iter().chain(m.iter()).all(|z| z.im == 0.0));
    }

    #[test]
    fn local_gradient_is_in_the_kernel() {
        let p = [
            Vec3::new(0.1, 0.0, 0.2),
            Vec3::new(1.3, 0.1, 0.0),
            Vec3::new(0.2, 0.9, 0.1),
            Vec3::new(0.3, 0.2, 1.1),
        ];
        let mu = real_mat3(&Matrix3::new(2.0, 0.1, 0.0, 0.1, 1.5, 0.0, 0.0, 0.0, 1.0));
        let (k, _) = element_matrices(&p, &ComplexMat3::identity(), &mu).unwrap();
        // gradient of the vertex hat functions in local edge orientation
        for v in 0..4 {
            let mut g = SMatrix::<Complex64, 6, 1>::zeros();
            for (e, [i, j]) in TET_EDGES.iter().enumerate() {
                g[e] = c(f64::from(u8::from(*j == v)) - f64::from(u8::from(*i == v)), 0.0);
            }
            assert!((k * g).norm() < 1e-13);
        }
    }

    #[test]
    fn degenerate_tet_is_rejected() {
        let mut p = reference();
        p[3] = Vec3::new(0.5, 0.5, 0.0);
        assert!(matches!(TetGeometry::new(&p), Err(Error::Degenerate(_))));
    }

    #[test]
    fn triangle_gradients_reproduce_linears() {
        let p = [Vec3::new(0.0, 0.0, 1.0), Vec3::new(2.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.5)];
        let (g, nu, _) = triangle_gradients(&p).unwrap();
        for k in 0..3 {
            for m in 0..3 {
                // λ_k(p_m) − λ_k(p_k) = δ_km − 1
                let d = g[k].dot(&(p[m] - p[k]));
                let want = if k == m { 0.0 } else { -1.0 };
                assert!((d - want).abs() < 1e-14);
            }
            assert!(g[k].dot(&nu).abs() < 1e-14);
        }
    }

    #[test]
    fn facet_matrix_properties() {
        let p = [Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)];
        assert_eq!(facet_sigma_matrix(&p, &ComplexMat3::zeros()).unwrap(), FacetMatrix::zeros());
        let mut s = ComplexMat3::identity() * c(2.0, 0.0);
        s[(0, 1)] = c(0.0, -1.0);
        s[(1, 0)] = c(0.0, 1.0);
        let b = facet_sigma_matrix(&p, &s).unwrap();
        assert!((b - b.adjoint()).norm() < 1e-14);
    }
}
