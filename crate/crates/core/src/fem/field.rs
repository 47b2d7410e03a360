use rayon::prelude::*;

use super::source::SourceField;
use super::whitney::TetGeometry;
use crate::linalg::{c, CVec3, I};
use crate::material::MaterialSet;
use crate::mesh::{PointLocator, TetMesh};
use crate::quadrature::{grundmann_moller, tet_order2};
use crate::{Error, Result};
use num_complex::Complex64;

fn local_coefficients(mesh: &TetMesh, t: usize, e: &[Complex64]) -> [Complex64; 6] {
    mesh.tet_edges(t).map(|r| e[r.edge] * r.sign_f64())
}

fn geometry(mesh: &TetMesh, t: usize) -> TetGeometry {
    TetGeometry::new(&mesh.tet_points(t)).expect("mesh tets have positive volume")
}

/// Value of the edge field `e` (one coefficient per edge) at barycentric `l` in tet `t`.
pub fn field_at(mesh: &TetMesh, t: usize, l: &[f64; 4], e: &[Complex64]) -> CVec3 {
    let geo = geometry(mesh, t);
    let u = local_coefficients(mesh, t, e);
    geo.basis(l)
        .iter()
        .zip(u)
        .fold(CVec3::zeros(), |acc, (phi, a)| acc + phi.map(|x| c(x, 0.0)) * a)
}

/// Constant curl of the edge field `e` on tet `t`.
pub fn element_curl(mesh: &TetMesh, t: usize, e: &[Complex64]) -> CVec3 {
    let geo = geometry(mesh, t);
    let u = local_coefficients(mesh, t, e);
    geo.curls()
        .iter()
        .zip(u)
        .fold(CVec3::zeros(), |acc, (cu, a)| acc + cu.map(|x| c(x, 0.0)) * a)
}

/// Edge field evaluated at every tet centroid.
pub fn centroid_values(mesh: &TetMesh, e: &[Complex64]) -> Vec<CVec3> {
    check_len(mesh, e);
    (0..mesh.num_tets())
        .into_par_iter()
        .map(|t| field_at(mesh, t, &[0.25; 4], e))
        .collect()
}

/// `H = (iωμ)⁻¹ (curl E − f_h)` per tet, with `f_h` taken at the centroid.
pub fn recover_h(
    mesh: &TetMesh,
    e: &[Complex64],
    f_h: &SourceField,
    materials: &MaterialSet,
    omega: f64,
) -> Result<Vec<CVec3>> {
    check_len(mesh, e);
    (0..mesh.num_tets())
        .into_par_iter()
        .map(|t| {
            let region = mesh.tets()[t].region;
            let iwmu = materials.mu(region) * (I * omega);
            let inv = iwmu
                .try_inverse()
                .ok_or_else(|| Error::Validation(format!("iωμ not invertible in region {region}")))?;
            let rhs = element_curl(mesh, t, e) - f_h.eval(t, &mesh.tet_centroid(t));
            Ok(inv * rhs)
        })
        .collect()
}

fn check_len(mesh: &TetMesh, e: &[Complex64]) {
    assert_eq!(e.len(), mesh.num_edges(), "edge vector length must equal the edge count");
}

/// `‖E‖_{L²(Ω)}` of an edge field (exact: the integrand is quadratic).
pub fn l2_norm(mesh: &TetMesh, e: &[Complex64]) -> f64 {
    check_len(mesh, e);
    let (qp, qw) = tet_order2();
    let sq: f64 = (0..mesh.num_tets())
        .into_par_iter()
        .map(|t| {
            let vol = mesh.tet_volume(t);
            qp.iter()
                .zip(qw)
                .map(|(l, w)| w * vol * field_at(mesh, t, l, e).norm_squared())
                .sum::<f64>()
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    sq.sqrt()
}

/// `‖E_a − E_b‖_{L²}` for fields on two meshes of the same domain, integrated
/// over the tets of `mesh_b` with the points located in `mesh_a`.
pub fn l2_distance(
    mesh_a: &TetMesh,
    e_a: &[Complex64],
    mesh_b: &TetMesh,
    e_b: &[Complex64],
) -> Result<f64> {
    check_len(mesh_a, e_a);
    check_len(mesh_b, e_b);
    let locator = PointLocator::new(mesh_a);
    let rule = grundmann_moller(3, 2);
    let parts: Vec<f64> = (0..mesh_b.num_tets())
        .into_par_iter()
        .map(|t| {
            let geo = geometry(mesh_b, t);
            let mut acc = 0.0;
            for (p, w) in rule.points.iter().zip(&rule.weights) {
                let l = [p[0], p[1], p[2], p[3]];
                let x = geo.point(&l);
                let (ta, la) = locator.locate(&x).ok_or_else(|| {
                    Error::InvalidArgument(format!("point {:?} outside the first mesh", x.as_slice()))
                })?;
                let d = field_at(mesh_b, t, &l, e_b) - field_at(mesh_a, ta, &la, e_a);
                acc += w * geo.volume * d.norm_squared();
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok(parts.iter().sum::<f64>().sqrt())
}
