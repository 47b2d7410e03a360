mod common;

use std::collections::HashSet;

use cavity::fem::{
    assemble_blocks, assemble_rhs, assemble_system, facet_sigma_matrix, recover_h, BoundaryConditions,
    DofMap, SourceField, Sources, DEFAULT_ETA,
};
use cavity::linalg::{c, CVec3, ComplexMat3, Vec3};
use cavity::material::{Material, MaterialSet};
use cavity::mesh::{generate_box_mesh, PatchTag, Tet, TetMesh};
use cavity::oracle::{dense_assemble, triangle_rule};
use cavity::sparse::{dotc, ComplexSparseMatrix};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

use common::{max_abs_dense, random_bcs, random_complex, random_cvec, random_materials, random_mesh, random_sources, rng};

fn single_tet(points: [Vec3; 4]) -> TetMesh {
    let faces = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];
    TetMesh::from_parts(
        points.to_vec(),
        vec![Tet { vertices: [0, 1, 2, 3], region: 0 }],
        faces.iter().enumerate().map(|(k, f)| (*f, k as u32)).collect(),
        (0..4).map(|k| PatchTag { id: k, name: format!("face{k}") }).collect(),
    )
    .unwrap()
}

fn hermitian_defect(m: &ComplexSparseMatrix) -> f64 {
    let d = m.to_dense();
    max_abs_dense(&(&d - d.adjoint())) / (1.0 + max_abs_dense(&d))
}

fn compare_with_oracle(mesh: &TetMesh, materials: &MaterialSet, bcs: &BoundaryConditions, sources: &Sources, omega: f64, delta: f64) {
    let (a, dofs) = assemble_system(mesh, materials, bcs, omega, delta, DEFAULT_ETA).unwrap();
    let b = assemble_rhs(mesh, &dofs, sources, materials, omega).unwrap();
    let dense = dense_assemble(mesh, materials, bcs, sources, omega, delta, DEFAULT_ETA).unwrap();
    let free: Vec<usize> = (0..dofs.num_free()).map(|r| dofs.global(r)).collect();
    assert_eq!(free, dense.free_edges);
    let scale = 1.0 + max_abs_dense(&dense.matrix);
    let err = max_abs_dense(&(a.to_dense() - &dense.matrix));
    assert!(err <= 1e-10 * scale, "matrix mismatch {err:e}");
    let b_err = b.iter().zip(dense.rhs.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    assert!(b_err <= 1e-10 * (1.0 + dense.rhs.norm()), "rhs mismatch {b_err:e}");
}

#[test]
fn single_tet_full_impedance_matches_oracle() {
    let mesh = single_tet([
        Vec3::new(0.1, 0.0, 0.0),
        Vec3::new(1.2, 0.1, 0.0),
        Vec3::new(0.2, 0.9, 0.1),
        Vec3::new(0.0, 0.3, 1.1),
    ]);
    let mut r = rng(21);
    let materials = random_materials(&mut r, &mesh);
    let bcs = BoundaryConditions::tangential(&mesh, 0.7).unwrap();
    compare_with_oracle(&mesh, &materials, &bcs, &random_sources(&mut r), 1.3, 0.2);
}

#[test]
fn two_cell_mixed_boundary_matches_oracle() {
    let mesh = generate_box_mesh(2, 1, 1, [2.0, 1.0, 1.0]).unwrap();
    let mut r = rng(22);
    let materials = random_materials(&mut r, &mesh);
    let mut bcs = BoundaryConditions::pec(&mesh);
    let e1 = ComplexMat3::from_diagonal(&nalgebra::Vector3::new(c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)));
    bcs.set(4, e1, Some(1e-3));
    bcs.set(5, e1, None);
    compare_with_oracle(&mesh, &materials, &bcs, &random_sources(&mut r), 0.8, 0.0);
}

#[test]
fn facet_matrix_matches_collapsed_quadrature() {
    let mut r = rng(23);
    for _ in 0..20 {
        let p: [Vec3; 3] = std::array::from_fn(|_| Vec3::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)));
        let sigma = common::random_hpd3(&mut r, 0.1, 4.0);
        let b = facet_sigma_matrix(&p, &sigma).unwrap();
        // Independent evaluation: barycentric gradients from the in-plane metric.
        let e1 = p[1] - p[0];
        let e2 = p[2] - p[0];
        let n = e1.cross(&e2);
        let area2 = n.norm();
        let nu = n / area2;
        let g = nalgebra::Matrix2::new(e1.dot(&e1), e1.dot(&e2), e1.dot(&e2), e2.dot(&e2)).try_inverse().unwrap();
        let grad1 = e1 * g[(0, 0)] + e2 * g[(1, 0)];
        let grad2 = e1 * g[(0, 1)] + e2 * g[(1, 1)];
        let grads = [-grad1 - grad2, grad1, grad2];
        let mut want = DMatrix::<Complex64>::zeros(3, 3);
        for ((s, t), w) in triangle_rule(4) {
            let l = [1.0 - s - t, s, t];
            let tr: Vec<CVec3> = [[0, 1], [0, 2], [1, 2]]
                .iter()
                .map(|&[i, j]| nu.cross(&(grads[j] * l[i] - grads[i] * l[j])).map(|x| c(x, 0.0)))
                .collect();
            for i in 0..3 {
                for j in 0..3 {
                    want[(i, j)] += tr[i].dot(&(sigma * tr[j])) * (w * area2);
                }
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                assert!((b[(i, j)] - want[(i, j)]).norm() <= 1e-12 * (1.0 + sigma.norm()), "({i},{j})");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn blocks_are_hermitian(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mesh = random_mesh(&mut r, 200);
        let materials = random_materials(&mut r, &mesh);
        let bcs = random_bcs(&mut r, &mesh, true);
        let blocks = assemble_blocks(&mesh, &materials, &bcs, 1e-3).unwrap();
        for m in [&blocks.stiffness, &blocks.mass_eps, &blocks.mass_identity, &blocks.boundary, &blocks.boundary_identity] {
            prop_assert!(hermitian_defect(m) <= 1e-13);
        }
        // quadratic forms of the coercive blocks are non-negative
        let x: Vec<Complex64> = (0..blocks.dofs.num_free()).map(|_| random_complex(&mut r)).collect();
        prop_assert!(blocks.mass_eps.quad_form(&x).re > 0.0 || x.is_empty());
        prop_assert!(blocks.stiffness.quad_form(&x).re >= -1e-12);
        prop_assert!(blocks.boundary.quad_form(&x).re >= -1e-12);
        prop_assert!(blocks.boundary_identity.quad_form(&x).re >= -1e-12);
    }

    #[test]
    fn real_symmetric_data_gives_complex_symmetric_matrix(seed in any::<u64>(), omega in 0.3f64..3.0, delta in 0.0f64..1.0) {
        let mut r = rng(seed);
        let mesh = random_mesh(&mut r, 200);
        let eps = diag_real(&mut r);
        let mu = diag_real(&mut r);
        let materials = MaterialSet::uniform(&mesh, Material { eps, mu }).unwrap();
        let bcs = BoundaryConditions::tangential(&mesh, r.random_range(0.1..2.0)).unwrap();
        let (a, _) = assemble_system(&mesh, &materials, &bcs, omega, delta, DEFAULT_ETA).unwrap();
        let d = a.to_dense();
        prop_assert!(max_abs_dense(&(&d - d.transpose())) <= 1e-13 * (1.0 + max_abs_dense(&d)));
    }

    #[test]
    fn rhs_is_linear_in_the_sources(seed in any::<u64>(), omega in 0.3f64..3.0) {
        let mut r = rng(seed);
        let mesh = random_mesh(&mut r, 200);
        let materials = random_materials(&mut r, &mesh);
        let bcs = random_bcs(&mut r, &mesh, true);
        let blocks = assemble_blocks(&mesh, &materials, &bcs, 1e-3).unwrap();
        let (s1, s2) = (random_sources(&mut r), random_sources(&mut r));
        let (alpha, beta) = (random_complex(&mut r), random_complex(&mut r));
        let combined = Sources {
            f_e: SourceField::Sum(vec![s1.f_e.clone().scaled(alpha), s2.f_e.clone().scaled(beta)]),
            f_h: SourceField::Sum(vec![s1.f_h.clone().scaled(alpha), s2.f_h.clone().scaled(beta)]),
        };
        let b1 = assemble_rhs(&mesh, &blocks.dofs, &s1, &materials, omega).unwrap();
        let b2 = assemble_rhs(&mesh, &blocks.dofs, &s2, &materials, omega).unwrap();
        let b = assemble_rhs(&mesh, &blocks.dofs, &combined, &materials, omega).unwrap();
        for k in 0..b.len() {
            let want = b1[k] * alpha + b2[k] * beta;
            prop_assert!((b[k] - want).norm() <= 1e-12 * (1.0 + want.norm()));
        }
    }
}

fn diag_real(r: &mut impl Rng) -> ComplexMat3 {
    let a = nalgebra::Matrix3::<f64>::from_fn(|_, _| r.random_range(-0.3..0.3));
    let s = a + a.transpose() + nalgebra::Matrix3::identity() * 2.0;
    s.map(|x| c(x, 0.0))
}

#[test]
fn pec_box_keeps_exactly_the_interior_edges() {
    for n in [1, 2, 3] {
        let mesh = generate_box_mesh(n, n, n, [1.0; 3]).unwrap();
        let mut boundary = HashSet::new();
        for f in mesh.facets() {
            let v = f.vertices;
            for (a, b) in [(v[0], v[1]), (v[0], v[2]), (v[1], v[2])] {
                boundary.insert((a.min(b), a.max(b)));
            }
        }
        let blocks = assemble_blocks(&mesh, &MaterialSet::vacuum(&mesh), &BoundaryConditions::pec(&mesh), DEFAULT_ETA).unwrap();
        assert_eq!(blocks.dofs.num_free(), mesh.num_edges() - boundary.len());
        for r in 0..blocks.dofs.num_free() {
            let [a, b] = mesh.edges()[blocks.dofs.global(r)];
            assert!(!boundary.contains(&(a, b)));
        }
        assert_eq!(blocks.boundary.nnz(), 0);
    }
}

#[test]
fn impedance_everywhere_keeps_every_edge() {
    let mesh = generate_box_mesh(2, 2, 1, [1.0; 3]).unwrap();
    let blocks = assemble_blocks(&mesh, &MaterialSet::vacuum(&mesh), &BoundaryConditions::tangential(&mesh, 1.0).unwrap(), DEFAULT_ETA).unwrap();
    assert_eq!(blocks.dofs.num_free(), mesh.num_edges());
}

#[test]
fn boundary_identity_measures_the_tangential_trace() {
    // Constant field E = x̂ on a unit cube: ∫_Γ |ν×E|² = 4 faces of area 1.
    let mesh = generate_box_mesh(2, 2, 2, [1.0; 3]).unwrap();
    let blocks = assemble_blocks(&mesh, &MaterialSet::vacuum(&mesh), &BoundaryConditions::tangential(&mesh, 1.0).unwrap(), DEFAULT_ETA).unwrap();
    let e: Vec<Complex64> = mesh.edges().iter().map(|&[a, b]| c((mesh.vertices()[b] - mesh.vertices()[a]).x, 0.0)).collect();
    let x = blocks.dofs.restrict(&e);
    assert!((blocks.boundary_identity.quad_form(&x).re - 4.0).abs() < 1e-12);
    // and its L² mass is the volume
    assert!((blocks.mass_identity.quad_form(&x).re - 1.0).abs() < 1e-12);
    assert!(blocks.stiffness.quad_form(&x).norm() < 1e-12);
}

#[test]
fn recover_h_of_pure_magnetic_source() {
    let mesh = generate_box_mesh(1, 1, 1, [1.0; 3]).unwrap();
    let mut r = rng(24);
    let materials = random_materials(&mut r, &mesh);
    let k = random_cvec(&mut r);
    let omega = 1.7;
    // f_h = μ k per region, E = 0 → H = −k/(iω)
    let mu = materials.mu(mesh.tets()[0].region).to_owned();
    let f_h = SourceField::Constant(mu * k);
    let h = recover_h(&mesh, &vec![c(0.0, 0.0); mesh.num_edges()], &f_h, &materials, omega).unwrap();
    let want = -k / c(0.0, omega);
    for (t, ht) in h.iter().enumerate() {
        if mesh.tets()[t].region == mesh.tets()[0].region {
            assert!((ht - want).norm() < 1e-12);
        }
    }
}

#[test]
fn dof_map_round_trip() {
    let map = DofMap::from_eliminated(&[false, true, false, true, false]);
    assert_eq!(map.num_free(), 3);
    let full = vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0), c(5.0, 0.0)];
    let reduced = map.restrict(&full);
    assert_eq!(reduced, vec![c(1.0, 0.0), c(3.0, 0.0), c(5.0, 0.0)]);
    let back = map.expand(&reduced);
    assert_eq!(back, vec![c(1.0, 0.0), c(0.0, 0.0), c(3.0, 0.0), c(0.0, 0.0), c(5.0, 0.0)]);
    assert!((dotc(&reduced, &reduced).re - 35.0).abs() < 1e-15);
}
