#![allow(dead_code)]

use cavity::fem::{BoundaryConditions, SourceField, Sources};
use cavity::linalg::{c, CVec3, ComplexMat3, Vec3};
use cavity::material::{Material, MaterialSet};
use cavity::mesh::{generate_box_mesh, TetMesh};
use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_unit(rng: &mut impl Rng) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.2 && n <= 1.0 {
            return v / n;
        }
    }
}

pub fn random_complex(rng: &mut impl Rng) -> Complex64 {
    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_cvec(rng: &mut impl Rng) -> CVec3 {
    CVec3::new(random_complex(rng), random_complex(rng), random_complex(rng))
}

/// Orthonormal complex basis `(q1, q2)` of the plane orthogonal to the real unit `nu`.
pub fn tangent_basis(rng: &mut impl Rng, nu: &Vec3) -> [CVec3; 2] {
    let n = nu.map(|x| c(x, 0.0));
    let mut out: Vec<CVec3> = Vec::new();
    while out.len() < 2 {
        let mut v = random_cvec(rng);
        v -= n * n.dotc(&v);
        for q in &out {
            v -= q * q.dotc(&v);
        }
        let norm = v.norm();
        if norm > 0.1 {
            out.push(v / c(norm, 0.0));
        }
    }
    [out[0], out[1]]
}

/// Random Hermitian matrix of size `n` with eigenvalues in `[lo, hi]`, and its largest eigenvalue.
pub fn random_hpd(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> (DMatrix<Complex64>, f64) {
    let a = DMatrix::from_fn(n, n, |_, _| random_complex(rng));
    let q = a.qr().q();
    let eig: Vec<f64> = (0..n).map(|_| rng.random_range(lo..hi)).collect();
    let d = DMatrix::from_fn(n, n, |i, j| if i == j { c(eig[i], 0.0) } else { c(0.0, 0.0) });
    let m = &q * d * q.adjoint();
    (m, eig.iter().copied().fold(0.0, f64::max))
}

/// An admissible Λ for the normal `nu`.
#[derive(Debug, Clone)]
pub struct RandomLambda {
    pub lambda: ComplexMat3,
    pub kernel_dim: usize,
    /// Orthonormal basis of the kernel complement.
    pub complement: Vec<CVec3>,
    /// Largest eigenvalue of Λ restricted to the complement (0 if Λ = 0).
    pub lambda_max: f64,
    pub lambda_min: f64,
}

/// Random admissible Λ with the given kernel dimension (1..=3), always containing `nu`.
pub fn random_lambda(rng: &mut impl Rng, nu: &Vec3, kernel_dim: usize, lo: f64, hi: f64) -> RandomLambda {
    assert!((1..=3).contains(&kernel_dim));
    let rank = 3 - kernel_dim;
    let q = tangent_basis(rng, nu);
    let complement: Vec<CVec3> = q[..rank].to_vec();
    if rank == 0 {
        return RandomLambda {
            lambda: ComplexMat3::zeros(),
            kernel_dim,
            complement,
            lambda_max: 0.0,
            lambda_min: 0.0,
        };
    }
    let (block, lambda_max) = random_hpd(rng, rank, lo, hi);
    let lambda_min = block.clone().symmetric_eigenvalues().min();
    let mut lambda = ComplexMat3::zeros();
    for i in 0..rank {
        for j in 0..rank {
            lambda += complement[i] * complement[j].adjoint() * block[(i, j)];
        }
    }
    RandomLambda {
        lambda,
        kernel_dim,
        complement,
        lambda_max,
        lambda_min,
    }
}

pub fn random_hpd3(rng: &mut impl Rng, lo: f64, hi: f64) -> ComplexMat3 {
    let (m, _) = random_hpd(rng, 3, lo, hi);
    ComplexMat3::from_fn(|i, j| m[(i, j)])
}

/// A box mesh with random divisions (at most `max_edges` edges), jittered
/// interior vertices and a random orientation-preserving affine map. Faces
/// stay planar, so each boundary patch keeps a single normal.
pub fn random_mesh(rng: &mut impl Rng, max_edges: usize) -> TetMesh {
    loop {
        let n = [rng.random_range(1..=3), rng.random_range(1..=2), rng.random_range(1..=2)];
        let lengths = [rng.random_range(0.5..1.5), rng.random_range(0.5..1.5), rng.random_range(0.5..1.5)];
        let base = generate_box_mesh(n[0], n[1], n[2], lengths).unwrap();
        if base.num_edges() > max_edges {
            continue;
        }
        let on_boundary = base.boundary_vertex_mask();
        let h = lengths
            .iter()
            .zip(n)
            .map(|(l, k)| l / k as f64)
            .fold(f64::INFINITY, f64::min);
        let jitter: Vec<Vec3> = (0..base.num_vertices())
            .map(|v| {
                if on_boundary[v] {
                    Vec3::zeros()
                } else {
                    random_unit(rng) * (0.15 * h)
                }
            })
            .collect();
        let a = Matrix3::identity() + Matrix3::from_fn(|_, _| rng.random_range(-0.25..0.25));
        if a.determinant() < 0.3 {
            continue;
        }
        let shift = Vec3::new(rng.random_range(-1.0..1.0), 0.0, rng.random_range(-1.0..1.0));
        let vertices = base
            .vertices()
            .iter()
            .zip(&jitter)
            .map(|(x, j)| a * (x + j) + shift)
            .collect();
        let facets = base.facets().iter().map(|f| (f.vertices, f.patch)).collect();
        let mesh = TetMesh::from_parts(vertices, base.tets().to_vec(), facets, base.patches().to_vec());
        if let Ok(m) = mesh {
            let mid = m.vertices().iter().map(|v| v.x).sum::<f64>() / m.num_vertices() as f64;
            return m.with_regions(|_, c| u32::from(c.x > mid));
        }
    }
}

/// Hermitian coercive ε and μ per region.
pub fn random_materials(rng: &mut impl Rng, mesh: &TetMesh) -> MaterialSet {
    MaterialSet::new(mesh.regions().into_iter().map(|r| {
        (
            r,
            Material {
                eps: random_hpd3(rng, 0.5, 3.0),
                mu: random_hpd3(rng, 0.5, 2.0),
            },
        )
    }))
    .unwrap()
}

/// Random mix of perfect-conductor, full-impedance and mixed patches.
pub fn random_bcs(rng: &mut impl Rng, mesh: &TetMesh, allow_pec: bool) -> BoundaryConditions {
    let mut bcs = BoundaryConditions::pec(mesh);
    for tag in mesh.patches() {
        let nu = BoundaryConditions::planar_normal(mesh, tag.id).unwrap();
        let choice = if allow_pec { rng.random_range(0..3) } else { rng.random_range(1..3) };
        let kernel_dim = match choice {
            0 => 3,
            1 => 1,
            _ => 2,
        };
        let l = random_lambda(rng, &nu, kernel_dim, 0.3, 3.0);
        let eta = (kernel_dim == 2).then(|| 10f64.powf(rng.random_range(-4.0..-2.0)));
        bcs.set(tag.id, l.lambda, eta);
    }
    bcs
}

/// Random sources of polynomial degree one, integrated exactly by every rule in use.
pub fn random_sources(rng: &mut impl Rng) -> Sources {
    let k = random_cvec(rng);
    let g = random_cvec(rng);
    let a = random_unit(rng);
    let m = random_cvec(rng);
    let b = random_unit(rng);
    Sources {
        f_e: SourceField::Sum(vec![
            SourceField::Constant(k),
            SourceField::function(move |x| g * c(a.dot(x), 0.0)),
        ]),
        f_h: SourceField::function(move |x| m * c(b.dot(x), 0.5)),
    }
}

/// Smooth z-polarised bump centred in the unit cube.
pub fn gaussian_bump(center: Vec3, width: f64) -> SourceField {
    SourceField::function(move |x| {
        let r2 = (x - center).norm_squared();
        CVec3::new(c(0.0, 0.0), c(0.0, 0.0), c((-r2 / (width * width)).exp(), 0.0))
    })
}

pub fn max_abs_dense(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
