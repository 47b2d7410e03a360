//! Small fixed-size vector and matrix aliases shared across the crate.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

pub type Vec3 = Vector3<f64>;
pub type CVec3 = Vector3<Complex64>;
pub type ComplexMat3 = Matrix3<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn to_complex(v: &Vec3) -> CVec3 {
    v.map(|x| c(x, 0.0))
}

pub fn real_mat3(m: &nalgebra::Matrix3<f64>) -> ComplexMat3 {
    m.map(|x| c(x, 0.0))
}

/// Outer product `v vᵀ` of a real unit vector, as a complex matrix.
pub fn outer_real(v: &Vec3) -> ComplexMat3 {
    real_mat3(&(v * v.transpose()))
}

/// Largest absolute entry.
pub fn max_abs(m: &ComplexMat3) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Spectral norm via the singular values.
pub fn spectral_norm(m: &ComplexMat3) -> f64 {
    m.singular_values().max()
}

pub fn hermitian_part(m: &ComplexMat3) -> ComplexMat3 {
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_hermitian_eigenvalue(m: &ComplexMat3) -> f64 {
    hermitian_part(m).symmetric_eigenvalues().min()
}

/// Largest eigenvalue of the Hermitian part of `m`.
pub fn max_hermitian_eigenvalue(m: &ComplexMat3) -> f64 {
    hermitian_part(m).symmetric_eigenvalues().max()
}

/// `(ν × ·)` as a real matrix acting on column vectors.
pub fn cross_matrix(n: &Vec3) -> nalgebra::Matrix3<f64> {
    nalgebra::Matrix3::new(0.0, -n.z, n.y, n.z, 0.0, -n.x, -n.y, n.x, 0.0)
}

/// Unconjugated bilinear dot product `aᵀ b`.
#[inline]
pub fn dot_u(a: &CVec3, b: &CVec3) -> Complex64 {
    a.x * b.x + a.y * b.y + a.z * b.z
}

pub fn is_finite(v: &CVec3) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}
