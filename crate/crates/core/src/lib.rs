//! Finite-element solver for the time-harmonic Maxwell cavity problem with
//! matrix-valued, possibly singular, impedance boundary conditions.
//!
//! The crate is organised bottom-up:
//!
//! - [`mesh`]: tetrahedral meshes with oriented edges and tagged boundary patches.
//! - [`boundary`]: per-patch 3×3 complex algebra turning an impedance matrix Λ
//!   into the coercive pair (Σ, Θ).
//! - [`material`]: bulk coefficients ε, μ and their coercivity checks.
//! - [`fem`]: lowest-order edge elements, assembly of the absorbing
//!   sesquilinear form and of the source functional.
//! - [`helmholtz`]: discrete Helmholtz decompositions on nodal elements.
//! - [`solver`]: sparse direct solves, the full Maxwell pipeline, limiting
//!   absorption continuation and frequency sweeps.
//! - [`oracle`]: slow, independent reference implementations used by tests.

pub mod boundary;
pub mod error;
pub mod fem;
pub mod helmholtz;
pub mod linalg;
pub mod material;
pub mod mesh;
pub mod oracle;
pub mod quadrature;
pub mod solver;
pub mod sparse;

pub use error::{Error, Result};
pub use linalg::{CVec3, ComplexMat3, Vec3};
