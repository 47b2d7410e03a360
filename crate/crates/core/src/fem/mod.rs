//! Lowest-order edge element discretisation.
//!
//! Basis functions are the Whitney forms `φ_ab = λ_a∇λ_b − λ_b∇λ_a` attached
//! to canonically oriented edges `a < b`. Matrices are assembled as
//! `A[i][j] = a(φⱼ, φᵢ)`; edges on perfect-conductor facets are eliminated.

mod assembly;
mod conditions;
mod field;
mod source;
mod whitney;

pub use assembly::{
    assemble_blocks, assemble_full_stiffness, assemble_rhs, assemble_system, discrete_gradient,
    reduced_gradient, validate_problem, DofMap, SystemBlocks,
};
pub(crate) use assembly::{check_frequency, dot_real};
pub use conditions::{
    tangential_impedance, BoundaryConditions, FacetCoefficient, PatchCoefficient, DEFAULT_ETA,
};
pub use field::{centroid_values, element_curl, field_at, l2_distance, l2_norm, recover_h};
pub use source::{SourceField, SourceFn, Sources};
pub use whitney::{element_matrices, facet_sigma_matrix, ElementMatrix, FacetMatrix, TetGeometry};
