use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::linalg::{CVec3, Vec3};

pub type SourceFn = dyn Fn(&Vec3) -> CVec3 + Send + Sync;

/// A volumetric source density `f: Ω → C³`.
#[derive(Clone, Default)]
pub enum SourceField {
    #[default]
    Zero,
    Constant(CVec3),
    Function(Arc<SourceFn>),
    /// One constant value per tetrahedron.
    PerElement(Arc<Vec<CVec3>>),
    Sum(Vec<SourceField>),
    Scaled(Complex64, Box<SourceField>),
}

impl fmt::Debug for SourceField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => write!(f, "Zero"),
            Self::Constant(v) => write!(f, "Constant({:?})", v.as_slice()),
            Self::Function(_) => write!(f, "Function(..)"),
            Self::PerElement(v) => write!(f, "PerElement({} values)", v.len()),
            Self::Sum(parts) => f.debug_tuple("Sum").field(parts).finish(),
            Self::Scaled(a, s) => f.debug_tuple("Scaled").field(a).field(s).finish(),
        }
    }
}

impl SourceField {
    pub fn function(f: impl Fn(&Vec3) -> CVec3 + Send + Sync + 'static) -> Self {
        Self::Function(Arc::new(f))
    }

    pub fn per_element(values: Vec<CVec3>) -> Self {
        Self::PerElement(Arc::new(values))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Zero => true,
            Self::Sum(parts) => parts.iter().all(Self::is_zero),
            Self::Scaled(a, s) => *a == Complex64::new(0.0, 0.0) || s.is_zero(),
            _ => false,
        }
    }

    /// Value at point `x` of tetrahedron `tet`.
    pub fn eval(&self, tet: usize, x: &Vec3) -> CVec3 {
        match self {
            Self::Zero => CVec3::zeros(),
            Self::Constant(v) => *v,
            Self::Function(f) => f(x),
            Self::PerElement(v) => v[tet],
            Self::Sum(parts) => parts.iter().fold(CVec3::zeros(), |acc, p| acc + p.eval(tet, x)),
            Self::Scaled(a, s) => s.eval(tet, x) * *a,
        }
    }

    pub fn scaled(self, a: Complex64) -> Self {
        Self::Scaled(a, Box::new(self))
    }
}

/// Electric and magnetic source densities.
#[derive(Debug, Clone, Default)]
pub struct Sources {
    pub f_e: SourceField,
    pub f_h: SourceField,
}

impl Sources {
    pub fn electric(f_e: SourceField) -> Self {
        Self {
            f_e,
            f_h: SourceField::Zero,
        }
    }

    pub fn scaled(&self, a: Complex64) -> Self {
        Self {
            f_e: self.f_e.clone().scaled(a),
            f_h: self.f_h.clone().scaled(a),
        }
    }
}
