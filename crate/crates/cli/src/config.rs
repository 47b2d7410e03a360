//! JSON run configuration. Complex numbers are written as `[re, im]`.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use cavity::fem::{tangential_impedance, BoundaryConditions, PatchCoefficient, SourceField, Sources};
use cavity::material::{Material, MaterialSet};
use cavity::mesh::{generate_box_mesh, read_mesh, TetMesh};
use cavity::solver::{Delta0Policy, SweepOptions, DEFAULT_LINEAR_TOL, DEFAULT_SWEEP_DELTA};
use cavity::{CVec3, ComplexMat3, Vec3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub type ComplexPair = [f64; 2];
pub type ComplexMatrix = [[ComplexPair; 3]; 3];
pub type ComplexVec = [ComplexPair; 3];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mesh: MeshSpec,
    pub materials: Vec<MaterialSpec>,
    pub patches: Vec<PatchSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<RangeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub delta_schedule: Vec<f64>,
    #[serde(default)]
    pub delta0_policy: PolicySpec,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_linear_tol")]
    pub linear_tol: f64,
    /// Lower bound required of the coercivity constants of ε, μ and Λ.
    #[serde(default = "default_c0")]
    pub c0: f64,
    #[serde(default)]
    pub sources: SourcesSpec,
}

fn default_eta() -> f64 {
    cavity::fem::DEFAULT_ETA
}

fn default_linear_tol() -> f64 {
    DEFAULT_LINEAR_TOL
}

fn default_c0() -> f64 {
    1e-12
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MeshSpec {
    Box { divisions: [usize; 3], lengths: [f64; 3] },
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec {
    pub region: u32,
    pub eps: ComplexMatrix,
    pub mu: ComplexMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchSpec {
    pub id: u32,
    pub impedance: ImpedanceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ImpedanceSpec {
    /// Λ = 0.
    Pec,
    /// Λ = λ (I − ννᵀ) with ν the normal of the (planar) patch.
    Tangential { lambda: f64 },
    Matrix { lambda: ComplexMatrix },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicySpec {
    #[default]
    Enforce,
    Report,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourcesSpec {
    #[serde(default)]
    pub f_e: SourceSpec,
    #[serde(default)]
    pub f_h: SourceSpec,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSpec {
    #[default]
    Zero,
    Constant { value: ComplexVec },
    /// `amplitude · exp(−|x − center|² / width²) · exp(i k·x)`.
    Gaussian {
        center: [f64; 3],
        width: f64,
        amplitude: ComplexVec,
        #[serde(default)]
        wavevector: [f64; 3],
    },
    /// One line per tet: six numbers `re im` for the x, y, z components.
    Table { path: PathBuf },
}

/// A configuration with its mesh and coefficient objects built.
pub struct Problem {
    pub config: RunConfig,
    pub mesh: TetMesh,
    pub materials: MaterialSet,
    pub bcs: BoundaryConditions,
    pub sources: Sources,
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        location: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })
}

pub fn to_json(config: &RunConfig) -> String {
    serde_json::to_string_pretty(config).expect("configuration serializes")
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| match e {
        CliError::Parse { location, message } => CliError::Parse {
            location: format!("{}: {location}", path.display()),
            message,
        },
        other => other,
    })
}

fn complex(p: &ComplexPair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub fn matrix(m: &ComplexMatrix) -> ComplexMat3 {
    ComplexMat3::from_fn(|i, j| complex(&m[i][j]))
}

pub fn vector(v: &ComplexVec) -> CVec3 {
    CVec3::new(complex(&v[0]), complex(&v[1]), complex(&v[2]))
}

fn finite(values: &[f64]) -> bool {
    values.iter().all(|x| x.is_finite())
}

fn flatten_matrix(m: &ComplexMatrix) -> Vec<f64> {
    m.iter().flatten().flatten().copied().collect()
}

impl RunConfig {
    /// Relative paths in the configuration are taken from `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let MeshSpec::File { path } = &mut self.mesh {
            fix(path);
        }
        for s in [&mut self.sources.f_e, &mut self.sources.f_h] {
            if let SourceSpec::Table { path } = s {
                fix(path);
            }
        }
    }

    pub fn omega(&self) -> Result<f64, CliError> {
        self.omega
            .ok_or_else(|| CliError::Validation("configuration has no \"omega\"".into()))
    }

    /// Frequencies `start, start + step, …` up to `stop` inclusive (within step/1000).
    pub fn sweep_omegas(&self) -> Result<Vec<f64>, CliError> {
        let r = self
            .sweep
            .ok_or_else(|| CliError::Validation("configuration has no \"sweep\" range".into()))?;
        if !(finite(&[r.start, r.stop, r.step]) && r.start > 0.0 && r.step > 0.0 && r.stop >= r.start) {
            return Err(CliError::Validation(format!(
                "sweep range needs 0 < start ≤ stop and step > 0, got {} .. {} step {}",
                r.start, r.stop, r.step
            )));
        }
        let n = ((r.stop - r.start) / r.step + 1e-3).floor() as usize;
        Ok((0..=n).map(|k| r.start + r.step * k as f64).collect())
    }

    pub fn solve_delta(&self) -> f64 {
        self.delta.unwrap_or(0.0)
    }

    pub fn sweep_delta(&self) -> f64 {
        self.delta.unwrap_or(DEFAULT_SWEEP_DELTA)
    }

    pub fn policy(&self) -> Delta0Policy {
        match self.delta0_policy {
            PolicySpec::Enforce => Delta0Policy::Enforce,
            PolicySpec::Report => Delta0Policy::Report,
        }
    }

    pub fn sweep_options(&self) -> SweepOptions {
        SweepOptions {
            eta: self.eta,
            linear_tol: self.linear_tol,
        }
    }

    /// Builds the mesh, materials, boundary conditions and sources.
    /// Only structural problems are reported here; admissibility is left to the validators.
    pub fn build(self) -> Result<Problem, CliError> {
        let mesh = match &self.mesh {
            MeshSpec::Box { divisions, lengths } => {
                let [nx, ny, nz] = *divisions;
                generate_box_mesh(nx, ny, nz, *lengths)?
            }
            MeshSpec::File { path } => read_mesh(path)?,
        };
        self.check_numbers()?;
        let materials = self.materials(&mesh)?;
        let bcs = self.boundary_conditions(&mesh)?;
        let sources = Sources {
            f_e: self.sources.f_e.build(&mesh)?,
            f_h: self.sources.f_h.build(&mesh)?,
        };
        Ok(Problem {
            config: self,
            mesh,
            materials,
            bcs,
            sources,
        })
    }

    fn check_numbers(&self) -> Result<(), CliError> {
        let mut values = vec![self.eta, self.linear_tol, self.c0];
        values.extend(self.omega);
        values.extend(self.delta);
        values.extend(&self.delta_schedule);
        for m in &self.materials {
            values.extend(flatten_matrix(&m.eps));
            values.extend(flatten_matrix(&m.mu));
        }
        for p in &self.patches {
            values.extend(p.eta);
            match &p.impedance {
                ImpedanceSpec::Pec => {}
                ImpedanceSpec::Tangential { lambda } => values.push(*lambda),
                ImpedanceSpec::Matrix { lambda } => values.extend(flatten_matrix(lambda)),
            }
        }
        if finite(&values) {
            Ok(())
        } else {
            Err(CliError::Validation("configuration contains non-finite numbers".into()))
        }
    }

    fn materials(&self, mesh: &TetMesh) -> Result<MaterialSet, CliError> {
        let regions: BTreeSet<u32> = mesh.regions().into_iter().collect();
        let given: BTreeSet<u32> = self.materials.iter().map(|m| m.region).collect();
        if let Some(r) = given.difference(&regions).next() {
            return Err(CliError::Validation(format!("material given for region {r}, which the mesh does not have")));
        }
        let set = MaterialSet::new(self.materials.iter().map(|m| {
            (
                m.region,
                Material {
                    eps: matrix(&m.eps),
                    mu: matrix(&m.mu),
                },
            )
        }))?;
        set.check_covers(mesh)?;
        Ok(set)
    }

    fn boundary_conditions(&self, mesh: &TetMesh) -> Result<BoundaryConditions, CliError> {
        let ids: BTreeSet<u32> = mesh.patches().iter().map(|p| p.id).collect();
        let mut patches = Vec::with_capacity(self.patches.len());
        for p in &self.patches {
            if !ids.contains(&p.id) {
                return Err(CliError::Validation(format!("impedance given for patch {}, which the mesh does not have", p.id)));
            }
            let lambda = match &p.impedance {
                ImpedanceSpec::Pec => ComplexMat3::zeros(),
                ImpedanceSpec::Tangential { lambda } => {
                    tangential_impedance(*lambda, &BoundaryConditions::planar_normal(mesh, p.id)?)
                }
                ImpedanceSpec::Matrix { lambda } => matrix(lambda),
            };
            patches.push(PatchCoefficient {
                id: p.id,
                lambda,
                eta: p.eta,
            });
        }
        let mut bcs = BoundaryConditions::new(patches)?;
        bcs.c0 = self.c0;
        if let Some(missing) = ids.iter().find(|id| bcs.get(**id).is_none()) {
            return Err(CliError::Validation(format!("no impedance given for patch {missing}")));
        }
        Ok(bcs)
    }
}

impl SourceSpec {
    fn build(&self, mesh: &TetMesh) -> Result<SourceField, CliError> {
        match self {
            SourceSpec::Zero => Ok(SourceField::Zero),
            SourceSpec::Constant { value } => {
                check_finite(&value.iter().flatten().copied().collect::<Vec<_>>())?;
                Ok(SourceField::Constant(vector(value)))
            }
            SourceSpec::Gaussian {
                center,
                width,
                amplitude,
                wavevector,
            } => {
                let mut all: Vec<f64> = amplitude.iter().flatten().copied().collect();
                all.extend(center);
                all.extend(wavevector);
                all.push(*width);
                check_finite(&all)?;
                if !(*width > 0.0) {
                    return Err(CliError::Validation(format!("Gaussian width must be positive, got {width}")));
                }
                let (c, w, a, k) = (Vec3::from(*center), *width, vector(amplitude), Vec3::from(*wavevector));
                Ok(SourceField::function(move |x| {
                    let envelope = (-(x - c).norm_squared() / (w * w)).exp();
                    a * Complex64::from_polar(envelope, k.dot(x))
                }))
            }
            SourceSpec::Table { path } => read_table(path, mesh.num_tets()),
        }
    }
}

fn check_finite(values: &[f64]) -> Result<(), CliError> {
    if finite(values) {
        Ok(())
    } else {
        Err(CliError::Validation("source parameters must be finite".into()))
    }
}

fn read_table(path: &Path, num_tets: usize) -> Result<SourceField, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut values = Vec::with_capacity(num_tets);
    for (k, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let parse_error = |message: String| CliError::Parse {
            location: format!("{}: line {}", path.display(), k + 1),
            message,
        };
        let nums: Vec<f64> = content
            .split_whitespace()
            .map(|f| f.parse::<f64>().map_err(|_| parse_error(format!("cannot parse '{f}'"))))
            .collect::<Result<_, _>>()?;
        if nums.len() != 6 {
            return Err(parse_error(format!("expected 6 numbers, found {}", nums.len())));
        }
        if !finite(&nums) {
            return Err(parse_error("non-finite value".into()));
        }
        values.push(CVec3::new(
            Complex64::new(nums[0], nums[1]),
            Complex64::new(nums[2], nums[3]),
            Complex64::new(nums[4], nums[5]),
        ));
    }
    if values.len() != num_tets {
        return Err(CliError::Validation(format!(
            "{}: source table has {} rows, mesh has {num_tets} tets",
            path.display(),
            values.len()
        )));
    }
    Ok(SourceField::per_element(values))
}
