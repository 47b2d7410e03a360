//! Plain-text reports with fixed number formatting, so identical runs give identical bytes.

use std::fmt::Write as _;

use cavity::boundary::{ImpedancePatch, PatchKind, ValidationReport};
use cavity::fem::BoundaryConditions;
use cavity::linalg::min_hermitian_eigenvalue;
use cavity::solver::{AbsorptionReport, FieldSolution, SweepReport};
use cavity::{ComplexMat3, Vec3};
use num_complex::Complex64;

use crate::config::Problem;

pub fn num(x: f64) -> String {
    // Folds −0 into +0.
    format!("{:.10e}", x + 0.0)
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), num)
}

fn complex(z: Complex64) -> String {
    format!("{:.10e}{:+.10e}i", z.re + 0.0, z.im + 0.0)
}

fn vec3(v: &Vec3) -> String {
    format!("({}, {}, {})", num(v.x), num(v.y), num(v.z))
}

fn matrix(out: &mut String, name: &str, m: &ComplexMat3) {
    let _ = writeln!(out, "    {name} =");
    for i in 0..3 {
        let row: Vec<String> = (0..3).map(|j| complex(m[(i, j)])).collect();
        let _ = writeln!(out, "      [{}]", row.join(", "));
    }
}

fn checks(out: &mut String, report: &ValidationReport) {
    for c in &report.checks {
        let _ = writeln!(
            out,
            "  {} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
}

/// Full validation report and whether every check passed.
pub fn validation(problem: &Problem) -> (String, bool) {
    let mut out = String::new();
    let mesh = &problem.mesh;
    let _ = writeln!(out, "validate");
    mesh_line(&mut out, problem);

    let _ = writeln!(out, "materials");
    let materials = problem.materials.validate(problem.config.c0, problem.bcs.rank_tol);
    checks(&mut out, &materials);

    let _ = writeln!(out, "boundary");
    let boundary = problem.bcs.validate(mesh);
    checks(&mut out, &boundary);

    for tag in mesh.patches() {
        let Some(p) = problem.bcs.get(tag.id) else { continue };
        let _ = writeln!(out, "patch {} ({})", tag.id, tag.name);
        let Ok(normals) = BoundaryConditions::patch_normals(mesh, tag.id) else {
            continue;
        };
        for nu in normals {
            let _ = writeln!(out, "  normal {}", vec3(&nu));
            match ImpedancePatch::new(p.id, p.lambda, nu, problem.bcs.c0, problem.bcs.rank_tol) {
                Ok(patch) => {
                    let _ = writeln!(out, "    kind {}", patch.kind.as_str());
                    if patch.kind == PatchKind::Pec {
                        let _ = writeln!(out, "    Θ = id");
                    } else {
                        matrix(&mut out, "Λ", &patch.lambda);
                        matrix(&mut out, "Σ", &patch.sigma);
                        matrix(&mut out, "Θ", &patch.theta);
                        if let Some(eta) = p.eta {
                            let _ = writeln!(out, "    η = {}", num(eta));
                        }
                    }
                    let c = min_hermitian_eigenvalue(&(patch.sigma + patch.theta));
                    let _ = writeln!(out, "    coercivity constant of Σ+Θ = {}", num(c));
                }
                Err(e) => {
                    let _ = writeln!(out, "    not admissible: {e}");
                }
            }
        }
    }
    let passed = materials.passed() && boundary.passed();
    let _ = writeln!(out, "result: {}", if passed { "PASS" } else { "FAIL" });
    (out, passed)
}

/// Names of failed checks, for the error message.
pub fn failed_checks(problem: &Problem) -> String {
    let m = problem.materials.validate(problem.config.c0, problem.bcs.rank_tol);
    let b = problem.bcs.validate(&problem.mesh);
    m.failures()
        .chain(b.failures())
        .map(|c| format!("{} ({})", c.name, c.detail))
        .collect::<Vec<_>>()
        .join("; ")
}

fn mesh_line(out: &mut String, problem: &Problem) {
    let m = &problem.mesh;
    let _ = writeln!(
        out,
        "mesh: {} vertices, {} tets, {} edges, {} boundary facets",
        m.num_vertices(),
        m.num_tets(),
        m.num_edges(),
        m.num_facets()
    );
}

pub fn solution(problem: &Problem, s: &FieldSolution) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "solve");
    mesh_line(&mut out, problem);
    let _ = writeln!(out, "free edges: {}", s.dofs.num_free());
    let _ = writeln!(out, "omega: {}", num(s.omega));
    let _ = writeln!(out, "delta: {}", num(s.delta));
    let _ = writeln!(out, "eta: {}", num(problem.config.eta));
    let _ = writeln!(out, "relative residual: {}", num(s.residual));
    let _ = writeln!(out, "|E|_L2: {}", num(s.l2_norm));
    energy(&mut out, s);
    out
}

fn energy(out: &mut String, s: &FieldSolution) {
    let e = &s.energy;
    let _ = writeln!(out, "source power: {}", num(e.source_power));
    let _ = writeln!(out, "volume absorbed power: {}", num(e.volume_absorbed));
    let _ = writeln!(out, "boundary absorbed power: {}", num(e.boundary_absorbed));
    let _ = writeln!(out, "energy mismatch: {}", num(e.mismatch));
}

pub fn sweep(problem: &Problem, r: &SweepReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "sweep");
    mesh_line(&mut out, problem);
    let _ = writeln!(out, "delta: {}", num(r.delta));
    let _ = writeln!(out, "omega | |E|_L2 | boundary absorbed power | energy mismatch");
    for p in &r.points {
        let _ = writeln!(
            out,
            "{} | {} | {} | {}",
            num(p.omega),
            num(p.response),
            num(p.boundary_absorption),
            num(p.energy_mismatch)
        );
    }
    let _ = writeln!(out, "peaks: {}", r.peaks.len());
    for p in &r.peaks {
        let _ = writeln!(
            out,
            "peak at sample {}: omega {} refined {} |E|_L2 {}",
            p.index,
            num(p.omega),
            num(p.refined_omega),
            num(p.response)
        );
    }
    out
}

pub fn absorption(problem: &Problem, r: &AbsorptionReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "limiting absorption");
    mesh_line(&mut out, problem);
    let _ = writeln!(out, "omega: {}", num(r.omega));
    let _ = writeln!(out, "delta0: {}", num(r.delta0));
    if !r.above_delta0.is_empty() {
        let list: Vec<String> = r.above_delta0.iter().map(|d| num(*d)).collect();
        let _ = writeln!(out, "scheduled delta at or above delta0: {}", list.join(", "));
    }
    let _ = writeln!(out, "delta | |E_delta|_L2 | gap to previous | gradient part | gap to delta = 0 | energy mismatch");
    for s in &r.steps {
        let _ = writeln!(
            out,
            "{} | {} | {} | {} | {} | {}",
            num(s.delta),
            num(s.norm),
            opt(s.gap_to_previous),
            num(s.gradient_norm),
            opt(s.gap_to_direct),
            num(s.solution.energy.mismatch)
        );
    }
    match (&r.direct, &r.direct_failure) {
        (Some(d), _) => {
            let _ = writeln!(out, "direct delta = 0 solve: |E_0|_L2 {}", num(d.l2_norm));
        }
        (None, Some(reason)) => {
            let _ = writeln!(out, "direct delta = 0 solve failed: {reason}");
        }
        (None, None) => {}
    }
    let _ = writeln!(out, "slope of gap to delta = 0: {}", opt(r.direct_gap_slope()));
    let _ = writeln!(out, "slope of gradient part: {}", opt(r.gradient_slope()));
    let _ = writeln!(out, "resonance suspected: {}", if r.resonance_suspected { "yes" } else { "no" });
    out
}
