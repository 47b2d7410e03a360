//! Legacy ASCII VTK output of a tetrahedral mesh with cell-centred fields.

use std::fmt::Write as _;
use std::path::Path;

use cavity::mesh::TetMesh;
use cavity::CVec3;

use crate::error::CliError;

const VTK_TETRA: u8 = 10;

/// Renders the mesh with the real and imaginary parts of `e` and `h`, one vector per tet.
pub fn render(mesh: &TetMesh, e: &[CVec3], h: &[CVec3]) -> String {
    assert_eq!(e.len(), mesh.num_tets(), "one E value per tet");
    assert_eq!(h.len(), mesh.num_tets(), "one H value per tet");
    let mut out = String::new();
    let _ = writeln!(out, "# vtk DataFile Version 3.0");
    let _ = writeln!(out, "cavity field");
    let _ = writeln!(out, "ASCII");
    let _ = writeln!(out, "DATASET UNSTRUCTURED_GRID");
    let _ = writeln!(out, "POINTS {} double", mesh.num_vertices());
    for v in mesh.vertices() {
        let _ = writeln!(out, "{:.16e} {:.16e} {:.16e}", v.x, v.y, v.z);
    }
    let n = mesh.num_tets();
    let _ = writeln!(out, "CELLS {n} {}", 5 * n);
    for t in mesh.tets() {
        let [a, b, c, d] = t.vertices;
        let _ = writeln!(out, "4 {a} {b} {c} {d}");
    }
    let _ = writeln!(out, "CELL_TYPES {n}");
    for _ in 0..n {
        let _ = writeln!(out, "{VTK_TETRA}");
    }
    let _ = writeln!(out, "CELL_DATA {n}");
    let _ = writeln!(out, "SCALARS region int 1");
    let _ = writeln!(out, "LOOKUP_TABLE default");
    for t in mesh.tets() {
        let _ = writeln!(out, "{}", t.region);
    }
    vectors(&mut out, "E_re", e, |z| z.re);
    vectors(&mut out, "E_im", e, |z| z.im);
    vectors(&mut out, "H_re", h, |z| z.re);
    vectors(&mut out, "H_im", h, |z| z.im);
    out
}

fn vectors(out: &mut String, name: &str, values: &[CVec3], part: impl Fn(&num_complex::Complex64) -> f64) {
    let _ = writeln!(out, "VECTORS {name} double");
    for v in values {
        let _ = writeln!(out, "{:.16e} {:.16e} {:.16e}", part(&v.x), part(&v.y), part(&v.z));
    }
}

pub fn write(path: &Path, mesh: &TetMesh, e: &[CVec3], h: &[CVec3]) -> Result<(), CliError> {
    std::fs::write(path, render(mesh, e, h)).map_err(|err| CliError::Io(format!("{}: {err}", path.display())))
}
