//! Plain-text mesh format.
//!
//! ```text
//! tetmesh 1
//! V
//! x y z            (V lines)
//! T
//! v0 v1 v2 v3 region   (T lines)
//! F
//! v0 v1 v2 patch       (F lines)
//! ```
//!
//! Indices are 0-based, `#` starts a comment, blank lines are ignored.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::{signed_volume, PatchTag, Tet, TetMesh};
use crate::linalg::Vec3;
use crate::{Error, Result};

const HEADER: &str = "tetmesh 1";

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next non-empty record with its 1-based line number.
    fn next_record(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        for (i, raw) in self.inner.by_ref() {
            let content = raw.split('#').next().unwrap_or("").trim();
            self.last = i + 1;
            if !content.is_empty() {
                return Ok((i + 1, content.split_whitespace().collect()));
            }
        }
        Err(Error::Parse {
            line: self.last + 1,
            message: format!("unexpected end of file, expected {what}"),
        })
    }
}

fn parse_fields<T: FromStr>(line: usize, fields: &[&str], n: usize, what: &str) -> Result<Vec<T>> {
    if fields.len() != n {
        return Err(Error::Parse {
            line,
            message: format!("{what}: expected {n} fields, found {}", fields.len()),
        });
    }
    fields
        .iter()
        .map(|f| {
            f.parse::<T>().map_err(|_| Error::Parse {
                line,
                message: format!("{what}: cannot parse '{f}'"),
            })
        })
        .collect()
}

fn parse_count(lines: &mut Lines<'_>, what: &str) -> Result<usize> {
    let (line, fields) = lines.next_record(what)?;
    Ok(parse_fields::<usize>(line, &fields, 1, what)?[0])
}

/// Reads a mesh; patch tags are inferred from the facet records and named `patch<id>`.
pub fn read_mesh(path: impl AsRef<Path>) -> Result<TetMesh> {
    let text = std::fs::read_to_string(path)?;
    parse_mesh(&text, None)
}

/// Reads a mesh whose facets must only carry ids from `tags`.
pub fn read_mesh_with_tags(path: impl AsRef<Path>, tags: &[PatchTag]) -> Result<TetMesh> {
    let text = std::fs::read_to_string(path)?;
    parse_mesh(&text, Some(tags))
}

pub(crate) fn parse_mesh(text: &str, tags: Option<&[PatchTag]>) -> Result<TetMesh> {
    let mut lines = Lines::new(text);
    let (line, fields) = lines.next_record("header")?;
    if fields.join(" ") != HEADER {
        return Err(Error::Parse {
            line,
            message: format!("malformed header, expected '{HEADER}'"),
        });
    }

    let nv = parse_count(&mut lines, "vertex count")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (line, f) = lines.next_record("vertex")?;
        let x = parse_fields::<f64>(line, &f, 3, "vertex")?;
        if !x.iter().all(|v| v.is_finite()) {
            return Err(Error::Parse {
                line,
                message: "vertex: non-finite coordinate".into(),
            });
        }
        vertices.push(Vec3::new(x[0], x[1], x[2]));
    }

    let nt = parse_count(&mut lines, "tet count")?;
    let mut tets = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (line, f) = lines.next_record("tet")?;
        if f.len() != 5 {
            return Err(Error::Parse {
                line,
                message: format!("tet: expected 5 fields, found {}", f.len()),
            });
        }
        let v = parse_fields::<usize>(line, &f[..4], 4, "tet")?;
        let region = parse_fields::<u32>(line, &f[4..], 1, "tet region")?[0];
        if let Some(&bad) = v.iter().find(|&&i| i >= nv) {
            return Err(Error::Parse {
                line,
                message: format!("tet references vertex {bad} of {nv}"),
            });
        }
        let vs = [v[0], v[1], v[2], v[3]];
        let vol = signed_volume(vs.map(|i| &vertices[i]));
        if !(vol > 0.0) {
            return Err(Error::Parse {
                line,
                message: format!("tet has non-positive volume {vol:e}"),
            });
        }
        tets.push(Tet { vertices: vs, region });
    }

    let nf = parse_count(&mut lines, "facet count")?;
    let mut facets = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (line, f) = lines.next_record("facet")?;
        if f.len() != 4 {
            return Err(Error::Parse {
                line,
                message: format!("facet: expected 4 fields, found {}", f.len()),
            });
        }
        let v = parse_fields::<usize>(line, &f[..3], 3, "facet")?;
        let patch = parse_fields::<u32>(line, &f[3..], 1, "facet patch")?[0];
        if let Some(&bad) = v.iter().find(|&&i| i >= nv) {
            return Err(Error::Parse {
                line,
                message: format!("facet references vertex {bad} of {nv}"),
            });
        }
        if let Some(tags) = tags {
            if !tags.iter().any(|t| t.id == patch) {
                return Err(Error::Parse {
                    line,
                    message: format!("facet carries unknown patch id {patch}"),
                });
            }
        }
        facets.push(([v[0], v[1], v[2]], patch));
    }
    if let Ok((line, _)) = lines.next_record("") {
        return Err(Error::Parse {
            line,
            message: "trailing data after facet block".into(),
        });
    }

    let patches = match tags {
        Some(t) => t.to_vec(),
        None => {
            let mut ids: Vec<u32> = facets.iter().map(|f| f.1).collect();
            ids.sort_unstable();
            ids.dedup();
            ids.into_iter()
                .map(|id| PatchTag {
                    id,
                    name: format!("patch{id}"),
                })
                .collect()
        }
    };
    TetMesh::from_parts(vertices, tets, facets, patches)
}

pub(crate) fn format_mesh(mesh: &TetMesh) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}");
    let _ = writeln!(out, "{}", mesh.num_vertices());
    for v in mesh.vertices() {
        // `{:?}` prints the shortest representation that round-trips exactly.
        let _ = writeln!(out, "{:?} {:?} {:?}", v.x, v.y, v.z);
    }
    let _ = writeln!(out, "{}", mesh.num_tets());
    for t in mesh.tets() {
        let [a, b, c, d] = t.vertices;
        let _ = writeln!(out, "{a} {b} {c} {d} {}", t.region);
    }
    let _ = writeln!(out, "{}", mesh.num_facets());
    for f in mesh.facets() {
        let [a, b, c] = f.vertices;
        let _ = writeln!(out, "{a} {b} {c} {}", f.patch);
    }
    out
}

pub fn write_mesh(mesh: &TetMesh, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_mesh(mesh))?;
    Ok(())
}
