use std::collections::HashMap;

use super::{signed_volume, PatchTag, Tet, TetMesh, TET_FACES};
use crate::linalg::Vec3;
use crate::{Error, Result};

/// Patch names of [`generate_box_mesh`], indexed by patch id.
pub const BOX_PATCH_NAMES: [&str; 6] = ["xmin", "xmax", "ymin", "ymax", "zmin", "zmax"];

/// Axis orderings of the Kuhn subdivision; every tet walks from the lowest
/// corner of the cell to the highest one along unit steps in this order.
const KUHN_PATHS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Structured box `[0, Lx] × [0, Ly] × [0, Lz]` with `nx·ny·nz` cells, each
/// split into six tets sharing the cell's main diagonal.
pub fn generate_box_mesh(nx: usize, ny: usize, nz: usize, lengths: [f64; 3]) -> Result<TetMesh> {
    if nx == 0 || ny == 0 || nz == 0 {
        return Err(Error::InvalidArgument(format!(
            "division counts must be positive, got ({nx}, {ny}, {nz})"
        )));
    }
    if !lengths.iter().all(|&l| l.is_finite() && l > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "box lengths must be positive, got {lengths:?}"
        )));
    }
    let vid = |i: usize, j: usize, k: usize| i + (nx + 1) * (j + (ny + 1) * k);

    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
    for k in 0..=nz {
        for j in 0..=ny {
            for i in 0..=nx {
                vertices.push(Vec3::new(
                    lengths[0] * i as f64 / nx as f64,
                    lengths[1] * j as f64 / ny as f64,
                    lengths[2] * k as f64 / nz as f64,
                ));
            }
        }
    }

    let mut tets = Vec::with_capacity(6 * nx * ny * nz);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                for path in KUHN_PATHS {
                    let mut corner = [i, j, k];
                    let mut vs = [vid(i, j, k), 0, 0, 0];
                    for (step, &axis) in path.iter().enumerate() {
                        corner[axis] += 1;
                        vs[step + 1] = vid(corner[0], corner[1], corner[2]);
                    }
                    if signed_volume(vs.map(|v| &vertices[v])) < 0.0 {
                        vs.swap(1, 2);
                    }
                    tets.push(Tet {
                        vertices: vs,
                        region: 0,
                    });
                }
            }
        }
    }

    // Boundary faces: those seen exactly once, in tet order.
    let mut count: HashMap<[usize; 3], usize> = HashMap::new();
    for t in &tets {
        for f in TET_FACES {
            let mut key = f.map(|l| t.vertices[l]);
            key.sort_unstable();
            *count.entry(key).or_default() += 1;
        }
    }
    let on_plane = |p: &Vec3, axis: usize, side: usize| {
        let target = if side == 0 { 0.0 } else { lengths[axis] };
        (p[axis] - target).abs() <= 1e-12 * lengths[axis]
    };
    let mut facets = Vec::new();
    for t in &tets {
        for f in TET_FACES {
            let fv = f.map(|l| t.vertices[l]);
            let mut key = fv;
            key.sort_unstable();
            if count[&key] != 1 {
                continue;
            }
            let patch = (0..3)
                .flat_map(|axis| (0..2).map(move |side| (axis, side)))
                .find(|&(axis, side)| fv.iter().all(|&v| on_plane(&vertices[v], axis, side)))
                .map(|(axis, side)| (2 * axis + side) as u32)
                .expect("boundary face lies on a box side");
            facets.push((fv, patch));
        }
    }

    let patches = BOX_PATCH_NAMES
        .iter()
        .enumerate()
        .map(|(id, name)| PatchTag {
            id: id as u32,
            name: (*name).to_string(),
        })
        .collect();
    TetMesh::from_parts(vertices, tets, facets, patches)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn unit_cube_counts() {
        let m = generate_box_mesh(1, 1, 1, [1.0; 3]).unwrap();
        assert_eq!(m.num_vertices(), 8);
        assert_eq!(m.num_tets(), 6);
        assert_eq!(m.num_edges(), 19);
        assert_eq!(m.num_facets(), 12);
    }

    #[test]
    fn unit_cube_edges_by_enumeration() {
        // Brute force: every pair of vertices that shares some tet.
        let m = generate_box_mesh(1, 1, 1, [1.0; 3]).unwrap();
        let mut pairs = BTreeSet::new();
        for t in m.tets() {
            for a in 0..4 {
                for b in a + 1..4 {
                    let (x, y) = (t.vertices[a], t.vertices[b]);
                    pairs.insert((x.min(y), x.max(y)));
                }
            }
        }
        assert_eq!(pairs.len(), 19);
        let lens: Vec<f64> = pairs
            .iter()
            .map(|&(a, b)| (m.vertices()[a] - m.vertices()[b]).norm())
            .collect();
        let count = |l: f64| lens.iter().filter(|&&x| (x - l).abs() < 1e-12).count();
        assert_eq!(count(1.0), 12);
        assert_eq!(count(2f64.sqrt()), 6);
        assert_eq!(count(3f64.sqrt()), 1);
    }

    #[test]
    fn two_cells() {
        let m = generate_box_mesh(2, 1, 1, [2.0, 1.0, 1.0]).unwrap();
        assert_eq!(m.num_vertices(), 12);
        assert_eq!(m.num_tets(), 12);
    }

    #[test]
    fn zero_division_is_an_error() {
        assert!(matches!(
            generate_box_mesh(0, 1, 1, [1.0; 3]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(generate_box_mesh(1, 1, 1, [1.0, -1.0, 1.0]).is_err());
    }

    #[test]
    fn areas_and_volumes() {
        for n in 1..=4 {
            let m = generate_box_mesh(n, n, n, [1.0; 3]).unwrap();
            let area: f64 = m.patch_areas().iter().map(|p| p.1).sum();
            assert!((area - 6.0).abs() < 1e-12);
            for (_, a) in m.patch_areas() {
                assert!((a - 1.0).abs() < 1e-12);
            }
            let vol: f64 = (0..m.num_tets()).map(|t| m.tet_volume(t)).sum();
            assert!((vol - 1.0).abs() < 1e-12);
        }
        let m = generate_box_mesh(3, 2, 1, [1.5, 0.5, 2.0]).unwrap();
        let vol: f64 = (0..m.num_tets()).map(|t| m.tet_volume(t)).sum();
        assert!((vol - 1.5).abs() < 1e-12);
    }

    #[test]
    fn zmin_normals() {
        let m = generate_box_mesh(2, 2, 2, [1.0; 3]).unwrap();
        for f in 0..m.num_facets() {
            let fr = m.facet_frame(f).unwrap();
            let expected = match m.facets()[f].patch {
                0 => Vec3::new(-1.0, 0.0, 0.0),
                1 => Vec3::new(1.0, 0.0, 0.0),
                2 => Vec3::new(0.0, -1.0, 0.0),
                3 => Vec3::new(0.0, 1.0, 0.0),
                4 => Vec3::new(0.0, 0.0, -1.0),
                _ => Vec3::new(0.0, 0.0, 1.0),
            };
            assert!((fr.normal - expected).norm() < 1e-14);
        }
    }
}
