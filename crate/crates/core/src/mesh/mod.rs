//! Tetrahedral meshes with canonically oriented edges and tagged boundary facets.

mod generate;
mod io;
mod locate;

pub use generate::{generate_box_mesh, BOX_PATCH_NAMES};
pub use io::{read_mesh, read_mesh_with_tags, write_mesh};
pub use locate::PointLocator;

use std::collections::HashMap;

use crate::linalg::Vec3;
use crate::{Error, Result};

/// Local vertex pairs of the six tetrahedron edges.
pub const TET_EDGES: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];

/// Local vertex pairs of the three triangle edges.
pub const TRI_EDGES: [[usize; 2]; 3] = [[0, 1], [0, 2], [1, 2]];

/// Local vertex triples of the four tetrahedron faces; face `k` is opposite vertex `k`.
pub const TET_FACES: [[usize; 3]; 4] = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatchTag {
    pub id: u32,
    pub name: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tet {
    pub vertices: [usize; 4],
    pub region: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryFacet {
    pub vertices: [usize; 3],
    pub patch: u32,
    /// The unique tetrahedron this facet is a face of.
    pub owner: usize,
}

/// Global edge id together with the orientation of the local edge relative to
/// the canonical `(a, b)`, `a < b` orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeRef {
    pub edge: usize,
    pub sign: i8,
}

impl EdgeRef {
    #[inline]
    pub fn sign_f64(self) -> f64 {
        f64::from(self.sign)
    }
}

/// Outward unit normal, area and an orthonormal tangent pair of a boundary facet.
#[derive(Debug, Clone, Copy)]
pub struct FacetFrame {
    pub normal: Vec3,
    pub area: f64,
    pub tangents: [Vec3; 2],
}

/// Immutable tetrahedral mesh.
#[derive(Debug, Clone)]
pub struct TetMesh {
    vertices: Vec<Vec3>,
    tets: Vec<Tet>,
    edges: Vec<[usize; 2]>,
    tet_edges: Vec<[EdgeRef; 6]>,
    facets: Vec<BoundaryFacet>,
    facet_edges: Vec<[EdgeRef; 3]>,
    patches: Vec<PatchTag>,
}

fn sorted3(mut f: [usize; 3]) -> [usize; 3] {
    f.sort_unstable();
    f
}

pub(crate) fn signed_volume(p: [&Vec3; 4]) -> f64 {
    (p[1] - p[0]).cross(&(p[2] - p[0])).dot(&(p[3] - p[0])) / 6.0
}

impl TetMesh {
    /// Builds a mesh from its stored fields, deriving edges, incidences and
    /// facet owners, and checks every structural invariant.
    pub fn from_parts(
        vertices: Vec<Vec3>,
        tets: Vec<Tet>,
        facets: Vec<([usize; 3], u32)>,
        patches: Vec<PatchTag>,
    ) -> Result<Self> {
        let nv = vertices.len();
        if let Some(v) = vertices.iter().position(|v| !v.iter().all(|x| x.is_finite())) {
            return Err(Error::Validation(format!("vertex {v} has non-finite coordinates")));
        }
        for (k, p) in patches.iter().enumerate() {
            if patches[..k].iter().any(|q| q.id == p.id) {
                return Err(Error::Validation(format!("duplicate patch id {}", p.id)));
            }
        }

        for (t, tet) in tets.iter().enumerate() {
            if let Some(&v) = tet.vertices.iter().find(|&&v| v >= nv) {
                return Err(Error::Validation(format!(
                    "tet {t} references vertex {v} of {nv}"
                )));
            }
            let vol = signed_volume(tet.vertices.map(|v| &vertices[v]));
            if !(vol > 0.0) {
                return Err(Error::Validation(format!(
                    "tet {t} has non-positive signed volume {vol:e}"
                )));
            }
        }

        // Edges, numbered in lexicographic order of their sorted vertex pairs.
        let mut edges: Vec<[usize; 2]> = tets
            .iter()
            .flat_map(|t| {
                TET_EDGES.iter().map(move |&[i, j]| {
                    let (a, b) = (t.vertices[i], t.vertices[j]);
                    [a.min(b), a.max(b)]
                })
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        let edge_index: HashMap<[usize; 2], usize> =
            edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let edge_ref = |a: usize, b: usize| -> Option<EdgeRef> {
            let key = [a.min(b), a.max(b)];
            edge_index.get(&key).map(|&edge| EdgeRef {
                edge,
                sign: if a < b { 1 } else { -1 },
            })
        };

        let tet_edges: Vec<[EdgeRef; 6]> = tets
            .iter()
            .map(|t| {
                TET_EDGES.map(|[i, j]| {
                    edge_ref(t.vertices[i], t.vertices[j]).expect("edge collected above")
                })
            })
            .collect();

        // Face adjacency.
        let mut face_owners: HashMap<[usize; 3], Vec<usize>> = HashMap::new();
        for (t, tet) in tets.iter().enumerate() {
            for f in TET_FACES {
                let key = sorted3(f.map(|i| tet.vertices[i]));
                face_owners.entry(key).or_default().push(t);
            }
        }
        if let Some((face, owners)) = face_owners.iter().find(|(_, o)| o.len() > 2) {
            return Err(Error::Validation(format!(
                "face {face:?} is shared by {} tets",
                owners.len()
            )));
        }

        let mut seen = HashMap::new();
        let mut built_facets = Vec::with_capacity(facets.len());
        for (k, (fv, patch)) in facets.iter().enumerate() {
            if let Some(&v) = fv.iter().find(|&&v| v >= nv) {
                return Err(Error::Validation(format!(
                    "facet {k} references vertex {v} of {nv}"
                )));
            }
            if !patches.iter().any(|p| p.id == *patch) {
                return Err(Error::Validation(format!(
                    "facet {k} carries unknown patch id {patch}"
                )));
            }
            let key = sorted3(*fv);
            let owner = match face_owners.get(&key).map(Vec::as_slice) {
                Some([t]) => *t,
                Some(_) => {
                    return Err(Error::Validation(format!(
                        "facet {k} {fv:?} is an interior face"
                    )))
                }
                None => {
                    return Err(Error::Validation(format!(
                        "facet {k} {fv:?} is not a face of any tet"
                    )))
                }
            };
            if seen.insert(key, k).is_some() {
                return Err(Error::Validation(format!("facet {k} {fv:?} is listed twice")));
            }
            built_facets.push(BoundaryFacet {
                vertices: *fv,
                patch: *patch,
                owner,
            });
        }
        let boundary_faces = face_owners.values().filter(|o| o.len() == 1).count();
        if boundary_faces != built_facets.len() {
            return Err(Error::Validation(format!(
                "{} boundary faces but {} facets listed",
                boundary_faces,
                built_facets.len()
            )));
        }

        let facet_edges = built_facets
            .iter()
            .map(|f| {
                TRI_EDGES.map(|[i, j]| {
                    edge_ref(f.vertices[i], f.vertices[j]).expect("facet edges are tet edges")
                })
            })
            .collect();

        let mesh = Self {
            vertices,
            tets,
            edges,
            tet_edges,
            facets: built_facets,
            facet_edges,
            patches,
        };
        for f in 0..mesh.facets.len() {
            mesh.facet_frame(f)?;
        }
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn tets(&self) -> &[Tet] {
        &self.tets
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn facets(&self) -> &[BoundaryFacet] {
        &self.facets
    }

    pub fn patches(&self) -> &[PatchTag] {
        &self.patches
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_tets(&self) -> usize {
        self.tets.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    /// Global edges of tet `t`, in [`TET_EDGES`] order, with orientation signs.
    pub fn tet_edges(&self, t: usize) -> &[EdgeRef; 6] {
        &self.tet_edges[t]
    }

    /// Global edges of facet `f`, in [`TRI_EDGES`] order, with orientation signs.
    pub fn facet_edges(&self, f: usize) -> &[EdgeRef; 3] {
        &self.facet_edges[f]
    }

    pub fn tet_points(&self, t: usize) -> [Vec3; 4] {
        self.tets[t].vertices.map(|v| self.vertices[v])
    }

    pub fn facet_points(&self, f: usize) -> [Vec3; 3] {
        self.facets[f].vertices.map(|v| self.vertices[v])
    }

    pub fn tet_volume(&self, t: usize) -> f64 {
        let p = self.tet_points(t);
        signed_volume([&p[0], &p[1], &p[2], &p[3]])
    }

    pub fn tet_centroid(&self, t: usize) -> Vec3 {
        let p = self.tet_points(t);
        (p[0] + p[1] + p[2] + p[3]) / 4.0
    }

    pub fn regions(&self) -> Vec<u32> {
        let mut r: Vec<u32> = self.tets.iter().map(|t| t.region).collect();
        r.sort_unstable();
        r.dedup();
        r
    }

    /// Returns a copy with tet regions reassigned by `f(tet index, centroid)`.
    pub fn with_regions(&self, mut f: impl FnMut(usize, &Vec3) -> u32) -> Self {
        let mut mesh = self.clone();
        for t in 0..mesh.tets.len() {
            let c = self.tet_centroid(t);
            mesh.tets[t].region = f(t, &c);
        }
        mesh
    }

    /// Returns a copy with facet patches reassigned by `f(facet index, current patch)`.
    pub fn with_patches(
        &self,
        patches: Vec<PatchTag>,
        mut f: impl FnMut(usize, u32) -> u32,
    ) -> Result<Self> {
        let facets = self
            .facets
            .iter()
            .enumerate()
            .map(|(k, fc)| (fc.vertices, f(k, fc.patch)))
            .collect();
        Self::from_parts(self.vertices.clone(), self.tets.clone(), facets, patches)
    }

    /// Returns a copy with every vertex mapped through `f`. Fails if a tet is inverted.
    pub fn map_vertices(&self, f: impl Fn(&Vec3) -> Vec3) -> Result<Self> {
        let vertices = self.vertices.iter().map(f).collect();
        let facets = self.facets.iter().map(|fc| (fc.vertices, fc.patch)).collect();
        Self::from_parts(vertices, self.tets.clone(), facets, self.patches.clone())
    }

    /// Whether vertex `v` lies on some boundary facet.
    pub fn boundary_vertex_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.vertices.len()];
        for f in &self.facets {
            for &v in &f.vertices {
                mask[v] = true;
            }
        }
        mask
    }

    /// Outward unit normal, area and tangent basis of boundary facet `f`.
    pub fn facet_frame(&self, f: usize) -> Result<FacetFrame> {
        let facet = self
            .facets
            .get(f)
            .ok_or_else(|| Error::InvalidArgument(format!("facet {f} does not exist")))?;
        let p = self.facet_points(f);
        frame_from_points(&p, &self.tet_centroid(facet.owner))
            .ok_or_else(|| Error::Degenerate(format!("facet {f} has zero area")))
    }

    /// Sum of facet areas per patch id, ordered as [`Self::patches`].
    pub fn patch_areas(&self) -> Vec<(u32, f64)> {
        self.patches
            .iter()
            .map(|p| {
                let area = (0..self.facets.len())
                    .filter(|&f| self.facets[f].patch == p.id)
                    .map(|f| triangle_area(&self.facet_points(f)))
                    .sum();
                (p.id, area)
            })
            .collect()
    }
}

pub(crate) fn triangle_area(p: &[Vec3; 3]) -> f64 {
    0.5 * (p[1] - p[0]).cross(&(p[2] - p[0])).norm()
}

fn frame_from_points(p: &[Vec3; 3], interior: &Vec3) -> Option<FacetFrame> {
    let e1 = p[1] - p[0];
    let e2 = p[2] - p[0];
    let n = e1.cross(&e2);
    let twice_area = n.norm();
    let scale = e1.norm().max(e2.norm()).max((p[2] - p[1]).norm());
    if !(twice_area > 1e-14 * scale * scale) {
        return None;
    }
    let mut normal = n / twice_area;
    let centroid = (p[0] + p[1] + p[2]) / 3.0;
    if normal.dot(&(centroid - interior)) < 0.0 {
        normal = -normal;
    }
    let t1 = e1.normalize();
    let t2 = normal.cross(&t1);
    Some(FacetFrame {
        normal,
        area: 0.5 * twice_area,
        tangents: [t1, t2],
    })
}
