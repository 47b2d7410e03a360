use nalgebra::Matrix3;

use super::TetMesh;
use crate::linalg::Vec3;

/// Uniform bucket grid over the mesh bounding box for point-in-tet queries.
pub struct PointLocator<'m> {
    mesh: &'m TetMesh,
    lo: Vec3,
    cell: Vec3,
    dims: [usize; 3],
    buckets: Vec<Vec<usize>>,
    inverse_maps: Vec<Matrix3<f64>>,
}

impl<'m> PointLocator<'m> {
    pub fn new(mesh: &'m TetMesh) -> Self {
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for v in mesh.vertices() {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        let extent = (hi - lo).map(|e| e.max(1e-300));
        let per_axis = ((mesh.num_tets() as f64).cbrt().ceil() as usize).max(1);
        let dims = [per_axis; 3];
        let cell = extent.map(|e| e / per_axis as f64);
        let mut buckets = vec![Vec::new(); per_axis * per_axis * per_axis];

        let mut inverse_maps = Vec::with_capacity(mesh.num_tets());
        for t in 0..mesh.num_tets() {
            let p = mesh.tet_points(t);
            let jac = Matrix3::from_columns(&[p[1] - p[0], p[2] - p[0], p[3] - p[0]]);
            inverse_maps.push(jac.try_inverse().expect("tets have positive volume"));

            let mut blo = p[0];
            let mut bhi = p[0];
            for q in &p[1..] {
                blo = blo.inf(q);
                bhi = bhi.sup(q);
            }
            let range = |a: usize| {
                let i0 = (((blo[a] - lo[a]) / cell[a]).floor() as isize - 1).max(0) as usize;
                let i1 = ((((bhi[a] - lo[a]) / cell[a]).floor() as isize + 1).max(0) as usize)
                    .min(dims[a] - 1);
                i0.min(dims[a] - 1)..=i1
            };
            for k in range(2) {
                for j in range(1) {
                    for i in range(0) {
                        buckets[i + dims[0] * (j + dims[1] * k)].push(t);
                    }
                }
            }
        }
        Self {
            mesh,
            lo,
            cell,
            dims,
            buckets,
            inverse_maps,
        }
    }

    /// Barycentric coordinates of `x` in tet `t`.
    pub fn barycentric(&self, t: usize, x: &Vec3) -> [f64; 4] {
        let p0 = self.mesh.vertices()[self.mesh.tets()[t].vertices[0]];
        let r = self.inverse_maps[t] * (x - p0);
        [1.0 - r.x - r.y - r.z, r.x, r.y, r.z]
    }

    /// Tet containing `x` (the one with the largest minimum barycentric
    /// coordinate among candidates) and the barycentric coordinates of `x` in it.
    pub fn locate(&self, x: &Vec3) -> Option<(usize, [f64; 4])> {
        let idx = |a: usize| {
            let i = ((x[a] - self.lo[a]) / self.cell[a]).floor();
            (i.max(0.0) as usize).min(self.dims[a] - 1)
        };
        let b = idx(0) + self.dims[0] * (idx(1) + self.dims[1] * idx(2));
        let mut best: Option<(usize, [f64; 4], f64)> = None;
        for &t in &self.buckets[b] {
            let l = self.barycentric(t, x);
            let m = l.iter().copied().fold(f64::INFINITY, f64::min);
            if best.as_ref().is_none_or(|bst| m > bst.2) {
                best = Some((t, l, m));
            }
        }
        match best {
            Some((t, l, m)) if m > -1e-9 => Some((t, l)),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_box_mesh;

    #[test]
    fn locates_centroids_and_reproduces_points() {
        let m = generate_box_mesh(3, 2, 2, [1.0, 2.0, 0.5]).unwrap();
        let loc = PointLocator::new(&m);
        for t in 0..m.num_tets() {
            let c = m.tet_centroid(t);
            let (found, l) = loc.locate(&c).unwrap();
            assert_eq!(found, t);
            let p = m.tet_points(t);
            let back = p[0] * l[0] + p[1] * l[1] + p[2] * l[2] + p[3] * l[3];
            assert!((back - c).norm() < 1e-12);
        }
        assert!(loc.locate(&Vec3::new(5.0, 5.0, 5.0)).is_none());
    }
}
