mod common;

use cavity::mesh::{generate_box_mesh, read_mesh, read_mesh_with_tags, write_mesh, PointLocator, BOX_PATCH_NAMES};
use cavity::Error;
use proptest::prelude::*;
use rand::Rng;

use common::{random_mesh, rng};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn box_mesh_measures(nx in 1usize..5, ny in 1usize..5, nz in 1usize..5, lx in 0.2f64..3.0, ly in 0.2f64..3.0, lz in 0.2f64..3.0) {
        let m = generate_box_mesh(nx, ny, nz, [lx, ly, lz]).unwrap();
        let volume: f64 = (0..m.num_tets()).map(|t| m.tet_volume(t)).sum();
        prop_assert!((volume - lx * ly * lz).abs() <= 1e-12 * lx * ly * lz);
        prop_assert!((0..m.num_tets()).all(|t| m.tet_volume(t) > 0.0));
        let expected = [ly * lz, ly * lz, lx * lz, lx * lz, lx * ly, lx * ly];
        for ((id, area), want) in m.patch_areas().into_iter().zip(expected) {
            prop_assert!((area - want).abs() <= 1e-12 * want, "patch {}", id);
        }
        // Euler characteristic of a ball: V − E + F − T = 1
        let v = m.num_vertices() as i64;
        let e = m.num_edges() as i64;
        let t = m.num_tets() as i64;
        let faces = (4 * t + m.num_facets() as i64) / 2;
        prop_assert_eq!(v - e + faces - t, 1);
        prop_assert_eq!(m.num_vertices(), (nx + 1) * (ny + 1) * (nz + 1));
    }

    #[test]
    fn edges_are_canonical_and_signs_consistent(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_mesh(&mut r, 200);
        for &[a, b] in m.edges() {
            prop_assert!(a < b);
        }
        for t in 0..m.num_tets() {
            let tet = m.tets()[t];
            for (k, er) in m.tet_edges(t).iter().enumerate() {
                let [i, j] = cavity::mesh::TET_EDGES[k];
                let (a, b) = (tet.vertices[i], tet.vertices[j]);
                let [ga, gb] = m.edges()[er.edge];
                prop_assert!((ga, gb) == (a.min(b), a.max(b)));
                prop_assert_eq!(er.sign, if a < b { 1 } else { -1 });
            }
        }
    }

    #[test]
    fn outward_normals(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_mesh(&mut r, 200);
        for f in 0..m.num_facets() {
            let frame = m.facet_frame(f).unwrap();
            let owner = m.facets()[f].owner;
            let p = m.facet_points(f);
            prop_assert!(frame.normal.dot(&(p[0] - m.tet_centroid(owner))) > 0.0);
            prop_assert!((frame.normal.norm() - 1.0).abs() < 1e-12);
            prop_assert!(frame.tangents.iter().all(|t| t.dot(&frame.normal).abs() < 1e-12));
        }
    }

    #[test]
    fn write_read_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_mesh(&mut r, 200);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.mesh");
        write_mesh(&m, &path).unwrap();
        let back = read_mesh_with_tags(&path, m.patches()).unwrap();
        prop_assert_eq!(back.vertices(), m.vertices());
        prop_assert_eq!(back.tets(), m.tets());
        prop_assert_eq!(back.facets(), m.facets());
        prop_assert_eq!(back.edges(), m.edges());
        prop_assert_eq!(back.patches(), m.patches());
    }

    #[test]
    fn point_location(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_mesh(&mut r, 200);
        let locator = PointLocator::new(&m);
        for _ in 0..20 {
            let t = r.random_range(0..m.num_tets());
            let mut l = [r.random_range(0.05..1.0), r.random_range(0.05..1.0), r.random_range(0.05..1.0), r.random_range(0.05..1.0)];
            let s: f64 = l.iter().sum();
            l.iter_mut().for_each(|x| *x /= s);
            let p = m.tet_points(t);
            let x = p[0] * l[0] + p[1] * l[1] + p[2] * l[2] + p[3] * l[3];
            let (found, bary) = locator.locate(&x).unwrap();
            prop_assert_eq!(found, t);
            for k in 0..4 {
                prop_assert!((bary[k] - l[k]).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn box_patch_names() {
    let m = generate_box_mesh(2, 1, 1, [2.0, 1.0, 1.0]).unwrap();
    let names: Vec<&str> = m.patches().iter().map(|p| p.name.as_str()).collect();
    assert_eq!(names, BOX_PATCH_NAMES);
    let ids: Vec<u32> = m.patches().iter().map(|p| p.id).collect();
    assert_eq!(ids, [0, 1, 2, 3, 4, 5]);
}

#[test]
fn untagged_read_names_patches_by_id() {
    let m = generate_box_mesh(1, 1, 1, [1.0; 3]).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cube.mesh");
    write_mesh(&m, &path).unwrap();
    let back = read_mesh(&path).unwrap();
    let names: Vec<String> = back.patches().iter().map(|p| p.name.clone()).collect();
    assert_eq!(names, (0..6).map(|k| format!("patch{k}")).collect::<Vec<_>>());
}

#[test]
fn truncated_file_reports_a_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.mesh");
    std::fs::write(&path, "tetmesh 1\n4\n0 0 0\n1 0 0\n0 1 0\n").unwrap();
    match read_mesh(&path) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 6),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn missing_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(read_mesh(dir.path().join("none.mesh")), Err(Error::Io(_))));
}

#[test]
fn inverting_map_is_rejected() {
    let m = generate_box_mesh(1, 1, 1, [1.0; 3]).unwrap();
    let mirrored = m.map_vertices(|x| cavity::Vec3::new(-x.x, x.y, x.z));
    assert!(mirrored.is_err());
}
