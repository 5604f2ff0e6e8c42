use std::collections::HashMap;

use proptest::prelude::*;
use rda::mesh::{build_unit_cube_mesh, build_unit_square_mesh, load_gmsh, parse_gmsh, write_gmsh, Mesh};
use rda::RdaError;

fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

/// Interior faces counted by brute force over all element pairs.
fn brute_force_interior(mesh: &Mesh) -> usize {
    let els = mesh.elements();
    let mut n = 0;
    for a in 0..els.len() {
        for b in a + 1..els.len() {
            let shared = els[a].iter().filter(|v| els[b].contains(v)).count();
            if shared == mesh.dim() {
                n += 1;
            }
        }
    }
    n
}

fn check_faces(mesh: &Mesh) {
    let d = mesh.dim();
    assert_eq!(mesh.num_interior_faces(), brute_force_interior(mesh));
    // Each element has d + 1 faces; interior faces are counted twice.
    assert_eq!(
        2 * mesh.num_interior_faces() + mesh.num_boundary_faces(),
        (d + 1) * mesh.num_elements()
    );
    for f in mesh.faces() {
        let len: f64 = f.normal.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((len - 1.0).abs() < 1e-12);
        // The normal points away from the plus element's barycenter.
        let c = mesh.barycenters()[f.elements.0];
        let out: f64 = (0..3).map(|i| (f.centroid[i] - c[i]) * f.normal[i]).sum();
        assert!(out > 0.0);
    }
}

#[test]
fn unit_square_counts() {
    let m = build_unit_square_mesh(1);
    assert_eq!((m.num_elements(), m.num_vertices(), m.faces().len()), (2, 4, 5));
    let m = build_unit_square_mesh(8);
    assert_eq!((m.num_elements(), m.num_vertices()), (128, 81));
    assert!((m.total_measure() - 1.0).abs() < 1e-14);
    let m = build_unit_square_mesh(2);
    assert_eq!((m.num_boundary_faces(), m.num_interior_faces()), (8, 8));
}

#[test]
fn unit_cube_counts() {
    let m = build_unit_cube_mesh(1);
    assert_eq!(m.num_elements(), 6);
    assert!((m.total_measure() - 1.0).abs() < 1e-14);
    assert_eq!(build_unit_cube_mesh(2).num_elements(), 48);
    check_faces(&build_unit_cube_mesh(4));
}

#[test]
fn delaunay_cube_from_msh41() {
    let mesh = load_gmsh(fixture("unit_cube_delaunay.msh")).unwrap();
    assert_eq!(mesh.dim(), 3);
    assert_eq!(mesh.num_elements(), 432);
    assert_eq!(mesh.num_boundary_faces(), 192);
    assert!((mesh.total_measure() - 1.0).abs() < 1e-10);
    assert!(mesh.volumes().iter().all(|&v| v > 0.0));
    check_faces(&mesh);
}

#[test]
fn msh22_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for mesh in [build_unit_square_mesh(5), build_unit_cube_mesh(3)] {
        let path = dir.path().join("m.msh");
        write_gmsh(&mesh, &path).unwrap();
        let back = load_gmsh(&path).unwrap();
        assert_eq!(back.num_elements(), mesh.num_elements());
        assert_eq!(back.faces().len(), mesh.faces().len());
        for k in 0..mesh.num_elements() {
            assert_eq!(back.element_coords(k), mesh.element_coords(k));
        }
    }
}

#[test]
fn missing_file_is_io_error() {
    assert!(matches!(load_gmsh("/nonexistent/mesh.msh"), Err(RdaError::Io { .. })));
}

#[test]
fn ten_node_tet_is_parse_error() {
    let text = "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n10\n\
        1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\n5 .5 0 0\n6 .5 .5 0\n7 0 .5 0\n8 0 0 .5\n9 0 .5 .5\n10 .5 0 .5\n\
        $EndNodes\n$Elements\n1\n1 11 2 0 1 1 2 3 4 5 6 7 8 9 10\n$EndElements\n";
    assert!(matches!(parse_gmsh(text), Err(RdaError::Parse { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn structured_meshes_partition_the_domain(n in 1usize..9, dim in 2usize..=3) {
        let mesh = if dim == 2 { build_unit_square_mesh(n) } else { build_unit_cube_mesh(n.min(4)) };
        prop_assert!((mesh.total_measure() - 1.0).abs() < 1e-12);
        prop_assert!(mesh.volumes().iter().all(|&v| v > 0.0));
        check_faces(&mesh);
        // Boundary faces tile the boundary: total measure 4 (square) or 6 (cube).
        let bnd: f64 = mesh.faces().iter().filter(|f| f.is_boundary()).map(|f| f.measure).sum();
        prop_assert!((bnd - 2.0 * dim as f64).abs() < 1e-12);
    }

    #[test]
    fn vertex_relabeling_preserves_face_count(seed in any::<u64>()) {
        use rand::{seq::SliceRandom, SeedableRng};
        let mesh = build_unit_square_mesh(4);
        let mut perm: Vec<usize> = (0..mesh.num_vertices()).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let mut vertices = vec![[0.0; 3]; perm.len()];
        for (old, &new) in perm.iter().enumerate() {
            vertices[new] = mesh.vertices()[old];
        }
        let elements = mesh.elements().iter().map(|e| e.iter().map(|&v| perm[v]).collect()).collect();
        let relabeled = Mesh::new(2, vertices, elements).unwrap();
        prop_assert_eq!(relabeled.faces().len(), mesh.faces().len());
        let count = |m: &Mesh| {
            let mut h: HashMap<bool, usize> = HashMap::new();
            for f in m.faces() { *h.entry(f.is_boundary()).or_default() += 1; }
            h
        };
        prop_assert_eq!(count(&relabeled), count(&mesh));
    }
}
