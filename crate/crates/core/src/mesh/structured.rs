use super::Mesh;
use crate::Vec3;

/// Uniform triangulation of (0,1)² with `n` squares per side, each split
/// along its lower-left to upper-right diagonal.
///
/// # Panics
///
/// Panics if `n == 0`.
pub fn build_unit_square_mesh(n: usize) -> Mesh {
    assert!(n >= 1, "need at least one subdivision");
    let h = 1.0 / n as f64;
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let mut vertices: Vec<Vec3> = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push([i as f64 * h, j as f64 * h, 0.0]);
        }
    }
    let mut elements = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (v00, v10, v11, v01) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            elements.push(vec![v00, v10, v11]);
            elements.push(vec![v00, v11, v01]);
        }
    }
    Mesh::new(2, vertices, elements).expect("structured square mesh is valid")
}

/// Kuhn triangulation of (0,1)³: each of the `n³` cubes is split into six
/// tetrahedra sharing the main diagonal.
///
/// # Panics
///
/// Panics if `n == 0`.
pub fn build_unit_cube_mesh(n: usize) -> Mesh {
    assert!(n >= 1, "need at least one subdivision");
    let h = 1.0 / n as f64;
    let idx = |i: usize, j: usize, k: usize| (k * (n + 1) + j) * (n + 1) + i;
    let mut vertices: Vec<Vec3> = Vec::with_capacity((n + 1).pow(3));
    for k in 0..=n {
        for j in 0..=n {
            for i in 0..=n {
                vertices.push([i as f64 * h, j as f64 * h, k as f64 * h]);
            }
        }
    }
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut elements = Vec::with_capacity(6 * n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                for perm in PERMS {
                    let mut corner = [i, j, k];
                    let mut tet = vec![idx(corner[0], corner[1], corner[2])];
                    for axis in perm {
                        corner[axis] += 1;
                        tet.push(idx(corner[0], corner[1], corner[2]));
                    }
                    elements.push(tet);
                }
            }
        }
    }
    Mesh::new(3, vertices, elements).expect("Kuhn cube mesh is valid")
}
