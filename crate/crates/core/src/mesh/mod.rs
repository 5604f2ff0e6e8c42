//! Simplicial meshes (triangles in 2D, tetrahedra in 3D) with face
//! connectivity and the per-element geometry the discretisation needs.

mod gmsh;
mod structured;

pub use gmsh::{load_gmsh, parse_gmsh, write_gmsh};
pub use structured::{build_unit_cube_mesh, build_unit_square_mesh};

use crate::{RdaError, Result, Vec3};

/// A (d-1)-dimensional face of the mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    /// Sorted vertex indices.
    pub vertices: Vec<usize>,
    /// `(plus, minus)`. The plus side is the lower element index; boundary
    /// faces have no minus side.
    pub elements: (usize, Option<usize>),
    /// Unit normal pointing out of the plus element.
    pub normal: Vec3,
    /// Longest edge of the face.
    pub diameter: f64,
    /// Length (2D) or area (3D).
    pub measure: f64,
    pub centroid: Vec3,
}

impl Face {
    pub fn is_boundary(&self) -> bool {
        self.elements.1.is_none()
    }
}

/// Immutable simplicial mesh.
#[derive(Debug, Clone)]
pub struct Mesh {
    dim: usize,
    vertices: Vec<Vec3>,
    elements: Vec<Vec<usize>>,
    faces: Vec<Face>,
    element_faces: Vec<Vec<usize>>,
    vertex_elements: Vec<Vec<usize>>,
    diameters: Vec<f64>,
    barycenters: Vec<Vec3>,
    volumes: Vec<f64>,
}

impl Mesh {
    /// Builds a mesh from raw vertex coordinates and simplices.
    ///
    /// Negatively oriented simplices are flipped in place. Degenerate
    /// simplices and vertex indices out of range are rejected.
    pub fn new(dim: usize, vertices: Vec<Vec3>, mut elements: Vec<Vec<usize>>) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(RdaError::InvalidConfig(format!("mesh dimension {dim}")));
        }
        if elements.is_empty() {
            return Err(RdaError::EmptyMesh);
        }
        let mut volumes = Vec::with_capacity(elements.len());
        for (k, el) in elements.iter_mut().enumerate() {
            if el.len() != dim + 1 {
                return Err(RdaError::InvalidConfig(format!(
                    "element {k} has {} vertices, expected {}",
                    el.len(),
                    dim + 1
                )));
            }
            if let Some(&v) = el.iter().find(|&&v| v >= vertices.len()) {
                return Err(RdaError::InvalidConfig(format!(
                    "element {k} references missing vertex {v}"
                )));
            }
            let mut vol = signed_volume(dim, &vertices, el);
            if vol < 0.0 {
                el.swap(dim - 1, dim);
                vol = -vol;
            }
            if vol <= 0.0 {
                return Err(RdaError::InvalidConfig(format!("element {k} is degenerate")));
            }
            volumes.push(vol);
        }

        let diameters = elements
            .iter()
            .map(|el| longest_edge(&vertices, el))
            .collect();
        let barycenters: Vec<Vec3> = elements.iter().map(|el| centroid(&vertices, el)).collect();

        let mut vertex_elements = vec![Vec::new(); vertices.len()];
        for (k, el) in elements.iter().enumerate() {
            for &v in el {
                vertex_elements[v].push(k);
            }
        }

        let adjacency = face_connectivity(dim, &elements)?;
        let mut element_faces = vec![Vec::with_capacity(dim + 1); elements.len()];
        let mut faces = Vec::with_capacity(adjacency.len());
        for (fi, (fverts, plus, minus)) in adjacency.into_iter().enumerate() {
            element_faces[plus].push(fi);
            if let Some(mi) = minus {
                element_faces[mi].push(fi);
            }
            let c = centroid(&vertices, &fverts);
            let mut n = face_normal(dim, &vertices, &fverts);
            let xk = barycenters[plus];
            let outward: f64 = (0..dim).map(|i| (c[i] - xk[i]) * n[i]).sum();
            if outward < 0.0 {
                for x in n.iter_mut() {
                    *x = -*x;
                }
            }
            faces.push(Face {
                diameter: longest_edge(&vertices, &fverts),
                measure: simplex_measure(dim - 1, &vertices, &fverts),
                centroid: c,
                normal: n,
                vertices: fverts,
                elements: (plus, minus),
            });
        }

        Ok(Mesh {
            dim,
            vertices,
            elements,
            faces,
            element_faces,
            vertex_elements,
            diameters,
            barycenters,
            volumes,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }

    pub fn element(&self, k: usize) -> &[usize] {
        &self.elements[k]
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Face indices bounding element `k`.
    pub fn element_faces(&self, k: usize) -> &[usize] {
        &self.element_faces[k]
    }

    /// Elements touching vertex `v`.
    pub fn vertex_elements(&self, v: usize) -> &[usize] {
        &self.vertex_elements[v]
    }

    /// Element diameters h_K (longest edge).
    pub fn diameters(&self) -> &[f64] {
        &self.diameters
    }

    pub fn barycenters(&self) -> &[Vec3] {
        &self.barycenters
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    /// Global mesh size h = max h_K.
    pub fn h(&self) -> f64 {
        self.diameters.iter().copied().fold(0.0, f64::max)
    }

    pub fn total_measure(&self) -> f64 {
        self.volumes.iter().sum()
    }

    pub fn num_boundary_faces(&self) -> usize {
        self.faces.iter().filter(|f| f.is_boundary()).count()
    }

    pub fn num_interior_faces(&self) -> usize {
        self.faces.len() - self.num_boundary_faces()
    }

    /// Coordinates of the vertices of element `k`.
    pub fn element_coords(&self, k: usize) -> Vec<Vec3> {
        self.elements[k].iter().map(|&v| self.vertices[v]).collect()
    }

    /// Coordinates of the vertices of face `f`.
    pub fn face_coords(&self, f: usize) -> Vec<Vec3> {
        self.faces[f].vertices.iter().map(|&v| self.vertices[v]).collect()
    }

    /// Elements sharing at least one vertex with `k` (including `k`), sorted.
    pub fn vertex_neighbors(&self, k: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.elements[k]
            .iter()
            .flat_map(|&v| self.vertex_elements[v].iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Sorted face vertices, plus element and optional minus element.
pub type FaceAdjacency = (Vec<usize>, usize, Option<usize>);

/// Enumerates the faces of a simplex list.
///
/// Returns `(sorted face vertices, plus element, minus element)` with faces
/// ordered by their sorted vertex tuple and `plus < minus`.
pub fn face_connectivity(dim: usize, elements: &[Vec<usize>]) -> Result<Vec<FaceAdjacency>> {
    let mut keyed: Vec<(Vec<usize>, usize)> = Vec::with_capacity(elements.len() * (dim + 1));
    for (k, el) in elements.iter().enumerate() {
        for skip in 0..el.len() {
            let mut key: Vec<usize> = el
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &v)| v)
                .collect();
            key.sort_unstable();
            keyed.push((key, k));
        }
    }
    keyed.sort();

    let mut out = Vec::with_capacity(keyed.len() / 2 + 1);
    let mut i = 0;
    while i < keyed.len() {
        let mut j = i + 1;
        while j < keyed.len() && keyed[j].0 == keyed[i].0 {
            j += 1;
        }
        match j - i {
            1 => out.push((keyed[i].0.clone(), keyed[i].1, None)),
            2 => {
                let (a, b) = (keyed[i].1, keyed[i + 1].1);
                let mut sa = elements[a].clone();
                let mut sb = elements[b].clone();
                sa.sort_unstable();
                sb.sort_unstable();
                if a == b || sa == sb {
                    return Err(RdaError::NonManifold {
                        vertices: keyed[i].0.clone(),
                    });
                }
                out.push((keyed[i].0.clone(), a.min(b), Some(a.max(b))));
            }
            _ => {
                return Err(RdaError::NonManifold {
                    vertices: keyed[i].0.clone(),
                })
            }
        }
        i = j;
    }
    Ok(out)
}

fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: &Vec3) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

fn signed_volume(dim: usize, vertices: &[Vec3], el: &[usize]) -> f64 {
    let p0 = vertices[el[0]];
    let e1 = sub(&vertices[el[1]], &p0);
    let e2 = sub(&vertices[el[2]], &p0);
    if dim == 2 {
        0.5 * (e1[0] * e2[1] - e1[1] * e2[0])
    } else {
        let e3 = sub(&vertices[el[3]], &p0);
        let c = cross(&e2, &e3);
        (e1[0] * c[0] + e1[1] * c[1] + e1[2] * c[2]) / 6.0
    }
}

/// Unsigned measure of a simplex of topological dimension `sdim`.
fn simplex_measure(sdim: usize, vertices: &[Vec3], verts: &[usize]) -> f64 {
    let p0 = vertices[verts[0]];
    match sdim {
        1 => norm(&sub(&vertices[verts[1]], &p0)),
        2 => {
            let c = cross(
                &sub(&vertices[verts[1]], &p0),
                &sub(&vertices[verts[2]], &p0),
            );
            0.5 * norm(&c)
        }
        _ => signed_volume(3, vertices, verts).abs(),
    }
}

fn face_normal(dim: usize, vertices: &[Vec3], fverts: &[usize]) -> Vec3 {
    let p0 = vertices[fverts[0]];
    let t = sub(&vertices[fverts[1]], &p0);
    let n = if dim == 2 {
        [t[1], -t[0], 0.0]
    } else {
        cross(&t, &sub(&vertices[fverts[2]], &p0))
    };
    let len = norm(&n);
    [n[0] / len, n[1] / len, n[2] / len]
}

fn longest_edge(vertices: &[Vec3], verts: &[usize]) -> f64 {
    let mut h: f64 = 0.0;
    for (i, &a) in verts.iter().enumerate() {
        for &b in &verts[i + 1..] {
            h = h.max(norm(&sub(&vertices[a], &vertices[b])));
        }
    }
    h
}

fn centroid(vertices: &[Vec3], verts: &[usize]) -> Vec3 {
    let mut c = [0.0; 3];
    for &v in verts {
        for i in 0..3 {
            c[i] += vertices[v][i];
        }
    }
    let n = verts.len() as f64;
    [c[0] / n, c[1] / n, c[2] / n]
}
