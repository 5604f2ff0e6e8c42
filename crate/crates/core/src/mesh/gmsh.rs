//! ASCII Gmsh MSH reader (versions 2.2 and 4.1) and a v2.2 writer.
//!
//! Only linear simplices are understood. Triangles (type 2) and tetrahedra
//! (type 4) are volume elements; points (15), lines (1) and, in 3D, surface
//! triangles are skipped. Physical tags are ignored.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::Mesh;
use crate::{RdaError, Result, Vec3};

/// Reads a mesh from an ASCII `.msh` file.
pub fn load_gmsh(path: impl AsRef<Path>) -> Result<Mesh> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| RdaError::io(path, e))?;
    parse_gmsh(&text)
}

/// Writes `mesh` in MSH 2.2 ASCII format.
pub fn write_gmsh(mesh: &Mesh, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_msh22(mesh)).map_err(|e| RdaError::io(path, e))
}

fn to_msh22(mesh: &Mesh) -> String {
    let mut s = String::new();
    s.push_str("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n");
    let _ = writeln!(s, "{}", mesh.num_vertices());
    for (i, v) in mesh.vertices().iter().enumerate() {
        let _ = writeln!(s, "{} {:e} {:e} {:e}", i + 1, v[0], v[1], v[2]);
    }
    s.push_str("$EndNodes\n$Elements\n");
    let _ = writeln!(s, "{}", mesh.num_elements());
    let ty = if mesh.dim() == 2 { 2 } else { 4 };
    for (k, el) in mesh.elements().iter().enumerate() {
        let _ = write!(s, "{} {ty} 2 1 1", k + 1);
        for v in el {
            let _ = write!(s, " {}", v + 1);
        }
        s.push('\n');
    }
    s.push_str("$EndElements\n");
    s
}

fn nodes_per_type(ty: usize, line: usize) -> Result<usize> {
    match ty {
        15 => Ok(1),
        1 => Ok(2),
        2 => Ok(3),
        4 => Ok(4),
        _ => Err(RdaError::parse(
            line,
            format!("unsupported element type {ty} (only linear simplices are accepted)"),
        )),
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    current: usize,
}

impl<'a> Lines<'a> {
    fn next_nonempty(&mut self) -> Option<&'a str> {
        for (i, l) in self.inner.by_ref() {
            self.current = i + 1;
            let t = l.trim();
            if !t.is_empty() {
                return Some(t);
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<&'a str> {
        self.next_nonempty()
            .ok_or_else(|| RdaError::parse(self.current, format!("unexpected end of file, expected {what}")))
    }

    fn numbers<T: std::str::FromStr>(&mut self, what: &str) -> Result<Vec<T>> {
        let line = self.expect(what)?;
        line.split_whitespace()
            .map(|t| {
                t.parse::<T>()
                    .map_err(|_| RdaError::parse(self.current, format!("bad number '{t}' in {what}")))
            })
            .collect()
    }

    fn end_section(&mut self, name: &str) -> Result<()> {
        let l = self.expect(&format!("$End{name}"))?;
        if l != format!("$End{name}") {
            return Err(RdaError::parse(self.current, format!("expected $End{name}, found '{l}'")));
        }
        Ok(())
    }
}

fn field<T: Copy>(v: &[T], i: usize, line: usize, what: &str) -> Result<T> {
    v.get(i)
        .copied()
        .ok_or_else(|| RdaError::parse(line, format!("truncated {what} line")))
}

/// Parses MSH text. See the module docs for the accepted subset.
pub fn parse_gmsh(text: &str) -> Result<Mesh> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        current: 0,
    };
    let mut version: Option<u32> = None;
    let mut nodes: HashMap<usize, Vec3> = HashMap::new();
    // (element type, node tags)
    let mut raw: Vec<(usize, Vec<usize>)> = Vec::new();

    while let Some(header) = lines.next_nonempty() {
        let Some(name) = header.strip_prefix('$') else {
            return Err(RdaError::parse(lines.current, format!("expected section header, found '{header}'")));
        };
        match name {
            "MeshFormat" => {
                let l = lines.expect("format line")?;
                let parts: Vec<&str> = l.split_whitespace().collect();
                if parts.len() < 3 {
                    return Err(RdaError::parse(lines.current, "malformed $MeshFormat"));
                }
                version = match parts[0] {
                    "2.2" | "2.1" | "2" => Some(2),
                    "4.1" => Some(4),
                    v => return Err(RdaError::parse(lines.current, format!("unsupported MSH version {v}"))),
                };
                if parts[1] != "0" {
                    return Err(RdaError::parse(lines.current, "binary MSH is not supported"));
                }
                lines.end_section("MeshFormat")?;
            }
            "Nodes" => {
                let v = version.ok_or_else(|| RdaError::parse(lines.current, "$Nodes before $MeshFormat"))?;
                if v == 2 {
                    read_nodes_v2(&mut lines, &mut nodes)?;
                } else {
                    read_nodes_v4(&mut lines, &mut nodes)?;
                }
                lines.end_section("Nodes")?;
            }
            "Elements" => {
                let v = version.ok_or_else(|| RdaError::parse(lines.current, "$Elements before $MeshFormat"))?;
                if v == 2 {
                    read_elements_v2(&mut lines, &mut raw)?;
                } else {
                    read_elements_v4(&mut lines, &mut raw)?;
                }
                lines.end_section("Elements")?;
            }
            other if other.starts_with("End") => {
                return Err(RdaError::parse(lines.current, format!("unmatched ${other}")));
            }
            other => {
                // Skip unknown sections such as $PhysicalNames or $Entities.
                let end = format!("$End{other}");
                loop {
                    match lines.next_nonempty() {
                        Some(l) if l == end => break,
                        Some(_) => continue,
                        None => return Err(RdaError::parse(lines.current, format!("missing {end}"))),
                    }
                }
            }
        }
    }
    if version.is_none() {
        return Err(RdaError::parse(lines.current, "missing $MeshFormat"));
    }

    let dim = if raw.iter().any(|(t, _)| *t == 4) {
        3
    } else if raw.iter().any(|(t, _)| *t == 2) {
        2
    } else {
        return Err(RdaError::EmptyMesh);
    };
    let volume_type = if dim == 3 { 4 } else { 2 };

    let mut renumber: HashMap<usize, usize> = HashMap::new();
    let mut tags_in_order: Vec<usize> = Vec::new();
    let mut elements = Vec::new();
    for (ty, tags) in raw.into_iter().filter(|(t, _)| *t == volume_type) {
        debug_assert_eq!(ty, volume_type);
        let mut el = Vec::with_capacity(tags.len());
        for t in tags {
            if !nodes.contains_key(&t) {
                return Err(RdaError::parse(lines.current, format!("element references unknown node {t}")));
            }
            let next = renumber.len();
            let id = *renumber.entry(t).or_insert_with(|| {
                tags_in_order.push(t);
                next
            });
            el.push(id);
        }
        elements.push(el);
    }
    let vertices: Vec<Vec3> = tags_in_order
        .iter()
        .map(|t| {
            let p = nodes[t];
            if dim == 2 {
                [p[0], p[1], 0.0]
            } else {
                p
            }
        })
        .collect();
    Mesh::new(dim, vertices, elements)
}

fn read_nodes_v2(lines: &mut Lines, nodes: &mut HashMap<usize, Vec3>) -> Result<()> {
    let count: Vec<usize> = lines.numbers("node count")?;
    let n = field(&count, 0, lines.current, "node count")?;
    for _ in 0..n {
        let l = lines.expect("node")?;
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() < 4 {
            return Err(RdaError::parse(lines.current, "truncated node line"));
        }
        let tag = parse_at::<usize>(&parts, 0, lines.current)?;
        let p = [
            parse_at::<f64>(&parts, 1, lines.current)?,
            parse_at::<f64>(&parts, 2, lines.current)?,
            parse_at::<f64>(&parts, 3, lines.current)?,
        ];
        nodes.insert(tag, p);
    }
    Ok(())
}

fn read_nodes_v4(lines: &mut Lines, nodes: &mut HashMap<usize, Vec3>) -> Result<()> {
    let header: Vec<usize> = lines.numbers("$Nodes header")?;
    let blocks = field(&header, 0, lines.current, "$Nodes header")?;
    for _ in 0..blocks {
        let bh: Vec<usize> = lines.numbers("node block header")?;
        let parametric = field(&bh, 2, lines.current, "node block header")?;
        let count = field(&bh, 3, lines.current, "node block header")?;
        let mut tags = Vec::with_capacity(count);
        for _ in 0..count {
            let t: Vec<usize> = lines.numbers("node tag")?;
            tags.push(field(&t, 0, lines.current, "node tag")?);
        }
        for tag in tags {
            let c: Vec<f64> = lines.numbers("node coordinates")?;
            if c.len() < 3 || (parametric == 0 && c.len() != 3) {
                return Err(RdaError::parse(lines.current, "bad node coordinate line"));
            }
            nodes.insert(tag, [c[0], c[1], c[2]]);
        }
    }
    Ok(())
}

fn read_elements_v2(lines: &mut Lines, raw: &mut Vec<(usize, Vec<usize>)>) -> Result<()> {
    let count: Vec<usize> = lines.numbers("element count")?;
    let n = field(&count, 0, lines.current, "element count")?;
    for _ in 0..n {
        let v: Vec<usize> = lines.numbers("element")?;
        let ty = field(&v, 1, lines.current, "element")?;
        let ntags = field(&v, 2, lines.current, "element")?;
        let nn = nodes_per_type(ty, lines.current)?;
        let start = 3 + ntags;
        if v.len() != start + nn {
            return Err(RdaError::parse(lines.current, "element line has wrong node count"));
        }
        raw.push((ty, v[start..].to_vec()));
    }
    Ok(())
}

fn read_elements_v4(lines: &mut Lines, raw: &mut Vec<(usize, Vec<usize>)>) -> Result<()> {
    let header: Vec<usize> = lines.numbers("$Elements header")?;
    let blocks = field(&header, 0, lines.current, "$Elements header")?;
    for _ in 0..blocks {
        let bh: Vec<usize> = lines.numbers("element block header")?;
        let ty = field(&bh, 2, lines.current, "element block header")?;
        let count = field(&bh, 3, lines.current, "element block header")?;
        let nn = nodes_per_type(ty, lines.current)?;
        for _ in 0..count {
            let v: Vec<usize> = lines.numbers("element")?;
            if v.len() != 1 + nn {
                return Err(RdaError::parse(lines.current, "element line has wrong node count"));
            }
            raw.push((ty, v[1..].to_vec()));
        }
    }
    Ok(())
}

fn parse_at<T: std::str::FromStr>(parts: &[&str], i: usize, line: usize) -> Result<T> {
    parts[i]
        .parse()
        .map_err(|_| RdaError::parse(line, format!("bad number '{}'", parts[i])))
}
