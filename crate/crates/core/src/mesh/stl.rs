use std::collections::HashMap;
use std::fmt::Write as _;

use super::{MeshError, Point, TriangleMesh};

const HEADER_LEN: usize = 80;
const FACET_LEN: usize = 50;

/// Deduplicates vertices by exact bit pattern while keeping winding.
#[derive(Default)]
struct VertexPool {
    vertices: Vec<Point>,
    index: HashMap<[u64; 3], u32>,
    triangles: Vec<[u32; 3]>,
}

impl VertexPool {
    fn intern(&mut self, p: Point) -> u32 {
        let key = p.map(f64::to_bits);
        *self.index.entry(key).or_insert_with(|| {
            self.vertices.push(p);
            (self.vertices.len() - 1) as u32
        })
    }

    fn push_triangle(&mut self, corners: [Point; 3]) {
        let t = corners.map(|p| self.intern(p));
        if t[0] != t[1] && t[1] != t[2] && t[0] != t[2] {
            self.triangles.push(t);
        }
    }

    fn finish(self, name: Option<String>) -> Result<TriangleMesh, MeshError> {
        TriangleMesh::new(self.vertices, self.triangles, name)
    }
}

/// Binary when the size matches the facet count; ASCII when the file
/// starts with `solid` and reads as facet text.
pub fn parse_stl(input: &[u8]) -> Result<TriangleMesh, MeshError> {
    let binary_count = (input.len() >= HEADER_LEN + 4).then(|| {
        u32::from_le_bytes(input[HEADER_LEN..HEADER_LEN + 4].try_into().expect("4 bytes"))
    });
    if let Some(count) = binary_count {
        if input.len() == HEADER_LEN + 4 + FACET_LEN * count as usize {
            return parse_binary(input, count);
        }
    }
    let looks_ascii = input.trim_ascii_start().starts_with(b"solid")
        && std::str::from_utf8(input).is_ok_and(|s| s.contains("facet") || s.contains("endsolid"));
    if looks_ascii {
        return parse_ascii(std::str::from_utf8(input).expect("checked utf8"));
    }
    match binary_count {
        Some(count) => Err(MeshError::TruncatedFile {
            expected: HEADER_LEN + 4 + FACET_LEN * count as usize,
            actual: input.len(),
            triangles: count,
        }),
        None => Err(MeshError::Parse { line: 0, reason: "file too short to be STL".into() }),
    }
}

fn parse_binary(input: &[u8], count: u32) -> Result<TriangleMesh, MeshError> {
    let header = String::from_utf8_lossy(&input[..HEADER_LEN]);
    let name = header.trim_matches(char::from(0)).trim();
    let name = (!name.is_empty()).then(|| name.to_string());
    let mut pool = VertexPool::default();
    let f32_at = |off: usize| f32::from_le_bytes(input[off..off + 4].try_into().expect("4 bytes")) as f64;
    for facet in 0..count as usize {
        // Skip the 12-byte normal; 2-byte attribute count trails the vertices.
        let base = HEADER_LEN + 4 + facet * FACET_LEN + 12;
        let mut corners = [[0.0; 3]; 3];
        for (k, corner) in corners.iter_mut().enumerate() {
            for (c, coord) in corner.iter_mut().enumerate() {
                *coord = f32_at(base + 12 * k + 4 * c);
            }
        }
        if corners.iter().flatten().any(|c| !c.is_finite()) {
            return Err(MeshError::Parse { line: facet + 1, reason: "non-finite vertex in facet".into() });
        }
        pool.push_triangle(corners);
    }
    pool.finish(name)
}

fn parse_ascii(text: &str) -> Result<TriangleMesh, MeshError> {
    let mut pool = VertexPool::default();
    let mut name = None;
    let mut loop_vertices: Option<Vec<Point>> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let mut tokens = raw.split_whitespace();
        let err = |reason: &str| MeshError::Parse { line: line_no, reason: reason.to_string() };
        match tokens.next() {
            Some("solid") => {
                let rest: Vec<&str> = tokens.collect();
                if !rest.is_empty() {
                    name = Some(rest.join(" "));
                }
            }
            Some("outer") => {
                if loop_vertices.is_some() {
                    return Err(err("nested `outer loop`"));
                }
                loop_vertices = Some(Vec::new());
            }
            Some("vertex") => {
                let coords: Vec<f64> = tokens
                    .map(|t| t.parse::<f64>().ok().filter(|v| v.is_finite()))
                    .collect::<Option<_>>()
                    .ok_or_else(|| err("bad vertex coordinate"))?;
                let [x, y, z] = coords[..] else {
                    return Err(err("vertex needs 3 coordinates"));
                };
                loop_vertices.as_mut().ok_or_else(|| err("vertex outside `outer loop`"))?.push([x, y, z]);
            }
            Some("endloop") => {
                let vs = loop_vertices.take().ok_or_else(|| err("`endloop` without `outer loop`"))?;
                if vs.len() < 3 {
                    return Err(err("facet loop needs at least 3 vertices"));
                }
                for k in 1..vs.len() - 1 {
                    pool.push_triangle([vs[0], vs[k], vs[k + 1]]);
                }
            }
            Some("facet") | Some("endfacet") | Some("endsolid") | None => {}
            Some(other) => return Err(err(&format!("unexpected keyword `{other}`"))),
        }
    }
    if loop_vertices.is_some() {
        return Err(MeshError::Parse { line: text.lines().count(), reason: "unterminated facet loop".into() });
    }
    pool.finish(name)
}

fn facet_normal([a, b, c]: [Point; 3]) -> Point {
    let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    let n = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
    let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if len > 0.0 {
        n.map(|c| c / len)
    } else {
        [0.0; 3]
    }
}

pub fn write_stl_ascii(mesh: &TriangleMesh) -> String {
    let name = mesh.name().unwrap_or("mesh");
    let mut out = format!("solid {name}\n");
    for t in mesh.triangles() {
        let corners = mesh.corners(t);
        let n = facet_normal(corners);
        let _ = writeln!(out, "  facet normal {} {} {}", n[0], n[1], n[2]);
        out.push_str("    outer loop\n");
        for p in corners {
            let _ = writeln!(out, "      vertex {} {} {}", p[0], p[1], p[2]);
        }
        out.push_str("    endloop\n  endfacet\n");
    }
    let _ = writeln!(out, "endsolid {name}");
    out
}

/// Little-endian binary STL. Coordinates are narrowed to `f32`.
pub fn write_stl_binary(mesh: &TriangleMesh) -> Vec<u8> {
    let mut out = vec![0u8; HEADER_LEN];
    let name = mesh.name().unwrap_or("binary mesh").as_bytes();
    let n = name.len().min(HEADER_LEN);
    out[..n].copy_from_slice(&name[..n]);
    out.extend_from_slice(&(mesh.triangles().len() as u32).to_le_bytes());
    for t in mesh.triangles() {
        let corners = mesh.corners(t);
        for c in facet_normal(corners).into_iter().chain(corners.into_iter().flatten()) {
            out.extend_from_slice(&(c as f32).to_le_bytes());
        }
        out.extend_from_slice(&0u16.to_le_bytes());
    }
    out
}
