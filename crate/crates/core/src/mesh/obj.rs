use std::fmt::Write as _;

use super::{MeshError, Point, TriangleMesh};

/// ASCII OBJ subset: `v` and `f` statements. Polygons are fan-triangulated
/// from their first vertex; texture/normal references and every other
/// statement are ignored.
pub fn parse_obj(input: &[u8]) -> Result<TriangleMesh, MeshError> {
    let text = std::str::from_utf8(input)
        .map_err(|e| MeshError::Parse { line: 0, reason: format!("not UTF-8: {e}") })?;
    let mut vertices: Vec<Point> = Vec::new();
    // (line, zero-based index) before range checking.
    let mut faces: Vec<(usize, Vec<i64>)> = Vec::new();
    let mut name = None;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let coords: Vec<f64> = tokens
                    .take(3)
                    .map(|t| {
                        t.parse::<f64>()
                            .ok()
                            .filter(|v| v.is_finite())
                            .ok_or_else(|| MeshError::Parse { line: line_no, reason: format!("bad coordinate `{t}`") })
                    })
                    .collect::<Result<_, _>>()?;
                if coords.len() != 3 {
                    return Err(MeshError::Parse { line: line_no, reason: "vertex needs 3 coordinates".into() });
                }
                vertices.push([coords[0], coords[1], coords[2]]);
            }
            Some("f") => {
                let mut idx = Vec::new();
                for t in tokens {
                    let head = t.split('/').next().unwrap_or("");
                    let n: i64 = head
                        .parse()
                        .map_err(|_| MeshError::Parse { line: line_no, reason: format!("bad face index `{t}`") })?;
                    let resolved = match n {
                        0 => return Err(MeshError::Parse { line: line_no, reason: "face index 0 is invalid".into() }),
                        n if n > 0 => n - 1,
                        n => vertices.len() as i64 + n,
                    };
                    if resolved < 0 {
                        return Err(MeshError::IndexOutOfRange { line: line_no, index: n, count: vertices.len() });
                    }
                    idx.push(resolved);
                }
                if idx.len() < 3 {
                    return Err(MeshError::Parse { line: line_no, reason: "face needs at least 3 vertices".into() });
                }
                faces.push((line_no, idx));
            }
            Some("o") | Some("g") if name.is_none() => {
                let rest: Vec<&str> = tokens.collect();
                if !rest.is_empty() {
                    name = Some(rest.join(" "));
                }
            }
            _ => {}
        }
    }

    let count = vertices.len();
    let mut triangles = Vec::new();
    for (line, idx) in faces {
        if let Some(&bad) = idx.iter().find(|&&i| i as usize >= count) {
            return Err(MeshError::IndexOutOfRange { line, index: bad + 1, count });
        }
        for k in 1..idx.len() - 1 {
            let t = [idx[0] as u32, idx[k] as u32, idx[k + 1] as u32];
            if t[0] != t[1] && t[1] != t[2] && t[0] != t[2] {
                triangles.push(t);
            }
        }
    }
    TriangleMesh::new(vertices, triangles, name)
}

pub fn write_obj(mesh: &TriangleMesh) -> String {
    let mut out = String::new();
    if let Some(name) = mesh.name() {
        let _ = writeln!(out, "o {name}");
    }
    for v in mesh.vertices() {
        let _ = writeln!(out, "v {} {} {}", v[0], v[1], v[2]);
    }
    for t in mesh.triangles() {
        let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::fixtures::{icosphere, unit_cube};

    const CUBE_QUADS: &str = "\
# unit cube
o cube
v 0 0 0
v 1 0 0
v 0 1 0
v 1 1 0
v 0 0 1
v 1 0 1
v 0 1 1
v 1 1 1
vn 0 0 1
f 1 3 4 2
f 5 6 8 7
f 1 2 6 5
f 3 7 8 4
f 1 5 7 3
f 2 4 8 6
";

    #[test]
    fn quad_cube_triangulates() {
        let mesh = parse_obj(CUBE_QUADS.as_bytes()).unwrap();
        assert_eq!(mesh.triangles().len(), 12);
        assert_eq!(mesh.name(), Some("cube"));
        assert!((mesh.signed_volume().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn slash_syntax_ignores_normals() {
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 1\nf 1//1 2//1 3//1\n";
        let mesh = parse_obj(text.as_bytes()).unwrap();
        assert_eq!(mesh.triangles(), &[[0, 1, 2]]);
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nf 1/1/1 2/1/1 3/1/1\n";
        assert_eq!(parse_obj(text.as_bytes()).unwrap().triangles(), &[[0, 1, 2]]);
    }

    #[test]
    fn negative_indices_are_relative() {
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n";
        assert_eq!(parse_obj(text.as_bytes()).unwrap().triangles(), &[[0, 1, 2]]);
    }

    #[test]
    fn out_of_range_index() {
        let mut text = CUBE_QUADS.to_string();
        text.push_str("f 1 2 99\n");
        match parse_obj(text.as_bytes()).unwrap_err() {
            MeshError::IndexOutOfRange { index, count, .. } => assert_eq!((index, count), (99, 8)),
            e => panic!("unexpected {e:?}"),
        }
        assert!(matches!(parse_obj(b"v 0 0 0\nf -5 1 1\n"), Err(MeshError::IndexOutOfRange { .. })));
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(parse_obj(b"v 0 zero 0\n"), Err(MeshError::Parse { line: 1, .. })));
        assert!(matches!(parse_obj(b"v 0 0 0\nv 1 0 0\nf 1 2\n"), Err(MeshError::Parse { line: 3, .. })));
        assert!(matches!(parse_obj(b"v 0 0\n"), Err(MeshError::Parse { .. })));
        assert!(matches!(parse_obj(b"v 0 0 0\nf 0 1 1\n"), Err(MeshError::Parse { .. })));
    }

    #[test]
    fn round_trip_preserves_geometry() {
        for mesh in [unit_cube(), icosphere(2)] {
            let back = parse_obj(write_obj(&mesh).as_bytes()).unwrap();
            assert_eq!(back.vertices().len(), mesh.vertices().len());
            assert_eq!(back.triangles().len(), mesh.triangles().len());
            assert!((back.volume().unwrap() - mesh.volume().unwrap()).abs() < 1e-12);
        }
    }
}
