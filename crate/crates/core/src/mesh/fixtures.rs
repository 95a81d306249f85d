//! Synthetic closed meshes: cube, icosphere and an elongated creature shape.

use std::collections::HashMap;
use std::f64::consts::PI;

use super::{Point, TriangleMesh};

/// `[0,1]³` with outward winding.
pub fn unit_cube() -> TriangleMesh {
    let vertices = (0..8u32)
        .map(|i| [(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64])
        .collect();
    let triangles = vec![
        [0, 2, 3], [0, 3, 1], // -z
        [4, 5, 7], [4, 7, 6], // +z
        [0, 1, 5], [0, 5, 4], // -y
        [2, 6, 7], [2, 7, 3], // +y
        [0, 4, 6], [0, 6, 2], // -x
        [1, 3, 7], [1, 7, 5], // +x
    ];
    TriangleMesh::new(vertices, triangles, Some("unit_cube".into())).expect("valid cube")
}

/// Unit-radius icosphere; each subdivision splits every face into four.
pub fn icosphere(subdivisions: u32) -> TriangleMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<Point> = [
        [-1.0, t, 0.0], [1.0, t, 0.0], [-1.0, -t, 0.0], [1.0, -t, 0.0],
        [0.0, -1.0, t], [0.0, 1.0, t], [0.0, -1.0, -t], [0.0, 1.0, -t],
        [t, 0.0, -1.0], [t, 0.0, 1.0], [-t, 0.0, -1.0], [-t, 0.0, 1.0],
    ]
    .into_iter()
    .map(normalize)
    .collect();
    let mut faces: Vec<[u32; 3]> = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut cache: HashMap<(u32, u32), u32> = HashMap::new();
        let mut midpoint = |a: u32, b: u32, vertices: &mut Vec<Point>| {
            *cache.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let (p, q) = (vertices[a as usize], vertices[b as usize]);
                vertices.push(normalize([(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0, (p[2] + q[2]) / 2.0]));
                (vertices.len() - 1) as u32
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    TriangleMesh::new(vertices, faces, Some(format!("icosphere_{subdivisions}"))).expect("valid icosphere")
}

fn normalize(p: Point) -> Point {
    let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    p.map(|c| c / n)
}

/// Concatenate components, flipping any with inward winding.
fn assemble(parts: Vec<TriangleMesh>, name: &str) -> TriangleMesh {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for part in parts {
        let base = vertices.len() as u32;
        let flip = part.signed_volume().expect("non-empty part") < 0.0;
        vertices.extend_from_slice(part.vertices());
        triangles.extend(part.triangles().iter().map(|&[a, b, c]| {
            if flip {
                [base + a, base + c, base + b]
            } else {
                [base + a, base + b, base + c]
            }
        }));
    }
    TriangleMesh::new(vertices, triangles, Some(name.into())).expect("valid assembly")
}

fn ellipsoid(center: Point, semi_axes: Point) -> TriangleMesh {
    let sphere = icosphere(3);
    let vertices = sphere
        .vertices()
        .iter()
        .map(|v| [center[0] + semi_axes[0] * v[0], center[1] + semi_axes[1] * v[1], center[2] + semi_axes[2] * v[2]])
        .collect();
    TriangleMesh::new(vertices, sphere.triangles().to_vec(), None).expect("valid ellipsoid")
}

/// Closed frustum along x between `x0` (radius `r0`) and `x1` (radius `r1`).
/// A zero radius collapses that end to an apex.
fn frustum_x(x0: f64, r0: f64, x1: f64, r1: f64, segments: u32) -> TriangleMesh {
    let ring = |x: f64, r: f64| -> Vec<Point> {
        (0..segments)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / segments as f64;
                [x, r * a.cos(), r * a.sin()]
            })
            .collect()
    };
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    let end = |x: f64, r: f64, vertices: &mut Vec<Point>| -> (u32, Option<u32>) {
        // Returns (centre or apex index, first ring index).
        let centre = vertices.len() as u32;
        vertices.push([x, 0.0, 0.0]);
        if r > 0.0 {
            let first = vertices.len() as u32;
            vertices.extend(ring(x, r));
            (centre, Some(first))
        } else {
            (centre, None)
        }
    };
    let (c0, ring0) = end(x0, r0, &mut vertices);
    let (c1, ring1) = end(x1, r1, &mut vertices);
    let n = segments;
    for k in 0..n {
        let k1 = (k + 1) % n;
        match (ring0, ring1) {
            (Some(a), Some(b)) => {
                triangles.push([c0, a + k1, a + k]);
                triangles.push([c1, b + k, b + k1]);
                triangles.push([a + k, a + k1, b + k1]);
                triangles.push([a + k, b + k1, b + k]);
            }
            (Some(a), None) => {
                triangles.push([c0, a + k1, a + k]);
                triangles.push([a + k, a + k1, c1]);
            }
            (None, Some(b)) => {
                triangles.push([c1, b + k, b + k1]);
                triangles.push([c0, b + k1, b + k]);
            }
            (None, None) => unreachable!("frustum needs at least one non-zero radius"),
        }
    }
    TriangleMesh::new(vertices, triangles, None).expect("valid frustum")
}

/// Model-space snout endpoints of [`dragonoid`]: back of head to snout tip.
pub const DRAGONOID_SNOUT: (Point, Point) = ([0.88, 0.0, 0.0], [1.0, 0.0, 0.0]);

/// Stylized creature of unit length along x, built from four disjoint closed
/// parts: tail cone, body ellipsoid, neck cylinder and head ellipsoid.
pub fn dragonoid() -> TriangleMesh {
    assemble(
        vec![
            frustum_x(0.0, 0.0, 0.35, 0.04, 48),
            ellipsoid([0.56, 0.0, 0.0], [0.2, 0.06, 0.05]),
            frustum_x(0.765, 0.025, 0.875, 0.025, 48),
            ellipsoid([0.94, 0.0, 0.0], [0.06, 0.025, 0.02]),
        ],
        "dragonoid",
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{Axis, LengthMeasure, Watertight};

    #[test]
    fn cube_and_sphere_are_closed_and_outward() {
        for m in [unit_cube(), icosphere(0), icosphere(3)] {
            assert_eq!(m.watertight(), Watertight::Closed);
            assert!(m.signed_volume().unwrap() > 0.0);
        }
        assert_eq!(icosphere(3).triangles().len(), 1280);
    }

    #[test]
    fn frustum_volume_matches_formula() {
        let cyl = frustum_x(0.0, 1.0, 2.0, 1.0, 256);
        let exact = PI * 2.0;
        assert!((cyl.volume().unwrap() / exact - 1.0).abs() < 1e-3);
        let cone = frustum_x(0.0, 0.0, 3.0, 1.0, 256);
        assert!((cone.volume().unwrap() / PI - 1.0).abs() < 1e-3);
        assert_eq!(cone.watertight(), Watertight::Closed);
    }

    #[test]
    fn dragonoid_shape() {
        let d = dragonoid();
        assert_eq!(d.watertight(), Watertight::Closed);
        assert!(d.signed_volume().unwrap() > 0.0);
        let len = d.characteristic_length(LengthMeasure::Axis(Axis::Principal)).unwrap();
        assert!((len - 1.0).abs() < 1e-12);
        let parts = [
            PI * 0.04f64.powi(2) * 0.35 / 3.0,
            4.0 / 3.0 * PI * 0.2 * 0.06 * 0.05,
            PI * 0.025f64.powi(2) * 0.11,
            4.0 / 3.0 * PI * 0.06 * 0.025 * 0.02,
        ];
        let analytic: f64 = parts.iter().sum();
        assert!((d.volume().unwrap() / analytic - 1.0).abs() < 0.02);
    }
}
