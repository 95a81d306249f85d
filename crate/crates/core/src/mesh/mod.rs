//! Indexed triangle meshes: OBJ/STL parsing, volume and reference lengths.

pub mod fixtures;
mod obj;
mod stl;

pub use obj::{parse_obj, write_obj};
pub use stl::{parse_stl, write_stl_ascii, write_stl_binary};

use std::collections::HashMap;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Point = [f64; 3];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("face at line {line} references vertex {index}, but only {count} vertices are defined")]
    IndexOutOfRange { line: usize, index: i64, count: usize },
    #[error("binary STL truncated: expected {expected} bytes for {triangles} facets, found {actual}")]
    TruncatedFile { expected: usize, actual: usize, triangles: u32 },
    #[error("mesh has no triangles")]
    EmptyMesh,
    #[error("point pair is coincident")]
    InvalidPointPair,
    #[error("scale factor {0} must be positive and finite")]
    NonPositiveFactor(f64),
    #[error("invalid mesh: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<Point>,
    triangles: Vec<[u32; 3]>,
    name: Option<String>,
}

impl TriangleMesh {
    pub fn new(vertices: Vec<Point>, triangles: Vec<[u32; 3]>, name: Option<String>) -> Result<Self, MeshError> {
        if let Some(v) = vertices.iter().find(|v| v.iter().any(|c| !c.is_finite())) {
            return Err(MeshError::Invalid(format!("non-finite vertex {v:?}")));
        }
        for t in &triangles {
            if t.iter().any(|&i| i as usize >= vertices.len()) {
                return Err(MeshError::Invalid(format!("triangle {t:?} indexes past {} vertices", vertices.len())));
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(MeshError::Invalid(format!("degenerate triangle {t:?}")));
            }
        }
        Ok(Self { vertices, triangles, name })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    fn corners(&self, t: &[u32; 3]) -> [Point; 3] {
        [self.vertices[t[0] as usize], self.vertices[t[1] as usize], self.vertices[t[2] as usize]]
    }

    /// Signed enclosed volume via the divergence theorem; positive for
    /// outward (counter-clockwise) winding.
    pub fn signed_volume(&self) -> Result<f64, MeshError> {
        if self.is_empty() {
            return Err(MeshError::EmptyMesh);
        }
        let partials: Vec<f64> = self
            .triangles
            .par_chunks(VOLUME_CHUNK)
            .map(|chunk| chunk.iter().map(|t| tetra6(self.corners(t))).sum::<f64>())
            .collect();
        Ok(pairwise_sum(&partials) / 6.0)
    }

    /// Absolute enclosed volume, m³.
    pub fn volume(&self) -> Result<f64, MeshError> {
        self.signed_volume().map(f64::abs)
    }

    /// Min and max corners of the axis-aligned bounding box.
    pub fn bounds(&self) -> Result<(Point, Point), MeshError> {
        if self.is_empty() {
            return Err(MeshError::EmptyMesh);
        }
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for t in &self.triangles {
            for &i in t {
                let v = self.vertices[i as usize];
                for k in 0..3 {
                    lo[k] = lo[k].min(v[k]);
                    hi[k] = hi[k].max(v[k]);
                }
            }
        }
        Ok((lo, hi))
    }

    pub fn extents(&self) -> Result<[f64; 3], MeshError> {
        let (lo, hi) = self.bounds()?;
        Ok([hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]])
    }

    pub fn characteristic_length(&self, measure: LengthMeasure) -> Result<f64, MeshError> {
        let ext = self.extents()?;
        match measure {
            LengthMeasure::Axis(Axis::X) => Ok(ext[0]),
            LengthMeasure::Axis(Axis::Y) => Ok(ext[1]),
            LengthMeasure::Axis(Axis::Z) => Ok(ext[2]),
            LengthMeasure::Axis(Axis::Principal) => Ok(ext.into_iter().fold(0.0, f64::max)),
            LengthMeasure::PointPair(a, b) => point_distance(a, b),
        }
    }

    pub fn scale_uniform(&self, factor: f64) -> Result<TriangleMesh, MeshError> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(MeshError::NonPositiveFactor(factor));
        }
        Ok(TriangleMesh {
            vertices: self.vertices.iter().map(|v| v.map(|c| c * factor)).collect(),
            triangles: self.triangles.clone(),
            name: self.name.clone(),
        })
    }

    pub fn translate(&self, offset: Point) -> TriangleMesh {
        TriangleMesh {
            vertices: self.vertices.iter().map(|v| [v[0] + offset[0], v[1] + offset[1], v[2] + offset[2]]).collect(),
            triangles: self.triangles.clone(),
            name: self.name.clone(),
        }
    }

    /// Closed when every directed edge is matched by exactly one reversed edge.
    pub fn watertight(&self) -> Watertight {
        let mut edges: HashMap<(u32, u32), i32> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *edges.entry((a, b)).or_default() += 1;
            }
        }
        let closed = !self.triangles.is_empty()
            && edges.iter().all(|(&(a, b), &n)| n == 1 && edges.get(&(b, a)) == Some(&1));
        if closed {
            Watertight::Closed
        } else {
            Watertight::Unknown
        }
    }

    pub fn summary(&self, axis: Axis, snout: Option<(Point, Point)>) -> Result<MeshSummary, MeshError> {
        let extents = self.extents()?;
        Ok(MeshSummary {
            name: self.name.clone(),
            vertex_count: self.vertices.len(),
            triangle_count: self.triangles.len(),
            volume: self.volume()?,
            signed_volume: self.signed_volume()?,
            aabb_extents: extents,
            principal_axis_length: self.characteristic_length(LengthMeasure::Axis(Axis::Principal))?,
            axis,
            axis_length: self.characteristic_length(LengthMeasure::Axis(axis))?,
            snout_length: snout.map(|(a, b)| point_distance(a, b)).transpose()?,
            watertight: self.watertight(),
        })
    }
}

/// Triangles per parallel partial sum. Fixed so results are reproducible.
const VOLUME_CHUNK: usize = 1024;

/// Six times the signed volume of the tetrahedron (origin, v0, v1, v2).
fn tetra6([a, b, c]: [Point; 3]) -> f64 {
    let cross = [b[1] * c[2] - b[2] * c[1], b[2] * c[0] - b[0] * c[2], b[0] * c[1] - b[1] * c[0]];
    a[0] * cross[0] + a[1] * cross[1] + a[2] * cross[2]
}

fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => {
            let (l, r) = values.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

fn point_distance(a: Point, b: Point) -> Result<f64, MeshError> {
    let d = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
    if d == 0.0 || !d.is_finite() {
        return Err(MeshError::InvalidPointPair);
    }
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    X,
    Y,
    Z,
    /// Longest bounding-box axis.
    #[default]
    Principal,
}

impl FromStr for Axis {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            "principal" => Ok(Axis::Principal),
            other => Err(format!("unknown axis `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LengthMeasure {
    Axis(Axis),
    /// Distance between two model-space points, e.g. snout tip and base.
    PointPair(Point, Point),
}

/// Parse `x1,y1,z1:x2,y2,z2`.
pub fn parse_point_pair(s: &str) -> Result<(Point, Point), String> {
    let point = |p: &str| -> Result<Point, String> {
        let c: Vec<f64> = p
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| format!("bad coordinate `{v}`")))
            .collect::<Result<_, _>>()?;
        match c.as_slice() {
            [x, y, z] => Ok([*x, *y, *z]),
            _ => Err(format!("expected 3 coordinates in `{p}`")),
        }
    };
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected `x1,y1,z1:x2,y2,z2`, got `{s}`"))?;
    Ok((point(a)?, point(b)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Watertight {
    Closed,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeshSummary {
    pub name: Option<String>,
    pub vertex_count: usize,
    pub triangle_count: usize,
    /// m³
    pub volume: f64,
    pub signed_volume: f64,
    /// m, along x, y, z
    pub aabb_extents: [f64; 3],
    pub principal_axis_length: f64,
    pub axis: Axis,
    pub axis_length: f64,
    pub snout_length: Option<f64>,
    pub watertight: Watertight,
}

/// Load OBJ or STL by extension, falling back to content sniffing.
pub fn load_mesh(path: &std::path::Path, bytes: &[u8]) -> Result<TriangleMesh, MeshError> {
    let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
    let mut mesh = match ext.as_deref() {
        Some("obj") => parse_obj(bytes)?,
        Some("stl") => parse_stl(bytes)?,
        _ if bytes.starts_with(b"solid") || !bytes.is_ascii() => parse_stl(bytes)?,
        _ => parse_obj(bytes)?,
    };
    if mesh.name.is_none() {
        mesh.name = path.file_stem().and_then(|s| s.to_str()).map(String::from);
    }
    Ok(mesh)
}
