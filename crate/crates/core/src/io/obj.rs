//! Minimal Wavefront OBJ reader: `v` and `f` statements only.
//!
//! Vertex colors follow the common `v x y z r g b` extension with channels
//! in `[0, 1]`. Polygons are fan-triangulated; negative (relative) indices
//! are resolved. Any other statement is skipped with a warning.

use std::path::Path;

use crate::camera::Vec3;
use crate::dataset::TriangleMesh;
use crate::error::{Error, Result};

pub fn parse_obj(text: &str) -> Result<TriangleMesh> {
    let mut vertices = Vec::new();
    let mut colors: Vec<[u8; 3]> = Vec::new();
    let mut triangles = Vec::new();
    let mut skipped = 0usize;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut tokens = line.split_whitespace();
        let Some(tag) = tokens.next() else { continue };
        let err = |msg: String| Error::MalformedObj { line: lineno + 1, msg };
        match tag {
            "v" => {
                let values: Vec<f64> = tokens
                    .map(|t| t.parse::<f64>().map_err(|_| err(format!("bad number `{t}`"))))
                    .collect::<Result<_>>()?;
                match values.len() {
                    3 | 4 => vertices.push(Vec3::new(values[0], values[1], values[2])),
                    6 | 7 => {
                        vertices.push(Vec3::new(values[0], values[1], values[2]));
                        let c = |x: f64| (x.clamp(0.0, 1.0) * 255.0).round() as u8;
                        colors.resize(vertices.len() - 1, [0; 3]);
                        colors.push([c(values[3]), c(values[4]), c(values[5])]);
                    }
                    n => return Err(err(format!("vertex with {n} components"))),
                }
            }
            "f" => {
                let idx: Vec<usize> = tokens
                    .map(|t| {
                        let first = t.split('/').next().unwrap_or("");
                        let i: i64 = first.parse().map_err(|_| err(format!("bad face index `{t}`")))?;
                        let n = vertices.len() as i64;
                        let resolved = if i > 0 { i - 1 } else { n + i };
                        if i == 0 || resolved < 0 || resolved >= n {
                            return Err(err(format!("face index {i} out of range")));
                        }
                        Ok(resolved as usize)
                    })
                    .collect::<Result<_>>()?;
                if idx.len() < 3 {
                    return Err(err(format!("face with {} vertices", idx.len())));
                }
                for k in 1..idx.len() - 1 {
                    triangles.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => skipped += 1,
        }
    }
    if skipped > 0 {
        log::warn!("OBJ: ignored {skipped} unsupported statement(s)");
    }
    let colors = if colors.is_empty() {
        None
    } else {
        colors.resize(vertices.len(), [0; 3]);
        Some(colors)
    };
    TriangleMesh::new(vertices, triangles, colors)
}

pub fn read_obj(path: impl AsRef<Path>) -> Result<TriangleMesh> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_obj(&text)
}
