//! Ground-truth generation: surface sampling, GT view rendering and
//! object-coordinate images, all by point projection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::camera::{look_at, Camera, Intrinsics, Vec3, ViewRig, WORLD_UP};
use crate::cloud::ColoredPointCloud;
use crate::error::{Error, Result};
use crate::projection::{joint_project, project_view, ProjectionConfig, ViewSet};
use crate::raster::{NocsImage, Rgb};

/// Default number of surface samples in a ground-truth cloud.
pub const GT_POINTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
    pub colors: Option<Vec<Rgb>>,
}

impl TriangleMesh {
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>, colors: Option<Vec<Rgb>>) -> Result<Self> {
        if let Some(t) = triangles.iter().find(|t| t.iter().any(|&i| i >= vertices.len())) {
            return Err(Error::MalformedObj {
                line: 0,
                msg: format!("triangle {t:?} references a missing vertex"),
            });
        }
        if let Some(c) = &colors {
            if c.len() != vertices.len() {
                return Err(Error::ColorCountMismatch {
                    colors: c.len(),
                    points: vertices.len(),
                });
            }
        }
        Ok(TriangleMesh {
            vertices,
            triangles,
            colors,
        })
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t].map(|i| self.vertices[i]);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Gives an uncolored mesh vertex colors derived from position (x, y, z
    /// mapped to r, g, b), so that its renders carry texture.
    pub fn color_by_position(&mut self) {
        if self.colors.is_some() {
            return;
        }
        let scale = self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let scale = if scale > 0.0 { scale } else { 1.0 };
        self.colors = Some(self.vertices.iter().map(|v| shapes::position_color(v, scale)).collect());
    }

    /// Centers the bounding box at the origin and scales the farthest vertex
    /// onto the sphere of radius `radius`.
    pub fn normalize(&mut self, radius: f64) {
        if self.vertices.is_empty() {
            return;
        }
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for v in &self.vertices {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        let center = (lo + hi) * 0.5;
        let far = self.vertices.iter().map(|v| (v - center).norm()).fold(0.0, f64::max);
        let scale = if far > 0.0 { radius / far } else { 1.0 };
        for v in &mut self.vertices {
            *v = (*v - center) * scale;
        }
    }
}

/// Draws `n` points uniformly over the surface: triangles are chosen with
/// probability proportional to area, positions uniformly in barycentric
/// coordinates. Vertex colors are interpolated when present.
pub fn sample_mesh(mesh: &TriangleMesh, n: usize, seed: u64) -> Result<ColoredPointCloud> {
    let mut cumulative = Vec::with_capacity(mesh.triangles.len());
    let mut total = 0.0;
    for t in 0..mesh.triangles.len() {
        total += mesh.triangle_area(t);
        cumulative.push(total);
    }
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::ZeroAreaMesh);
    }
    let last_positive = cumulative
        .iter()
        .enumerate()
        .rev()
        .find(|&(i, &c)| i == 0 && c > 0.0 || i > 0 && c > cumulative[i - 1])
        .map(|(i, _)| i)
        .unwrap_or(0);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positions = Vec::with_capacity(n);
    let mut colors = mesh.colors.as_ref().map(|_| Vec::with_capacity(n));
    for _ in 0..n {
        let r = rng.gen::<f64>() * total;
        let t = cumulative.partition_point(|&c| c <= r).min(last_positive);
        let [ia, ib, ic] = mesh.triangles[t];
        let s = rng.gen::<f64>().sqrt();
        let r2 = rng.gen::<f64>();
        let (wa, wb, wc) = (1.0 - s, s * (1.0 - r2), s * r2);
        positions.push(mesh.vertices[ia] * wa + mesh.vertices[ib] * wb + mesh.vertices[ic] * wc);
        if let (Some(out), Some(vc)) = (colors.as_mut(), mesh.colors.as_ref()) {
            let mix = |c: usize| {
                (vc[ia][c] as f64 * wa + vc[ib][c] as f64 * wb + vc[ic][c] as f64 * wc)
                    .round()
                    .clamp(0.0, 255.0) as u8
            };
            out.push([mix(0), mix(1), mix(2)]);
        }
    }
    Ok(ColoredPointCloud {
        positions,
        colors,
        color_mask: None,
    })
}

/// Renders ground-truth depth/texture views of a dense cloud.
pub fn render_gt_views(dense: &ColoredPointCloud, rig: &ViewRig, upsample: usize) -> Result<ViewSet> {
    Ok(joint_project(dense, rig, &ProjectionConfig::new(upsample)?))
}

/// Renders the object-coordinate image seen by `camera`: the depth of the
/// dense cloud is rendered and each valid pixel stores the object-space
/// point its center back-projects to (clamped to `[-0.5, 0.5]`).
pub fn render_nocs_image(dense: &ColoredPointCloud, camera: &Camera, upsample: usize) -> Result<NocsImage> {
    let projected = project_view(dense, camera, &ProjectionConfig::new(upsample)?);
    let depth = &projected.map.depth;
    let mut img = NocsImage::new(depth.width, depth.height);
    for v in 0..depth.height {
        for u in 0..depth.width {
            let d = depth.get(u, v);
            if d > 0.0 {
                let p = camera.unproject_pixel(u, v, d);
                let i = v * depth.width + u;
                img.coords[i] = [p.x, p.y, p.z].map(|c| c.clamp(-0.5, 0.5));
                img.mask[i] = true;
            }
        }
    }
    Ok(img)
}

/// A camera at `distance` from the origin in a uniformly random direction,
/// looking at the origin with the world up vector. Directions within ~8° of
/// the up axis are redrawn.
pub fn random_input_camera(seed: u64, distance: f64, intrinsics: Intrinsics) -> Result<Camera> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let d = Vec3::new(
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
        );
        let n = d.norm();
        if !(n > 1e-6 && n <= 1.0) {
            continue;
        }
        let dir = d / n;
        if dir.y.abs() > 0.99 {
            continue;
        }
        let pose = look_at(&(dir * distance), &Vec3::zeros(), &WORLD_UP)?;
        return Ok(Camera::new(intrinsics, pose));
    }
}

/// Camera at `eye` looking at the origin.
pub fn input_camera_at(eye: &Vec3, intrinsics: Intrinsics) -> Result<Camera> {
    Ok(Camera::new(intrinsics, look_at(eye, &Vec3::zeros(), &WORLD_UP)?))
}

/// Procedural test meshes.
pub mod shapes {
    use super::*;

    /// UV sphere with vertex colors derived from position.
    pub fn uv_sphere(radius: f64, stacks: usize, slices: usize) -> TriangleMesh {
        let mut vertices = Vec::new();
        for i in 0..=stacks {
            let theta = std::f64::consts::PI * i as f64 / stacks as f64;
            for j in 0..slices {
                let phi = 2.0 * std::f64::consts::PI * j as f64 / slices as f64;
                vertices.push(Vec3::new(theta.sin() * phi.cos(), theta.cos(), theta.sin() * phi.sin()) * radius);
            }
        }
        let mut triangles = Vec::new();
        for i in 0..stacks {
            for j in 0..slices {
                let a = i * slices + j;
                let b = i * slices + (j + 1) % slices;
                let c = (i + 1) * slices + j;
                let d = (i + 1) * slices + (j + 1) % slices;
                if i > 0 {
                    triangles.push([a, c, b]);
                }
                if i + 1 < stacks {
                    triangles.push([b, c, d]);
                }
            }
        }
        let colors = vertices.iter().map(|v| position_color(v, radius)).collect();
        TriangleMesh::new(vertices, triangles, Some(colors)).expect("valid sphere")
    }

    /// Axis-aligned box centered at the origin.
    pub fn cuboid(half: Vec3) -> TriangleMesh {
        let corners: Vec<Vec3> = (0..8)
            .map(|i| {
                Vec3::new(
                    if i & 4 != 0 { half.x } else { -half.x },
                    if i & 2 != 0 { half.y } else { -half.y },
                    if i & 1 != 0 { half.z } else { -half.z },
                )
            })
            .collect();
        let quads = [[0, 1, 3, 2], [4, 6, 7, 5], [0, 4, 5, 1], [2, 3, 7, 6], [0, 2, 6, 4], [1, 5, 7, 3]];
        let triangles = quads
            .iter()
            .flat_map(|q| [[q[0], q[1], q[2]], [q[0], q[2], q[3]]])
            .collect();
        let r = half.norm();
        let colors = corners.iter().map(|v| position_color(v, r)).collect();
        TriangleMesh::new(corners, triangles, Some(colors)).expect("valid box")
    }

    pub(super) fn position_color(v: &Vec3, scale: f64) -> Rgb {
        let c = |x: f64| ((x / scale * 0.5 + 0.5).clamp(0.0, 1.0) * 255.0).round() as u8;
        [c(v.x), c(v.y), c(v.z)]
    }
}
