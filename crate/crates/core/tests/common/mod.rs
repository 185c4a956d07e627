//! Brute-force reference implementations shared by the integration tests
//! and the acceptance binary.
#![allow(dead_code)]

use pcfuse::camera::{Camera, Vec3};
use pcfuse::cloud::ColoredPointCloud;
use pcfuse::raster::Rgb;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point in the ball of radius `r` around the origin.
pub fn point_in_ball(rng: &mut impl Rng, r: f64) -> Vec3 {
    loop {
        let p = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if p.norm_squared() <= 1.0 {
            return p * r;
        }
    }
}

pub fn random_color(rng: &mut impl Rng) -> Rgb {
    [rng.gen(), rng.gen(), rng.gen()]
}

/// Random colored cloud in the radius-`r` ball. Roughly one point in twenty
/// repeats an earlier point exactly so that depth ties occur.
pub fn random_cloud(rng: &mut impl Rng, n: usize, r: f64) -> ColoredPointCloud {
    let mut positions: Vec<Vec3> = Vec::with_capacity(n);
    let mut colors = Vec::with_capacity(n);
    for i in 0..n {
        let p = if i > 0 && rng.gen_ratio(1, 20) {
            positions[rng.gen_range(0..i)]
        } else {
            point_in_ball(rng, r)
        };
        positions.push(p);
        colors.push(random_color(rng));
    }
    ColoredPointCloud::with_colors(positions, colors).unwrap()
}

pub fn uniform_cube(rng: &mut impl Rng, n: usize, half: f64) -> Vec<Vec3> {
    (0..n)
        .map(|_| {
            Vec3::new(
                rng.gen_range(-half..half),
                rng.gen_range(-half..half),
                rng.gen_range(-half..half),
            )
        })
        .collect()
}

/// Result of [`oracle_project`]: per-pixel depth (0 when empty) and winner.
pub struct OracleView {
    pub depth: Vec<f64>,
    pub index: Vec<i64>,
}

/// Renders through the full `(U*H) x (U*W)` super-resolution buffer: each
/// point lands in cell `(floor(u*U), floor(v*U))`, every cell keeps its
/// nearest point (earlier point on ties), then each `U x U` block is
/// min-pooled into one pixel (lowest index on ties).
///
/// The buffer is walked one band of `U` cell rows (one pixel row) at a time
/// so that `U = 50` fits in memory; untouched cells stay at +inf.
pub fn oracle_project(cloud: &ColoredPointCloud, camera: &Camera, upsample: usize) -> OracleView {
    let k = camera.intrinsics;
    let (w, h, up) = (k.width, k.height, upsample);
    let bw = w * up;

    // bucket points by pixel row, keeping index order
    let mut rows: Vec<Vec<(usize, usize, usize, f64)>> = vec![Vec::new(); h];
    for (i, p) in cloud.positions.iter().enumerate() {
        let c = camera.pose.transform(p);
        if !(c.z > 0.0) {
            continue;
        }
        let u = k.f * c.x / c.z + k.cx;
        let v = k.f * c.y / c.z + k.cy;
        if !(u >= 0.0 && v >= 0.0 && u < w as f64 && v < h as f64) {
            continue;
        }
        let cu = (u * up as f64).floor() as usize;
        let cv = (v * up as f64).floor() as usize;
        if cu >= bw || cv >= h * up {
            continue;
        }
        rows[cv / up].push((i, cu, cv % up, c.z));
    }

    let mut depth = vec![0.0; w * h];
    let mut index = vec![-1i64; w * h];
    let mut band_z = vec![f64::INFINITY; up * bw];
    let mut band_i = vec![usize::MAX; up * bw];
    for (row, pts) in rows.iter().enumerate() {
        if pts.is_empty() {
            continue;
        }
        for &(i, cu, r, z) in pts {
            let cell = r * bw + cu;
            if z < band_z[cell] {
                band_z[cell] = z;
                band_i[cell] = i;
            }
        }
        let mut cols: Vec<usize> = pts.iter().map(|&(_, cu, _, _)| cu / up).collect();
        cols.sort_unstable();
        cols.dedup();
        for px in cols {
            let (mut bz, mut bi) = (f64::INFINITY, usize::MAX);
            for r in 0..up {
                for cu in px * up..(px + 1) * up {
                    let cell = r * bw + cu;
                    let (z, i) = (band_z[cell], band_i[cell]);
                    if z < bz || (z == bz && i < bi) {
                        bz = z;
                        bi = i;
                    }
                }
            }
            depth[row * w + px] = bz;
            index[row * w + px] = bi as i64;
        }
        for &(_, cu, r, _) in pts {
            band_z[r * bw + cu] = f64::INFINITY;
            band_i[r * bw + cu] = usize::MAX;
        }
    }
    OracleView { depth, index }
}

#[inline]
pub fn sq_dist(a: &Vec3, b: &Vec3) -> f64 {
    let (dx, dy, dz) = (a.x - b.x, a.y - b.y, a.z - b.z);
    dx * dx + dy * dy + dz * dz
}

/// Number of other points within `r` (inclusive) of each point.
pub fn brute_neighbor_counts(pts: &[Vec3], r: f64) -> Vec<usize> {
    let r2 = r * r;
    let mut counts = vec![0; pts.len()];
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if sq_dist(&pts[i], &pts[j]) <= r2 {
                counts[i] += 1;
                counts[j] += 1;
            }
        }
    }
    counts
}

/// Nearest point by exhaustive search, lowest index on ties.
pub fn brute_nearest(pts: &[Vec3], q: &Vec3) -> (usize, f64) {
    let mut best = (usize::MAX, f64::INFINITY);
    for (i, p) in pts.iter().enumerate() {
        let d = sq_dist(p, q);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

pub fn brute_chamfer(a: &[Vec3], b: &[Vec3]) -> f64 {
    let dir = |from: &[Vec3], to: &[Vec3]| from.iter().map(|p| brute_nearest(to, p).1).sum::<f64>() / from.len() as f64;
    (dir(a, b) + dir(b, a)) * 100.0
}

/// Random rotation of at most `max_deg` about a random axis.
pub fn random_rotation(rng: &mut impl Rng, max_deg: f64) -> nalgebra::Rotation3<f64> {
    let axis = nalgebra::Unit::new_normalize(point_in_ball(rng, 1.0) + Vec3::new(1e-9, 0.0, 0.0));
    let angle = rng.gen_range(0.0..max_deg).to_radians();
    nalgebra::Rotation3::from_axis_angle(&axis, angle)
}

/// Back-projection error of every point of `cloud`. Points are projected
/// into a rotating rig camera; each pixel's winner is back-projected and
/// retired, and the rest go around again, so every point is measured once.
pub fn round_trip_errors(cloud: &ColoredPointCloud, rig: &pcfuse::camera::ViewRig, upsample: usize) -> Vec<f64> {
    use pcfuse::fusion::back_project;
    use pcfuse::projection::{project_view, ProjectionConfig};

    let cfg = ProjectionConfig::new(upsample).unwrap();
    let mut remaining: Vec<usize> = (0..cloud.len()).collect();
    let mut errors = Vec::with_capacity(cloud.len());
    let mut round = 0;
    while !remaining.is_empty() {
        let cam = &rig.cameras[round % rig.len()];
        let sub = ColoredPointCloud::from_positions(remaining.iter().map(|&i| cloud.positions[i]).collect());
        let view = project_view(&sub, cam, &cfg);
        assert_eq!(view.skipped, 0, "point outside the frustum");
        let back = back_project(&view.map.depth, cam, 0);
        let mut taken = vec![false; sub.len()];
        for (p, src) in back.cloud.positions.iter().zip(&back.provenance) {
            let j = view.index.get(src.u, src.v).unwrap();
            errors.push((p - sub.positions[j]).norm());
            taken[j] = true;
        }
        remaining = remaining.iter().zip(&taken).filter(|(_, &t)| !t).map(|(&i, _)| i).collect();
        round += 1;
    }
    errors
}

/// Exact per-pixel render of a sphere centered at the origin: depth of the
/// first ray/sphere hit through each pixel center, 0 where the ray misses.
pub fn analytic_sphere_depth(camera: &Camera, radius: f64) -> pcfuse::raster::DepthMap {
    let k = camera.intrinsics;
    let mut depth = pcfuse::raster::DepthMap::new(k.width, k.height);
    let eye = camera.pose.center();
    for v in 0..k.height {
        for u in 0..k.width {
            // camera-space ray with z = 1
            let dir_cam = Vec3::new((u as f64 + 0.5 - k.cx) / k.f, (v as f64 + 0.5 - k.cy) / k.f, 1.0);
            let dir = camera.pose.rotation.transpose() * dir_cam;
            // |eye + t dir|^2 = r^2, t is camera z since dir_cam.z = 1
            let a = dir.norm_squared();
            let b = 2.0 * eye.dot(&dir);
            let c = eye.norm_squared() - radius * radius;
            let disc = b * b - 4.0 * a * c;
            if disc >= 0.0 {
                depth.data[v * k.width + u] = (-b - disc.sqrt()) / (2.0 * a);
            }
        }
    }
    depth
}
