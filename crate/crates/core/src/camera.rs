//! Pinhole cameras and the fixed eight-view rig.
//!
//! Camera space is right-handed with +x right, +y down and +z forward, so
//! image rows grow downward. Poses map world (object) coordinates into
//! camera space: `p_cam = R * p + t`.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Number of cameras in the rig.
pub const NUM_VIEWS: usize = 8;

/// Default distance from every rig camera to the object center.
pub const RIG_DISTANCE: f64 = 2.0;

/// World up vector shared by every camera.
pub const WORLD_UP: Vec3 = Vector3::new(0.0, 1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intrinsics {
    pub f: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
}

impl Intrinsics {
    pub fn new(f: f64, cx: f64, cy: f64, width: usize, height: usize) -> Result<Self> {
        let k = Intrinsics {
            f,
            cx,
            cy,
            width,
            height,
        };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f.is_finite() && self.f > 0.0) {
            return Err(Error::InvalidCamera(format!("focal length {} must be > 0", self.f)));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidCamera("raster size must be non-zero".into()));
        }
        if !(0.0..self.width as f64).contains(&self.cx) || !(0.0..self.height as f64).contains(&self.cy) {
            return Err(Error::InvalidCamera(format!(
                "principal point ({}, {}) outside {}x{} raster",
                self.cx, self.cy, self.width, self.height
            )));
        }
        Ok(())
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }
}

impl Default for Intrinsics {
    /// 256x256 raster, f = 300 px, principal point at the raster center.
    fn default() -> Self {
        Intrinsics {
            f: 300.0,
            cx: 127.5,
            cy: 127.5,
            width: 256,
            height: 256,
        }
    }
}

/// World-to-camera rigid transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub rotation: Matrix3<f64>,
    pub translation: Vec3,
}

impl Pose {
    pub fn identity() -> Self {
        Pose {
            rotation: Matrix3::identity(),
            translation: Vec3::zeros(),
        }
    }

    #[inline]
    pub fn transform(&self, p: &Vec3) -> Vec3 {
        self.rotation * p + self.translation
    }

    #[inline]
    pub fn inverse_transform(&self, p_cam: &Vec3) -> Vec3 {
        self.rotation.transpose() * (p_cam - self.translation)
    }

    /// Camera center in world coordinates.
    pub fn center(&self) -> Vec3 {
        -(self.rotation.transpose() * self.translation)
    }

    /// Unit viewing direction (camera +z) in world coordinates.
    pub fn forward(&self) -> Vec3 {
        self.rotation.row(2).transpose()
    }
}

/// Builds the world-to-camera pose of a camera at `eye` looking at `target`.
pub fn look_at(eye: &Vec3, target: &Vec3, up: &Vec3) -> Result<Pose> {
    let dir = target - eye;
    let dist = dir.norm();
    if !(dist > 1e-9) {
        return Err(Error::DegenerateLookAt("eye coincides with target"));
    }
    let forward = dir / dist;
    let side = forward.cross(up);
    let side_norm = side.norm();
    if !(side_norm > 1e-9 * up.norm().max(1.0)) {
        return Err(Error::DegenerateLookAt("up vector parallel to viewing direction"));
    }
    let right = side / side_norm;
    let down = forward.cross(&right);
    let rotation = Matrix3::from_rows(&[right.transpose(), down.transpose(), forward.transpose()]);
    let translation = -(rotation * eye);
    Ok(Pose {
        rotation,
        translation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Camera {
    pub intrinsics: Intrinsics,
    pub pose: Pose,
}

impl Camera {
    pub fn new(intrinsics: Intrinsics, pose: Pose) -> Self {
        Camera { intrinsics, pose }
    }

    /// Pinhole projection of a world point. Returns continuous pixel
    /// coordinates and camera-space depth, or `None` behind the camera.
    #[inline]
    pub fn project(&self, p: &Vec3) -> Option<(f64, f64, f64)> {
        let c = self.pose.transform(p);
        if !(c.z > 0.0) {
            return None;
        }
        let k = &self.intrinsics;
        Some((k.f * c.x / c.z + k.cx, k.f * c.y / c.z + k.cy, c.z))
    }

    /// Inverse of [`Camera::project`] for continuous pixel coordinates.
    #[inline]
    pub fn unproject(&self, u: f64, v: f64, depth: f64) -> Vec3 {
        let k = &self.intrinsics;
        let p_cam = Vec3::new((u - k.cx) * depth / k.f, (v - k.cy) * depth / k.f, depth);
        self.pose.inverse_transform(&p_cam)
    }

    /// Back-projects the center of integer pixel `(u, v)`.
    #[inline]
    pub fn unproject_pixel(&self, u: usize, v: usize, depth: f64) -> Vec3 {
        self.unproject(u as f64 + 0.5, v as f64 + 0.5, depth)
    }

    /// Integer pixel holding a world point, with its depth.
    #[inline]
    pub fn pixel_of(&self, p: &Vec3) -> Option<(usize, usize, f64)> {
        let (u, v, z) = self.project(p)?;
        let k = &self.intrinsics;
        if u >= 0.0 && v >= 0.0 && u < k.width as f64 && v < k.height as f64 {
            Some((u as usize, v as usize, z))
        } else {
            None
        }
    }
}

/// The eight cameras at the vertices of a cube, all looking at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewRig {
    pub distance: f64,
    pub cameras: Vec<Camera>,
}

impl ViewRig {
    pub fn new(distance: f64, intrinsics: Intrinsics) -> Result<Self> {
        if !(distance.is_finite() && distance > 0.0) {
            return Err(Error::InvalidConfig(format!("rig distance {distance} must be > 0")));
        }
        intrinsics.validate()?;
        let cameras = (0..NUM_VIEWS)
            .map(|n| {
                let eye = rig_center(n, distance);
                look_at(&eye, &Vec3::zeros(), &WORLD_UP).map(|pose| Camera::new(intrinsics, pose))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ViewRig { distance, cameras })
    }

    pub fn intrinsics(&self) -> Intrinsics {
        self.cameras[0].intrinsics
    }

    pub fn len(&self) -> usize {
        self.cameras.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cameras.is_empty()
    }
}

impl Default for ViewRig {
    fn default() -> Self {
        ViewRig::new(RIG_DISTANCE, Intrinsics::default()).expect("default rig is valid")
    }
}

/// Convenience wrapper matching the rig constructor.
pub fn make_view_rig(distance: f64, intrinsics: Intrinsics) -> Result<ViewRig> {
    ViewRig::new(distance, intrinsics)
}

/// Center of rig camera `n`. Views are ordered lexicographically over the
/// sign triple (x, y, z) with `-` before `+`.
pub fn rig_center(n: usize, distance: f64) -> Vec3 {
    let sign = |bit: usize| if (n >> bit) & 1 == 1 { 1.0 } else { -1.0 };
    Vec3::new(sign(2), sign(1), sign(0)) * (distance / 3f64.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_orthonormal(r: &Matrix3<f64>) {
        let err = (r.transpose() * r - Matrix3::identity()).abs().max();
        assert!(err < 1e-9, "RᵀR deviates by {err}");
        assert!((r.determinant() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn look_at_axis_camera() {
        let pose = look_at(&Vec3::new(0.0, 0.0, -2.0), &Vec3::zeros(), &WORLD_UP).unwrap();
        let o = pose.transform(&Vec3::zeros());
        assert!((o - Vec3::new(0.0, 0.0, 2.0)).norm() < 1e-12);
        // world up maps to camera -y
        let up = pose.rotation * WORLD_UP;
        assert!(up.y < 0.0);
    }

    #[test]
    fn look_at_diagonal() {
        let eye = Vec3::new(1.0, 1.0, 1.0) * (2.0 / 3f64.sqrt());
        let pose = look_at(&eye, &Vec3::zeros(), &WORLD_UP).unwrap();
        let o = pose.transform(&Vec3::zeros());
        assert!(o.x.abs() < 1e-12 && o.y.abs() < 1e-12);
        assert!((o.z - 2.0).abs() < 1e-12);
    }

    #[test]
    fn look_at_degenerate() {
        let e = Vec3::new(0.3, 0.2, 0.1);
        assert!(matches!(look_at(&e, &e, &WORLD_UP), Err(Error::DegenerateLookAt(_))));
        let above = Vec3::new(0.0, 2.0, 0.0);
        assert!(matches!(
            look_at(&above, &Vec3::zeros(), &WORLD_UP),
            Err(Error::DegenerateLookAt(_))
        ));
    }

    #[test]
    fn look_at_orthonormal_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 10_000 {
            let eye = Vec3::from_fn(|_, _| rng.gen_range(-5.0..5.0));
            let target = Vec3::from_fn(|_, _| rng.gen_range(-5.0..5.0));
            let up = Vec3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let Ok(pose) = look_at(&eye, &target, &up) else { continue };
            assert_orthonormal(&pose.rotation);
            let t = pose.transform(&target);
            let d = (target - eye).norm();
            assert!(t.x.abs() < 1e-9 * d.max(1.0) && t.y.abs() < 1e-9 * d.max(1.0));
            assert!((t.z - d).abs() < 1e-9 * d.max(1.0));
            checked += 1;
        }
    }

    #[test]
    fn rig_geometry() {
        let rig = ViewRig::default();
        assert_eq!(rig.len(), 8);
        let c0 = rig.cameras[0].pose.center();
        for i in 0..3 {
            assert!((c0[i] + 1.1547).abs() < 1e-4);
        }
        let signs = [
            [-1., -1., -1.],
            [-1., -1., 1.],
            [-1., 1., -1.],
            [-1., 1., 1.],
            [1., -1., -1.],
            [1., -1., 1.],
            [1., 1., -1.],
            [1., 1., 1.],
        ];
        for (cam, s) in rig.cameras.iter().zip(signs) {
            let c = cam.pose.center();
            assert!((c.norm() - 2.0).abs() < 1e-9);
            for i in 0..3 {
                assert_eq!(c[i].signum(), s[i]);
            }
            let o = cam.pose.transform(&Vec3::zeros());
            assert!(o.x.abs() < 1e-9 && o.y.abs() < 1e-9);
            assert_orthonormal(&cam.pose.rotation);
        }
    }

    #[test]
    fn rig_scales_with_distance() {
        let rig = ViewRig::new(1.0, Intrinsics::default()).unwrap();
        for cam in &rig.cameras {
            assert!((cam.pose.center().norm() - 1.0).abs() < 1e-9);
        }
        assert!(ViewRig::new(0.0, Intrinsics::default()).is_err());
    }

    #[test]
    fn origin_projects_to_principal_point() {
        let rig = ViewRig::default();
        for cam in &rig.cameras {
            let (u, v, z) = cam.project(&Vec3::zeros()).unwrap();
            assert!((u - 127.5).abs() < 1e-9 && (v - 127.5).abs() < 1e-9);
            assert!((z - 2.0).abs() < 1e-12);
            let back = cam.unproject(u, v, z);
            assert!(back.norm() < 1e-9);
        }
    }

    #[test]
    fn intrinsics_validation() {
        assert!(Intrinsics::new(0.0, 1.0, 1.0, 4, 4).is_err());
        assert!(Intrinsics::new(1.0, 4.0, 1.0, 4, 4).is_err());
        assert!(Intrinsics::new(1.0, 3.9, 0.0, 4, 4).is_ok());
    }
}
