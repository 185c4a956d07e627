//! Joint texture/shape mapping and multi-view pseudo-rendering.
//!
//! Each point is binned into a `U x U` sub-pixel cell of its pixel and the
//! pixel keeps the nearest point over all of its cells. Since the minimum of
//! per-cell minima is the per-pixel minimum, the super-resolution buffer is
//! never materialized: points scatter directly into the `H x W` raster,
//! keeping the smallest depth and, on equal depth, the lowest point index.
//! The winner's index is recorded so its color can follow its depth.

use rayon::prelude::*;

use crate::camera::{Camera, Vec3, ViewRig};
use crate::cloud::ColoredPointCloud;
use crate::error::{Error, Result};
use crate::raster::{ensure_same_dims, IndexMap, NocsImage, TextureDepthMap, TextureImage};

/// Sub-pixel buffer size used when pseudo-rendering partial clouds.
pub const PIPELINE_UPSAMPLE: usize = 5;

/// Sub-pixel buffer size used when rendering ground-truth views.
pub const GT_UPSAMPLE: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProjectionConfig {
    pub upsample: usize,
}

impl ProjectionConfig {
    pub fn new(upsample: usize) -> Result<Self> {
        if upsample == 0 {
            return Err(Error::InvalidConfig("upsample must be >= 1".into()));
        }
        Ok(ProjectionConfig { upsample })
    }
}

impl Default for ProjectionConfig {
    fn default() -> Self {
        ProjectionConfig {
            upsample: PIPELINE_UPSAMPLE,
        }
    }
}

/// The eight depth/texture views of one object, in rig order.
///
/// Index maps are present only for views produced by projection; completed
/// views no longer correspond to source points.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewSet {
    pub views: Vec<TextureDepthMap>,
    pub indices: Option<Vec<IndexMap>>,
}

impl ViewSet {
    pub fn dims(&self) -> Option<(usize, usize)> {
        self.views.first().map(|v| v.dims())
    }

    pub fn len(&self) -> usize {
        self.views.len()
    }

    pub fn is_empty(&self) -> bool {
        self.views.is_empty()
    }

    pub fn valid_pixels(&self) -> usize {
        self.views.iter().map(|v| v.depth.valid_count()).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let Some(dims) = self.dims() else { return Ok(()) };
        for v in &self.views {
            ensure_same_dims(dims, v.dims())?;
            ensure_same_dims(dims, v.texture.dims())?;
        }
        if let Some(indices) = &self.indices {
            if indices.len() != self.views.len() {
                return Err(Error::ViewCount {
                    expected: self.views.len(),
                    found: indices.len(),
                });
            }
            for im in indices {
                ensure_same_dims(dims, im.dims())?;
            }
        }
        Ok(())
    }
}

/// Output of [`project_view`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedView {
    pub map: TextureDepthMap,
    pub index: IndexMap,
    /// Points behind the camera or outside the raster.
    pub skipped: usize,
}

/// Builds the colored partial cloud from an RGB image and its aligned
/// object-coordinate image: one point per valid coordinate pixel, in
/// row-major order. Pixels without texture get color `(0, 0, 0)` and are
/// flagged in the cloud's color mask.
pub fn joint_texture_shape_mapping(x: &TextureImage, c: &NocsImage) -> Result<ColoredPointCloud> {
    ensure_same_dims(c.dims(), x.dims())?;
    let n = c.valid_count();
    let mut positions = Vec::with_capacity(n);
    let mut colors = Vec::with_capacity(n);
    let mut textured = Vec::with_capacity(n);
    for i in (0..c.coords.len()).filter(|&i| c.mask[i]) {
        let [px, py, pz] = c.coords[i];
        positions.push(Vec3::new(px, py, pz));
        if x.mask[i] {
            colors.push(x.rgb[i]);
            textured.push(true);
        } else {
            colors.push([0, 0, 0]);
            textured.push(false);
        }
    }
    let color_mask = textured.iter().any(|&t| !t).then_some(textured);
    let cloud = ColoredPointCloud {
        positions,
        colors: Some(colors),
        color_mask,
    };
    cloud.validate()?;
    Ok(cloud)
}

/// Super-resolution cell `(column, row)` and depth of a point, or `None`
/// when it falls behind the camera or outside the raster.
#[inline]
pub fn cell_of(camera: &Camera, p: &Vec3, upsample: usize) -> Option<(usize, usize, f64)> {
    let (u, v, z) = camera.project(p)?;
    let k = &camera.intrinsics;
    if !(u >= 0.0 && v >= 0.0 && u < k.width as f64 && v < k.height as f64) {
        return None;
    }
    let scale = upsample as f64;
    let (cu, cv) = ((u * scale) as usize, (v * scale) as usize);
    (cu < k.width * upsample && cv < k.height * upsample).then_some((cu, cv, z))
}

/// Pseudo-renders a cloud from one camera.
pub fn project_view(cloud: &ColoredPointCloud, camera: &Camera, cfg: &ProjectionConfig) -> ProjectedView {
    let k = &camera.intrinsics;
    let (w, h) = (k.width, k.height);
    let up = cfg.upsample.max(1);

    let mut best = vec![f64::INFINITY; w * h];
    let mut winner = vec![usize::MAX; w * h];
    let mut skipped = 0;
    for (i, p) in cloud.positions.iter().enumerate() {
        match cell_of(camera, p, up) {
            Some((cu, cv, z)) => {
                let px = (cv / up) * w + cu / up;
                // strict: on a tie the earlier (lower) index stays
                if z < best[px] {
                    best[px] = z;
                    winner[px] = i;
                }
            }
            None => skipped += 1,
        }
    }

    let mut map = TextureDepthMap::new(w, h);
    let mut index = IndexMap::new(w, h);
    for px in 0..w * h {
        let i = winner[px];
        if i == usize::MAX {
            continue;
        }
        map.depth.data[px] = best[px];
        index.data[px] = i as i64;
        if let Some(rgb) = cloud.color(i) {
            map.texture.rgb[px] = rgb;
            map.texture.mask[px] = true;
        }
    }
    ProjectedView { map, index, skipped }
}

/// Renders the cloud from every rig camera. Views are independent and run
/// in parallel; output does not depend on the thread count.
pub fn joint_project(cloud: &ColoredPointCloud, rig: &ViewRig, cfg: &ProjectionConfig) -> ViewSet {
    let projected: Vec<ProjectedView> = rig
        .cameras
        .par_iter()
        .map(|cam| project_view(cloud, cam, cfg))
        .collect();
    let mut views = Vec::with_capacity(projected.len());
    let mut indices = Vec::with_capacity(projected.len());
    for p in projected {
        views.push(p.map);
        indices.push(p.index);
    }
    ViewSet {
        views,
        indices: Some(indices),
    }
}
