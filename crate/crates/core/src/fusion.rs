//! Back-projection of completed views and their fusion into one cloud,
//! followed by multi-view voting and radius outlier removal.

use rayon::prelude::*;

use crate::camera::{Camera, ViewRig};
use crate::cloud::ColoredPointCloud;
use crate::error::{Error, Result};
use crate::raster::{ensure_same_dims, DepthMap, TextureDepthMap, TextureImage};
use crate::spatial::KdTree;

/// Source pixel of a fused point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PixelRef {
    pub view: usize,
    pub u: usize,
    pub v: usize,
}

/// A fused cloud with one [`PixelRef`] per point.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FusedCloud {
    pub cloud: ColoredPointCloud,
    pub provenance: Vec<PixelRef>,
}

impl FusedCloud {
    pub fn len(&self) -> usize {
        self.cloud.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cloud.is_empty()
    }

    pub fn select(&self, keep: &[bool]) -> FusedCloud {
        FusedCloud {
            cloud: self.cloud.select(keep),
            provenance: self
                .provenance
                .iter()
                .zip(keep)
                .filter_map(|(p, &k)| k.then_some(*p))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FusionConfig {
    /// Minimum votes (including the point's own view) to survive voting.
    pub vote_threshold: usize,
    /// How far in front of another view's surface a point may lie and still
    /// count as on it, in object units.
    pub vote_tolerance: f64,
    pub radius: f64,
    /// Minimum number of other points within `radius`.
    pub min_neighbors: usize,
    pub voting: bool,
    pub radius_filter: bool,
}

impl Default for FusionConfig {
    fn default() -> Self {
        FusionConfig {
            vote_threshold: 5,
            vote_tolerance: 0.01,
            radius: 0.012,
            min_neighbors: 6,
            voting: true,
            radius_filter: true,
        }
    }
}

impl FusionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=8).contains(&self.vote_threshold) {
            return Err(Error::InvalidConfig(format!(
                "vote threshold {} outside [1, 8]",
                self.vote_threshold
            )));
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::InvalidConfig(format!("radius {} must be > 0", self.radius)));
        }
        if !(self.vote_tolerance.is_finite() && self.vote_tolerance >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "vote tolerance {} must be >= 0",
                self.vote_tolerance
            )));
        }
        Ok(())
    }
}

/// Back-projects every valid pixel (through its center) to object space,
/// in row-major order.
pub fn back_project(depth: &DepthMap, camera: &Camera, view: usize) -> FusedCloud {
    let mut positions = Vec::with_capacity(depth.valid_count());
    let mut provenance = Vec::with_capacity(positions.capacity());
    for v in 0..depth.height {
        for u in 0..depth.width {
            let d = depth.get(u, v);
            if d > 0.0 {
                positions.push(camera.unproject_pixel(u, v, d));
                provenance.push(PixelRef { view, u, v });
            }
        }
    }
    FusedCloud {
        cloud: ColoredPointCloud::from_positions(positions),
        provenance,
    }
}

fn check_view_count(n: usize, rig: &ViewRig) -> Result<()> {
    if n != rig.len() {
        return Err(Error::ViewCount {
            expected: rig.len(),
            found: n,
        });
    }
    Ok(())
}

fn concat(parts: Vec<FusedCloud>) -> FusedCloud {
    let mut out = FusedCloud::default();
    for p in parts {
        out.cloud.extend(&p.cloud);
        out.provenance.extend(p.provenance);
    }
    out
}

/// Fuses depth maps alone (uncolored).
pub fn fuse_depths(depths: &[DepthMap], rig: &ViewRig) -> Result<FusedCloud> {
    check_view_count(depths.len(), rig)?;
    for d in depths {
        ensure_same_dims((rig.intrinsics().width, rig.intrinsics().height), d.dims())?;
    }
    let parts = depths
        .par_iter()
        .zip(&rig.cameras)
        .enumerate()
        .map(|(n, (d, cam))| back_project(d, cam, n))
        .collect();
    Ok(concat(parts))
}

/// Fuses jointly completed views; each point takes the texture of its own
/// pixel. The views must have equal depth and texture masks.
pub fn fuse_mtdcn(views: &[TextureDepthMap], rig: &ViewRig) -> Result<FusedCloud> {
    for (n, v) in views.iter().enumerate() {
        let pixels = v.mask_mismatches();
        if pixels > 0 {
            return Err(Error::MaskMismatch { view: n, pixels });
        }
    }
    let depths: Vec<DepthMap> = views.iter().map(|v| v.depth.clone()).collect();
    let mut fused = fuse_depths(&depths, rig)?;
    let colors = fused
        .provenance
        .iter()
        .map(|p| {
            let tex = &views[p.view].texture;
            tex.rgb[p.v * tex.width + p.u]
        })
        .collect();
    fused.cloud.colors = Some(colors);
    Ok(fused)
}

/// Fuses depth-only completions and colors them from separately completed
/// textures. Where a texture is invalid at the point's pixel, the nearest
/// valid texture pixel (Euclidean pixel distance, ties to smaller `v` then
/// smaller `u`) supplies the color; a view without any valid texture
/// yields black.
pub fn fuse_mdcn(depths: &[DepthMap], textures: &[TextureImage], rig: &ViewRig) -> Result<FusedCloud> {
    check_view_count(textures.len(), rig)?;
    for (d, t) in depths.iter().zip(textures) {
        ensure_same_dims(d.dims(), t.dims())?;
    }
    let mut fused = fuse_depths(depths, rig)?;
    let textured: Vec<bool> = textures.iter().map(|t| t.mask.contains(&true)).collect();
    let colors = fused
        .provenance
        .par_iter()
        .map(|p| {
            let tex = &textures[p.view];
            if !textured[p.view] {
                return [0, 0, 0];
            }
            nearest_valid_texel(tex, p.u, p.v).map_or([0, 0, 0], |i| tex.rgb[i])
        })
        .collect();
    fused.cloud.colors = Some(colors);
    Ok(fused)
}

/// Index of the nearest valid texel to `(u, v)`.
pub fn nearest_valid_texel(tex: &TextureImage, u: usize, v: usize) -> Option<usize> {
    let (w, h) = (tex.width as isize, tex.height as isize);
    let i = v * tex.width + u;
    if tex.mask[i] {
        return Some(i);
    }
    let (u, v) = (u as isize, v as isize);
    // (d², v, u) of the best candidate so far
    let mut best: Option<(isize, isize, isize)> = None;
    let consider = |cu: isize, cv: isize, best: &mut Option<(isize, isize, isize)>| {
        if cu < 0 || cv < 0 || cu >= w || cv >= h || !tex.mask[(cv * w + cu) as usize] {
            return;
        }
        let key = ((cu - u).pow(2) + (cv - v).pow(2), cv, cu);
        if best.is_none_or(|b| key < b) {
            *best = Some(key);
        }
    };
    let max_ring = w.max(h);
    for k in 1..=max_ring {
        if let Some((d2, _, _)) = best {
            // every texel on ring k is at least k away
            if k * k > d2 {
                break;
            }
        }
        for du in -k..=k {
            consider(u + du, v - k, &mut best);
            consider(u + du, v + k, &mut best);
        }
        for dv in -k + 1..k {
            consider(u - k, v + dv, &mut best);
            consider(u + k, v + dv, &mut best);
        }
    }
    best.map(|(_, cv, cu)| (cv * w + cu) as usize)
}

/// Votes per point: 1 for its own view, plus 1 for every other view where it
/// projects onto a valid pixel without lying more than `tolerance` in front
/// of that view's surface. Points hidden behind another view's surface still
/// agree with it; points floating in front of it, or off its silhouette, do
/// not.
pub fn count_votes(fused: &FusedCloud, depths: &[DepthMap], rig: &ViewRig, tolerance: f64) -> Vec<usize> {
    fused
        .cloud
        .positions
        .par_iter()
        .zip(&fused.provenance)
        .map(|(p, src)| {
            let mut votes = 1;
            for (m, (cam, depth)) in rig.cameras.iter().zip(depths).enumerate() {
                if m == src.view {
                    continue;
                }
                if let Some((u, v, z)) = cam.pixel_of(p) {
                    let stored = depth.get(u, v);
                    if stored > 0.0 && z >= stored - tolerance {
                        votes += 1;
                    }
                }
            }
            votes
        })
        .collect()
}

pub fn voting_filter(fused: &FusedCloud, depths: &[DepthMap], rig: &ViewRig, cfg: &FusionConfig) -> Result<FusedCloud> {
    check_view_count(depths.len(), rig)?;
    if fused.provenance.len() != fused.len() {
        return Err(Error::InvalidConfig("voting requires per-point provenance".into()));
    }
    let votes = count_votes(fused, depths, rig, cfg.vote_tolerance);
    let keep: Vec<bool> = votes.iter().map(|&n| n >= cfg.vote_threshold).collect();
    Ok(fused.select(&keep))
}

/// Flags points with at least `min_neighbors` other points within `radius`.
pub fn radius_keep_mask(cloud: &ColoredPointCloud, radius: f64, min_neighbors: usize) -> Vec<bool> {
    if min_neighbors == 0 {
        return vec![true; cloud.len()];
    }
    let tree = KdTree::new(&cloud.positions);
    let r2 = radius * radius;
    cloud
        .positions
        .par_iter()
        .enumerate()
        .map(|(i, p)| tree.count_within(p, r2, Some(i)) >= min_neighbors)
        .collect()
}

pub fn radius_filter(cloud: &ColoredPointCloud, cfg: &FusionConfig) -> ColoredPointCloud {
    cloud.select(&radius_keep_mask(cloud, cfg.radius, cfg.min_neighbors))
}

/// Applies the enabled filters in order: voting, then radius removal.
pub fn postprocess(fused: &FusedCloud, depths: &[DepthMap], rig: &ViewRig, cfg: &FusionConfig) -> Result<FusedCloud> {
    cfg.validate()?;
    let voted = if cfg.voting {
        voting_filter(fused, depths, rig, cfg)?
    } else {
        fused.clone()
    };
    if !cfg.radius_filter {
        return Ok(voted);
    }
    let keep = radius_keep_mask(&voted.cloud, cfg.radius, cfg.min_neighbors);
    Ok(voted.select(&keep))
}

/// Whether any view has at least one valid texel.
pub fn any_texture(textures: &[TextureImage]) -> bool {
    textures.iter().any(|t| t.mask.iter().any(|&m| m))
}
