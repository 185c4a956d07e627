//! End-to-end reconstruction from an RGB image and its object-coordinate
//! image: map, project, complete, fuse, filter.

use crate::camera::ViewRig;
use crate::cloud::ColoredPointCloud;
use crate::completion::{check_joint_masks, textures_of, Completer, CompletionMode};
use crate::error::Result;
use crate::fusion::{any_texture, fuse_depths, fuse_mdcn, fuse_mtdcn, postprocess, FusedCloud, FusionConfig};
use crate::projection::{joint_project, joint_texture_shape_mapping, ProjectionConfig, ViewSet};
use crate::raster::{DepthMap, NocsImage, TextureImage};

#[derive(Debug, Clone)]
pub struct Reconstruction {
    /// Colored partial cloud built from the inputs.
    pub partial: ColoredPointCloud,
    /// Pseudo-rendered partial views.
    pub views: ViewSet,
    pub completed: ViewSet,
    /// Final cloud: jointly fused for texture-depth completers, depth-only
    /// geometry recolored from the textures otherwise.
    pub fused: FusedCloud,
    /// Uncolored depth-only fusion, for depth-only completers.
    pub depth_only: Option<ColoredPointCloud>,
}

/// Fuses completed views according to the completer's mode and applies the
/// configured filters.
pub fn fuse_completed(
    completed: &ViewSet,
    mode: CompletionMode,
    rig: &ViewRig,
    fusion: &FusionConfig,
) -> Result<(FusedCloud, Option<ColoredPointCloud>)> {
    let depths: Vec<DepthMap> = completed.views.iter().map(|v| v.depth.clone()).collect();
    match mode {
        CompletionMode::TextureDepth => {
            check_joint_masks(completed)?;
            let fused = fuse_mtdcn(&completed.views, rig)?;
            Ok((postprocess(&fused, &depths, rig, fusion)?, None))
        }
        CompletionMode::DepthOnly => {
            let textures: Vec<TextureImage> = textures_of(completed);
            let fused = if any_texture(&textures) {
                fuse_mdcn(&depths, &textures, rig)?
            } else {
                fuse_depths(&depths, rig)?
            };
            let fused = postprocess(&fused, &depths, rig, fusion)?;
            let shape = fused.cloud.without_colors();
            Ok((fused, Some(shape)))
        }
    }
}

pub fn reconstruct(
    rgb: &TextureImage,
    nocs: &NocsImage,
    completer: &dyn Completer,
    rig: &ViewRig,
    projection: &ProjectionConfig,
    fusion: &FusionConfig,
) -> Result<Reconstruction> {
    fusion.validate()?;
    let partial = joint_texture_shape_mapping(rgb, nocs)?;
    let views = joint_project(&partial, rig, projection);
    let completed = completer.complete(&views)?;
    completed.validate()?;
    let mode = completer.info().mode;
    let (fused, depth_only) = fuse_completed(&completed, mode, rig, fusion)?;
    Ok(Reconstruction {
        partial,
        views,
        completed,
        fused,
        depth_only,
    })
}
