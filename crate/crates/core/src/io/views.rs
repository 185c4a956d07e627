//! View-set directories:
//!
//! ```text
//! manifest.txt
//! view_{n}_depth.fmap     n = 0..7, rig order
//! view_{n}_texture.png
//! view_{n}_index.fmap     only for projected (not completed) views
//! ```

use std::path::{Path, PathBuf};

use crate::camera::NUM_VIEWS;
use crate::error::{Error, Result};
use crate::io::fmap::{read_depth, read_index, write_raster, Raster};
use crate::io::manifest::Manifest;
use crate::io::texture::{read_texture, write_texture};
use crate::projection::ViewSet;
use crate::raster::{DepthMap, TextureDepthMap, TextureImage};

pub const MANIFEST: &str = "manifest.txt";

pub fn depth_path(dir: &Path, n: usize) -> PathBuf {
    dir.join(format!("view_{n}_depth.fmap"))
}

pub fn texture_path(dir: &Path, n: usize) -> PathBuf {
    dir.join(format!("view_{n}_texture.png"))
}

pub fn index_path(dir: &Path, n: usize) -> PathBuf {
    dir.join(format!("view_{n}_index.fmap"))
}

pub fn write_view_set(views: &ViewSet, manifest: &Manifest, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    views.validate()?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    manifest.write(dir.join(MANIFEST))?;
    for (n, v) in views.views.iter().enumerate() {
        write_raster(&Raster::Depth(v.depth.clone()), depth_path(dir, n))?;
        write_texture(&v.texture, texture_path(dir, n))?;
    }
    if let Some(indices) = &views.indices {
        for (n, im) in indices.iter().enumerate() {
            write_raster(&Raster::Index(im.clone()), index_path(dir, n))?;
        }
    }
    Ok(())
}

fn check_dims(n: usize, found: (usize, usize), expected: (usize, usize)) -> Result<()> {
    if found != expected {
        log::debug!("view {n}: {found:?} vs expected {expected:?}");
        return Err(Error::DimensionMismatch {
            expected_w: expected.0,
            expected_h: expected.1,
            found_w: found.0,
            found_h: found.1,
        });
    }
    Ok(())
}

/// Loads the 8 depth maps, failing on the first missing view.
pub fn read_depths(dir: &Path, expected: (usize, usize)) -> Result<Vec<DepthMap>> {
    (0..NUM_VIEWS)
        .map(|n| {
            let p = depth_path(dir, n);
            if !p.is_file() {
                return Err(Error::MissingView(n));
            }
            let d = read_depth(&p)?;
            check_dims(n, d.dims(), expected)?;
            Ok(d)
        })
        .collect()
}

/// Loads the 8 texture maps; `Ok(None)` when the directory has none.
pub fn read_textures(dir: &Path, expected: (usize, usize)) -> Result<Option<Vec<TextureImage>>> {
    let present: Vec<bool> = (0..NUM_VIEWS).map(|n| texture_path(dir, n).is_file()).collect();
    if present.iter().all(|&p| !p) {
        return Ok(None);
    }
    if let Some(n) = present.iter().position(|&p| !p) {
        return Err(Error::MissingView(n));
    }
    (0..NUM_VIEWS)
        .map(|n| {
            let t = read_texture(texture_path(dir, n))?;
            check_dims(n, t.dims(), expected)?;
            Ok(t)
        })
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

/// Reads a full view-set directory. Missing textures read as fully invalid.
pub fn read_view_set(dir: impl AsRef<Path>) -> Result<(ViewSet, Manifest)> {
    let dir = dir.as_ref();
    let manifest = Manifest::read(dir.join(MANIFEST))?;
    let dims = (manifest.intrinsics.width, manifest.intrinsics.height);
    let depths = read_depths(dir, dims)?;
    let textures = read_textures(dir, dims)?
        .unwrap_or_else(|| (0..NUM_VIEWS).map(|_| TextureImage::new(dims.0, dims.1)).collect());
    let views = depths
        .into_iter()
        .zip(textures)
        .map(|(d, t)| TextureDepthMap::from_parts(d, t))
        .collect::<Result<Vec<_>>>()?;
    let indices = if (0..NUM_VIEWS).all(|n| index_path(dir, n).is_file()) {
        let maps = (0..NUM_VIEWS)
            .map(|n| {
                let im = read_index(index_path(dir, n))?;
                check_dims(n, im.dims(), dims)?;
                Ok(im)
            })
            .collect::<Result<Vec<_>>>()?;
        Some(maps)
    } else {
        None
    };
    Ok((ViewSet { views, indices }, manifest))
}
