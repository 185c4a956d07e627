//! Pixel-aligned rasters: depth, texture, object coordinates and pooling indices.
//!
//! All rasters are stored row-major, pixel `(u, v)` at `v * width + u`.

use crate::error::{Error, Result};

pub type Rgb = [u8; 3];

/// Invalid-depth sentinel.
pub const INVALID_DEPTH: f64 = 0.0;

/// Invalid-index sentinel.
pub const NO_POINT: i64 = -1;

fn check_dims(expected: (usize, usize), found: (usize, usize)) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            expected_w: expected.0,
            expected_h: expected.1,
            found_w: found.0,
            found_h: found.1,
        });
    }
    Ok(())
}

/// Camera-space z per pixel, `0.0` where nothing was observed.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl DepthMap {
    pub fn new(width: usize, height: usize) -> Self {
        DepthMap {
            width,
            height,
            data: vec![INVALID_DEPTH; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        check_dims((width * height, 1), (data.len(), 1))?;
        Ok(DepthMap { width, height, data })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.data[v * self.width + u]
    }

    #[inline]
    pub fn is_valid_at(&self, i: usize) -> bool {
        self.data[i] > 0.0
    }

    pub fn valid_count(&self) -> usize {
        self.data.iter().filter(|&&d| d > 0.0).count()
    }
}

/// RGB raster with a validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct TextureImage {
    pub width: usize,
    pub height: usize,
    pub rgb: Vec<Rgb>,
    pub mask: Vec<bool>,
}

impl TextureImage {
    pub fn new(width: usize, height: usize) -> Self {
        TextureImage {
            width,
            height,
            rgb: vec![[0; 3]; width * height],
            mask: vec![false; width * height],
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }
}

/// Per-pixel object-space coordinates of the visible surface.
#[derive(Debug, Clone, PartialEq)]
pub struct NocsImage {
    pub width: usize,
    pub height: usize,
    pub coords: Vec<[f64; 3]>,
    pub mask: Vec<bool>,
}

impl NocsImage {
    pub fn new(width: usize, height: usize) -> Self {
        NocsImage {
            width,
            height,
            coords: vec![[0.0; 3]; width * height],
            mask: vec![false; width * height],
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }
}

/// Depth and texture of one view, sharing dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct TextureDepthMap {
    pub depth: DepthMap,
    pub texture: TextureImage,
}

impl TextureDepthMap {
    pub fn new(width: usize, height: usize) -> Self {
        TextureDepthMap {
            depth: DepthMap::new(width, height),
            texture: TextureImage::new(width, height),
        }
    }

    pub fn from_parts(depth: DepthMap, texture: TextureImage) -> Result<Self> {
        check_dims(depth.dims(), texture.dims())?;
        Ok(TextureDepthMap { depth, texture })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.depth.dims()
    }

    /// Number of pixels where depth and texture validity disagree.
    pub fn mask_mismatches(&self) -> usize {
        self.depth
            .data
            .iter()
            .zip(&self.texture.mask)
            .filter(|(&d, &m)| (d > 0.0) != m)
            .count()
    }
}

/// Source-point index of the pooling winner per pixel, [`NO_POINT`] elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexMap {
    pub width: usize,
    pub height: usize,
    pub data: Vec<i64>,
}

impl IndexMap {
    pub fn new(width: usize, height: usize) -> Self {
        IndexMap {
            width,
            height,
            data: vec![NO_POINT; width * height],
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> Option<usize> {
        let i = self.data[v * self.width + u];
        (i >= 0).then_some(i as usize)
    }
}

pub(crate) fn ensure_same_dims(a: (usize, usize), b: (usize, usize)) -> Result<()> {
    check_dims(a, b)
}
