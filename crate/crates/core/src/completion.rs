//! View completion stage.
//!
//! A completer turns the eight partial views into completed ones. Joint
//! (texture+depth) completers consume and produce 4-channel maps with equal
//! depth/texture masks; depth-only completers see and emit depth alone.
//! Learned completers run out of process and hand their results over as a
//! view directory, see [`complete_external`]. Pixels a completer considers
//! background must carry the invalid sentinel.

use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::io::manifest::Manifest;
use crate::io::views::{read_depths, read_textures, MANIFEST};
use crate::projection::ViewSet;
use crate::raster::{DepthMap, TextureDepthMap, TextureImage};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompletionMode {
    /// Completes 4-channel texture-depth maps jointly.
    TextureDepth,
    /// Completes 1-channel depth maps only.
    DepthOnly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompleterInfo {
    pub name: String,
    pub version: String,
    pub mode: CompletionMode,
}

pub trait Completer: Send + Sync {
    fn info(&self) -> CompleterInfo;

    /// Completes all views. Depth-only completers must leave textures untouched.
    fn complete(&self, views: &ViewSet) -> Result<ViewSet>;
}

pub fn complete_identity(views: &ViewSet) -> ViewSet {
    views.clone()
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityCompleter;

impl Completer for IdentityCompleter {
    fn info(&self) -> CompleterInfo {
        CompleterInfo {
            name: "identity".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            mode: CompletionMode::TextureDepth,
        }
    }

    fn complete(&self, views: &ViewSet) -> Result<ViewSet> {
        Ok(complete_identity(views))
    }
}

/// Minimum number of valid 8-neighbors for a hole pixel to be filled.
pub const FILL_MIN_NEIGHBORS: usize = 3;

const NEIGHBORS: [(isize, isize); 8] = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];

/// One synchronous fill pass. Returns the number of pixels filled.
fn fill_pass(map: &TextureDepthMap, with_texture: bool) -> (TextureDepthMap, usize) {
    let (w, h) = map.dims();
    let mut out = map.clone();
    let mut filled = 0;
    for v in 0..h {
        for u in 0..w {
            let i = v * w + u;
            if map.depth.data[i] > 0.0 {
                continue;
            }
            let mut n = 0usize;
            let mut depth_sum = 0.0;
            let mut tex_n = 0u32;
            let mut tex_sum = [0u32; 3];
            for (du, dv) in NEIGHBORS {
                let (nu, nv) = (u as isize + du, v as isize + dv);
                if nu < 0 || nv < 0 || nu >= w as isize || nv >= h as isize {
                    continue;
                }
                let j = nv as usize * w + nu as usize;
                let d = map.depth.data[j];
                if d > 0.0 {
                    n += 1;
                    depth_sum += d;
                    if map.texture.mask[j] {
                        tex_n += 1;
                        for c in 0..3 {
                            tex_sum[c] += map.texture.rgb[j][c] as u32;
                        }
                    }
                }
            }
            if n < FILL_MIN_NEIGHBORS {
                continue;
            }
            out.depth.data[i] = depth_sum / n as f64;
            filled += 1;
            if with_texture && tex_n > 0 {
                // round half up
                out.texture.rgb[i] = tex_sum.map(|s| ((2 * s + tex_n) / (2 * tex_n)) as u8);
                out.texture.mask[i] = true;
            }
        }
    }
    (out, filled)
}

/// Iterative hole filling: each pass, every invalid pixel with at least
/// [`FILL_MIN_NEIGHBORS`] valid 8-neighbors takes their mean depth (and
/// rounded mean color in joint mode). Passes read only the previous pass's
/// raster, so the result is independent of scan order. Valid input pixels
/// never change.
pub fn complete_baseline_fill(views: &ViewSet, iterations: usize, mode: CompletionMode) -> ViewSet {
    let with_texture = mode == CompletionMode::TextureDepth;
    let results: Vec<(TextureDepthMap, usize)> = views
        .views
        .par_iter()
        .map(|view| {
            let mut cur = view.clone();
            let mut total = 0;
            for _ in 0..iterations {
                let (next, filled) = fill_pass(&cur, with_texture);
                if filled == 0 {
                    break;
                }
                total += filled;
                cur = next;
            }
            (cur, total)
        })
        .collect();
    let changed = results.iter().any(|(_, n)| *n > 0);
    ViewSet {
        views: results.into_iter().map(|(v, _)| v).collect(),
        indices: if changed { None } else { views.indices.clone() },
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FillCompleter {
    pub iterations: usize,
    pub mode: CompletionMode,
}

impl Completer for FillCompleter {
    fn info(&self) -> CompleterInfo {
        CompleterInfo {
            name: format!("fill:{}", self.iterations),
            version: env!("CARGO_PKG_VERSION").into(),
            mode: self.mode,
        }
    }

    fn complete(&self, views: &ViewSet) -> Result<ViewSet> {
        Ok(complete_baseline_fill(views, self.iterations, self.mode))
    }
}

/// Maps produced by an out-of-process completer.
#[derive(Debug, Clone, PartialEq)]
pub enum ExternalViews {
    TextureDepth(ViewSet),
    DepthOnly(Vec<DepthMap>),
}

/// Loads completed maps from `dir` unmodified. `expected` is the raster size
/// of the views being completed; a `manifest.txt` in `dir`, if present, must
/// agree with it.
pub fn complete_external(dir: impl AsRef<Path>, mode: CompletionMode, expected: (usize, usize)) -> Result<ExternalViews> {
    let dir = dir.as_ref();
    let manifest_path = dir.join(MANIFEST);
    if manifest_path.is_file() {
        let m = Manifest::read(&manifest_path)?;
        let found = (m.intrinsics.width, m.intrinsics.height);
        if found != expected {
            return Err(Error::DimensionMismatch {
                expected_w: expected.0,
                expected_h: expected.1,
                found_w: found.0,
                found_h: found.1,
            });
        }
    }
    let depths = read_depths(dir, expected)?;
    match mode {
        CompletionMode::DepthOnly => Ok(ExternalViews::DepthOnly(depths)),
        CompletionMode::TextureDepth => {
            let textures = read_textures(dir, expected)?.ok_or(Error::MissingView(0))?;
            let views = depths
                .into_iter()
                .zip(textures)
                .map(|(d, t)| TextureDepthMap::from_parts(d, t))
                .collect::<Result<Vec<_>>>()?;
            Ok(ExternalViews::TextureDepth(ViewSet { views, indices: None }))
        }
    }
}

/// Adapter exposing an external completion directory as a [`Completer`].
#[derive(Debug, Clone)]
pub struct ExternalCompleter {
    pub dir: std::path::PathBuf,
    pub mode: CompletionMode,
}

impl Completer for ExternalCompleter {
    fn info(&self) -> CompleterInfo {
        CompleterInfo {
            name: format!("external:{}", self.dir.display()),
            version: "external".into(),
            mode: self.mode,
        }
    }

    fn complete(&self, views: &ViewSet) -> Result<ViewSet> {
        let dims = views.dims().unwrap_or((0, 0));
        match complete_external(&self.dir, self.mode, dims)? {
            ExternalViews::TextureDepth(set) => Ok(set),
            ExternalViews::DepthOnly(depths) => {
                let views = depths
                    .into_iter()
                    .zip(&views.views)
                    .map(|(d, v)| TextureDepthMap::from_parts(d, v.texture.clone()))
                    .collect::<Result<Vec<_>>>()?;
                Ok(ViewSet { views, indices: None })
            }
        }
    }
}

/// Checks the joint-completion output contract: equal masks in every view.
pub fn check_joint_masks(views: &ViewSet) -> Result<()> {
    for (n, v) in views.views.iter().enumerate() {
        let pixels = v.mask_mismatches();
        if pixels > 0 {
            return Err(Error::MaskMismatch { view: n, pixels });
        }
    }
    Ok(())
}

/// Textures of a view set, for depth-only fusion.
pub fn textures_of(views: &ViewSet) -> Vec<TextureImage> {
    views.views.iter().map(|v| v.texture.clone()).collect()
}
