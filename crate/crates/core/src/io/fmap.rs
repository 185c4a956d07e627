//! `.fmap` raster files.
//!
//! Two ASCII header lines followed by a little-endian, row-major,
//! channel-interleaved payload:
//!
//! ```text
//! FMAP 1
//! <kind> <width> <height> <channels> <dtype>
//! ```
//!
//! | kind       | channels | layout              | dtype      |
//! |------------|----------|---------------------|------------|
//! | `depth`    | 1        | z                   | f32 / f64  |
//! | `nocs`     | 4        | x, y, z, mask       | f32 / f64  |
//! | `texdepth` | 4        | r, g, b, z          | f32 / f64  |
//! | `index`    | 1        | source point or -1  | i64        |
//!
//! Writers always emit `f64` (or `i64`); readers also accept `f32` so that
//! external tools can export single-precision maps. A NOCS mask value
//! `>= 0.5` marks a valid pixel. A texdepth pixel's texture is valid
//! exactly where its depth is.

use std::path::Path;

use crate::error::{Error, Result};
use crate::raster::{DepthMap, IndexMap, NocsImage, TextureDepthMap, TextureImage};

const MAGIC: &str = "FMAP 1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RasterKind {
    Depth,
    Nocs,
    TextureDepth,
    Index,
}

impl RasterKind {
    fn name(self) -> &'static str {
        match self {
            RasterKind::Depth => "depth",
            RasterKind::Nocs => "nocs",
            RasterKind::TextureDepth => "texdepth",
            RasterKind::Index => "index",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "depth" => RasterKind::Depth,
            "nocs" => RasterKind::Nocs,
            "texdepth" => RasterKind::TextureDepth,
            "index" => RasterKind::Index,
            _ => return None,
        })
    }

    fn channels(self) -> usize {
        match self {
            RasterKind::Depth | RasterKind::Index => 1,
            RasterKind::Nocs | RasterKind::TextureDepth => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dtype {
    F32,
    F64,
    I64,
}

impl Dtype {
    fn size(self) -> usize {
        match self {
            Dtype::F32 => 4,
            Dtype::F64 | Dtype::I64 => 8,
        }
    }
}

/// Any raster that can live in an `.fmap` file.
#[derive(Debug, Clone, PartialEq)]
pub enum Raster {
    Depth(DepthMap),
    Nocs(NocsImage),
    TextureDepth(TextureDepthMap),
    Index(IndexMap),
}

impl Raster {
    pub fn kind(&self) -> RasterKind {
        match self {
            Raster::Depth(_) => RasterKind::Depth,
            Raster::Nocs(_) => RasterKind::Nocs,
            Raster::TextureDepth(_) => RasterKind::TextureDepth,
            Raster::Index(_) => RasterKind::Index,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        match self {
            Raster::Depth(m) => m.dims(),
            Raster::Nocs(m) => m.dims(),
            Raster::TextureDepth(m) => m.dims(),
            Raster::Index(m) => m.dims(),
        }
    }
}

fn header(kind: RasterKind, w: usize, h: usize, dtype: &str) -> Vec<u8> {
    format!("{MAGIC}\n{} {w} {h} {} {dtype}\n", kind.name(), kind.channels()).into_bytes()
}

fn check_finite(values: impl Iterator<Item = f64>) -> Result<()> {
    for (i, v) in values.enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite(i));
        }
    }
    Ok(())
}

pub fn encode(raster: &Raster) -> Result<Vec<u8>> {
    let (w, h) = raster.dims();
    let mut out;
    match raster {
        Raster::Depth(m) => {
            check_finite(m.data.iter().copied())?;
            out = header(RasterKind::Depth, w, h, "f64");
            out.reserve(m.data.len() * 8);
            for v in &m.data {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        Raster::Nocs(m) => {
            check_finite(m.coords.iter().flatten().copied())?;
            out = header(RasterKind::Nocs, w, h, "f64");
            out.reserve(m.coords.len() * 32);
            for (c, &valid) in m.coords.iter().zip(&m.mask) {
                for v in c {
                    out.extend_from_slice(&v.to_le_bytes());
                }
                out.extend_from_slice(&(if valid { 1.0f64 } else { 0.0 }).to_le_bytes());
            }
        }
        Raster::TextureDepth(m) => {
            check_finite(m.depth.data.iter().copied())?;
            let mismatched = m.mask_mismatches();
            if mismatched > 0 {
                return Err(Error::MaskMismatch {
                    view: 0,
                    pixels: mismatched,
                });
            }
            out = header(RasterKind::TextureDepth, w, h, "f64");
            out.reserve(m.depth.data.len() * 32);
            for (rgb, d) in m.texture.rgb.iter().zip(&m.depth.data) {
                for &c in rgb {
                    out.extend_from_slice(&(c as f64).to_le_bytes());
                }
                out.extend_from_slice(&d.to_le_bytes());
            }
        }
        Raster::Index(m) => {
            out = header(RasterKind::Index, w, h, "i64");
            out.reserve(m.data.len() * 8);
            for v in &m.data {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    Ok(out)
}

fn next_line<'a>(bytes: &'a [u8], pos: &mut usize) -> Result<&'a str> {
    let rest = &bytes[*pos..];
    let end = rest
        .iter()
        .take(256)
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::MalformedHeader("unterminated header line".into()))?;
    *pos += end + 1;
    std::str::from_utf8(&rest[..end]).map_err(|_| Error::MalformedHeader("header is not ASCII".into()))
}

pub fn decode(bytes: &[u8]) -> Result<Raster> {
    let mut pos = 0;
    if next_line(bytes, &mut pos)? != MAGIC {
        return Err(Error::MalformedHeader(format!("missing `{MAGIC}` magic")));
    }
    let fields: Vec<&str> = next_line(bytes, &mut pos)?.split_whitespace().collect();
    let [kind, w, h, ch, dtype] = fields[..] else {
        return Err(Error::MalformedHeader(format!("expected 5 header fields, found {}", fields.len())));
    };
    let kind = RasterKind::parse(kind).ok_or_else(|| Error::MalformedHeader(format!("unknown kind `{kind}`")))?;
    let parse_dim = |s: &str, what: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::MalformedHeader(format!("bad {what} `{s}`")))
    };
    let (w, h, channels) = (parse_dim(w, "width")?, parse_dim(h, "height")?, parse_dim(ch, "channels")?);
    let dtype = match (kind, dtype) {
        (RasterKind::Index, "i64") => Dtype::I64,
        (RasterKind::Index, _) => {
            return Err(Error::MalformedHeader(format!("index rasters must be i64, found `{dtype}`")))
        }
        (_, "f32") => Dtype::F32,
        (_, "f64") => Dtype::F64,
        _ => return Err(Error::MalformedHeader(format!("unsupported dtype `{dtype}`"))),
    };

    let payload = &bytes[pos..];
    let pixels = w
        .checked_mul(h)
        .ok_or_else(|| Error::MalformedHeader("raster too large".into()))?;
    let pixel_bytes = pixels * dtype.size();
    let expected = pixel_bytes
        .checked_mul(channels)
        .ok_or_else(|| Error::MalformedHeader("raster too large".into()))?;
    if payload.len() != expected {
        if pixel_bytes > 0 && !payload.is_empty() && payload.len().is_multiple_of(pixel_bytes) {
            return Err(Error::ChannelMismatch {
                claimed: channels,
                actual: payload.len() / pixel_bytes,
            });
        }
        if payload.len() < expected {
            return Err(Error::TruncatedPayload {
                expected,
                found: payload.len(),
            });
        }
        return Err(Error::TrailingData {
            extra: payload.len() - expected,
        });
    }
    if channels != kind.channels() {
        return Err(Error::ChannelMismatch {
            claimed: channels,
            actual: kind.channels(),
        });
    }

    let floats = || -> Vec<f64> {
        match dtype {
            Dtype::F32 => payload
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
                .collect(),
            _ => payload
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        }
    };

    Ok(match kind {
        RasterKind::Depth => {
            let data = floats();
            check_finite(data.iter().copied())?;
            Raster::Depth(DepthMap::from_vec(w, h, data)?)
        }
        RasterKind::Nocs => {
            let data = floats();
            check_finite(data.iter().copied())?;
            let mut img = NocsImage::new(w, h);
            for (i, px) in data.chunks_exact(4).enumerate() {
                img.coords[i] = [px[0], px[1], px[2]];
                img.mask[i] = px[3] >= 0.5;
            }
            Raster::Nocs(img)
        }
        RasterKind::TextureDepth => {
            let data = floats();
            check_finite(data.iter().copied())?;
            let mut depth = DepthMap::new(w, h);
            let mut texture = TextureImage::new(w, h);
            for (i, px) in data.chunks_exact(4).enumerate() {
                texture.rgb[i] = [to_u8(px[0]), to_u8(px[1]), to_u8(px[2])];
                depth.data[i] = px[3];
                texture.mask[i] = px[3] > 0.0;
            }
            Raster::TextureDepth(TextureDepthMap { depth, texture })
        }
        RasterKind::Index => {
            let data = payload
                .chunks_exact(8)
                .map(|c| i64::from_le_bytes(c.try_into().unwrap()))
                .collect();
            Raster::Index(IndexMap {
                width: w,
                height: h,
                data,
            })
        }
    })
}

fn to_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

pub fn read_raster(path: impl AsRef<Path>) -> Result<Raster> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

pub fn write_raster(raster: &Raster, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode(raster)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

macro_rules! typed_reader {
    ($name:ident, $variant:ident, $ty:ty, $label:literal) => {
        pub fn $name(path: impl AsRef<Path>) -> Result<$ty> {
            match read_raster(path)? {
                Raster::$variant(m) => Ok(m),
                other => Err(Error::WrongKind {
                    expected: $label,
                    found: other.kind().name().to_string(),
                }),
            }
        }
    };
}

typed_reader!(read_depth, Depth, DepthMap, "depth");
typed_reader!(read_nocs, Nocs, NocsImage, "nocs");
typed_reader!(read_texture_depth, TextureDepth, TextureDepthMap, "texdepth");
typed_reader!(read_index, Index, IndexMap, "index");
