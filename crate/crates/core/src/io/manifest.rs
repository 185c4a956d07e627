//! `key = value` text files: view-set manifests and CLI config files.

use std::path::Path;

use crate::camera::{Intrinsics, Vec3, ViewRig, NUM_VIEWS};
use crate::error::{Error, Result};

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::MalformedManifest(format!("line {}: expected `key = value`", i + 1)))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(Error::MalformedManifest(format!("line {}: empty key", i + 1)));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Rig parameters recorded next to a view set.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub views: usize,
    pub distance: f64,
    pub intrinsics: Intrinsics,
    pub upsample: usize,
    pub input_eye: Option<Vec3>,
}

impl Manifest {
    pub fn new(rig: &ViewRig, upsample: usize) -> Self {
        Manifest {
            views: rig.len(),
            distance: rig.distance,
            intrinsics: rig.intrinsics(),
            upsample,
            input_eye: None,
        }
    }

    pub fn rig(&self) -> Result<ViewRig> {
        ViewRig::new(self.distance, self.intrinsics)
    }

    pub fn to_text(&self) -> String {
        let k = &self.intrinsics;
        let mut s = format!(
            "views = {}\ndistance = {}\nf = {}\ncx = {}\ncy = {}\nwidth = {}\nheight = {}\nupsample = {}\n",
            self.views, self.distance, k.f, k.cx, k.cy, k.width, k.height, self.upsample
        );
        if let Some(e) = self.input_eye {
            s.push_str(&format!("input_eye = {},{},{}\n", e.x, e.y, e.z));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut views = None;
        let mut distance = None;
        let mut f = None;
        let mut cx = None;
        let mut cy = None;
        let mut width = None;
        let mut height = None;
        let mut upsample = None;
        let mut input_eye = None;
        fn num<T: std::str::FromStr>(k: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::MalformedManifest(format!("bad value for `{k}`: `{v}`")))
        }
        for (k, v) in parse_key_values(text)? {
            match k.as_str() {
                "views" => views = Some(num::<usize>(&k, &v)?),
                "distance" => distance = Some(num::<f64>(&k, &v)?),
                "f" => f = Some(num::<f64>(&k, &v)?),
                "cx" => cx = Some(num::<f64>(&k, &v)?),
                "cy" => cy = Some(num::<f64>(&k, &v)?),
                "width" => width = Some(num::<usize>(&k, &v)?),
                "height" => height = Some(num::<usize>(&k, &v)?),
                "upsample" => upsample = Some(num::<usize>(&k, &v)?),
                "input_eye" => input_eye = Some(parse_vec3(&v)?),
                _ => log::debug!("manifest: ignoring key `{k}`"),
            }
        }
        let need = |name: &str| Error::MalformedManifest(format!("missing `{name}`"));
        let intrinsics = Intrinsics::new(
            f.ok_or_else(|| need("f"))?,
            cx.ok_or_else(|| need("cx"))?,
            cy.ok_or_else(|| need("cy"))?,
            width.ok_or_else(|| need("width"))?,
            height.ok_or_else(|| need("height"))?,
        )
        .map_err(|e| Error::MalformedManifest(e.to_string()))?;
        let views = views.unwrap_or(NUM_VIEWS);
        if views != NUM_VIEWS {
            return Err(Error::MalformedManifest(format!("expected {NUM_VIEWS} views, found {views}")));
        }
        Ok(Manifest {
            views,
            distance: distance.ok_or_else(|| need("distance"))?,
            intrinsics,
            upsample: upsample.unwrap_or(1),
            input_eye,
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Manifest::parse(&text)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// Parses `x,y,z`.
pub fn parse_vec3(s: &str) -> Result<Vec3> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidConfig(format!("bad vector `{s}`")))?;
    match parts[..] {
        [x, y, z] => Ok(Vec3::new(x, y, z)),
        _ => Err(Error::InvalidConfig(format!("expected x,y,z, found `{s}`"))),
    }
}
