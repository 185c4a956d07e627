//! ASCII PLY point clouds: `x y z` as doubles, plus `red green blue` as
//! uchar when the cloud is colored. Positions are written in shortest
//! round-trip decimal form.

use std::fmt::Write as _;
use std::path::Path;

use crate::camera::Vec3;
use crate::cloud::ColoredPointCloud;
use crate::error::{Error, Result};

pub fn encode(cloud: &ColoredPointCloud) -> Result<String> {
    cloud.validate()?;
    let mut out = String::with_capacity(64 + cloud.len() * 48);
    out.push_str("ply\nformat ascii 1.0\n");
    writeln!(out, "element vertex {}", cloud.len()).unwrap();
    out.push_str("property double x\nproperty double y\nproperty double z\n");
    if cloud.colors.is_some() {
        out.push_str("property uchar red\nproperty uchar green\nproperty uchar blue\n");
    }
    out.push_str("end_header\n");
    for (i, p) in cloud.positions.iter().enumerate() {
        write!(out, "{} {} {}", p.x, p.y, p.z).unwrap();
        if let Some(colors) = &cloud.colors {
            let [r, g, b] = colors[i];
            write!(out, " {r} {g} {b}").unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    X,
    Y,
    Z,
    Red,
    Green,
    Blue,
    Ignored,
}

pub fn decode(text: &str) -> Result<ColoredPointCloud> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("ply") {
        return Err(Error::MalformedPly("missing `ply` magic".into()));
    }

    let mut vertex_count = None;
    let mut slots = Vec::new();
    let mut unsupported = Vec::new();
    let mut in_vertex = false;
    let mut header_done = false;
    for line in lines.by_ref() {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            ["format", "ascii", _] => {}
            ["format", other, ..] => {
                return Err(Error::MalformedPly(format!("unsupported format `{other}`")));
            }
            ["comment", ..] | ["obj_info", ..] | [] => {}
            ["element", "vertex", n] => {
                let n = n
                    .parse::<usize>()
                    .map_err(|_| Error::MalformedPly(format!("bad vertex count `{n}`")))?;
                vertex_count = Some(n);
                in_vertex = true;
            }
            ["element", name, _] => {
                unsupported.push((*name).to_string());
                in_vertex = false;
            }
            ["property", "list", ..] if in_vertex => {
                return Err(Error::MalformedPly("list properties on vertices are not supported".into()));
            }
            ["property", _, name] if in_vertex => slots.push(match *name {
                "x" => Slot::X,
                "y" => Slot::Y,
                "z" => Slot::Z,
                "red" | "r" => Slot::Red,
                "green" | "g" => Slot::Green,
                "blue" | "b" => Slot::Blue,
                _ => Slot::Ignored,
            }),
            ["property", ..] => {}
            ["end_header"] => {
                header_done = true;
                break;
            }
            _ => return Err(Error::MalformedPly(format!("unexpected header line `{line}`"))),
        }
    }
    if !header_done {
        return Err(Error::MalformedPly("missing end_header".into()));
    }
    if !unsupported.is_empty() {
        return Err(Error::UnsupportedPlyElement(unsupported.join(", ")));
    }
    let n = vertex_count.ok_or_else(|| Error::MalformedPly("no vertex element".into()))?;
    let find = |s: Slot| slots.iter().position(|&t| t == s);
    let (Some(xi), Some(yi), Some(zi)) = (find(Slot::X), find(Slot::Y), find(Slot::Z)) else {
        return Err(Error::MalformedPly("vertex element lacks x, y or z".into()));
    };
    let color_idx = match (find(Slot::Red), find(Slot::Green), find(Slot::Blue)) {
        (Some(r), Some(g), Some(b)) => Some([r, g, b]),
        (None, None, None) => None,
        _ => return Err(Error::MalformedPly("incomplete color properties".into())),
    };

    let mut positions = Vec::with_capacity(n);
    let mut colors = color_idx.map(|_| Vec::with_capacity(n));
    for row in 0..n {
        let line = lines
            .next()
            .ok_or_else(|| Error::MalformedPly(format!("expected {n} vertices, found {row}")))?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != slots.len() {
            return Err(Error::MalformedPly(format!(
                "vertex {row}: expected {} values, found {}",
                slots.len(),
                tokens.len()
            )));
        }
        let coord = |i: usize| {
            tokens[i]
                .parse::<f64>()
                .map_err(|_| Error::MalformedPly(format!("vertex {row}: bad number `{}`", tokens[i])))
        };
        positions.push(Vec3::new(coord(xi)?, coord(yi)?, coord(zi)?));
        if let (Some(idx), Some(colors)) = (color_idx, colors.as_mut()) {
            let mut rgb = [0u8; 3];
            for (c, &i) in rgb.iter_mut().zip(&idx) {
                *c = tokens[i]
                    .parse::<u8>()
                    .map_err(|_| Error::MalformedPly(format!("vertex {row}: bad color `{}`", tokens[i])))?;
            }
            colors.push(rgb);
        }
    }
    let cloud = ColoredPointCloud {
        positions,
        colors,
        color_mask: None,
    };
    cloud.validate()?;
    Ok(cloud)
}

pub fn read_ply(path: impl AsRef<Path>) -> Result<ColoredPointCloud> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    decode(&text)
}

pub fn write_ply(cloud: &ColoredPointCloud, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = encode(cloud)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
