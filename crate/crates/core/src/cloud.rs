use crate::camera::Vec3;
use crate::error::{Error, Result};
use crate::raster::Rgb;

/// Point cloud with optional per-point RGB.
///
/// `color_mask`, when present, marks points whose color is a placeholder
/// (the source texture was masked there). It is not serialized.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ColoredPointCloud {
    pub positions: Vec<Vec3>,
    pub colors: Option<Vec<Rgb>>,
    pub color_mask: Option<Vec<bool>>,
}

impl ColoredPointCloud {
    pub fn from_positions(positions: Vec<Vec3>) -> Self {
        ColoredPointCloud {
            positions,
            colors: None,
            color_mask: None,
        }
    }

    pub fn with_colors(positions: Vec<Vec3>, colors: Vec<Rgb>) -> Result<Self> {
        let cloud = ColoredPointCloud {
            positions,
            colors: Some(colors),
            color_mask: None,
        };
        cloud.validate()?;
        Ok(cloud)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(colors) = &self.colors {
            if colors.len() != self.positions.len() {
                return Err(Error::ColorCountMismatch {
                    colors: colors.len(),
                    points: self.positions.len(),
                });
            }
        }
        if let Some(mask) = &self.color_mask {
            if self.colors.is_none() || mask.len() != self.positions.len() {
                return Err(Error::ColorCountMismatch {
                    colors: mask.len(),
                    points: self.positions.len(),
                });
            }
        }
        if let Some(i) = self
            .positions
            .iter()
            .position(|p| !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()))
        {
            return Err(Error::NonFinite(i));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn has_colors(&self) -> bool {
        self.colors.is_some()
    }

    /// Color of point `i` if it carries a real one.
    #[inline]
    pub fn color(&self, i: usize) -> Option<Rgb> {
        let colors = self.colors.as_ref()?;
        match &self.color_mask {
            Some(mask) if !mask[i] => None,
            _ => Some(colors[i]),
        }
    }

    /// Keeps the points whose flag is set, preserving order.
    pub fn select(&self, keep: &[bool]) -> ColoredPointCloud {
        debug_assert_eq!(keep.len(), self.len());
        let pick = |i: &usize| keep[*i];
        let idx: Vec<usize> = (0..self.len()).filter(pick).collect();
        ColoredPointCloud {
            positions: idx.iter().map(|&i| self.positions[i]).collect(),
            colors: self.colors.as_ref().map(|c| idx.iter().map(|&i| c[i]).collect()),
            color_mask: self.color_mask.as_ref().map(|m| idx.iter().map(|&i| m[i]).collect()),
        }
    }

    /// Appends `other`. Colors survive only if both non-empty sides have them.
    pub fn extend(&mut self, other: &ColoredPointCloud) {
        if other.is_empty() {
            return;
        }
        if self.is_empty() {
            *self = other.clone();
            return;
        }
        let had = self.len();
        self.positions.extend_from_slice(&other.positions);
        match (self.colors.as_mut(), other.colors.as_ref()) {
            (Some(a), Some(b)) => {
                a.extend_from_slice(b);
                if self.color_mask.is_some() || other.color_mask.is_some() {
                    let mut mask = self.color_mask.take().unwrap_or_else(|| vec![true; had]);
                    match &other.color_mask {
                        Some(m) => mask.extend_from_slice(m),
                        None => mask.resize(had + other.len(), true),
                    }
                    self.color_mask = Some(mask);
                }
            }
            _ => {
                self.colors = None;
                self.color_mask = None;
            }
        }
    }

    pub fn without_colors(&self) -> ColoredPointCloud {
        ColoredPointCloud::from_positions(self.positions.clone())
    }
}
