//! Texture maps as PNG: RGBA8, alpha 255 on valid pixels and 0 elsewhere.
//! Plain RGB (or grayscale) images read back as fully valid.

use std::path::Path;

use image::{DynamicImage, RgbaImage};

use crate::error::{Error, Result};
use crate::raster::TextureImage;

pub fn to_rgba(texture: &TextureImage) -> RgbaImage {
    let mut img = RgbaImage::new(texture.width as u32, texture.height as u32);
    for (i, px) in img.pixels_mut().enumerate() {
        let [r, g, b] = texture.rgb[i];
        px.0 = [r, g, b, if texture.mask[i] { 255 } else { 0 }];
    }
    img
}

pub fn from_image(img: DynamicImage) -> TextureImage {
    let has_alpha = img.color().has_alpha();
    let rgba = img.into_rgba8();
    let (w, h) = (rgba.width() as usize, rgba.height() as usize);
    let mut tex = TextureImage::new(w, h);
    for (i, px) in rgba.pixels().enumerate() {
        let [r, g, b, a] = px.0;
        tex.rgb[i] = [r, g, b];
        tex.mask[i] = !has_alpha || a >= 128;
    }
    tex
}

pub fn read_texture(path: impl AsRef<Path>) -> Result<TextureImage> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let img = image::load_from_memory(&bytes)?;
    Ok(from_image(img))
}

pub fn write_texture(texture: &TextureImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    to_rgba(texture)
        .save_with_format(path, image::ImageFormat::Png)
        .map_err(Error::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn png_round_trip_keeps_mask_and_hidden_rgb() {
        let mut tex = TextureImage::new(3, 2);
        tex.rgb[0] = [10, 20, 30];
        tex.mask[0] = true;
        tex.rgb[4] = [1, 2, 3];
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.png");
        write_texture(&tex, &p).unwrap();
        assert_eq!(read_texture(&p).unwrap(), tex);
    }

    #[test]
    fn rgb_png_is_fully_valid() {
        let img = image::RgbImage::from_pixel(2, 2, image::Rgb([5, 6, 7]));
        let tex = from_image(DynamicImage::ImageRgb8(img));
        assert!(tex.mask.iter().all(|&m| m));
        assert_eq!(tex.rgb[3], [5, 6, 7]);
    }
}
