pub mod fmap;
pub mod manifest;
pub mod obj;
pub mod ply;
pub mod texture;
pub mod views;

pub use fmap::{read_depth, read_index, read_nocs, read_raster, read_texture_depth, write_raster, Raster};
pub use manifest::Manifest;
pub use obj::read_obj;
pub use ply::{read_ply, write_ply};
pub use texture::{read_texture, write_texture};
pub use views::{read_view_set, write_view_set};
