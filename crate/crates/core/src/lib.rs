//! Dense, optionally colored point-cloud reconstruction from object-coordinate
//! images.
//!
//! The visible surface encoded in an object-coordinate image is lifted to a
//! colored partial cloud, pseudo-rendered into eight depth/texture views on a
//! cube-vertex camera rig, completed by a pluggable completer, and fused back
//! into one cloud with multi-view voting and radius outlier removal. The
//! [`dataset`] module renders ground truth for the same rig and [`eval`]
//! scores results with Chamfer distance and ICP.

pub mod camera;
pub mod cloud;
pub mod completion;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod fusion;
pub mod io;
pub mod pipeline;
pub mod projection;
pub mod raster;
pub mod spatial;

pub use camera::{look_at, make_view_rig, Camera, Intrinsics, Pose, Vec3, ViewRig};
pub use cloud::ColoredPointCloud;
pub use completion::{complete_baseline_fill, complete_external, complete_identity, Completer, CompletionMode};
pub use dataset::{render_gt_views, render_nocs_image, sample_mesh, TriangleMesh};
pub use error::{Error, ErrorClass, Result};
pub use eval::{chamfer_distance, eval_report, icp_align, EvalReport, IcpConfig};
pub use fusion::{back_project, fuse_mdcn, fuse_mtdcn, radius_filter, voting_filter, FusedCloud, FusionConfig};
pub use projection::{joint_project, joint_texture_shape_mapping, project_view, ProjectionConfig, ViewSet};
pub use raster::{DepthMap, IndexMap, NocsImage, TextureDepthMap, TextureImage};
