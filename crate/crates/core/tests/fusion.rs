mod common;

use common::{analytic_sphere_depth, brute_neighbor_counts, point_in_ball, rng, round_trip_errors, uniform_cube};
use pcfuse::camera::{Vec3, ViewRig};
use pcfuse::cloud::ColoredPointCloud;
use pcfuse::fusion::{
    back_project, count_votes, fuse_depths, fuse_mdcn, fuse_mtdcn, radius_filter, radius_keep_mask, voting_filter,
    FusedCloud, FusionConfig, PixelRef,
};
use pcfuse::projection::{joint_project, ProjectionConfig};
use pcfuse::raster::{DepthMap, TextureImage};
use rand::Rng;

#[test]
fn round_trip_within_quantization_bound() {
    let mut r = rng(21);
    let pts: Vec<Vec3> = (0..2000).map(|_| point_in_ball(&mut r, 0.5)).collect();
    let errors = round_trip_errors(&ColoredPointCloud::from_positions(pts), &ViewRig::default(), 5);
    assert_eq!(errors.len(), 2000);
    let max = errors.iter().copied().fold(0.0, f64::max);
    let mean = errors.iter().sum::<f64>() / errors.len() as f64;
    // half a pixel diagonal at the far side of the sphere: 0.71 * 2.5 / 300
    assert!(max <= 6e-3, "max {max}");
    assert!(mean <= 5e-3, "mean {mean}");
}

#[test]
fn radius_filter_matches_brute_force() {
    let mut r = rng(22);
    for n in [500, 1500, 3000] {
        // density chosen so neighbor counts straddle the threshold
        let pts = uniform_cube(&mut r, n, 0.1 * (n as f64 / 5000.0).cbrt());
        let cloud = ColoredPointCloud::from_positions(pts.clone());
        let counts = brute_neighbor_counts(&pts, 0.012);
        let want: Vec<bool> = counts.iter().map(|&c| c >= 6).collect();
        assert_eq!(radius_keep_mask(&cloud, 0.012, 6), want);
        let kept = radius_filter(&cloud, &FusionConfig::default());
        let expected: Vec<Vec3> = pts.iter().zip(&want).filter(|(_, &k)| k).map(|(p, _)| *p).collect();
        assert_eq!(kept.positions, expected);
        assert!(want.iter().any(|&k| k) && want.iter().any(|&k| !k));
    }
}

#[test]
fn radius_filter_on_a_grid() {
    let s = 0.005;
    let mut pts = Vec::new();
    for i in 0..10 {
        for j in 0..10 {
            for k in 0..10 {
                pts.push(Vec3::new(i as f64, j as f64, k as f64) * s);
            }
        }
    }
    let cloud = ColoredPointCloud::from_positions(pts.clone());
    let keep = radius_keep_mask(&cloud, 0.012, 6);
    let counts = brute_neighbor_counts(&pts, 0.012);
    for (i, p) in pts.iter().enumerate() {
        assert_eq!(keep[i], counts[i] >= 6, "point {i}");
        let interior = [p.x, p.y, p.z].iter().all(|&c| c > 0.0 && c < 9.0 * s);
        if interior {
            assert!(keep[i]);
        }
    }
    // corner offsets (in grid steps) with squared length <= 2.4^2:
    // 3 of (1,0,0), 3 of (1,1,0), (1,1,1), 3 of (2,0,0), 6 of (2,1,0)
    assert_eq!(counts[0], 16);
}

#[test]
fn radius_filter_edge_cases() {
    let far = ColoredPointCloud::from_positions(vec![Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0)]);
    assert!(radius_filter(&far, &FusionConfig::default()).is_empty());
    let cfg = FusionConfig {
        min_neighbors: 0,
        ..FusionConfig::default()
    };
    assert_eq!(radius_filter(&far, &cfg), far);
}

fn single_point_scene(rig: &ViewRig, p: Vec3) -> (FusedCloud, Vec<DepthMap>, Vec<f64>) {
    let fused = FusedCloud {
        cloud: ColoredPointCloud::from_positions(vec![p]),
        provenance: vec![PixelRef { view: 0, u: 0, v: 0 }],
    };
    let depths = rig.cameras.iter().map(|_| DepthMap::new(256, 256)).collect();
    let z = rig.cameras.iter().map(|c| c.project(&p).unwrap().2).collect();
    (fused, depths, z)
}

fn set_depth(depths: &mut [DepthMap], rig: &ViewRig, view: usize, p: &Vec3, value: f64) {
    let (u, v, _) = rig.cameras[view].pixel_of(p).unwrap();
    depths[view].data[v * 256 + u] = value;
}

#[test]
fn exactly_four_agreeing_views_survive_the_default_threshold() {
    let rig = ViewRig::default();
    let p = Vec3::new(0.05, -0.1, 0.2);
    let (fused, mut depths, z) = single_point_scene(&rig, p);
    for m in 1..=4 {
        set_depth(&mut depths, &rig, m, &p, z[m]);
    }
    // view 5 sees a surface well behind the point: the point floats in front
    set_depth(&mut depths, &rig, 5, &p, z[5] + 0.5);
    assert_eq!(count_votes(&fused, &depths, &rig, 0.01), vec![5]);
    let cfg = FusionConfig::default();
    assert_eq!(voting_filter(&fused, &depths, &rig, &cfg).unwrap().len(), 1);
    let strict = FusionConfig {
        vote_threshold: 6,
        ..cfg
    };
    assert!(voting_filter(&fused, &depths, &rig, &strict).unwrap().is_empty());
}

#[test]
fn occluded_points_still_vote() {
    let rig = ViewRig::default();
    let p = Vec3::new(0.0, 0.1, -0.1);
    let (fused, mut depths, z) = single_point_scene(&rig, p);
    // surface in front of the point in view 6, within tolerance in view 7
    set_depth(&mut depths, &rig, 6, &p, z[6] - 0.3);
    set_depth(&mut depths, &rig, 7, &p, z[7] + 0.009);
    assert_eq!(count_votes(&fused, &depths, &rig, 0.01), vec![3]);
}

#[test]
fn lone_point_gets_one_vote() {
    let rig = ViewRig::default();
    let (fused, depths, _) = single_point_scene(&rig, Vec3::zeros());
    assert_eq!(count_votes(&fused, &depths, &rig, 0.01), vec![1]);
    assert!(voting_filter(&fused, &depths, &rig, &FusionConfig::default())
        .unwrap()
        .is_empty());
}

#[test]
fn consistent_sphere_views_keep_every_point() {
    let rig = ViewRig::default();
    let depths: Vec<DepthMap> = rig.cameras.iter().map(|c| analytic_sphere_depth(c, 0.3)).collect();
    let fused = fuse_depths(&depths, &rig).unwrap();
    let votes = count_votes(&fused, &depths, &rig, 0.01);
    // Votes are lost only where another view's pixel center misses the
    // sphere (silhouette rim) or sees it at a grazing angle; never enough
    // of them to reach the threshold.
    assert!(votes.iter().all(|&v| v >= 5), "min votes {:?}", votes.iter().min());
    let full = votes.iter().filter(|&&v| v == 8).count();
    assert!(full * 2 > votes.len());
    let kept = voting_filter(&fused, &depths, &rig, &FusionConfig::default()).unwrap();
    assert_eq!(kept.len(), fused.len());
}

#[test]
fn fused_cardinality_is_valid_pixel_count() {
    let rig = ViewRig::default();
    let cloud = common::random_cloud(&mut rng(23), 5000, 0.5);
    let set = joint_project(&cloud, &rig, &ProjectionConfig::default());
    let fused = fuse_mtdcn(&set.views, &rig).unwrap();
    assert_eq!(fused.len(), set.valid_pixels());
    // every fused point is colored from its own pixel
    for (i, src) in fused.provenance.iter().enumerate() {
        let tex = &set.views[src.view].texture;
        assert_eq!(fused.cloud.color(i), Some(tex.rgb[src.v * 256 + src.u]));
    }
}

#[test]
fn mdcn_keeps_depth_only_geometry() {
    let rig = ViewRig::default();
    let mut r = rng(24);
    let cloud = common::random_cloud(&mut r, 4000, 0.5);
    let set = joint_project(&cloud, &rig, &ProjectionConfig::default());
    let depths: Vec<DepthMap> = set.views.iter().map(|v| v.depth.clone()).collect();
    let aligned: Vec<TextureImage> = set.views.iter().map(|v| v.texture.clone()).collect();

    let sd = fuse_depths(&depths, &rig).unwrap();
    let sdt = fuse_mdcn(&depths, &aligned, &rig).unwrap();
    assert_eq!(sdt, fuse_mtdcn(&set.views, &rig).unwrap());
    assert_eq!(sdt.cloud.positions, sd.cloud.positions);

    // knock out random texels: positions unchanged, every point still colored
    let mut holed = aligned.clone();
    for t in &mut holed {
        for m in t.mask.iter_mut() {
            if r.gen_bool(0.3) {
                *m = false;
            }
        }
    }
    let sdt = fuse_mdcn(&depths, &holed, &rig).unwrap();
    assert_eq!(sdt.cloud.positions, sd.cloud.positions);
    assert!((0..sdt.len()).all(|i| sdt.cloud.color(i).is_some()));
}

#[test]
fn back_project_of_empty_map_is_empty() {
    let rig = ViewRig::default();
    let out = back_project(&DepthMap::new(256, 256), &rig.cameras[3], 3);
    assert!(out.is_empty() && out.provenance.is_empty());
}
