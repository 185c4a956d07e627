mod common;

use common::{oracle_project, random_cloud, rng};
use pcfuse::camera::{Vec3, ViewRig};
use pcfuse::cloud::ColoredPointCloud;
use pcfuse::projection::{joint_project, project_view, ProjectionConfig};

fn assert_matches_oracle(cloud: &ColoredPointCloud, rig: &ViewRig, upsample: usize) {
    let cfg = ProjectionConfig::new(upsample).unwrap();
    for (n, cam) in rig.cameras.iter().enumerate() {
        let got = project_view(cloud, cam, &cfg);
        let want = oracle_project(cloud, cam, upsample);
        for px in 0..want.depth.len() {
            assert_eq!(
                got.map.depth.data[px].to_bits(),
                want.depth[px].to_bits(),
                "view {n} U={upsample} pixel {px}"
            );
            assert_eq!(got.index.data[px], want.index[px], "view {n} U={upsample} pixel {px}");
            let color = usize::try_from(want.index[px]).ok().map(|i| cloud.colors.as_ref().unwrap()[i]);
            assert_eq!(got.map.texture.mask[px], color.is_some());
            if let Some(c) = color {
                assert_eq!(got.map.texture.rgb[px], c);
            }
        }
    }
}

#[test]
fn scatter_min_equals_materialized_buffer() {
    let rig = ViewRig::default();
    let mut r = rng(11);
    for _ in 0..4 {
        let cloud = random_cloud(&mut r, 1000, 0.5);
        for up in [1, 5, 50] {
            assert_matches_oracle(&cloud, &rig, up);
        }
    }
}

#[test]
fn dense_cluster_collisions_match_oracle() {
    // a tight cluster forces many points into each pixel and cell
    let rig = ViewRig::default();
    let mut r = rng(12);
    let cloud = random_cloud(&mut r, 2000, 0.02);
    for up in [1, 2, 5, 50] {
        assert_matches_oracle(&cloud, &rig, up);
    }
}

#[test]
fn winner_is_nearest_point_in_its_footprint() {
    let rig = ViewRig::default();
    let mut r = rng(13);
    let cloud = random_cloud(&mut r, 3000, 0.5);
    let cfg = ProjectionConfig::default();
    for cam in &rig.cameras {
        let got = project_view(&cloud, cam, &cfg);
        let w = cam.intrinsics.width;
        let mut nearest = vec![f64::INFINITY; w * cam.intrinsics.height];
        for p in &cloud.positions {
            if let Some((u, v, z)) = cam.pixel_of(p) {
                let px = v * w + u;
                nearest[px] = nearest[px].min(z);
            }
        }
        for (px, &best) in nearest.iter().enumerate() {
            match usize::try_from(got.index.data[px]) {
                Ok(i) => {
                    let (u, v, z) = cam.pixel_of(&cloud.positions[i]).unwrap();
                    assert_eq!(v * w + u, px);
                    assert_eq!(z, best);
                    assert_eq!(got.map.depth.data[px], z);
                }
                Err(_) => {
                    assert!(best.is_infinite());
                    assert_eq!(got.map.depth.data[px], 0.0);
                }
            }
        }
    }
}

#[test]
fn sphere_winners_face_the_camera() {
    // dense enough (~25 points per pixel) that the front surface has no holes
    let radius = 0.15;
    let mut r = rng(16);
    let positions: Vec<Vec3> = (0..200_000)
        .map(|_| common::point_in_ball(&mut r, 1.0).normalize() * radius)
        .collect();
    let cloud = ColoredPointCloud::from_positions(positions);
    let rig = ViewRig::default();
    let set = joint_project(&cloud, &rig, &ProjectionConfig::default());
    let indices = set.indices.as_ref().unwrap();
    for (cam, index) in rig.cameras.iter().zip(indices) {
        let eye = cam.pose.center();
        let mut checked = 0;
        for (px, i) in index.data.iter().enumerate() {
            let Ok(i) = usize::try_from(*i) else { continue };
            // skip the silhouette rim, where a pixel straddles both sides
            let (u, v) = (px % index.width, px / index.width);
            let ray = (cam.unproject_pixel(u, v, 1.0) - eye).normalize();
            let miss = (eye - ray * eye.dot(&ray)).norm();
            if miss > 0.9 * radius {
                continue;
            }
            let p = cloud.positions[i];
            assert!(p.normalize().dot(&(p - eye).normalize()) < 0.0, "back-facing winner {i}");
            checked += 1;
        }
        assert!(checked > 500);
    }
}

#[test]
fn joint_project_equals_per_view_calls() {
    let rig = ViewRig::default();
    let cloud = random_cloud(&mut rng(14), 1000, 0.5);
    let cfg = ProjectionConfig::default();
    let set = joint_project(&cloud, &rig, &cfg);
    assert_eq!(set.len(), 8);
    for (n, cam) in rig.cameras.iter().enumerate() {
        let single = project_view(&cloud, cam, &cfg);
        assert_eq!(set.views[n], single.map);
        assert_eq!(set.indices.as_ref().unwrap()[n], single.index);
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let rig = ViewRig::default();
    let cloud = random_cloud(&mut rng(15), 20_000, 0.5);
    let cfg = ProjectionConfig::default();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| joint_project(&cloud, &rig, &cfg))
    };
    let one = run(1);
    for threads in [2, 4, 8] {
        assert_eq!(run(threads), one);
    }
}

#[test]
fn three_points_in_one_cell_keep_the_nearest() {
    let rig = ViewRig::default();
    let cam = &rig.cameras[0];
    let fwd = cam.pose.forward();
    let eye = cam.pose.center();
    let positions: Vec<Vec3> = [1.6, 1.8, 2.0].iter().map(|&d| eye + fwd * d).collect();
    let cloud = ColoredPointCloud::with_colors(positions, vec![[1, 2, 3], [4, 5, 6], [7, 8, 9]]).unwrap();
    let got = project_view(&cloud, cam, &ProjectionConfig::default());
    assert_eq!(got.map.depth.valid_count(), 1);
    let px = got.map.depth.data.iter().position(|&d| d > 0.0).unwrap();
    assert!((got.map.depth.data[px] - 1.6).abs() < 1e-12);
    assert_eq!(got.map.texture.rgb[px], [1, 2, 3]);
    assert_eq!(got.index.data[px], 0);
}

#[test]
fn out_of_frustum_points_are_counted() {
    let rig = ViewRig::default();
    let cam = &rig.cameras[0];
    let behind = cam.pose.center() - cam.pose.forward();
    let cloud = ColoredPointCloud::from_positions(vec![Vec3::zeros(), behind, Vec3::new(50.0, 0.0, 0.0)]);
    let got = project_view(&cloud, cam, &ProjectionConfig::default());
    assert_eq!(got.skipped, 2);
    assert_eq!(got.map.depth.valid_count(), 1);
}
