//! Reconstruction metrics: Chamfer distance, point-to-point ICP and the
//! relative CD improvement ICP brings.
//!
//! Chamfer distance here is the sum of both directional means of squared
//! nearest-neighbor distances, multiplied by 100. Absolute numbers depend on
//! this convention (squared, summed, scaled).

use std::time::Instant;

use nalgebra::Matrix3;
use serde::Serialize;

use crate::camera::Vec3;
use crate::cloud::ColoredPointCloud;
use crate::error::{Error, Result};
use crate::spatial::KdTree;

/// Scale applied to reported Chamfer distances.
pub const CD_SCALE: f64 = 100.0;

fn mean_nn_sq(from: &[Vec3], to: &KdTree) -> f64 {
    let nn = to.nearest_all(from);
    nn.iter().map(|&(_, d)| d).sum::<f64>() / from.len() as f64
}

pub fn chamfer_distance(a: &ColoredPointCloud, b: &ColoredPointCloud) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let ta = KdTree::new(&a.positions);
    let tb = KdTree::new(&b.positions);
    let ab = mean_nn_sq(&a.positions, &tb);
    let ba = mean_nn_sq(&b.positions, &ta);
    Ok((ab + ba) * CD_SCALE)
}

/// Rigid transform `p -> rotation * p + translation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    pub rotation: Matrix3<f64>,
    pub translation: Vec3,
}

impl RigidTransform {
    pub fn identity() -> Self {
        RigidTransform {
            rotation: Matrix3::identity(),
            translation: Vec3::zeros(),
        }
    }

    #[inline]
    pub fn apply(&self, p: &Vec3) -> Vec3 {
        self.rotation * p + self.translation
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &RigidTransform) -> RigidTransform {
        RigidTransform {
            rotation: self.rotation * first.rotation,
            translation: self.rotation * first.translation + self.translation,
        }
    }

    pub fn apply_cloud(&self, cloud: &ColoredPointCloud) -> ColoredPointCloud {
        ColoredPointCloud {
            positions: cloud.positions.iter().map(|p| self.apply(p)).collect(),
            ..cloud.clone()
        }
    }
}

/// Least-squares rigid transform mapping `src[i]` onto `dst[i]` (Kabsch, no
/// scale). Fails when the cross-covariance has rank below 2.
pub fn best_rigid_transform(src: &[Vec3], dst: &[Vec3]) -> Result<RigidTransform> {
    debug_assert_eq!(src.len(), dst.len());
    let n = src.len() as f64;
    let cs = src.iter().sum::<Vec3>() / n;
    let cd = dst.iter().sum::<Vec3>() / n;
    let mut h = Matrix3::zeros();
    for (p, q) in src.iter().zip(dst) {
        h += (p - cs) * (q - cd).transpose();
    }
    let svd = h.svd(true, true);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    if !(s[0] > 0.0) || s[1] <= 1e-12 * s[0] {
        return Err(Error::DegenerateCovariance);
    }
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let v = vt.transpose();
    let d = (v * u.transpose()).determinant().signum();
    let rotation = v * Matrix3::from_diagonal(&Vec3::new(1.0, 1.0, d)) * u.transpose();
    Ok(RigidTransform {
        rotation,
        translation: cd - rotation * cs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IcpConfig {
    pub max_iters: usize,
    /// Stop once the relative RMSE change drops below this.
    pub tolerance: f64,
}

impl Default for IcpConfig {
    fn default() -> Self {
        IcpConfig {
            max_iters: 100,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct IcpResult {
    pub transform: RigidTransform,
    pub aligned: ColoredPointCloud,
    /// Mean squared correspondence distance at each iteration.
    pub objective: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Point-to-point ICP aligning `src` to `tgt`.
pub fn icp_align(src: &ColoredPointCloud, tgt: &ColoredPointCloud, cfg: &IcpConfig) -> Result<IcpResult> {
    for c in [src, tgt] {
        if c.len() < 3 {
            return Err(Error::TooFewPoints { needed: 3, found: c.len() });
        }
    }
    let tree = KdTree::new(&tgt.positions);
    let mut transform = RigidTransform::identity();
    let mut current = src.positions.clone();
    let mut objective = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut matched = vec![Vec3::zeros(); current.len()];

    while iterations < cfg.max_iters {
        let nn = tree.nearest_all(&current);
        let mse = nn.iter().map(|&(_, d)| d).sum::<f64>() / nn.len() as f64;
        if let Some(&prev) = objective.last() {
            let (prev_rmse, rmse) = (f64::sqrt(prev), mse.sqrt());
            objective.push(mse);
            if rmse == 0.0 || (prev_rmse - rmse).abs() / prev_rmse < cfg.tolerance {
                converged = true;
                break;
            }
        } else {
            objective.push(mse);
            if mse == 0.0 {
                converged = true;
                break;
            }
        }
        for (m, &(j, _)) in matched.iter_mut().zip(&nn) {
            *m = tgt.positions[j];
        }
        let step = best_rigid_transform(&current, &matched)?;
        for p in current.iter_mut() {
            *p = step.apply(p);
        }
        transform = step.compose(&transform);
        iterations += 1;
    }

    let aligned = ColoredPointCloud {
        positions: current,
        ..src.clone()
    };
    Ok(IcpResult {
        transform,
        aligned,
        objective,
        iterations,
        converged,
    })
}

/// Angle of a rotation matrix, in degrees.
pub fn rotation_angle_deg(r: &Matrix3<f64>) -> f64 {
    ((r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0).acos().to_degrees()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub cd: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cd_after_icp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_improvement: Option<f64>,
    pub pred_points: usize,
    pub gt_points: usize,
    pub runtime_s: f64,
}

pub fn eval_report(pred: &ColoredPointCloud, gt: &ColoredPointCloud, with_icp: bool) -> Result<EvalReport> {
    let start = Instant::now();
    let cd = chamfer_distance(pred, gt)?;
    let (cd_after_icp, relative_improvement) = if with_icp {
        let icp = icp_align(pred, gt, &IcpConfig::default())?;
        let after = chamfer_distance(&icp.aligned, gt)?;
        let rel = if cd > 0.0 { (cd - after) / cd } else { 0.0 };
        (Some(after), Some(rel))
    } else {
        (None, None)
    };
    Ok(EvalReport {
        cd,
        cd_after_icp,
        relative_improvement,
        pred_points: pred.len(),
        gt_points: gt.len(),
        runtime_s: start.elapsed().as_secs_f64(),
    })
}
