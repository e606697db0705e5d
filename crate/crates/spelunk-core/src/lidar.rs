//! Simulated 3D lidar: rays marched against the ground-truth world.
//!
//! Rays are cast on a fixed azimuth/elevation grid in the vehicle body
//! frame. Each ray stops at the boundary of the first occupied ground-truth
//! voxel (a hit, with the endpoint nudged just inside the rock so it lands
//! in the occupied voxel) or at the maximum range (a miss). With the default
//! zero noise the output is a pure function of world, spec and pose.

use std::f64::consts::PI;

use nalgebra::Vector3;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::RayWalk;
use crate::map::{ScanReturn, SensorScan};
use crate::select::MavState;
use crate::world::WorldModel;

pub const DEFAULT_RANGE: f64 = 10.0;
pub const DEFAULT_H_RAYS: u32 = 360;
pub const DEFAULT_V_RAYS: u32 = 16;
pub const DEFAULT_V_FOV: f64 = PI / 6.0;
pub const DEFAULT_RATE: f64 = 10.0;

/// Sensor geometry and timing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LidarSpec {
    /// Maximum range in meters.
    pub range: f64,
    /// Horizontal ray count over the full 360 degrees.
    pub h_rays: u32,
    /// Vertical ray count spanning the vertical field of view.
    pub v_rays: u32,
    /// Full vertical field of view, centered on the horizontal plane.
    pub v_fov: f64,
    /// Scans per second; the mission loop runs at this rate.
    pub rate: f64,
    /// Gaussian range noise standard deviation (m); 0 disables noise.
    pub noise_sigma: f64,
}

impl Default for LidarSpec {
    fn default() -> Self {
        Self {
            range: DEFAULT_RANGE,
            h_rays: DEFAULT_H_RAYS,
            v_rays: DEFAULT_V_RAYS,
            v_fov: DEFAULT_V_FOV,
            rate: DEFAULT_RATE,
            noise_sigma: 0.0,
        }
    }
}

impl LidarSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.range > 0.0 && self.range.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lidar range must be positive, got {}",
                self.range
            )));
        }
        if self.h_rays == 0 || self.v_rays == 0 {
            return Err(Error::InvalidParameter(
                "lidar ray counts must be at least 1".to_string(),
            ));
        }
        if !(self.v_fov > 0.0 && self.v_fov <= PI) {
            return Err(Error::InvalidParameter(format!(
                "lidar v_fov must be in (0, pi], got {}",
                self.v_fov
            )));
        }
        if !(self.rate > 0.0 && self.rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lidar rate must be positive, got {}",
                self.rate
            )));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lidar noise_sigma must be non-negative, got {}",
                self.noise_sigma
            )));
        }
        Ok(())
    }

    /// Elevation angles, low to high, spanning the vertical FOV inclusive.
    fn elevations(&self) -> Vec<f64> {
        if self.v_rays == 1 {
            return vec![0.0];
        }
        let half = self.v_fov / 2.0;
        (0..self.v_rays)
            .map(|j| -half + self.v_fov * j as f64 / (self.v_rays - 1) as f64)
            .collect()
    }
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; u1 is kept away from zero so the log is finite.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// One full scan from the given pose. Rays are ordered by elevation, then
/// azimuth; azimuths are in the body frame, so the pattern rotates with the
/// vehicle heading. The RNG is consulted only when `noise_sigma > 0`.
pub fn simulate_scan(
    world: &WorldModel,
    spec: &LidarSpec,
    pose: &MavState,
    rng: &mut ChaCha8Rng,
) -> Result<SensorScan> {
    spec.validate()?;
    let origin = pose.position;
    if world.is_occupied_point(&origin) {
        return Err(Error::PoseInOccupiedSpace(origin.x, origin.y, origin.z));
    }
    let geom = world.geometry();
    let nudge = world.truth_res() * 1e-3;
    let mut returns = Vec::with_capacity((spec.h_rays * spec.v_rays) as usize);
    for elevation in spec.elevations() {
        for i in 0..spec.h_rays {
            let azimuth = pose.yaw + 2.0 * PI * i as f64 / spec.h_rays as f64;
            let dir = Vector3::new(
                elevation.cos() * azimuth.cos(),
                elevation.cos() * azimuth.sin(),
                elevation.sin(),
            );
            let end = origin + dir * spec.range;
            let mut hit_t = None;
            for (key, t) in RayWalk::new(&origin, &end, &geom)? {
                if world.is_occupied_key(&key) {
                    hit_t = Some(t);
                    break;
                }
            }
            match hit_t {
                Some(t) => {
                    let mut dist = t.min(1.0) * spec.range + nudge;
                    if spec.noise_sigma > 0.0 {
                        dist = (dist + spec.noise_sigma * standard_normal(rng))
                            .clamp(nudge, spec.range);
                    }
                    returns.push(ScanReturn {
                        point: origin + dir * dist,
                        hit: true,
                    });
                }
                None => returns.push(ScanReturn {
                    point: end,
                    hit: false,
                }),
            }
        }
    }
    Ok(SensorScan { origin, returns })
}
