//! Frontier classification and greedy target selection.
//!
//! Safe frontiers are split into a local set (inside the heading and
//! elevation windows around the vehicle's current attitude) and a global
//! set. Local candidates are ranked by obstacle proximity and heading
//! change, global candidates by heading change, height difference and
//! distance. Local beats global; with neither, the vehicle is done.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use nalgebra::Point3;

use crate::error::{Error, Result};
use crate::grid::{wrap_angle, GridGeometry, VoxelKey};
use crate::map::OccupancyMap;

pub const DEFAULT_W_OBSTACLE: f64 = 1.0;
pub const DEFAULT_W_HEADING: f64 = 1.0;
pub const DEFAULT_W_HEIGHT: f64 = 2.0;
pub const DEFAULT_W_DISTANCE: f64 = 0.5;
pub const DEFAULT_H_FOV: f64 = 2.0 * PI / 3.0;
pub const DEFAULT_V_FOV: f64 = PI / 6.0;

/// Vehicle pose and kinematic limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MavState {
    pub position: Point3<f64>,
    /// Heading in radians, kept in `[-pi, pi)`.
    pub yaw: f64,
    pub v_max: f64,
    pub omega_max: f64,
}

impl MavState {
    pub fn new(position: Point3<f64>, yaw: f64, v_max: f64, omega_max: f64) -> Self {
        Self {
            position,
            yaw: wrap_angle(yaw),
            v_max,
            omega_max,
        }
    }
}

/// Cost weights and angular windows for selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionConfig {
    pub w_obstacle: f64,
    pub w_heading: f64,
    pub w_height: f64,
    pub w_distance: f64,
    /// Horizontal window; a frontier is local only if `|alpha| <= h_fov/2`.
    pub h_fov: f64,
    /// Vertical window; compared against `gamma` (see `gamma_full_angle`).
    pub v_fov: f64,
    /// Search radius for the nearest obstacle in the local cost.
    pub sensor_range: f64,
    /// When true the elevation test uses `gamma <= v_fov` instead of the
    /// half-angle `gamma <= v_fov/2`.
    pub gamma_full_angle: bool,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            w_obstacle: DEFAULT_W_OBSTACLE,
            w_heading: DEFAULT_W_HEADING,
            w_height: DEFAULT_W_HEIGHT,
            w_distance: DEFAULT_W_DISTANCE,
            h_fov: DEFAULT_H_FOV,
            v_fov: DEFAULT_V_FOV,
            sensor_range: 10.0,
            gamma_full_angle: false,
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.w_obstacle > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "w_obstacle must be positive, got {}",
                self.w_obstacle
            )));
        }
        for (name, v) in [
            ("w_heading", self.w_heading),
            ("w_height", self.w_height),
            ("w_distance", self.w_distance),
        ] {
            if !(v >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        if !(self.h_fov > 0.0 && self.h_fov <= 2.0 * PI) {
            return Err(Error::InvalidParameter(format!(
                "h_fov must be in (0, 2pi], got {}",
                self.h_fov
            )));
        }
        if !(self.v_fov > 0.0 && self.v_fov <= PI) {
            return Err(Error::InvalidParameter(format!(
                "v_fov must be in (0, pi], got {}",
                self.v_fov
            )));
        }
        if !(self.sensor_range > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sensor_range must be positive, got {}",
                self.sensor_range
            )));
        }
        Ok(())
    }

    fn gamma_limit(&self) -> f64 {
        if self.gamma_full_angle {
            self.v_fov
        } else {
            self.v_fov / 2.0
        }
    }
}

/// Heading offset `alpha in [-pi, pi)` and elevation magnitude `gamma >= 0`
/// of a frontier position relative to the vehicle pose.
pub fn relative_angles(f: &Point3<f64>, s: &MavState) -> Result<(f64, f64)> {
    let d = f - s.position;
    if d.x == 0.0 && d.y == 0.0 && d.z == 0.0 {
        return Err(Error::DegenerateBearing);
    }
    let alpha = wrap_angle(d.y.atan2(d.x) - s.yaw);
    let gamma = d.z.abs().atan2(d.x.hypot(d.y));
    Ok((alpha, gamma))
}

/// Literal chord form of the vertical angle, `acos(h / (2 * dz))`. Returns
/// `None` when `dz` is zero or the argument leaves the arccos domain.
pub fn footprint_vertical_angle(h: f64, dz: f64) -> Option<f64> {
    if dz == 0.0 {
        return None;
    }
    let arg = h / (2.0 * dz);
    if !(-1.0..=1.0).contains(&arg) {
        return None;
    }
    Some(arg.acos())
}

/// Split safe frontiers into local and global sets relative to the pose.
pub fn classify(
    safe: &BTreeSet<VoxelKey>,
    s: &MavState,
    geom: &GridGeometry,
    cfg: &SelectionConfig,
) -> Result<(BTreeSet<VoxelKey>, BTreeSet<VoxelKey>)> {
    let mut local = BTreeSet::new();
    let mut global = BTreeSet::new();
    let g_lim = cfg.gamma_limit();
    for key in safe {
        let (alpha, gamma) = relative_angles(&geom.center(key), s)?;
        if alpha.abs() <= cfg.h_fov / 2.0 && gamma <= g_lim {
            local.insert(*key);
        } else {
            global.insert(*key);
        }
    }
    Ok((local, global))
}

/// Cost of a local frontier: inverse weighted clearance to the nearest
/// mapped obstacle plus the weighted heading change. With no obstacle within
/// the sensor range the clearance term is zero.
pub fn local_cost(
    key: &VoxelKey,
    s: &MavState,
    map: &OccupancyMap,
    cfg: &SelectionConfig,
) -> Result<f64> {
    let center = map.center(key);
    let (alpha, _) = relative_angles(&center, s)?;
    let avoid = match map.nearest_occupied(&center, cfg.sensor_range) {
        Some((_, d)) => 1.0 / (cfg.w_obstacle * d),
        None => 0.0,
    };
    Ok(avoid + cfg.w_heading * alpha.abs())
}

/// Cost of a global frontier: weighted heading change, height difference and
/// straight-line distance.
pub fn global_cost(
    key: &VoxelKey,
    s: &MavState,
    geom: &GridGeometry,
    cfg: &SelectionConfig,
) -> Result<f64> {
    let center = geom.center(key);
    let (alpha, _) = relative_angles(&center, s)?;
    let d = center - s.position;
    Ok(cfg.w_heading * alpha.abs() + cfg.w_height * d.z.abs() + cfg.w_distance * d.norm())
}

/// Outcome of one selection pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Selection {
    Local { key: VoxelKey, cost: f64 },
    Global { key: VoxelKey, cost: f64 },
    Exhausted,
}

fn argmin<F: FnMut(&VoxelKey) -> Result<f64>>(
    set: &BTreeSet<VoxelKey>,
    blacklist: &BTreeSet<VoxelKey>,
    mut cost: F,
) -> Result<Option<(VoxelKey, f64)>> {
    let mut best: Option<(VoxelKey, f64)> = None;
    for key in set {
        if blacklist.contains(key) {
            continue;
        }
        let c = cost(key)?;
        // Strict comparison keeps the lexicographically smallest key on
        // ties, since the set iterates in key order.
        if best.is_none_or(|(_, bc)| c < bc) {
            best = Some((*key, c));
        }
    }
    Ok(best)
}

/// Pick the next target frontier: the cheapest local candidate if any
/// exists, otherwise the cheapest global candidate, otherwise `Exhausted`.
/// Blacklisted keys are ignored entirely.
pub fn select_frontier(
    safe: &BTreeSet<VoxelKey>,
    s: &MavState,
    map: &OccupancyMap,
    cfg: &SelectionConfig,
    blacklist: &BTreeSet<VoxelKey>,
) -> Result<Selection> {
    let (local, global) = classify(safe, s, map.geometry(), cfg)?;
    if let Some((key, cost)) = argmin(&local, blacklist, |k| local_cost(k, s, map, cfg))? {
        return Ok(Selection::Local { key, cost });
    }
    if let Some((key, cost)) =
        argmin(&global, blacklist, |k| global_cost(k, s, map.geometry(), cfg))?
    {
        return Ok(Selection::Global { key, cost });
    }
    Ok(Selection::Exhausted)
}
