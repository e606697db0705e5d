//! Idealized kinematic path tracking.
//!
//! The follower advances along a waypoint polyline at bounded speed and
//! bounded yaw rate. Heading turns toward the bearing of the current target
//! waypoint each tick; while the residual heading error exceeds a right
//! angle the forward speed is cut to a fraction, which forces yaw-then-move
//! behavior on sharp turns and makes heading-dependent target choices
//! meaningful.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::grid::wrap_angle;
use crate::planner::Path;
use crate::select::MavState;

/// Speed multiplier applied while the heading error exceeds pi/2.
pub const MISALIGNED_SPEED_FACTOR: f64 = 0.2;
pub const DEFAULT_ARRIVAL_TOL: f64 = 0.3;

/// Tracks one path at a time; progress resets when a new path is adopted.
#[derive(Debug, Clone, Copy)]
pub struct KinematicFollower {
    pub state: MavState,
    /// Simulation step in seconds.
    pub tick: f64,
    /// Arrival tolerance around the final waypoint, in meters.
    pub arrival_tol: f64,
    next_idx: usize,
}

impl KinematicFollower {
    pub fn new(state: MavState, tick: f64, arrival_tol: f64) -> Result<Self> {
        if !(state.v_max > 0.0 && state.v_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "v_max must be positive, got {}",
                state.v_max
            )));
        }
        if !(state.omega_max > 0.0 && state.omega_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "omega_max must be positive, got {}",
                state.omega_max
            )));
        }
        if !(tick > 0.0 && tick.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tick must be positive, got {tick}"
            )));
        }
        if !(arrival_tol > 0.0 && arrival_tol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "arrival_tol must be positive, got {arrival_tol}"
            )));
        }
        Ok(Self {
            state,
            tick,
            arrival_tol,
            next_idx: 0,
        })
    }

    /// Adopt a new path. The first waypoint is the vehicle's own voxel
    /// center, so tracking starts at the second one when there is one.
    pub fn start_path(&mut self, path: &Path) {
        self.next_idx = if path.waypoints.len() > 1 { 1 } else { 0 };
    }

    /// Index of the waypoint currently steered for.
    pub fn next_waypoint(&self) -> usize {
        self.next_idx
    }

    /// Advance one tick along the path. Returns true once the vehicle is
    /// within the arrival tolerance of the final waypoint.
    pub fn step(&mut self, path: &Path) -> bool {
        self.step_with_tick(path, self.tick)
    }

    fn step_with_tick(&mut self, path: &Path, tick: f64) -> bool {
        let wps = &path.waypoints;
        debug_assert!(!wps.is_empty(), "paths are never empty");
        if wps.is_empty() {
            return true;
        }
        if self.next_idx >= wps.len() {
            self.next_idx = wps.len() - 1;
        }
        let last = wps[wps.len() - 1];

        // Turn toward the current target's bearing. Purely vertical motion
        // has no defined bearing and leaves the heading alone.
        let to = wps[self.next_idx] - self.state.position;
        let mut residual = 0.0;
        if to.x.hypot(to.y) > 1e-9 {
            let desired = to.y.atan2(to.x);
            let err = wrap_angle(desired - self.state.yaw);
            let max_turn = self.state.omega_max * tick;
            let turn = err.clamp(-max_turn, max_turn);
            self.state.yaw = wrap_angle(self.state.yaw + turn);
            residual = wrap_angle(desired - self.state.yaw);
        }
        let factor = if residual.abs() > FRAC_PI_2 {
            MISALIGNED_SPEED_FACTOR
        } else {
            1.0
        };

        // Spend the tick's distance budget along the polyline, passing
        // through intermediate waypoints exactly.
        let mut budget = self.state.v_max * tick * factor;
        while budget > 0.0 {
            let target = wps[self.next_idx];
            let to = target - self.state.position;
            let dist = to.norm();
            if dist <= budget {
                self.state.position = target;
                budget -= dist;
                if self.next_idx + 1 < wps.len() {
                    self.next_idx += 1;
                } else {
                    break;
                }
            } else {
                self.state.position += to * (budget / dist);
                break;
            }
        }
        (self.state.position - last).norm() <= self.arrival_tol
    }
}

/// Free-function form of one follower tick: returns the updated state and
/// the arrival flag.
pub fn step_follower(
    follower: &mut KinematicFollower,
    path: &Path,
    tick: f64,
) -> (MavState, bool) {
    let arrived = follower.step_with_tick(path, tick);
    (follower.state, arrived)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::VoxelKey;
    use approx::assert_relative_eq;
    use nalgebra::Point3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn path_from_points(points: &[Point3<f64>]) -> Path {
        let mut cost = 0.0;
        for pair in points.windows(2) {
            cost += (pair[1] - pair[0]).norm();
        }
        Path {
            keys: points
                .iter()
                .map(|p| VoxelKey::new(p.x as i32, p.y as i32, p.z as i32))
                .collect(),
            waypoints: points.to_vec(),
            cost,
        }
    }

    fn follower(pos: Point3<f64>, yaw: f64, tick: f64) -> KinematicFollower {
        KinematicFollower::new(MavState::new(pos, yaw, 1.5, 1.0), tick, 0.3).unwrap()
    }

    #[test]
    fn aligned_straight_segment_arrives_in_one_tick() {
        let path = path_from_points(&[
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.5, 0.0, 0.0),
        ]);
        let mut f = follower(Point3::origin(), 0.0, 1.0);
        f.start_path(&path);
        assert!(f.step(&path));
        assert_relative_eq!(f.state.position.x, 1.5, epsilon = 1e-12);
    }

    #[test]
    fn right_angle_turn_keeps_yawing_for_sixteen_ticks() {
        // Target due +y while facing +x: a pi/2 heading error at 1 rad/s
        // and 0.1 s ticks needs 16 ticks to finish turning.
        let path = path_from_points(&[
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(0.0, 20.0, 0.0),
        ]);
        let mut f = follower(Point3::origin(), 0.0, 0.1);
        f.start_path(&path);
        let desired = FRAC_PI_2;
        let mut turning_ticks = 0;
        for _ in 0..40 {
            let before = f.state.yaw;
            f.step(&path);
            if (f.state.yaw - before).abs() > 1e-12 {
                turning_ticks += 1;
            }
            if (wrap_angle(desired - f.state.yaw)).abs() < 1e-12 {
                break;
            }
        }
        assert!(
            turning_ticks >= 16,
            "expected at least 16 ticks of yawing, got {turning_ticks}"
        );
    }

    #[test]
    fn large_heading_error_crawls_until_aligned() {
        // Target directly behind: the residual error stays above pi/2 for
        // several ticks, so early displacement is capped at the reduced
        // speed.
        let path = path_from_points(&[
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(-10.0, 0.0, 0.0),
        ]);
        let mut f = follower(Point3::origin(), 0.0, 0.1);
        f.start_path(&path);
        let before = f.state.position;
        f.step(&path);
        let moved = (f.state.position - before).norm();
        let reduced = 1.5 * 0.1 * MISALIGNED_SPEED_FACTOR;
        assert!(
            moved <= reduced + 1e-12,
            "misaligned tick moved {moved}, cap {reduced}"
        );
    }

    #[test]
    fn displacement_per_tick_never_exceeds_the_speed_limit() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..20 {
            let mut points = vec![Point3::new(0.0, 0.0, 0.0)];
            for _ in 0..rng.gen_range(2..10) {
                let prev = *points.last().unwrap();
                points.push(Point3::new(
                    prev.x + rng.gen_range(-1.0..1.0),
                    prev.y + rng.gen_range(-1.0..1.0),
                    prev.z + rng.gen_range(-0.5..0.5),
                ));
            }
            let path = path_from_points(&points);
            let mut f = follower(points[0], rng.gen_range(-PI..PI), 0.1);
            f.start_path(&path);
            for _ in 0..500 {
                let before = f.state.position;
                let arrived = f.step(&path);
                let moved = (f.state.position - before).norm();
                assert!(moved <= 1.5 * 0.1 + 1e-9, "tick moved {moved}");
                if arrived {
                    break;
                }
            }
        }
    }

    #[test]
    fn follower_stays_near_the_polyline() {
        // Random voxel-center polylines with a start offset inside the
        // first voxel: the vehicle must stay within one voxel size of the
        // path at every tick.
        let res = 0.5;
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for case in 0..15 {
            let mut key = VoxelKey::new(0, 0, 0);
            let mut points = vec![Point3::new(0.25, 0.25, 0.25)];
            for _ in 0..20 {
                key = key.offset(
                    rng.gen_range(-1..=1),
                    rng.gen_range(-1..=1),
                    rng.gen_range(-1..=1),
                );
                let c = Point3::new(
                    (key.ix as f64 + 0.5) * res,
                    (key.iy as f64 + 0.5) * res,
                    (key.iz as f64 + 0.5) * res,
                );
                if c != *points.last().unwrap() {
                    points.push(c);
                }
            }
            if points.len() < 2 {
                continue;
            }
            let path = path_from_points(&points);
            let start = Point3::new(
                points[0].x + rng.gen_range(-0.24..0.24),
                points[0].y + rng.gen_range(-0.24..0.24),
                points[0].z + rng.gen_range(-0.24..0.24),
            );
            let mut f = follower(start, rng.gen_range(-PI..PI), 0.1);
            f.start_path(&path);
            for tick in 0..2000 {
                let arrived = f.step(&path);
                let p = f.state.position;
                let d = points
                    .windows(2)
                    .map(|seg| {
                        let ab = seg[1] - seg[0];
                        let t = ((p - seg[0]).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
                        (p - (seg[0] + ab * t)).norm()
                    })
                    .fold(f64::INFINITY, f64::min);
                assert!(
                    d <= res + 1e-9,
                    "case {case}: tick {tick} drifted {d} from the path"
                );
                if arrived {
                    break;
                }
            }
        }
    }

    #[test]
    fn single_waypoint_paths_count_as_arrival_in_place() {
        let path = path_from_points(&[Point3::new(1.0, 1.0, 1.0)]);
        let mut f = follower(Point3::new(1.1, 1.0, 1.0), 0.0, 0.1);
        f.start_path(&path);
        assert!(f.step(&path));
    }

    #[test]
    fn limits_are_validated() {
        let bad = MavState::new(Point3::origin(), 0.0, 0.0, 1.0);
        assert!(KinematicFollower::new(bad, 0.1, 0.3).is_err());
        let ok = MavState::new(Point3::origin(), 0.0, 1.5, 1.0);
        assert!(KinematicFollower::new(ok, 0.0, 0.3).is_err());
        assert!(KinematicFollower::new(ok, 0.1, 0.0).is_err());
    }
}
