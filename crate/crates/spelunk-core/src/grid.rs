//! Voxel grid primitives: integer keys, world/grid conversions, Chebyshev
//! neighborhoods, and exact amortized ray traversal.

use nalgebra::Point3;

use crate::error::{Error, Result};

/// Integer voxel index. Ordering is lexicographic over `(ix, iy, iz)`, which
/// is the tie-break order used everywhere a deterministic choice is needed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VoxelKey {
    pub ix: i32,
    pub iy: i32,
    pub iz: i32,
}

impl VoxelKey {
    pub const fn new(ix: i32, iy: i32, iz: i32) -> Self {
        Self { ix, iy, iz }
    }

    pub fn offset(&self, dx: i32, dy: i32, dz: i32) -> Self {
        Self::new(self.ix + dx, self.iy + dy, self.iz + dz)
    }

    /// Chebyshev (L-infinity) distance in voxel units.
    pub fn chebyshev(&self, other: &VoxelKey) -> u32 {
        let dx = (self.ix - other.ix).abs();
        let dy = (self.iy - other.iy).abs();
        let dz = (self.iz - other.iz).abs();
        dx.max(dy).max(dz) as u32
    }

    fn axis(&self, axis: usize) -> i32 {
        match axis {
            0 => self.ix,
            1 => self.iy,
            _ => self.iz,
        }
    }

    fn axis_mut(&mut self, axis: usize) -> &mut i32 {
        match axis {
            0 => &mut self.ix,
            1 => &mut self.iy,
            _ => &mut self.iz,
        }
    }

    /// The 26 face-, edge- and corner-adjacent keys, in a fixed order.
    pub fn neighbors26(&self) -> [VoxelKey; 26] {
        let mut out = [*self; 26];
        let mut n = 0;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if dx == 0 && dy == 0 && dz == 0 {
                        continue;
                    }
                    out[n] = self.offset(dx, dy, dz);
                    n += 1;
                }
            }
        }
        out
    }

    /// The 6 face-adjacent keys, in a fixed order.
    pub fn neighbors6(&self) -> [VoxelKey; 6] {
        [
            self.offset(-1, 0, 0),
            self.offset(1, 0, 0),
            self.offset(0, -1, 0),
            self.offset(0, 1, 0),
            self.offset(0, 0, -1),
            self.offset(0, 0, 1),
        ]
    }
}

/// Mapping between continuous world coordinates and voxel keys.
///
/// A point `p` belongs to the voxel `floor((p - origin) / res)` per axis, so
/// a voxel covers the half-open cube `[origin + k*res, origin + (k+1)*res)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridGeometry {
    pub origin: Point3<f64>,
    pub res: f64,
}

impl GridGeometry {
    pub fn new(origin: Point3<f64>, res: f64) -> Result<Self> {
        if !(res > 0.0) || !res.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "voxel resolution must be positive and finite, got {res}"
            )));
        }
        Ok(Self { origin, res })
    }

    pub fn key_of(&self, p: &Point3<f64>) -> VoxelKey {
        VoxelKey::new(
            ((p.x - self.origin.x) / self.res).floor() as i32,
            ((p.y - self.origin.y) / self.res).floor() as i32,
            ((p.z - self.origin.z) / self.res).floor() as i32,
        )
    }

    pub fn center(&self, key: &VoxelKey) -> Point3<f64> {
        Point3::new(
            self.origin.x + (key.ix as f64 + 0.5) * self.res,
            self.origin.y + (key.iy as f64 + 0.5) * self.res,
            self.origin.z + (key.iz as f64 + 0.5) * self.res,
        )
    }
}

/// Axis-aligned bounding box, half-open: contains `p` iff
/// `min <= p < max` per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Point3<f64>,
    pub max: Point3<f64>,
}

impl Aabb {
    pub fn new(min: Point3<f64>, max: Point3<f64>) -> Result<Self> {
        if !(min.x < max.x && min.y < max.y && min.z < max.z) {
            return Err(Error::InvalidParameter(format!(
                "degenerate bounds: min {min:?} max {max:?}"
            )));
        }
        Ok(Self { min, max })
    }

    pub fn contains(&self, p: &Point3<f64>) -> bool {
        p.x >= self.min.x
            && p.x < self.max.x
            && p.y >= self.min.y
            && p.y < self.max.y
            && p.z >= self.min.z
            && p.z < self.max.z
    }

    pub fn extent(&self) -> [f64; 3] {
        [
            self.max.x - self.min.x,
            self.max.y - self.min.y,
            self.max.z - self.min.z,
        ]
    }
}

/// Normalize an angle into `[-pi, pi)`.
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::PI;
    let w = a - 2.0 * PI * ((a + PI) / (2.0 * PI)).floor();
    // Guard against rounding placing the result exactly at +pi.
    if w >= PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Walks the voxels pierced by the segment `a -> b`, one single-axis step at
/// a time, yielding each key together with the segment parameter
/// `t in [0, 1]` at which the segment enters that voxel.
pub struct RayWalk {
    cur: VoxelKey,
    end: VoxelKey,
    t_max: [f64; 3],
    t_delta: [f64; 3],
    step: [i32; 3],
    remaining: u32,
    started: bool,
}

impl RayWalk {
    pub fn new(a: &Point3<f64>, b: &Point3<f64>, geom: &GridGeometry) -> Result<Self> {
        if a == b {
            return Err(Error::ZeroLengthRay);
        }
        let start = geom.key_of(a);
        let end = geom.key_of(b);
        let mut t_max = [f64::INFINITY; 3];
        let mut t_delta = [f64::INFINITY; 3];
        let mut step = [0i32; 3];
        let dir = b - a;
        for axis in 0..3 {
            let d = dir[axis];
            let k = start.axis(axis) as f64;
            if d > 0.0 {
                let bound = geom.origin[axis] + (k + 1.0) * geom.res;
                step[axis] = 1;
                t_max[axis] = (bound - a[axis]) / d;
                t_delta[axis] = geom.res / d;
            } else if d < 0.0 {
                let bound = geom.origin[axis] + k * geom.res;
                step[axis] = -1;
                t_max[axis] = (bound - a[axis]) / d;
                t_delta[axis] = -geom.res / d;
            }
        }
        let remaining = ((start.ix - end.ix).abs()
            + (start.iy - end.iy).abs()
            + (start.iz - end.iz).abs()) as u32;
        Ok(Self {
            cur: start,
            end,
            t_max,
            t_delta,
            step,
            remaining,
            started: false,
        })
    }
}

impl Iterator for RayWalk {
    type Item = (VoxelKey, f64);

    fn next(&mut self) -> Option<Self::Item> {
        if !self.started {
            self.started = true;
            return Some((self.cur, 0.0));
        }
        if self.remaining == 0 || self.cur == self.end {
            return None;
        }
        // Step the axis with the nearest boundary crossing, restricted to
        // axes that still have to move toward the end voxel. The restriction
        // keeps the walk exact even when the endpoint sits on a boundary.
        let mut axis = usize::MAX;
        let mut best = f64::INFINITY;
        for ax in 0..3 {
            if self.step[ax] != 0
                && (self.end.axis(ax) - self.cur.axis(ax)) * self.step[ax] > 0
                && self.t_max[ax] < best
            {
                best = self.t_max[ax];
                axis = ax;
            }
        }
        if axis == usize::MAX {
            return None;
        }
        let t_entry = self.t_max[axis];
        *self.cur.axis_mut(axis) += self.step[axis];
        self.t_max[axis] += self.t_delta[axis];
        self.remaining -= 1;
        Some((self.cur, t_entry))
    }
}

/// All voxels pierced by the segment `a -> b`, in traversal order. The first
/// key contains `a`, the last contains `b`, and consecutive keys differ by a
/// single +/-1 step on exactly one axis.
pub fn ray_voxels(a: &Point3<f64>, b: &Point3<f64>, geom: &GridGeometry) -> Result<Vec<VoxelKey>> {
    let walk = RayWalk::new(a, b, geom)?;
    let keys: Vec<VoxelKey> = walk.map(|(k, _)| k).collect();
    debug_assert_eq!(*keys.last().unwrap(), geom.key_of(b));
    Ok(keys)
}
