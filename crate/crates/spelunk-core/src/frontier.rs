//! Frontier bookkeeping: detection of free voxels bordering unexplored
//! space, a safety filter that rejects frontiers near mapped obstacles, and
//! deletion of frontiers the vehicle has flown past.
//!
//! The sets are maintained incrementally from scan digests; after every
//! update they equal what a from-scratch rescan of the map would produce.

use std::collections::BTreeSet;
use std::io::Write;

use nalgebra::Point3;

use crate::error::{Error, Result};
use crate::grid::VoxelKey;
use crate::map::{OccupancyMap, UpdateDigest, VoxelState};

pub const DEFAULT_MIN_UNKNOWN_NEIGHBORS: u32 = 4;
pub const DEFAULT_RISK_MARGIN: u32 = 2;
/// Default cleaning radius as a fraction of the sensor range.
pub const DEFAULT_CLEANING_FRACTION: f64 = 0.6;

/// Tuning for frontier detection and retirement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontierParams {
    /// Minimum number of Unknown voxels among the 26 neighbors.
    pub min_unknown: u32,
    /// Chebyshev radius (in voxels) that must be clear of Occupied voxels
    /// for a frontier to count as safe.
    pub risk_margin: u32,
    /// Frontiers closer than this to the vehicle are retired. Must be
    /// strictly smaller than `sensor_range`.
    pub cleaning_radius: f64,
    /// Sensor range; upper bound for `cleaning_radius`.
    pub sensor_range: f64,
}

impl FrontierParams {
    pub fn new(
        min_unknown: u32,
        risk_margin: u32,
        cleaning_radius: f64,
        sensor_range: f64,
    ) -> Result<Self> {
        if min_unknown == 0 || min_unknown > 26 {
            return Err(Error::InvalidParameter(format!(
                "min_unknown must be in 1..=26, got {min_unknown}"
            )));
        }
        if !(sensor_range > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sensor_range must be positive, got {sensor_range}"
            )));
        }
        if !(cleaning_radius > 0.0 && cleaning_radius < sensor_range) {
            return Err(Error::InvalidParameter(format!(
                "cleaning_radius must satisfy 0 < r < sensor_range, got {cleaning_radius} vs {sensor_range}"
            )));
        }
        Ok(Self {
            min_unknown,
            risk_margin,
            cleaning_radius,
            sensor_range,
        })
    }

    pub fn with_defaults(sensor_range: f64) -> Result<Self> {
        Self::new(
            DEFAULT_MIN_UNKNOWN_NEIGHBORS,
            DEFAULT_RISK_MARGIN,
            DEFAULT_CLEANING_FRACTION * sensor_range,
            sensor_range,
        )
    }
}

/// True iff `key` is Free, has no Occupied 26-neighbor, and at least
/// `min_unknown` Unknown 26-neighbors.
pub fn is_frontier(map: &OccupancyMap, key: &VoxelKey, min_unknown: u32) -> bool {
    if map.state_of(key) != VoxelState::Free {
        return false;
    }
    let mut unknown = 0u32;
    for n in key.neighbors26() {
        match map.state_of(&n) {
            VoxelState::Occupied => return false,
            VoxelState::Unknown => unknown += 1,
            VoxelState::Free => {}
        }
    }
    unknown >= min_unknown
}

/// True iff no Occupied voxel lies within Chebyshev distance `margin`.
pub fn is_clear_of_occupied(map: &OccupancyMap, key: &VoxelKey, margin: u32) -> bool {
    let m = margin as i32;
    for dx in -m..=m {
        for dy in -m..=m {
            for dz in -m..=m {
                if map.state_of(&key.offset(dx, dy, dz)) == VoxelState::Occupied {
                    return false;
                }
            }
        }
    }
    true
}

/// Incrementally maintained frontier sets.
///
/// `frontiers` holds every frontier voxel, `safe_frontiers` the subset with
/// no Occupied voxel within the risk margin, and `occupied` mirrors the
/// map's Occupied cells. Frontiers retired by `clean_seen` stay blocked
/// while they remain within the cleaning radius of the recorded vehicle
/// position and become eligible again once outside it.
#[derive(Debug, Clone)]
pub struct FrontierBook {
    params: FrontierParams,
    frontiers: BTreeSet<VoxelKey>,
    safe: BTreeSet<VoxelKey>,
    occupied: BTreeSet<VoxelKey>,
    seen: BTreeSet<VoxelKey>,
    last_pos: Point3<f64>,
    map_id: u64,
    revision: u64,
}

impl FrontierBook {
    /// Build the sets from the map's current contents and bind the book to
    /// the map's update lineage.
    pub fn new(params: FrontierParams, map: &OccupancyMap, vehicle_pos: Point3<f64>) -> Self {
        let mut book = Self {
            params,
            frontiers: BTreeSet::new(),
            safe: BTreeSet::new(),
            occupied: BTreeSet::new(),
            seen: BTreeSet::new(),
            last_pos: vehicle_pos,
            map_id: map.id(),
            revision: map.revision(),
        };
        for (key, _) in map.iter() {
            match map.state_of(key) {
                VoxelState::Occupied => {
                    book.occupied.insert(*key);
                }
                VoxelState::Free => {
                    if is_frontier(map, key, params.min_unknown) {
                        book.frontiers.insert(*key);
                        if is_clear_of_occupied(map, key, params.risk_margin) {
                            book.safe.insert(*key);
                        }
                    }
                }
                VoxelState::Unknown => {}
            }
        }
        book
    }

    pub fn params(&self) -> &FrontierParams {
        &self.params
    }

    pub fn frontiers(&self) -> &BTreeSet<VoxelKey> {
        &self.frontiers
    }

    pub fn safe_frontiers(&self) -> &BTreeSet<VoxelKey> {
        &self.safe
    }

    pub fn occupied_set(&self) -> &BTreeSet<VoxelKey> {
        &self.occupied
    }

    pub fn last_clean_position(&self) -> Point3<f64> {
        self.last_pos
    }

    /// Fold one scan digest into the sets. Only voxels whose classification
    /// could have changed are re-evaluated; the result equals a full rescan.
    pub fn regenerate(&mut self, map: &OccupancyMap, digest: &UpdateDigest) -> Result<()> {
        if digest.map_id != self.map_id || digest.revision != self.revision + 1 {
            return Err(Error::LineageMismatch {
                expected: self.revision + 1,
                got: if digest.map_id != self.map_id {
                    0
                } else {
                    digest.revision
                },
            });
        }
        self.revision = digest.revision;

        for key in &digest.touched {
            if map.state_of(key) == VoxelState::Occupied {
                self.occupied.insert(*key);
            } else {
                self.occupied.remove(key);
            }
        }

        // Frontier membership of a voxel depends on states within Chebyshev
        // distance max(1, margin); only classification changes can alter it.
        let radius = self.params.risk_margin.max(1) as i32;
        let mut candidates: BTreeSet<VoxelKey> = BTreeSet::new();
        for key in &digest.changed {
            for dx in -radius..=radius {
                for dy in -radius..=radius {
                    for dz in -radius..=radius {
                        candidates.insert(key.offset(dx, dy, dz));
                    }
                }
            }
        }
        // Retired frontiers that have fallen outside the cleaning radius get
        // one re-evaluation and are then released.
        let r = self.params.cleaning_radius;
        let released: Vec<VoxelKey> = self
            .seen
            .iter()
            .filter(|k| (map.center(k) - self.last_pos).norm() >= r)
            .copied()
            .collect();
        candidates.extend(released.iter().copied());

        for key in &candidates {
            let qualifies = is_frontier(map, key, self.params.min_unknown);
            let blocked =
                self.seen.contains(key) && (map.center(key) - self.last_pos).norm() < r;
            if qualifies && !blocked {
                self.frontiers.insert(*key);
                if is_clear_of_occupied(map, key, self.params.risk_margin) {
                    self.safe.insert(*key);
                } else {
                    self.safe.remove(key);
                }
            } else {
                self.frontiers.remove(key);
                self.safe.remove(key);
            }
        }
        for key in released {
            self.seen.remove(&key);
        }
        Ok(())
    }

    /// Retire every frontier strictly within the cleaning radius of
    /// `vehicle_pos` and remember the position for re-admission blocking.
    pub fn clean_seen(&mut self, map: &OccupancyMap, vehicle_pos: Point3<f64>) {
        self.last_pos = vehicle_pos;
        let r = self.params.cleaning_radius;
        let gone: Vec<VoxelKey> = self
            .frontiers
            .iter()
            .filter(|k| (map.center(k) - vehicle_pos).norm() < r)
            .copied()
            .collect();
        for key in gone {
            self.frontiers.remove(&key);
            self.safe.remove(&key);
            self.seen.insert(key);
        }
    }

    /// Serialize as sorted `F ix iy iz` lines followed by sorted
    /// `SF ix iy iz` lines.
    pub fn dump<W: Write>(&self, w: &mut W) -> Result<()> {
        for k in &self.frontiers {
            writeln!(w, "F {} {} {}", k.ix, k.iy, k.iz)?;
        }
        for k in &self.safe {
            writeln!(w, "SF {} {} {}", k.ix, k.iy, k.iz)?;
        }
        Ok(())
    }
}
