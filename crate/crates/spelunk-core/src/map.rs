//! Probabilistic voxel occupancy map with per-scan Bayesian updates.
//!
//! Each stored voxel holds an occupancy probability. Voxels never touched by
//! a measurement are Unknown implicitly; stored values are classified against
//! the prior threshold: below it Free, above it Occupied, exactly equal
//! Unknown.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{BufRead, Write};
use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::Point3;

use crate::error::{Error, Result};
use crate::grid::{ray_voxels, GridGeometry, RayWalk, VoxelKey};

pub const DEFAULT_P_HIT: f64 = 0.7;
pub const DEFAULT_P_MISS: f64 = 0.4;
pub const DEFAULT_PRIOR: f64 = 0.5;
pub const DEFAULT_CLAMP_LO: f64 = 0.12;
pub const DEFAULT_CLAMP_HI: f64 = 0.97;

static MAP_IDS: AtomicU64 = AtomicU64::new(1);

/// Ternary voxel classification derived from the stored probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VoxelState {
    Free,
    Occupied,
    Unknown,
}

/// Inverse sensor model parameters and probability clamps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorModel {
    /// Measurement probability applied to the endpoint voxel of a hit ray.
    pub p_hit: f64,
    /// Measurement probability applied to voxels a ray passed through.
    pub p_miss: f64,
    /// Prior occupancy probability; doubles as the Unknown threshold.
    pub prior: f64,
    pub clamp_lo: f64,
    pub clamp_hi: f64,
}

impl Default for SensorModel {
    fn default() -> Self {
        Self {
            p_hit: DEFAULT_P_HIT,
            p_miss: DEFAULT_P_MISS,
            prior: DEFAULT_PRIOR,
            clamp_lo: DEFAULT_CLAMP_LO,
            clamp_hi: DEFAULT_CLAMP_HI,
        }
    }
}

impl SensorModel {
    pub fn validate(&self) -> Result<()> {
        for v in [self.p_hit, self.p_miss, self.prior, self.clamp_lo, self.clamp_hi] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::ProbabilityOutOfRange(v));
            }
        }
        if self.clamp_lo > self.clamp_hi {
            return Err(Error::InvalidParameter(format!(
                "clamp_lo {} exceeds clamp_hi {}",
                self.clamp_lo, self.clamp_hi
            )));
        }
        Ok(())
    }
}

/// One posterior update of an occupancy probability given a measurement
/// probability and the prior, in odds form. Returns the unclamped posterior.
pub fn update_occupancy(prev: f64, meas: f64, prior: f64) -> Result<f64> {
    for v in [prev, meas, prior] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::ProbabilityOutOfRange(v));
        }
    }
    let odds = ((1.0 - meas) / meas) * ((1.0 - prev) / prev) * (prior / (1.0 - prior));
    Ok(1.0 / (1.0 + odds))
}

/// A single range return: the measured endpoint and whether it was a hit
/// (surface return) or a max-range miss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanReturn {
    pub point: Point3<f64>,
    pub hit: bool,
}

/// One sensor sweep taken from a fixed origin.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorScan {
    pub origin: Point3<f64>,
    pub returns: Vec<ScanReturn>,
}

/// Summary of one `integrate_scan` call: every voxel whose probability was
/// updated (`touched`) and the subset whose classification changed
/// (`changed`). Carries the map lineage so stale digests are rejected by
/// consumers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpdateDigest {
    pub map_id: u64,
    pub revision: u64,
    pub touched: BTreeSet<VoxelKey>,
    pub changed: BTreeSet<VoxelKey>,
}

/// Sparse probabilistic occupancy grid.
///
/// Mutation happens only through `integrate_scan`; between scans a shared
/// reference serves as an immutable snapshot for frontier maintenance,
/// selection and planning.
#[derive(Debug, Clone)]
pub struct OccupancyMap {
    geom: GridGeometry,
    model: SensorModel,
    cells: HashMap<VoxelKey, f64>,
    free_count: usize,
    occ_count: usize,
    id: u64,
    revision: u64,
}

impl OccupancyMap {
    pub fn new(geom: GridGeometry, model: SensorModel) -> Result<Self> {
        model.validate()?;
        Ok(Self {
            geom,
            model,
            cells: HashMap::new(),
            free_count: 0,
            occ_count: 0,
            id: MAP_IDS.fetch_add(1, Ordering::Relaxed),
            revision: 0,
        })
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geom
    }

    pub fn model(&self) -> &SensorModel {
        &self.model
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn key_of(&self, p: &Point3<f64>) -> VoxelKey {
        self.geom.key_of(p)
    }

    pub fn center(&self, key: &VoxelKey) -> Point3<f64> {
        self.geom.center(key)
    }

    fn classify(&self, p: f64) -> VoxelState {
        if p < self.model.prior {
            VoxelState::Free
        } else if p > self.model.prior {
            VoxelState::Occupied
        } else {
            VoxelState::Unknown
        }
    }

    pub fn state_of(&self, key: &VoxelKey) -> VoxelState {
        match self.cells.get(key) {
            Some(&p) => self.classify(p),
            None => VoxelState::Unknown,
        }
    }

    /// Stored probability, if the voxel has ever been measured.
    pub fn probability(&self, key: &VoxelKey) -> Option<f64> {
        self.cells.get(key).copied()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Iterate stored cells in arbitrary order. Callers that need a
    /// deterministic order must sort; see `cells_sorted`.
    pub fn iter(&self) -> impl Iterator<Item = (&VoxelKey, &f64)> {
        self.cells.iter()
    }

    pub fn cells_sorted(&self) -> Vec<(VoxelKey, f64)> {
        let mut v: Vec<(VoxelKey, f64)> = self.cells.iter().map(|(k, p)| (*k, *p)).collect();
        v.sort_unstable_by_key(|(k, _)| *k);
        v
    }

    /// Volume of all classified (Free or Occupied) voxels in cubic meters.
    pub fn explored_volume(&self) -> f64 {
        (self.free_count + self.occ_count) as f64 * self.geom.res.powi(3)
    }

    pub fn free_count(&self) -> usize {
        self.free_count
    }

    pub fn occupied_count(&self) -> usize {
        self.occ_count
    }

    /// Voxels pierced by the segment `a -> b` at this map's resolution.
    pub fn traverse_ray(&self, a: &Point3<f64>, b: &Point3<f64>) -> Result<Vec<VoxelKey>> {
        ray_voxels(a, b, &self.geom)
    }

    /// Fold a sensor sweep into the map. Every voxel strictly between the
    /// origin and an endpoint receives a miss update; the endpoint voxel
    /// receives a hit update iff the return was a hit. Each voxel is updated
    /// at most once per scan and a hit wins over a miss.
    pub fn integrate_scan(&mut self, scan: &SensorScan) -> UpdateDigest {
        let mut meas: BTreeMap<VoxelKey, bool> = BTreeMap::new();
        for ret in &scan.returns {
            let walk = match RayWalk::new(&scan.origin, &ret.point, &self.geom) {
                Ok(w) => w,
                Err(_) => continue,
            };
            let mut prev: Option<VoxelKey> = None;
            for (key, _) in walk {
                if let Some(p) = prev {
                    meas.entry(p).or_insert(false);
                }
                prev = Some(key);
            }
            if let Some(endpoint) = prev {
                let e = meas.entry(endpoint).or_insert(false);
                *e |= ret.hit;
            }
        }

        let mut touched = BTreeSet::new();
        let mut changed = BTreeSet::new();
        for (key, hit) in meas {
            let meas_p = if hit { self.model.p_hit } else { self.model.p_miss };
            let prev_p = self.cells.get(&key).copied();
            let prev_state = match prev_p {
                Some(p) => self.classify(p),
                None => VoxelState::Unknown,
            };
            let raw = update_occupancy(prev_p.unwrap_or(self.model.prior), meas_p, self.model.prior)
                .expect("validated sensor model probabilities");
            let next = raw.clamp(self.model.clamp_lo, self.model.clamp_hi);
            self.cells.insert(key, next);
            let next_state = self.classify(next);
            touched.insert(key);
            if next_state != prev_state {
                self.adjust_counts(prev_state, next_state);
                changed.insert(key);
            }
        }
        self.revision += 1;
        UpdateDigest {
            map_id: self.id,
            revision: self.revision,
            touched,
            changed,
        }
    }

    fn adjust_counts(&mut self, from: VoxelState, to: VoxelState) {
        match from {
            VoxelState::Free => self.free_count -= 1,
            VoxelState::Occupied => self.occ_count -= 1,
            VoxelState::Unknown => {}
        }
        match to {
            VoxelState::Free => self.free_count += 1,
            VoxelState::Occupied => self.occ_count += 1,
            VoxelState::Unknown => {}
        }
    }

    /// Occupied voxel whose center minimizes the Euclidean distance to `p`,
    /// searched within `radius` meters. Ties are broken by lexicographic key.
    pub fn nearest_occupied(&self, p: &Point3<f64>, radius: f64) -> Option<(VoxelKey, f64)> {
        if !(radius > 0.0) {
            return None;
        }
        let res = self.geom.res;
        let pk = self.geom.key_of(p);
        let max_shell = (radius / res).ceil() as i32 + 1;
        let mut best: Option<(f64, VoxelKey)> = None;
        for s in 0..=max_shell {
            // Any center in shell s is at least (s - 0.5) * res away from p.
            let lower = if s == 0 { 0.0 } else { (s as f64 - 0.5) * res };
            if lower > radius {
                break;
            }
            if let Some((bd, _)) = best {
                if lower > bd {
                    break;
                }
            }
            for dx in -s..=s {
                for dy in -s..=s {
                    for dz in -s..=s {
                        if dx.abs().max(dy.abs()).max(dz.abs()) != s {
                            continue;
                        }
                        let key = pk.offset(dx, dy, dz);
                        if self.state_of(&key) != VoxelState::Occupied {
                            continue;
                        }
                        let d = (self.geom.center(&key) - p).norm();
                        if d > radius {
                            continue;
                        }
                        let better = match best {
                            None => true,
                            Some((bd, bk)) => d < bd || (d == bd && key < bk),
                        };
                        if better {
                            best = Some((d, key));
                        }
                    }
                }
            }
        }
        best.map(|(d, k)| (k, d))
    }

    /// Serialize as `voxmap v1` text: a header with resolution and origin,
    /// then one line per stored voxel sorted lexicographically by key.
    pub fn dump<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(
            w,
            "voxmap v1 {} {} {} {}",
            self.geom.res, self.geom.origin.x, self.geom.origin.y, self.geom.origin.z
        )?;
        for (key, p) in self.cells_sorted() {
            writeln!(w, "{} {} {} {:.9}", key.ix, key.iy, key.iz, p)?;
        }
        Ok(())
    }

    /// Parse a `voxmap v1` document produced by `dump`. The sensor model is
    /// not serialized and must be supplied by the caller.
    pub fn load<R: BufRead>(r: R, model: SensorModel) -> Result<Self> {
        let fmt = |line: usize, msg: String| Error::FileFormat {
            path: "voxmap".into(),
            line,
            msg,
        };
        let mut lines = r.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| fmt(1, "empty document".into()))?;
        let header = header?;
        let tok: Vec<&str> = header.split_whitespace().collect();
        if tok.len() != 6 || tok[0] != "voxmap" || tok[1] != "v1" {
            return Err(fmt(1, format!("bad header `{header}`")));
        }
        let res: f64 = tok[2]
            .parse()
            .map_err(|e| fmt(1, format!("bad resolution: {e}")))?;
        let ox: f64 = tok[3].parse().map_err(|e| fmt(1, format!("{e}")))?;
        let oy: f64 = tok[4].parse().map_err(|e| fmt(1, format!("{e}")))?;
        let oz: f64 = tok[5].parse().map_err(|e| fmt(1, format!("{e}")))?;
        let geom = GridGeometry::new(Point3::new(ox, oy, oz), res)?;
        let mut map = Self::new(geom, model)?;
        for (idx, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let tok: Vec<&str> = line.split_whitespace().collect();
            if tok.len() != 4 {
                return Err(fmt(idx + 1, format!("expected 4 fields, got {}", tok.len())));
            }
            let key = VoxelKey::new(
                tok[0].parse().map_err(|e| fmt(idx + 1, format!("{e}")))?,
                tok[1].parse().map_err(|e| fmt(idx + 1, format!("{e}")))?,
                tok[2].parse().map_err(|e| fmt(idx + 1, format!("{e}")))?,
            );
            let p: f64 = tok[3].parse().map_err(|e| fmt(idx + 1, format!("{e}")))?;
            if !(p > 0.0 && p < 1.0) {
                return Err(fmt(idx + 1, format!("probability {p} out of range")));
            }
            let state = map.classify(p);
            map.cells.insert(key, p);
            map.adjust_counts(VoxelState::Unknown, state);
        }
        Ok(map)
    }
}
