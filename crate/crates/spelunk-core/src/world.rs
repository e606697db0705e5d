//! Ground-truth voxel worlds: procedural tunnel carving and file I/O.
//!
//! A world is a bounded box of rock with free space carved out of it as a
//! union of capsules (cylinders with spherical caps) around tunnel axis
//! segments. A voxel is free when its center lies within a capsule radius
//! of some axis segment, inclusive. Everything outside the bounds counts as
//! occupied. Worlds are immutable once built.

use std::collections::{BTreeSet, HashSet};
use std::io::{BufRead, BufReader, Read, Write};

use nalgebra::{Point3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{Aabb, GridGeometry, VoxelKey};
use crate::planner::Connectivity;

/// Procedural world families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorldKind {
    /// A single straight tunnel.
    Corridor,
    /// A random tree of tunnels with varying radius and vertical undulation.
    BranchingCave,
    /// A closed ring of tunnels containing a cycle.
    Loop,
}

impl std::str::FromStr for WorldKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "corridor" => Ok(WorldKind::Corridor),
            "branching_cave" => Ok(WorldKind::BranchingCave),
            "loop" => Ok(WorldKind::Loop),
            other => Err(Error::InvalidParameter(format!(
                "unknown world kind '{other}' (expected corridor, branching_cave or loop)"
            ))),
        }
    }
}

/// Generation parameters. Extents are snapped up to whole voxels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldGenParams {
    pub truth_res: f64,
    pub extent: Vector3<f64>,
    /// Corridor only: tunnel length along x.
    pub corridor_length: f64,
    /// Corridor and loop: fixed tunnel radius.
    pub tunnel_radius: f64,
    /// Branching cave: radius range sampled per segment.
    pub radius_min: f64,
    pub radius_max: f64,
    /// Branching cave: number of side branches off the trunk.
    pub branches: u32,
}

impl Default for WorldGenParams {
    fn default() -> Self {
        Self {
            truth_res: 0.25,
            extent: Vector3::new(30.0, 30.0, 10.0),
            corridor_length: 20.0,
            tunnel_radius: 1.5,
            radius_min: 2.0,
            radius_max: 3.0,
            branches: 3,
        }
    }
}

impl WorldGenParams {
    fn validate(&self, kind: WorldKind) -> Result<()> {
        if !(self.truth_res > 0.0 && self.truth_res.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "truth_res must be positive, got {}",
                self.truth_res
            )));
        }
        for (name, v) in [
            ("extent_x", self.extent.x),
            ("extent_y", self.extent.y),
            ("extent_z", self.extent.z),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        let min_radius = 2.0 * self.truth_res;
        match kind {
            WorldKind::Corridor | WorldKind::Loop => {
                if self.tunnel_radius < min_radius {
                    return Err(Error::InvalidParameter(format!(
                        "tunnel_radius {} below the minimum of two voxels ({min_radius})",
                        self.tunnel_radius
                    )));
                }
                if kind == WorldKind::Corridor && !(self.corridor_length > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "corridor_length must be positive, got {}",
                        self.corridor_length
                    )));
                }
            }
            WorldKind::BranchingCave => {
                if self.radius_min < min_radius {
                    return Err(Error::InvalidParameter(format!(
                        "radius_min {} below the minimum of two voxels ({min_radius})",
                        self.radius_min
                    )));
                }
                if self.radius_max < self.radius_min {
                    return Err(Error::InvalidParameter(format!(
                        "radius_max {} below radius_min {}",
                        self.radius_max, self.radius_min
                    )));
                }
            }
        }
        Ok(())
    }
}

/// One carved tunnel piece: a capsule around the segment `a -> b`.
#[derive(Debug, Clone, Copy)]
struct Capsule {
    a: Point3<f64>,
    b: Point3<f64>,
    radius: f64,
}

impl Capsule {
    fn contains(&self, p: &Point3<f64>) -> bool {
        let ab = self.b - self.a;
        let len2 = ab.norm_squared();
        let t = if len2 == 0.0 {
            0.0
        } else {
            ((p - self.a).dot(&ab) / len2).clamp(0.0, 1.0)
        };
        let closest = self.a + ab * t;
        (p - closest).norm() <= self.radius
    }

    fn bounding_box(&self) -> (Point3<f64>, Point3<f64>) {
        let min = Point3::new(
            self.a.x.min(self.b.x) - self.radius,
            self.a.y.min(self.b.y) - self.radius,
            self.a.z.min(self.b.z) - self.radius,
        );
        let max = Point3::new(
            self.a.x.max(self.b.x) + self.radius,
            self.a.y.max(self.b.y) + self.radius,
            self.a.z.max(self.b.z) + self.radius,
        );
        (min, max)
    }
}

/// Immutable ground truth: bounded rock with carved free space.
#[derive(Debug, Clone)]
pub struct WorldModel {
    bounds: Aabb,
    truth_res: f64,
    free: HashSet<VoxelKey>,
    start: Point3<f64>,
}

impl WorldModel {
    fn from_free_set(
        bounds: Aabb,
        truth_res: f64,
        free: HashSet<VoxelKey>,
        start: Point3<f64>,
    ) -> Result<Self> {
        if free.is_empty() {
            return Err(Error::DegenerateWorld);
        }
        Ok(Self {
            bounds,
            truth_res,
            free,
            start,
        })
    }

    pub fn bounds(&self) -> &Aabb {
        &self.bounds
    }

    pub fn truth_res(&self) -> f64 {
        self.truth_res
    }

    /// Grid anchored at the world origin with the ground-truth resolution.
    pub fn geometry(&self) -> GridGeometry {
        GridGeometry::new(Point3::origin(), self.truth_res).expect("validated resolution")
    }

    /// Designated start point inside the free region.
    pub fn start(&self) -> Point3<f64> {
        self.start
    }

    pub fn set_start(&mut self, start: Point3<f64>) {
        self.start = start;
    }

    pub fn in_bounds_key(&self, key: &VoxelKey) -> bool {
        self.bounds.contains(&self.geometry().center(key))
    }

    pub fn is_free_key(&self, key: &VoxelKey) -> bool {
        self.free.contains(key)
    }

    /// Occupied means rock or out of bounds.
    pub fn is_occupied_key(&self, key: &VoxelKey) -> bool {
        !self.free.contains(key)
    }

    pub fn is_occupied_point(&self, p: &Point3<f64>) -> bool {
        self.is_occupied_key(&self.geometry().key_of(p))
    }

    pub fn free_voxels(&self) -> &HashSet<VoxelKey> {
        &self.free
    }

    pub fn free_count(&self) -> usize {
        self.free.len()
    }

    fn key_ranges(&self) -> [std::ops::Range<i32>; 3] {
        let g = self.geometry();
        let lo = g.key_of(&self.bounds.min);
        // The max corner itself is exclusive; step inside by half a voxel.
        let eps = self.truth_res * 0.5;
        let hi = g.key_of(&Point3::new(
            self.bounds.max.x - eps,
            self.bounds.max.y - eps,
            self.bounds.max.z - eps,
        ));
        [lo.ix..hi.ix + 1, lo.iy..hi.iy + 1, lo.iz..hi.iz + 1]
    }

    /// All in-bounds rock voxels in lexicographic order.
    pub fn occupied_sorted(&self) -> Vec<VoxelKey> {
        let [rx, ry, rz] = self.key_ranges();
        let mut out = Vec::new();
        for ix in rx {
            for iy in ry.clone() {
                for iz in rz.clone() {
                    let k = VoxelKey::new(ix, iy, iz);
                    if !self.free.contains(&k) {
                        out.push(k);
                    }
                }
            }
        }
        out
    }

    /// Free voxels reachable from `from` through free space.
    pub fn reachable_free_from(
        &self,
        from: &VoxelKey,
        connectivity: Connectivity,
    ) -> BTreeSet<VoxelKey> {
        let mut seen = BTreeSet::new();
        if !self.free.contains(from) {
            return seen;
        }
        let mut queue = std::collections::VecDeque::new();
        seen.insert(*from);
        queue.push_back(*from);
        while let Some(k) = queue.pop_front() {
            let push = |n: VoxelKey, seen: &mut BTreeSet<VoxelKey>, q: &mut std::collections::VecDeque<VoxelKey>| {
                if self.free.contains(&n) && seen.insert(n) {
                    q.push_back(n);
                }
            };
            match connectivity {
                Connectivity::Six => {
                    for n in k.neighbors6() {
                        push(n, &mut seen, &mut queue);
                    }
                }
                Connectivity::TwentySix => {
                    for n in k.neighbors26() {
                        push(n, &mut seen, &mut queue);
                    }
                }
            }
        }
        seen
    }

    /// Text dump: header with resolution and bounds, then the in-bounds
    /// occupied voxels in lexicographic order.
    pub fn save<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "voxworld v1 {} {} {} {} {} {} {}",
            self.truth_res,
            self.bounds.min.x,
            self.bounds.min.y,
            self.bounds.min.z,
            self.bounds.max.x,
            self.bounds.max.y,
            self.bounds.max.z
        )?;
        for k in self.occupied_sorted() {
            writeln!(w, "{} {} {}", k.ix, k.iy, k.iz)?;
        }
        Ok(())
    }

    /// Inverse of `save`. The start point defaults to the center of the
    /// lexicographically smallest free voxel; override it via `set_start`.
    pub fn load<R: Read>(r: R) -> Result<WorldModel> {
        let path = "<voxworld>".to_string();
        let fmt = |line: usize, msg: &str| Error::FileFormat {
            path: path.clone(),
            line,
            msg: msg.to_string(),
        };
        let mut lines = BufReader::new(r).lines();
        let header = lines
            .next()
            .ok_or_else(|| fmt(1, "empty file"))?
            .map_err(Error::Io)?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 9 || fields[0] != "voxworld" || fields[1] != "v1" {
            return Err(fmt(1, "expected 'voxworld v1 <res> <min xyz> <max xyz>'"));
        }
        let nums: Vec<f64> = fields[2..]
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| fmt(1, "malformed header number"))?;
        let truth_res = nums[0];
        if !(truth_res > 0.0 && truth_res.is_finite()) {
            return Err(fmt(1, "resolution must be positive"));
        }
        let bounds = Aabb::new(
            Point3::new(nums[1], nums[2], nums[3]),
            Point3::new(nums[4], nums[5], nums[6]),
        )?;

        let mut occupied = HashSet::new();
        for (idx, line) in lines.enumerate() {
            let line_no = idx + 2;
            let line = line.map_err(Error::Io)?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            let parts: Vec<&str> = t.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(fmt(line_no, "expected '<ix> <iy> <iz>'"));
            }
            let idxs: Vec<i32> = parts
                .iter()
                .map(|s| s.parse::<i32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| fmt(line_no, "malformed voxel index"))?;
            occupied.insert(VoxelKey::new(idxs[0], idxs[1], idxs[2]));
        }

        let shell = WorldModel {
            bounds,
            truth_res,
            free: HashSet::new(),
            start: Point3::origin(),
        };
        let [rx, ry, rz] = shell.key_ranges();
        for k in &occupied {
            if !(rx.contains(&k.ix) && ry.contains(&k.iy) && rz.contains(&k.iz)) {
                return Err(fmt(2, "occupied voxel outside the declared bounds"));
            }
        }
        let mut free = HashSet::new();
        let mut start = None;
        for ix in rx {
            for iy in ry.clone() {
                for iz in rz.clone() {
                    let k = VoxelKey::new(ix, iy, iz);
                    if !occupied.contains(&k) {
                        if start.is_none() {
                            start = Some(shell.geometry().center(&k));
                        }
                        free.insert(k);
                    }
                }
            }
        }
        let start = start.ok_or(Error::DegenerateWorld)?;
        WorldModel::from_free_set(bounds, truth_res, free, start)
    }
}

fn snap_up(v: f64, res: f64) -> f64 {
    (v / res).ceil() * res
}

fn carve(bounds: &Aabb, geom: &GridGeometry, capsules: &[Capsule]) -> HashSet<VoxelKey> {
    let mut free = HashSet::new();
    for c in capsules {
        let (lo, hi) = c.bounding_box();
        let k_lo = geom.key_of(&lo);
        let k_hi = geom.key_of(&hi);
        for ix in k_lo.ix..=k_hi.ix {
            for iy in k_lo.iy..=k_hi.iy {
                for iz in k_lo.iz..=k_hi.iz {
                    let k = VoxelKey::new(ix, iy, iz);
                    if free.contains(&k) {
                        continue;
                    }
                    let center = geom.center(&k);
                    if bounds.contains(&center) && c.contains(&center) {
                        free.insert(k);
                    }
                }
            }
        }
    }
    free
}

/// Deterministic procedural world generation. The same `(kind, seed,
/// params)` triple always produces an identical world.
pub fn generate_world(kind: WorldKind, seed: u64, params: &WorldGenParams) -> Result<WorldModel> {
    params.validate(kind)?;
    let res = params.truth_res;
    let extent = Vector3::new(
        snap_up(params.extent.x, res),
        snap_up(params.extent.y, res),
        snap_up(params.extent.z, res),
    );
    let bounds = Aabb::new(Point3::origin(), Point3::from(extent))?;
    let geom = GridGeometry::new(Point3::origin(), res)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let (capsules, start) = match kind {
        WorldKind::Corridor => {
            let r = params.tunnel_radius;
            let needed = params.corridor_length + 2.0 * (r + res);
            if needed > extent.x {
                return Err(Error::InvalidParameter(format!(
                    "corridor needs {needed} m along x but the extent is {}",
                    extent.x
                )));
            }
            let cy = extent.y / 2.0;
            let cz = extent.z / 2.0;
            let x0 = r + res;
            let a = Point3::new(x0, cy, cz);
            let b = Point3::new(x0 + params.corridor_length, cy, cz);
            (vec![Capsule { a, b, radius: r }], a)
        }
        WorldKind::Loop => {
            let r = params.tunnel_radius;
            let cx = extent.x / 2.0;
            let cy = extent.y / 2.0;
            let cz = extent.z / 2.0;
            let ring = extent.x.min(extent.y) / 2.0 - r - res;
            if ring < 2.0 * r {
                return Err(Error::InvalidParameter(format!(
                    "loop ring radius {ring} too small for tunnel radius {r}"
                )));
            }
            let n = 24;
            let mut capsules = Vec::with_capacity(n);
            let node = |i: usize| {
                let ang = 2.0 * std::f64::consts::PI * (i % n) as f64 / n as f64;
                Point3::new(cx + ring * ang.cos(), cy + ring * ang.sin(), cz)
            };
            for i in 0..n {
                capsules.push(Capsule {
                    a: node(i),
                    b: node(i + 1),
                    radius: r,
                });
            }
            (capsules, node(0))
        }
        WorldKind::BranchingCave => {
            let inset = params.radius_max + res;
            let lo = Point3::new(inset, inset, inset);
            let hi = Point3::new(extent.x - inset, extent.y - inset, extent.z - inset);
            if lo.x >= hi.x || lo.y >= hi.y || lo.z >= hi.z {
                return Err(Error::InvalidParameter(
                    "extent too small for the branch radius".to_string(),
                ));
            }
            let clamp = |p: Point3<f64>| {
                Point3::new(
                    p.x.clamp(lo.x, hi.x),
                    p.y.clamp(lo.y, hi.y),
                    p.z.clamp(lo.z, hi.z),
                )
            };
            let start = Point3::new(lo.x, extent.y / 2.0, extent.z / 2.0);
            let mut capsules = Vec::new();
            let mut nodes = vec![start];
            // Trunk marches roughly along +x with azimuth and elevation
            // drift; branches sprout from random trunk nodes.
            let grow = |from: Point3<f64>,
                            mut azimuth: f64,
                            segments: u32,
                            rng: &mut ChaCha8Rng,
                            capsules: &mut Vec<Capsule>,
                            nodes: &mut Vec<Point3<f64>>| {
                let mut cur = from;
                for _ in 0..segments {
                    azimuth += rng.gen_range(-0.45..0.45);
                    let elevation: f64 = rng.gen_range(-0.18..0.18);
                    let len = rng.gen_range(4.0..7.0);
                    let radius = rng.gen_range(params.radius_min..=params.radius_max);
                    let dir = Vector3::new(
                        elevation.cos() * azimuth.cos(),
                        elevation.cos() * azimuth.sin(),
                        elevation.sin(),
                    );
                    let next = clamp(cur + dir * len);
                    capsules.push(Capsule {
                        a: cur,
                        b: next,
                        radius,
                    });
                    nodes.push(next);
                    cur = next;
                }
            };
            let trunk_segments = rng.gen_range(5..=8);
            grow(start, 0.0, trunk_segments, &mut rng, &mut capsules, &mut nodes);
            for _ in 0..params.branches {
                let at = nodes[rng.gen_range(0..nodes.len())];
                let azimuth = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
                let segments = rng.gen_range(2..=4);
                grow(at, azimuth, segments, &mut rng, &mut capsules, &mut nodes);
            }
            (capsules, start)
        }
    };

    let free = carve(&bounds, &geom, &capsules);
    let world = WorldModel::from_free_set(bounds, res, free, start)?;
    if !world.is_free_key(&geom.key_of(&start)) {
        return Err(Error::DegenerateWorld);
    }
    Ok(world)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corridor_params() -> WorldGenParams {
        WorldGenParams {
            truth_res: 0.25,
            extent: Vector3::new(30.0, 12.0, 8.0),
            corridor_length: 20.0,
            tunnel_radius: 1.5,
            ..WorldGenParams::default()
        }
    }

    #[test]
    fn corridor_free_count_matches_rasterization_recount() {
        let params = corridor_params();
        let world = generate_world(WorldKind::Corridor, 7, &params).unwrap();
        // Independent recount: walk the whole box and apply the carve rule
        // (center within the capsule radius of the axis segment) directly.
        let res = params.truth_res;
        let x0 = params.tunnel_radius + res;
        let a = Point3::new(x0, 6.0, 4.0);
        let b = Point3::new(x0 + params.corridor_length, 6.0, 4.0);
        let radius = params.tunnel_radius;
        let mut count = 0usize;
        let g = world.geometry();
        let hi = g.key_of(&Point3::new(30.0 - 0.125, 12.0 - 0.125, 8.0 - 0.125));
        for ix in 0..=hi.ix {
            for iy in 0..=hi.iy {
                for iz in 0..=hi.iz {
                    let c = g.center(&VoxelKey::new(ix, iy, iz));
                    let ab = b - a;
                    let t = ((c - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
                    if (c - (a + ab * t)).norm() <= radius {
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(world.free_count(), count);
        assert!(world.is_free_key(&g.key_of(&world.start())));
    }

    #[test]
    fn same_seed_reproduces_the_same_cave() {
        let params = WorldGenParams::default();
        let w1 = generate_world(WorldKind::BranchingCave, 99, &params).unwrap();
        let w2 = generate_world(WorldKind::BranchingCave, 99, &params).unwrap();
        assert_eq!(w1.free_voxels(), w2.free_voxels());
        assert_eq!(w1.start(), w2.start());
        let w3 = generate_world(WorldKind::BranchingCave, 100, &params).unwrap();
        assert_ne!(w1.free_voxels(), w3.free_voxels());
    }

    #[test]
    fn cave_free_region_is_connected_from_start() {
        for seed in [1u64, 2, 3] {
            let params = WorldGenParams {
                extent: Vector3::new(40.0, 40.0, 10.0),
                ..WorldGenParams::default()
            };
            let world = generate_world(WorldKind::BranchingCave, seed, &params).unwrap();
            let start_key = world.geometry().key_of(&world.start());
            let reachable = world.reachable_free_from(&start_key, Connectivity::TwentySix);
            assert_eq!(
                reachable.len(),
                world.free_count(),
                "seed {seed}: disconnected free region"
            );
        }
    }

    #[test]
    fn loop_world_contains_a_cycle() {
        let params = WorldGenParams {
            truth_res: 0.25,
            extent: Vector3::new(24.0, 24.0, 8.0),
            tunnel_radius: 1.5,
            ..WorldGenParams::default()
        };
        let world = generate_world(WorldKind::Loop, 5, &params).unwrap();
        let g = world.geometry();
        // Cut the ring at its 90 degree point by blocking a ball there; the
        // start must still reach the 180 degree point the other way around.
        let ring = 24.0 / 2.0 - 1.5 - 0.25;
        let center = Point3::new(12.0, 12.0, 4.0);
        let at = |ang: f64| {
            Point3::new(
                center.x + ring * ang.cos(),
                center.y + ring * ang.sin(),
                center.z,
            )
        };
        let cut = at(std::f64::consts::FRAC_PI_2);
        let blocked: HashSet<VoxelKey> = world
            .free_voxels()
            .iter()
            .filter(|k| (g.center(k) - cut).norm() <= 2.0 * 1.5)
            .copied()
            .collect();
        let mut pruned = world.clone();
        pruned.free.retain(|k| !blocked.contains(k));
        let start_key = g.key_of(&world.start());
        let far_key = g.key_of(&at(std::f64::consts::PI));
        let reachable = pruned.reachable_free_from(&start_key, Connectivity::TwentySix);
        assert!(
            reachable.contains(&far_key),
            "cutting one arc must leave the other arc intact"
        );
    }

    #[test]
    fn save_load_round_trips_bit_exactly() {
        let world = generate_world(
            WorldKind::Corridor,
            3,
            &WorldGenParams {
                extent: Vector3::new(12.0, 8.0, 6.0),
                corridor_length: 6.0,
                ..corridor_params()
            },
        )
        .unwrap();
        let mut buf = Vec::new();
        world.save(&mut buf).unwrap();
        let loaded = WorldModel::load(buf.as_slice()).unwrap();
        assert_eq!(loaded.free_voxels(), world.free_voxels());
        assert_eq!(loaded.truth_res(), world.truth_res());
        assert_eq!(loaded.bounds(), world.bounds());
        let mut buf2 = Vec::new();
        loaded.save(&mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn loader_rejects_malformed_input() {
        assert!(matches!(
            WorldModel::load("nonsense".as_bytes()),
            Err(Error::FileFormat { .. })
        ));
        // Occupied voxel outside the declared bounds.
        let text = "voxworld v1 0.5 0 0 0 2 2 2\n9 9 9\n";
        assert!(matches!(
            WorldModel::load(text.as_bytes()),
            Err(Error::FileFormat { .. })
        ));
        // Fully occupied box: degenerate.
        let mut text = String::from("voxworld v1 1 0 0 0 2 2 2\n");
        for ix in 0..2 {
            for iy in 0..2 {
                for iz in 0..2 {
                    text.push_str(&format!("{ix} {iy} {iz}\n"));
                }
            }
        }
        assert!(matches!(
            WorldModel::load(text.as_bytes()),
            Err(Error::DegenerateWorld)
        ));
    }

    #[test]
    fn outside_the_bounds_counts_as_occupied() {
        let world = generate_world(WorldKind::Corridor, 1, &corridor_params()).unwrap();
        assert!(world.is_occupied_point(&Point3::new(-1.0, 0.0, 0.0)));
        assert!(world.is_occupied_point(&Point3::new(1e6, 0.0, 0.0)));
        assert!(!world.is_occupied_point(&world.start()));
    }

    #[test]
    fn generation_parameters_are_validated() {
        let bad_radius = WorldGenParams {
            tunnel_radius: 0.3,
            ..corridor_params()
        };
        assert!(generate_world(WorldKind::Corridor, 0, &bad_radius).is_err());
        let bad_len = WorldGenParams {
            corridor_length: 100.0,
            ..corridor_params()
        };
        assert!(generate_world(WorldKind::Corridor, 0, &bad_len).is_err());
        let bad_range = WorldGenParams {
            radius_min: 2.0,
            radius_max: 1.0,
            ..WorldGenParams::default()
        };
        assert!(generate_world(WorldKind::BranchingCave, 0, &bad_range).is_err());
    }
}
