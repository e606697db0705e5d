//! Grid path planning over the occupancy map with obstacle inflation.
//!
//! Plans run an optimal forward search (A* with an admissible Euclidean
//! heuristic) over the traversable voxel graph: Free voxels with no Occupied
//! voxel within a Chebyshev margin. Unknown space is untraversable except
//! for the goal voxel itself, which sits on the unknown boundary when it is
//! a frontier. Replanning is triggered externally via `replan_needed`.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};

use nalgebra::Point3;

use crate::error::{Error, Result};
use crate::frontier::is_clear_of_occupied;
use crate::grid::VoxelKey;
use crate::map::{OccupancyMap, UpdateDigest, VoxelState};
use crate::select::MavState;

/// Neighborhood used for planning steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Six,
    TwentySix,
}

/// One planning query over a map snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanRequest {
    /// Vehicle position; its voxel must be traversable.
    pub start: Point3<f64>,
    pub goal: VoxelKey,
    /// Required Chebyshev clearance, in voxels, from Occupied space.
    pub margin: u32,
    pub connectivity: Connectivity,
}

/// A voxel-center polyline with its total Euclidean length.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub keys: Vec<VoxelKey>,
    pub waypoints: Vec<Point3<f64>>,
    pub cost: f64,
}

impl Path {
    pub fn goal(&self) -> VoxelKey {
        *self.keys.last().expect("paths are never empty")
    }
}

/// Traversability of one voxel. The goal voxel is exempt from the Free
/// requirement (it may be Unknown) but still needs the clearance margin.
fn traversable(map: &OccupancyMap, key: &VoxelKey, margin: u32, goal: &VoxelKey) -> bool {
    if key != goal && map.state_of(key) != VoxelState::Free {
        return false;
    }
    is_clear_of_occupied(map, key, margin)
}

struct TraversabilityCache<'a> {
    map: &'a OccupancyMap,
    margin: u32,
    goal: VoxelKey,
    known: HashMap<VoxelKey, bool>,
}

impl<'a> TraversabilityCache<'a> {
    fn new(map: &'a OccupancyMap, margin: u32, goal: VoxelKey) -> Self {
        Self {
            map,
            margin,
            goal,
            known: HashMap::new(),
        }
    }

    fn check(&mut self, key: &VoxelKey) -> bool {
        let (map, margin, goal) = (self.map, self.margin, self.goal);
        *self
            .known
            .entry(*key)
            .or_insert_with(|| traversable(map, key, margin, &goal))
    }
}

#[derive(Clone, Copy)]
struct HeapEntry {
    f: f64,
    g: f64,
    key: VoxelKey,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.f == other.f && self.key == other.key
    }
}
impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Ties on the cost estimate resolve by lexicographic key so the
        // expansion order, and with it the returned path, is deterministic.
        self.f
            .total_cmp(&other.f)
            .then_with(|| self.key.cmp(&other.key))
    }
}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const STEP_LENGTHS: [f64; 4] = [
    0.0,
    1.0,
    std::f64::consts::SQRT_2,
    1.7320508075688772,
];

fn for_each_neighbor<F: FnMut(VoxelKey, f64)>(
    key: &VoxelKey,
    connectivity: Connectivity,
    res: f64,
    mut visit: F,
) {
    match connectivity {
        Connectivity::Six => {
            for n in key.neighbors6() {
                visit(n, res);
            }
        }
        Connectivity::TwentySix => {
            for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        if dx == 0 && dy == 0 && dz == 0 {
                            continue;
                        }
                        let axes = (dx != 0) as usize + (dy != 0) as usize + (dz != 0) as usize;
                        visit(key.offset(dx, dy, dz), res * STEP_LENGTHS[axes]);
                    }
                }
            }
        }
    }
}

fn heuristic(a: &VoxelKey, b: &VoxelKey, res: f64) -> f64 {
    let dx = (a.ix - b.ix) as f64;
    let dy = (a.iy - b.iy) as f64;
    let dz = (a.iz - b.iz) as f64;
    res * (dx * dx + dy * dy + dz * dz).sqrt()
}

fn assemble(map: &OccupancyMap, keys: Vec<VoxelKey>, cost: f64) -> Path {
    let waypoints = keys.iter().map(|k| map.center(k)).collect();
    Path {
        keys,
        waypoints,
        cost,
    }
}

/// Shortest traversable path from the request's start voxel to its goal.
/// Returns `Ok(None)` when the goal is unreachable; an untraversable start
/// voxel is an error instead, since it violates the request's precondition.
pub fn plan(map: &OccupancyMap, req: &PlanRequest) -> Result<Option<Path>> {
    let start = map.key_of(&req.start);
    if !traversable(map, &start, req.margin, &start) || map.state_of(&start) != VoxelState::Free {
        return Err(Error::StartUntraversable);
    }
    if start == req.goal {
        return Ok(Some(assemble(map, vec![start], 0.0)));
    }
    let mut cache = TraversabilityCache::new(map, req.margin, req.goal);
    if !cache.check(&req.goal) {
        return Ok(None);
    }
    let res = map.geometry().res;

    let mut g_score: HashMap<VoxelKey, f64> = HashMap::new();
    let mut came_from: HashMap<VoxelKey, VoxelKey> = HashMap::new();
    let mut heap = BinaryHeap::new();
    g_score.insert(start, 0.0);
    heap.push(Reverse(HeapEntry {
        f: heuristic(&start, &req.goal, res),
        g: 0.0,
        key: start,
    }));

    while let Some(Reverse(entry)) = heap.pop() {
        if entry.g > *g_score.get(&entry.key).unwrap_or(&f64::INFINITY) {
            continue;
        }
        if entry.key == req.goal {
            let mut keys = vec![entry.key];
            let mut cur = entry.key;
            while let Some(prev) = came_from.get(&cur) {
                keys.push(*prev);
                cur = *prev;
            }
            keys.reverse();
            return Ok(Some(assemble(map, keys, entry.g)));
        }
        for_each_neighbor(&entry.key, req.connectivity, res, |n, step| {
            if !cache.check(&n) {
                return;
            }
            let g = entry.g + step;
            if g < *g_score.get(&n).unwrap_or(&f64::INFINITY) {
                g_score.insert(n, g);
                came_from.insert(n, entry.key);
                heap.push(Reverse(HeapEntry {
                    f: g + heuristic(&n, &req.goal, res),
                    g,
                    key: n,
                }));
            }
        });
    }
    Ok(None)
}

/// Path back to the recorded home position, used once exploration is
/// exhausted. Same contract as `plan` with the goal set to home's voxel.
pub fn compute_homing_path(
    map: &OccupancyMap,
    s: &MavState,
    home: &Point3<f64>,
    margin: u32,
    connectivity: Connectivity,
) -> Result<Option<Path>> {
    plan(
        map,
        &PlanRequest {
            start: s.position,
            goal: map.key_of(home),
            margin,
            connectivity,
        },
    )
}

/// Cheapest route out of a margin violation: a Dijkstra search from the
/// vehicle's voxel through Free space (clearance ignored while moving) to
/// the nearest voxel that is fully traversable again. The start voxel's own
/// state is not checked, since the vehicle is already there. Returns `None`
/// when no traversable voxel is reachable.
pub fn escape_path(
    map: &OccupancyMap,
    position: &Point3<f64>,
    margin: u32,
    connectivity: Connectivity,
) -> Option<Path> {
    let start = map.key_of(position);
    if traversable(map, &start, margin, &start) && map.state_of(&start) == VoxelState::Free {
        return Some(assemble(map, vec![start], 0.0));
    }
    let res = map.geometry().res;
    let mut g_score: HashMap<VoxelKey, f64> = HashMap::new();
    let mut came_from: HashMap<VoxelKey, VoxelKey> = HashMap::new();
    let mut heap = BinaryHeap::new();
    g_score.insert(start, 0.0);
    heap.push(Reverse(HeapEntry {
        f: 0.0,
        g: 0.0,
        key: start,
    }));
    while let Some(Reverse(entry)) = heap.pop() {
        if entry.g > *g_score.get(&entry.key).unwrap_or(&f64::INFINITY) {
            continue;
        }
        if entry.key != start && is_clear_of_occupied(map, &entry.key, margin) {
            let mut keys = vec![entry.key];
            let mut cur = entry.key;
            while let Some(prev) = came_from.get(&cur) {
                keys.push(*prev);
                cur = *prev;
            }
            keys.reverse();
            return Some(assemble(map, keys, entry.g));
        }
        for_each_neighbor(&entry.key, connectivity, res, |n, step| {
            if map.state_of(&n) != VoxelState::Free {
                return;
            }
            let g = entry.g + step;
            if g < *g_score.get(&n).unwrap_or(&f64::INFINITY) {
                g_score.insert(n, g);
                came_from.insert(n, entry.key);
                heap.push(Reverse(HeapEntry { f: g, g, key: n }));
            }
        });
    }
    None
}

/// True when the map update invalidates the rest of the path: some changed
/// voxel lies within the Chebyshev margin of a remaining waypoint, or a
/// remaining waypoint is no longer traversable.
pub fn replan_needed(
    map: &OccupancyMap,
    path: &Path,
    next_waypoint: usize,
    digest: &UpdateDigest,
    margin: u32,
) -> bool {
    if next_waypoint >= path.keys.len() {
        return false;
    }
    let remaining = &path.keys[next_waypoint..];
    let goal = path.goal();
    let waypoint_set: std::collections::BTreeSet<VoxelKey> = remaining.iter().copied().collect();
    let m = margin as i32;
    for c in &digest.changed {
        for dx in -m..=m {
            for dy in -m..=m {
                for dz in -m..=m {
                    if waypoint_set.contains(&c.offset(dx, dy, dz)) {
                        return true;
                    }
                }
            }
        }
    }
    remaining
        .iter()
        .any(|k| !traversable(map, k, margin, &goal))
}

/// Text dump of a path: header `path v1 <n>`, then one waypoint per line.
pub fn dump_path(path: &Path) -> String {
    let mut out = format!("path v1 {}\n", path.waypoints.len());
    for w in &path.waypoints {
        out.push_str(&format!("{:.6} {:.6} {:.6}\n", w.x, w.y, w.z));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::SensorModel;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    const FREE_P: f64 = 0.2;
    const OCC_P: f64 = 0.8;

    fn map_from_cells(res: f64, cells: &[(VoxelKey, f64)]) -> OccupancyMap {
        let mut text = format!("voxmap v1 {res} 0 0 0\n");
        let mut sorted: Vec<_> = cells.to_vec();
        sorted.sort_by_key(|(k, _)| *k);
        sorted.dedup_by_key(|(k, _)| *k);
        for (k, p) in sorted {
            text.push_str(&format!("{} {} {} {:.9}\n", k.ix, k.iy, k.iz, p));
        }
        OccupancyMap::load(text.as_bytes(), SensorModel::default()).unwrap()
    }

    fn corridor_map(len: i32, res: f64) -> OccupancyMap {
        let cells: Vec<_> = (0..len)
            .map(|i| (VoxelKey::new(i, 0, 0), FREE_P))
            .collect();
        map_from_cells(res, &cells)
    }

    fn req(start: Point3<f64>, goal: VoxelKey, margin: u32) -> PlanRequest {
        PlanRequest {
            start,
            goal,
            margin,
            connectivity: Connectivity::TwentySix,
        }
    }

    #[test]
    fn straight_corridor_path_has_expected_cost() {
        let res = 0.5;
        let map = corridor_map(10, res);
        let start = map.center(&VoxelKey::new(0, 0, 0));
        let path = plan(&map, &req(start, VoxelKey::new(9, 0, 0), 0))
            .unwrap()
            .unwrap();
        assert_eq!(path.waypoints.len(), 10);
        assert_relative_eq!(path.cost, 9.0 * res, epsilon = 1e-12);
        for pair in path.keys.windows(2) {
            assert_eq!(pair[0].chebyshev(&pair[1]), 1);
        }
    }

    #[test]
    fn walled_off_goal_is_unreachable_not_an_error() {
        let res = 0.5;
        let mut cells: Vec<_> = (0..3).map(|i| (VoxelKey::new(i, 0, 0), FREE_P)).collect();
        // An isolated free pocket; the unknown gap in between blocks it.
        cells.push((VoxelKey::new(8, 0, 0), FREE_P));
        let map = map_from_cells(res, &cells);
        let start = map.center(&VoxelKey::new(0, 0, 0));
        assert_eq!(plan(&map, &req(start, VoxelKey::new(8, 0, 0), 0)).unwrap(), None);
    }

    #[test]
    fn untraversable_start_is_a_distinct_error() {
        let res = 0.5;
        let map = corridor_map(5, res);
        // Start in unknown space.
        let start = map.center(&VoxelKey::new(0, 5, 0));
        assert!(matches!(
            plan(&map, &req(start, VoxelKey::new(4, 0, 0), 0)),
            Err(Error::StartUntraversable)
        ));
        // Start free but within margin of an occupied voxel.
        let mut cells: Vec<_> = (0..5).map(|i| (VoxelKey::new(i, 0, 0), FREE_P)).collect();
        cells.push((VoxelKey::new(0, 1, 0), OCC_P));
        let map = map_from_cells(res, &cells);
        let start = map.center(&VoxelKey::new(0, 0, 0));
        assert!(matches!(
            plan(&map, &req(start, VoxelKey::new(4, 0, 0), 1)),
            Err(Error::StartUntraversable)
        ));
        // Same query with margin 0 succeeds.
        assert!(plan(&map, &req(start, VoxelKey::new(4, 0, 0), 0))
            .unwrap()
            .is_some());
    }

    #[test]
    fn unknown_goal_is_reachable_but_not_passable() {
        let res = 0.5;
        let map = corridor_map(5, res);
        let start = map.center(&VoxelKey::new(0, 0, 0));
        // Goal just past the corridor end is unknown: allowed as endpoint.
        let path = plan(&map, &req(start, VoxelKey::new(5, 0, 0), 0))
            .unwrap()
            .unwrap();
        assert_eq!(path.keys.len(), 6);
        // A goal two voxels past the end requires passing through unknown.
        assert_eq!(plan(&map, &req(start, VoxelKey::new(6, 0, 0), 0)).unwrap(), None);
    }

    #[test]
    fn trivial_goal_at_start_costs_nothing() {
        let map = corridor_map(3, 0.5);
        let start = map.center(&VoxelKey::new(1, 0, 0));
        let path = plan(&map, &req(start, VoxelKey::new(1, 0, 0), 0))
            .unwrap()
            .unwrap();
        assert_eq!(path.keys, vec![VoxelKey::new(1, 0, 0)]);
        assert_eq!(path.cost, 0.0);
    }

    /// Exhaustive shortest-path oracle with the same traversability rule.
    fn dijkstra_oracle(
        map: &OccupancyMap,
        start: VoxelKey,
        goal: VoxelKey,
        margin: u32,
        connectivity: Connectivity,
    ) -> Option<f64> {
        let res = map.geometry().res;
        let mut dist: HashMap<VoxelKey, f64> = HashMap::new();
        let mut heap = BinaryHeap::new();
        dist.insert(start, 0.0);
        heap.push(Reverse(HeapEntry {
            f: 0.0,
            g: 0.0,
            key: start,
        }));
        while let Some(Reverse(e)) = heap.pop() {
            if e.g > *dist.get(&e.key).unwrap_or(&f64::INFINITY) {
                continue;
            }
            if e.key == goal {
                return Some(e.g);
            }
            for_each_neighbor(&e.key, connectivity, res, |n, step| {
                if !traversable(map, &n, margin, &goal) {
                    return;
                }
                let g = e.g + step;
                if g < *dist.get(&n).unwrap_or(&f64::INFINITY) {
                    dist.insert(n, g);
                    heap.push(Reverse(HeapEntry { f: g, g, key: n }));
                }
            });
        }
        None
    }

    fn random_grid(rng: &mut ChaCha8Rng, side: i32, occ_frac: f64, unk_frac: f64) -> OccupancyMap {
        let mut cells = Vec::new();
        for ix in 0..side {
            for iy in 0..side {
                for iz in 0..side {
                    let roll: f64 = rng.gen();
                    if roll < occ_frac {
                        cells.push((VoxelKey::new(ix, iy, iz), OCC_P));
                    } else if roll < occ_frac + unk_frac {
                        // Unknown: leave the voxel out of the map.
                    } else {
                        cells.push((VoxelKey::new(ix, iy, iz), FREE_P));
                    }
                }
            }
        }
        map_from_cells(0.5, &cells)
    }

    #[test]
    fn plan_cost_matches_dijkstra_oracle_on_random_grids() {
        let mut rng = ChaCha8Rng::seed_from_u64(404);
        let mut compared = 0;
        for _ in 0..12 {
            let map = random_grid(&mut rng, 10, 0.15, 0.2);
            let free: Vec<VoxelKey> = map
                .cells_sorted()
                .into_iter()
                .filter(|(_, p)| *p < 0.5)
                .map(|(k, _)| k)
                .collect();
            if free.len() < 2 {
                continue;
            }
            for _ in 0..4 {
                let margin = rng.gen_range(0..2);
                let start_key = free[rng.gen_range(0..free.len())];
                let goal = free[rng.gen_range(0..free.len())];
                let connectivity = if rng.gen_bool(0.5) {
                    Connectivity::Six
                } else {
                    Connectivity::TwentySix
                };
                let start = map.center(&start_key);
                let got = plan(
                    &map,
                    &PlanRequest {
                        start,
                        goal,
                        margin,
                        connectivity,
                    },
                );
                let oracle = if traversable(&map, &start_key, margin, &start_key) {
                    Some(dijkstra_oracle(&map, start_key, goal, margin, connectivity))
                } else {
                    None
                };
                match (got, oracle) {
                    (Err(Error::StartUntraversable), None) => {}
                    (Ok(None), Some(None)) => {}
                    (Ok(Some(path)), Some(Some(cost))) => {
                        assert_relative_eq!(path.cost, cost, epsilon = 1e-9);
                        for k in &path.keys {
                            assert!(is_clear_of_occupied(&map, k, margin));
                        }
                        compared += 1;
                    }
                    (got, oracle) => panic!("mismatch: plan {got:?} vs oracle {oracle:?}"),
                }
            }
        }
        assert!(compared > 10, "too few comparable cases: {compared}");
    }

    #[test]
    fn larger_margins_never_shorten_paths() {
        // Open 12^3 rooms with interior obstacle blocks kept away from the
        // corners, so every margin in 0..3 still admits a corner-to-corner
        // path and the costs can be compared pairwise.
        let mut rng = ChaCha8Rng::seed_from_u64(808);
        let mut checked = 0;
        for _ in 0..10 {
            let n = 12;
            let mut grid: std::collections::BTreeMap<VoxelKey, f64> = Default::default();
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        grid.insert(VoxelKey::new(x, y, z), FREE_P);
                    }
                }
            }
            for _ in 0..rng.gen_range(1..=3) {
                let bx = rng.gen_range(3..8);
                let by = rng.gen_range(3..8);
                let bz = rng.gen_range(3..8);
                let side = rng.gen_range(1..=2);
                for x in bx..(bx + side).min(9) {
                    for y in by..(by + side).min(9) {
                        for z in bz..(bz + side).min(9) {
                            grid.insert(VoxelKey::new(x, y, z), OCC_P);
                        }
                    }
                }
            }
            let cells: Vec<_> = grid.into_iter().collect();
            let map = map_from_cells(0.5, &cells);
            let start = map.center(&VoxelKey::new(0, 0, 0));
            let goal = VoxelKey::new(n - 1, n - 1, n - 1);
            let mut prev: Option<f64> = None;
            for margin in 0..3 {
                let path = plan(&map, &req(start, goal, margin))
                    .unwrap()
                    .unwrap_or_else(|| panic!("margin {margin} must stay solvable"));
                if let Some(p) = prev {
                    assert!(path.cost >= p - 1e-9, "margin {margin} shortened the path");
                    checked += 1;
                }
                prev = Some(path.cost);
            }
        }
        assert!(checked > 5, "too few margin chains: {checked}");
    }

    #[test]
    fn replan_triggers_describe_path_invalidation() {
        let res = 0.5;
        let map = corridor_map(10, res);
        let start = map.center(&VoxelKey::new(0, 0, 0));
        let path = plan(&map, &req(start, VoxelKey::new(9, 0, 0), 0))
            .unwrap()
            .unwrap();

        let empty = UpdateDigest {
            map_id: map.id(),
            revision: map.revision(),
            touched: BTreeSet::new(),
            changed: BTreeSet::new(),
        };
        assert!(!replan_needed(&map, &path, 0, &empty, 0));

        // A change right on a remaining waypoint trips the trigger.
        let mut on_path = empty.clone();
        on_path.changed.insert(VoxelKey::new(5, 0, 0));
        assert!(replan_needed(&map, &path, 0, &on_path, 0));
        // ... but not when that waypoint is already behind the vehicle.
        assert!(!replan_needed(&map, &path, 6, &on_path, 0));

        // A change one voxel off the path only matters once the margin
        // reaches it.
        let mut near = empty.clone();
        near.changed.insert(VoxelKey::new(5, 2, 0));
        assert!(!replan_needed(&map, &path, 0, &near, 1));
        assert!(replan_needed(&map, &path, 0, &near, 2));

        // A waypoint that became untraversable triggers even with an
        // unrelated digest: rebuild the map with an obstacle on the path.
        let mut cells: Vec<_> = (0..10).map(|i| (VoxelKey::new(i, 0, 0), FREE_P)).collect();
        cells[4].1 = OCC_P;
        let blocked = map_from_cells(res, &cells);
        assert!(replan_needed(&blocked, &path, 0, &empty, 0));
    }

    #[test]
    fn replan_matches_recheck_oracle_on_random_perturbations() {
        let mut rng = ChaCha8Rng::seed_from_u64(1213);
        for _ in 0..30 {
            let map = random_grid(&mut rng, 8, 0.1, 0.15);
            let free: Vec<VoxelKey> = map
                .cells_sorted()
                .into_iter()
                .filter(|(_, p)| *p < 0.5)
                .map(|(k, _)| k)
                .collect();
            if free.len() < 2 {
                continue;
            }
            let start_key = free[rng.gen_range(0..free.len())];
            let goal = free[rng.gen_range(0..free.len())];
            let margin = rng.gen_range(0..2);
            let Ok(Some(path)) = plan(&map, &req(map.center(&start_key), goal, margin)) else {
                continue;
            };
            let mut digest = UpdateDigest {
                map_id: map.id(),
                revision: map.revision(),
                touched: BTreeSet::new(),
                changed: BTreeSet::new(),
            };
            for _ in 0..rng.gen_range(0..6) {
                digest.changed.insert(VoxelKey::new(
                    rng.gen_range(0..8),
                    rng.gen_range(0..8),
                    rng.gen_range(0..8),
                ));
            }
            let next = rng.gen_range(0..path.keys.len());
            let got = replan_needed(&map, &path, next, &digest, margin);
            // Oracle: brute-force recheck of both trigger clauses.
            let goal_key = path.goal();
            let remaining = &path.keys[next..];
            let clause1 = remaining.iter().any(|w| {
                digest
                    .changed
                    .iter()
                    .any(|c| c.chebyshev(w) <= margin)
            });
            let clause2 = remaining
                .iter()
                .any(|w| !traversable(&map, w, margin, &goal_key));
            assert_eq!(got, clause1 || clause2);
        }
    }

    #[test]
    fn escape_leaves_a_margin_violation_through_free_space() {
        let res = 0.5;
        // Corridor with an occupied voxel near its start; margin 1 makes the
        // first two voxels unsafe, so escape should move to x = 2.
        let mut cells: Vec<_> = (0..8).map(|i| (VoxelKey::new(i, 0, 0), FREE_P)).collect();
        cells.push((VoxelKey::new(0, 1, 0), OCC_P));
        let map = map_from_cells(res, &cells);
        let pos = map.center(&VoxelKey::new(0, 0, 0));
        let path = escape_path(&map, &pos, 1, Connectivity::TwentySix).unwrap();
        assert_eq!(path.goal(), VoxelKey::new(2, 0, 0));
        assert!(path.keys.len() == 3);

        // Already safe: a single-voxel path.
        let safe_pos = map.center(&VoxelKey::new(5, 0, 0));
        let trivial = escape_path(&map, &safe_pos, 1, Connectivity::TwentySix).unwrap();
        assert_eq!(trivial.keys, vec![VoxelKey::new(5, 0, 0)]);
        assert_eq!(trivial.cost, 0.0);

        // No reachable safe voxel at an absurd margin: none.
        assert!(escape_path(&map, &pos, 50, Connectivity::TwentySix).is_none());
    }

    #[test]
    fn dump_uses_fixed_point_waypoints() {
        let map = corridor_map(3, 0.5);
        let start = map.center(&VoxelKey::new(0, 0, 0));
        let path = plan(&map, &req(start, VoxelKey::new(2, 0, 0), 0))
            .unwrap()
            .unwrap();
        let dump = dump_path(&path);
        let mut lines = dump.lines();
        assert_eq!(lines.next(), Some("path v1 3"));
        assert_eq!(lines.next(), Some("0.250000 0.250000 0.250000"));
        assert_eq!(lines.next(), Some("0.750000 0.250000 0.250000"));
        assert_eq!(lines.next(), Some("1.250000 0.250000 0.250000"));
        assert_eq!(lines.next(), None);
    }
}
