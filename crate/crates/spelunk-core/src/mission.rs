//! Closed-loop exploration missions and their telemetry.
//!
//! Each tick at the sensor rate: scan, integrate, maintain frontiers, then
//! plan or replan as needed and advance the vehicle. Target selection also
//! reruns at a fixed decision period while en route. When no candidate
//! frontier remains the vehicle plans home and the mission ends as done.
//! All state evolution is deterministic in the configuration, including the
//! seed; wall-clock timings are collected separately and never influence
//! control flow or output files.

use std::collections::BTreeSet;
use std::fmt;
use std::time::Instant;

use nalgebra::Point3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::MissionConfig;
use crate::error::{Error, Result};
use crate::follower::KinematicFollower;
use crate::frontier::{is_clear_of_occupied, FrontierBook};
use crate::grid::{GridGeometry, VoxelKey};
use crate::lidar::simulate_scan;
use crate::map::{OccupancyMap, SensorModel, VoxelState};
use crate::planner::{escape_path, plan, replan_needed, Connectivity, Path, PlanRequest};
use crate::select::{classify, relative_angles, select_frontier, MavState, Selection};
use crate::world::WorldModel;

/// Mission phase, logged per tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    ExploreLocal,
    ExploreGlobal,
    Homing,
    Done,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mode::ExploreLocal => "explore-local",
            Mode::ExploreGlobal => "explore-global",
            Mode::Homing => "homing",
            Mode::Done => "done",
        };
        f.write_str(s)
    }
}

/// One telemetry row per tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub yaw: f64,
    /// Explored volume in cubic meters: (free + occupied) * v_res^3.
    pub volume: f64,
    /// Cumulative travel distance in meters.
    pub distance: f64,
    pub n_local: usize,
    pub n_global: usize,
    pub mode: Mode,
    pub collision: bool,
}

#[derive(Debug, Clone, Default)]
pub struct MissionLog {
    pub rows: Vec<LogRow>,
}

impl MissionLog {
    /// Full telemetry table with a header row and 6-decimal floats.
    pub fn mission_csv(&self) -> String {
        let mut out =
            String::from("t,x,y,z,yaw,volume,distance,n_local,n_global,mode,collision\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{},{},{},{}\n",
                r.t,
                r.x,
                r.y,
                r.z,
                r.yaw,
                r.volume,
                r.distance,
                r.n_local,
                r.n_global,
                r.mode,
                r.collision as u8
            ));
        }
        out
    }

    /// Pose-only table: t, x, y, z, yaw.
    pub fn trajectory_csv(&self) -> String {
        let mut out = String::from("t,x,y,z,yaw\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{:.6},{:.6},{:.6},{:.6},{:.6}\n",
                r.t, r.x, r.y, r.z, r.yaw
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionKind {
    Local,
    Global,
    Exhausted,
}

impl fmt::Display for SelectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SelectionKind::Local => "local",
            SelectionKind::Global => "global",
            SelectionKind::Exhausted => "exhausted",
        };
        f.write_str(s)
    }
}

/// One row per adopted target decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionRow {
    pub t: f64,
    pub kind: SelectionKind,
    pub position: Option<Point3<f64>>,
    pub cost: Option<f64>,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub d_obs: Option<f64>,
}

fn opt_fixed(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

/// Selection trace: `t,mode,fx,fy,fz,cost,alpha,gamma,d_obs`, with empty
/// fields where a quantity does not apply.
pub fn selections_csv(rows: &[SelectionRow]) -> String {
    let mut out = String::from("t,mode,fx,fy,fz,cost,alpha,gamma,d_obs\n");
    for r in rows {
        out.push_str(&format!(
            "{:.6},{},{},{},{},{},{},{},{}\n",
            r.t,
            r.kind,
            opt_fixed(r.position.map(|p| p.x)),
            opt_fixed(r.position.map(|p| p.y)),
            opt_fixed(r.position.map(|p| p.z)),
            opt_fixed(r.cost),
            opt_fixed(r.alpha),
            opt_fixed(r.gamma),
            opt_fixed(r.d_obs),
        ));
    }
    out
}

/// Measurements about a run that stay out of the deterministic output
/// files: wall-clock costs, derived ratios and operator warnings.
#[derive(Debug, Clone, Default)]
pub struct MissionStats {
    /// Frontier maintenance + selection + planning CPU seconds, per tick.
    pub planning_frontier_s: Vec<f64>,
    /// Number of adopted target decisions (including the homing decision).
    pub decisions: usize,
    /// decisions * t_hover, for reporting platform hover overhead.
    pub hover_overhead_s: f64,
    /// Fraction of ticks spent dwelling in a voxel that was visited and
    /// left earlier in the mission.
    pub revisit_fraction: f64,
    /// Ticks whose post-move voxel had a mapped obstacle inside the risk
    /// margin; nonzero values mean the clearance contract was broken.
    pub margin_breach_ticks: usize,
    /// True once the vehicle arrived back home after exhausting frontiers.
    pub homed: bool,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct MissionOutcome {
    pub log: MissionLog,
    pub selections: Vec<SelectionRow>,
    pub map: OccupancyMap,
    pub stats: MissionStats,
    pub collided: bool,
    pub final_mode: Mode,
}

/// Fraction of the ground-truth free voxels reachable from the start that
/// the map classifies as Free, compared by looking up each truth voxel
/// center in the map.
pub fn coverage_report(map: &OccupancyMap, world: &WorldModel, start: &Point3<f64>) -> f64 {
    let start_key = world.geometry().key_of(start);
    let reachable = world.reachable_free_from(&start_key, Connectivity::Six);
    if reachable.is_empty() {
        return 0.0;
    }
    let g = world.geometry();
    let mapped = reachable
        .iter()
        .filter(|k| map.state_of(&map.key_of(&g.center(k))) == VoxelState::Free)
        .count();
    mapped as f64 / reachable.len() as f64
}

/// Write the mission output files into `dir`: mission.csv, trajectory.csv,
/// selections.csv and map.voxmap.
pub fn write_outputs(outcome: &MissionOutcome, dir: &std::path::Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("mission.csv"), outcome.log.mission_csv())?;
    std::fs::write(dir.join("trajectory.csv"), outcome.log.trajectory_csv())?;
    std::fs::write(
        dir.join("selections.csv"),
        selections_csv(&outcome.selections),
    )?;
    let mut f = std::fs::File::create(dir.join("map.voxmap"))?;
    outcome.map.dump(&mut f)?;
    Ok(())
}

struct Runner<'a> {
    cfg: &'a MissionConfig,
    world: &'a WorldModel,
    map: OccupancyMap,
    book: FrontierBook,
    follower: KinematicFollower,
    rng: ChaCha8Rng,
    home: Point3<f64>,
    mode: Mode,
    path: Option<Path>,
    blacklist: BTreeSet<VoxelKey>,
    selections: Vec<SelectionRow>,
    stats: MissionStats,
    /// Set when the mission must end in place (trapped or home unreachable).
    stopped: bool,
}

impl Runner<'_> {
    fn margin(&self) -> u32 {
        self.cfg.risk_margin
    }

    fn record_selection(&mut self, t: f64, kind: SelectionKind, key: Option<VoxelKey>, cost: Option<f64>) -> Result<()> {
        let (position, alpha, gamma, d_obs) = match key {
            Some(k) => {
                let center = self.map.center(&k);
                let (a, g) = relative_angles(&center, &self.follower.state)?;
                let d = if kind == SelectionKind::Local {
                    self.map
                        .nearest_occupied(&center, self.cfg.sensor_range)
                        .map(|(_, d)| d)
                } else {
                    None
                };
                (Some(center), Some(a), Some(g), d)
            }
            None => (None, None, None, None),
        };
        self.selections.push(SelectionRow {
            t,
            kind,
            position,
            cost,
            alpha,
            gamma,
            d_obs,
        });
        self.stats.decisions += 1;
        Ok(())
    }

    /// Plan to the given goal, treating an unsafe start as a cue to escape
    /// to the nearest clear voxel first. Returns false when the mission can
    /// no longer move at all.
    fn adopt_or_escape(&mut self, goal: VoxelKey) -> Result<AdoptOutcome> {
        let request = PlanRequest {
            start: self.follower.state.position,
            goal,
            margin: self.margin(),
            connectivity: self.cfg.connectivity,
        };
        match plan(&self.map, &request) {
            Ok(Some(p)) => {
                self.follower.start_path(&p);
                self.path = Some(p);
                Ok(AdoptOutcome::Adopted)
            }
            Ok(None) => Ok(AdoptOutcome::Unreachable),
            Err(Error::StartUntraversable) => {
                match escape_path(
                    &self.map,
                    &self.follower.state.position,
                    self.margin(),
                    self.cfg.connectivity,
                ) {
                    Some(p) if p.keys.len() > 1 => {
                        self.follower.start_path(&p);
                        self.path = Some(p);
                        Ok(AdoptOutcome::Escaping)
                    }
                    _ => {
                        self.stats
                            .warnings
                            .push("no escape route from an unsafe position; ending in place".to_string());
                        self.stopped = true;
                        Ok(AdoptOutcome::Stuck)
                    }
                }
            }
            Err(e) => Err(e),
        }
    }

    fn plan_homing(&mut self, t: f64, record: bool) -> Result<()> {
        self.mode = Mode::Homing;
        if record {
            self.record_selection(t, SelectionKind::Exhausted, None, None)?;
        }
        let goal = self.map.key_of(&self.home);
        match self.adopt_or_escape(goal)? {
            AdoptOutcome::Adopted | AdoptOutcome::Escaping | AdoptOutcome::Stuck => Ok(()),
            AdoptOutcome::Unreachable => {
                // Degenerate ending declared up front: home sealed off by
                // inflation. Stop in place with a warning.
                self.stats
                    .warnings
                    .push("home position unreachable; ending in place".to_string());
                self.stopped = true;
                Ok(())
            }
        }
    }

    /// Pick a target and plan to it, blacklisting frontiers that turn out
    /// unreachable. Falls over to homing when everything is exhausted.
    fn select_and_plan(&mut self, t: f64) -> Result<()> {
        loop {
            let sel = select_frontier(
                self.book.safe_frontiers(),
                &self.follower.state,
                &self.map,
                &self.cfg.selection_config(),
                &self.blacklist,
            )?;
            match sel {
                Selection::Exhausted => return self.plan_homing(t, true),
                Selection::Local { key, cost } | Selection::Global { key, cost } => {
                    let kind = if matches!(sel, Selection::Local { .. }) {
                        SelectionKind::Local
                    } else {
                        SelectionKind::Global
                    };
                    match self.adopt_or_escape(key)? {
                        AdoptOutcome::Adopted => {
                            self.mode = if kind == SelectionKind::Local {
                                Mode::ExploreLocal
                            } else {
                                Mode::ExploreGlobal
                            };
                            return self.record_selection(t, kind, Some(key), Some(cost));
                        }
                        AdoptOutcome::Unreachable => {
                            self.blacklist.insert(key);
                        }
                        AdoptOutcome::Escaping | AdoptOutcome::Stuck => return Ok(()),
                    }
                }
            }
        }
    }

    /// Reconsider the target while en route; keep the current path unless a
    /// different frontier wins and is reachable.
    fn reselect_en_route(&mut self, t: f64) -> Result<()> {
        let Some(current_goal) = self.path.as_ref().map(|p| p.goal()) else {
            return Ok(());
        };
        let sel = select_frontier(
            self.book.safe_frontiers(),
            &self.follower.state,
            &self.map,
            &self.cfg.selection_config(),
            &self.blacklist,
        )?;
        let (kind, key, cost) = match sel {
            Selection::Exhausted => return Ok(()),
            Selection::Local { key, cost } => (SelectionKind::Local, key, cost),
            Selection::Global { key, cost } => (SelectionKind::Global, key, cost),
        };
        if key == current_goal {
            return Ok(());
        }
        let request = PlanRequest {
            start: self.follower.state.position,
            goal: key,
            margin: self.margin(),
            connectivity: self.cfg.connectivity,
        };
        match plan(&self.map, &request) {
            Ok(Some(p)) => {
                self.follower.start_path(&p);
                self.path = Some(p);
                self.mode = if kind == SelectionKind::Local {
                    Mode::ExploreLocal
                } else {
                    Mode::ExploreGlobal
                };
                self.record_selection(t, kind, Some(key), Some(cost))
            }
            Ok(None) => {
                self.blacklist.insert(key);
                Ok(())
            }
            // The current path stays valid; switching targets is optional.
            Err(Error::StartUntraversable) => Ok(()),
            Err(e) => Err(e),
        }
    }
}

enum AdoptOutcome {
    Adopted,
    Unreachable,
    Escaping,
    Stuck,
}

/// Run one full mission against a ground-truth world. Collisions end the
/// run with the collision flag set in the outcome rather than an error;
/// errors are reserved for invalid setups.
pub fn run_mission(cfg: &MissionConfig, world: &WorldModel) -> Result<MissionOutcome> {
    cfg.validate()?;
    let start = cfg.start()?.unwrap_or_else(|| world.start());
    let home = cfg.home()?.unwrap_or(start);
    if world.is_occupied_point(&start) {
        return Err(Error::StartInOccupiedSpace);
    }

    let lidar = cfg.lidar_spec();
    let sel_cfg = cfg.selection_config();
    let dt = 1.0 / cfg.scan_rate;
    let decision_ticks = (cfg.decision_period / dt).round().max(1.0) as u64;

    let geom = GridGeometry::new(Point3::origin(), cfg.v_res)?;
    let map = OccupancyMap::new(geom, SensorModel::default())?;
    let book = FrontierBook::new(cfg.frontier_params()?, &map, start);
    let state = MavState::new(start, 0.0, cfg.v_max, cfg.omega_max);
    let follower = KinematicFollower::new(state, dt, cfg.arrival_tol)?;
    let rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut r = Runner {
        cfg,
        world,
        map,
        book,
        follower,
        rng,
        home,
        mode: Mode::ExploreLocal,
        path: None,
        blacklist: BTreeSet::new(),
        selections: Vec::new(),
        stats: MissionStats::default(),
        stopped: false,
    };

    let mut log = MissionLog::default();
    let mut distance = 0.0f64;
    let mut collided = false;
    // Revisit bookkeeping: a dwell counts once the vehicle re-enters a
    // voxel it previously occupied and left.
    let mut exited: BTreeSet<VoxelKey> = BTreeSet::new();
    let mut current_voxel = r.map.key_of(&start);
    let mut dwell_is_revisit = false;
    let mut revisit_ticks = 0usize;

    let mut i = 0u64;
    while (i as f64) * dt < cfg.duration {
        let t = i as f64 * dt;
        let mut compute_s = 0.0;

        // Sense. Scanning from inside rock means the vehicle crashed.
        let scan = match simulate_scan(r.world, &lidar, &r.follower.state, &mut r.rng) {
            Ok(s) => s,
            Err(Error::PoseInOccupiedSpace(..)) => {
                collided = true;
                let p = r.follower.state.position;
                log.rows.push(LogRow {
                    t,
                    x: p.x,
                    y: p.y,
                    z: p.z,
                    yaw: r.follower.state.yaw,
                    volume: r.map.explored_volume(),
                    distance,
                    n_local: 0,
                    n_global: 0,
                    mode: r.mode,
                    collision: true,
                });
                r.stats.planning_frontier_s.push(0.0);
                break;
            }
            Err(e) => return Err(e),
        };
        let digest = r.map.integrate_scan(&scan);

        // Frontier upkeep (timed as mapping/planning compute).
        let clock = Instant::now();
        r.book.regenerate(&r.map, &digest)?;
        r.book.clean_seen(&r.map, r.follower.state.position);
        compute_s += clock.elapsed().as_secs_f64();

        // Map changes near a blacklisted frontier lift its ban.
        if !r.blacklist.is_empty() && !digest.changed.is_empty() {
            let expiry = r.margin() + 1;
            r.blacklist
                .retain(|k| !digest.changed.iter().any(|c| c.chebyshev(k) <= expiry));
        }

        let clock = Instant::now();
        if let Some(p) = &r.path {
            if replan_needed(&r.map, p, r.follower.next_waypoint(), &digest, r.margin()) {
                r.path = None;
            }
        }
        if r.mode != Mode::Done && !r.stopped {
            if r.path.is_none() {
                if r.mode == Mode::Homing {
                    r.plan_homing(t, false)?;
                } else {
                    r.select_and_plan(t)?;
                }
            } else if r.mode != Mode::Homing && i > 0 && i.is_multiple_of(decision_ticks) {
                r.reselect_en_route(t)?;
            }
        }
        compute_s += clock.elapsed().as_secs_f64();

        // Move along the current path.
        let mut arrived = false;
        if let Some(p) = &r.path {
            let before = r.follower.state.position;
            arrived = r.follower.step(p);
            distance += (r.follower.state.position - before).norm();
        }
        if arrived {
            if r.mode == Mode::Homing {
                r.mode = Mode::Done;
                r.stats.homed = true;
            }
            r.path = None;
        }
        if r.world.is_occupied_point(&r.follower.state.position) {
            collided = true;
        }
        let pose_voxel = r.map.key_of(&r.follower.state.position);
        if !is_clear_of_occupied(&r.map, &pose_voxel, r.margin()) {
            r.stats.margin_breach_ticks += 1;
        }

        // Log the tick.
        let (n_local, n_global) = {
            let (l, g) = classify(
                r.book.safe_frontiers(),
                &r.follower.state,
                r.map.geometry(),
                &sel_cfg,
            )?;
            (l.len(), g.len())
        };
        let p = r.follower.state.position;
        log.rows.push(LogRow {
            t,
            x: p.x,
            y: p.y,
            z: p.z,
            yaw: r.follower.state.yaw,
            volume: r.map.explored_volume(),
            distance,
            n_local,
            n_global,
            mode: r.mode,
            collision: collided,
        });
        r.stats.planning_frontier_s.push(compute_s);

        let v = r.map.key_of(&p);
        if v != current_voxel {
            exited.insert(current_voxel);
            dwell_is_revisit = exited.contains(&v);
            current_voxel = v;
        }
        if dwell_is_revisit {
            revisit_ticks += 1;
        }

        if collided || r.mode == Mode::Done || r.stopped {
            break;
        }
        i += 1;
    }

    r.stats.hover_overhead_s = r.stats.decisions as f64 * cfg.t_hover;
    r.stats.revisit_fraction = if log.rows.is_empty() {
        0.0
    } else {
        revisit_ticks as f64 / log.rows.len() as f64
    };
    Ok(MissionOutcome {
        log,
        selections: r.selections,
        map: r.map,
        stats: r.stats,
        collided,
        final_mode: r.mode,
    })
}
