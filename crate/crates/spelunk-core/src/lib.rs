//! Deterministic, headless exploration stack for a single aerial vehicle in
//! enclosed 3D environments.
//!
//! The crate provides the full closed loop: a probabilistic voxel occupancy
//! map fed by a simulated range sensor, frontier extraction with a safety
//! margin, greedy frontier selection split into a local field-of-view tier
//! and a global fallback, risk-aware grid path planning, a kinematic path
//! follower, procedural ground-truth worlds, and a mission driver that ties
//! them together and emits CSV telemetry. Everything is deterministic given
//! a configuration and seed: repeated runs produce byte-identical outputs.
//!
//! The top-level entry point for whole missions is [`run_mission`]; the
//! individual layers are usable on their own and are re-exported here.

// Validation guards are written `!(x > 0.0)` on purpose: unlike `x <= 0.0`,
// the negation also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod follower;
pub mod frontier;
pub mod grid;
pub mod lidar;
pub mod map;
pub mod mission;
pub mod planner;
pub mod select;
pub mod world;

pub use config::MissionConfig;
pub use error::{Error, Result};
pub use follower::{step_follower, KinematicFollower};
pub use frontier::{is_clear_of_occupied, is_frontier, FrontierBook, FrontierParams};
pub use grid::{wrap_angle, Aabb, GridGeometry, RayWalk, VoxelKey};
pub use lidar::{simulate_scan, LidarSpec};
pub use map::{
    update_occupancy, OccupancyMap, ScanReturn, SensorModel, SensorScan, UpdateDigest, VoxelState,
};
pub use mission::{
    coverage_report, run_mission, selections_csv, write_outputs, LogRow, MissionLog,
    MissionOutcome, MissionStats, Mode, SelectionKind, SelectionRow,
};
pub use planner::{
    compute_homing_path, dump_path, escape_path, plan, replan_needed, Connectivity, Path,
    PlanRequest,
};
pub use select::{
    classify, footprint_vertical_angle, global_cost, local_cost, relative_angles, select_frontier,
    MavState, Selection, SelectionConfig,
};
pub use world::{generate_world, WorldGenParams, WorldKind, WorldModel};
