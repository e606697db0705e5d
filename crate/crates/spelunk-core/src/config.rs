//! Flat `key = value` mission configuration.
//!
//! One assignment per line, `#` starts a comment, unknown keys are errors.
//! Every tunable of every module is exposed under a single namespace; CLI
//! flags apply on top through the same `apply_kv` path so precedence is
//! uniform.

use std::path::{Path, PathBuf};

use nalgebra::{Point3, Vector3};

use crate::error::{Error, Result};
use crate::frontier::{FrontierParams, DEFAULT_CLEANING_FRACTION, DEFAULT_MIN_UNKNOWN_NEIGHBORS, DEFAULT_RISK_MARGIN};
use crate::lidar::LidarSpec;
use crate::planner::Connectivity;
use crate::select::SelectionConfig;
use crate::world::{generate_world, WorldGenParams, WorldKind, WorldModel};

pub const DEFAULT_DURATION: f64 = 120.0;
pub const DEFAULT_MAP_RES: f64 = 0.5;
pub const DEFAULT_DECISION_PERIOD: f64 = 1.0;
pub const DEFAULT_REVISIT_THRESHOLD: f64 = 0.35;
pub const DEFAULT_V_MAX: f64 = 1.5;
pub const DEFAULT_OMEGA_MAX: f64 = 1.0;

/// Full mission setup. Build one from defaults, a config file, or both,
/// then hand it to the world builder and mission runner.
#[derive(Debug, Clone, PartialEq)]
pub struct MissionConfig {
    // World source: a generator kind, or a file that takes precedence.
    pub world_kind: WorldKind,
    pub world_file: Option<PathBuf>,
    pub seed: u64,
    // Generator geometry.
    pub extent: Vector3<f64>,
    pub corridor_length: f64,
    pub tunnel_radius: f64,
    pub radius_min: f64,
    pub radius_max: f64,
    pub branches: u32,
    /// Ground-truth voxel size; defaults to half the map resolution.
    pub truth_res: Option<f64>,
    // Mapping.
    pub v_res: f64,
    // Frontier maintenance.
    pub min_unknown: u32,
    pub risk_margin: u32,
    /// Absolute cleaning radius; defaults to 0.6 * sensor_range.
    pub cleaning_radius: Option<f64>,
    pub sensor_range: f64,
    // Lidar.
    pub h_rays: u32,
    pub v_rays: u32,
    pub scan_rate: f64,
    pub noise_sigma: f64,
    // Selection windows and weights. v_fov is shared with the lidar.
    pub h_fov: f64,
    pub v_fov: f64,
    pub gamma_full_angle: bool,
    pub w_obstacle: f64,
    pub w_heading: f64,
    pub w_height: f64,
    pub w_distance: f64,
    /// Per-decision hover time, reported in summaries only; it is constant
    /// across candidates so it never affects which frontier wins.
    pub t_hover: f64,
    // Kinematics.
    pub v_max: f64,
    pub omega_max: f64,
    pub arrival_tol: f64,
    // Mission loop.
    pub duration: f64,
    pub decision_period: f64,
    pub revisit_threshold: f64,
    pub connectivity: Connectivity,
    pub start_x: Option<f64>,
    pub start_y: Option<f64>,
    pub start_z: Option<f64>,
    pub home_x: Option<f64>,
    pub home_y: Option<f64>,
    pub home_z: Option<f64>,
    pub out_dir: Option<PathBuf>,
}

impl Default for MissionConfig {
    fn default() -> Self {
        let gen = WorldGenParams::default();
        let sel = SelectionConfig::default();
        let lidar = LidarSpec::default();
        Self {
            world_kind: WorldKind::Corridor,
            world_file: None,
            seed: 0,
            extent: gen.extent,
            corridor_length: gen.corridor_length,
            tunnel_radius: gen.tunnel_radius,
            radius_min: gen.radius_min,
            radius_max: gen.radius_max,
            branches: gen.branches,
            truth_res: None,
            v_res: DEFAULT_MAP_RES,
            min_unknown: DEFAULT_MIN_UNKNOWN_NEIGHBORS,
            risk_margin: DEFAULT_RISK_MARGIN,
            cleaning_radius: None,
            sensor_range: lidar.range,
            h_rays: lidar.h_rays,
            v_rays: lidar.v_rays,
            scan_rate: lidar.rate,
            noise_sigma: lidar.noise_sigma,
            h_fov: sel.h_fov,
            v_fov: sel.v_fov,
            gamma_full_angle: sel.gamma_full_angle,
            w_obstacle: sel.w_obstacle,
            w_heading: sel.w_heading,
            w_height: sel.w_height,
            w_distance: sel.w_distance,
            t_hover: 0.0,
            v_max: DEFAULT_V_MAX,
            omega_max: DEFAULT_OMEGA_MAX,
            arrival_tol: crate::follower::DEFAULT_ARRIVAL_TOL,
            duration: DEFAULT_DURATION,
            decision_period: DEFAULT_DECISION_PERIOD,
            revisit_threshold: DEFAULT_REVISIT_THRESHOLD,
            connectivity: Connectivity::TwentySix,
            start_x: None,
            start_y: None,
            start_z: None,
            home_x: None,
            home_y: None,
            home_z: None,
            out_dir: None,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| {
        Error::InvalidParameter(format!("key '{key}': cannot parse '{value}'"))
    })
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(Error::InvalidParameter(format!(
            "key '{key}': expected true or false, got '{value}'"
        ))),
    }
}

impl MissionConfig {
    /// Parse a config document on top of the defaults.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(&text)
    }

    /// Apply a whole document; later lines override earlier ones.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::ConfigParse {
                    line: line_no,
                    msg: format!("expected 'key = value', got '{line}'"),
                });
            };
            self.apply_kv(key.trim(), value.trim()).map_err(|e| match e {
                Error::UnknownConfigKey(_) => e,
                other => Error::ConfigParse {
                    line: line_no,
                    msg: other.to_string(),
                },
            })?;
        }
        Ok(())
    }

    /// Apply one assignment. CLI overrides reuse this, so file keys and
    /// flags cannot drift apart.
    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "world_kind" => self.world_kind = value.parse()?,
            "world_file" => self.world_file = Some(PathBuf::from(value)),
            "seed" => self.seed = parse_num(key, value)?,
            "duration" => self.duration = parse_num(key, value)?,
            "v_res" => self.v_res = parse_num(key, value)?,
            "truth_res" => self.truth_res = Some(parse_num(key, value)?),
            "extent_x" => self.extent.x = parse_num(key, value)?,
            "extent_y" => self.extent.y = parse_num(key, value)?,
            "extent_z" => self.extent.z = parse_num(key, value)?,
            "corridor_length" => self.corridor_length = parse_num(key, value)?,
            "tunnel_radius" => self.tunnel_radius = parse_num(key, value)?,
            "radius_min" => self.radius_min = parse_num(key, value)?,
            "radius_max" => self.radius_max = parse_num(key, value)?,
            "branches" => self.branches = parse_num(key, value)?,
            "min_unknown" => self.min_unknown = parse_num(key, value)?,
            "risk_margin" => self.risk_margin = parse_num(key, value)?,
            "cleaning_radius" => self.cleaning_radius = Some(parse_num(key, value)?),
            "sensor_range" => self.sensor_range = parse_num(key, value)?,
            "h_rays" => self.h_rays = parse_num(key, value)?,
            "v_rays" => self.v_rays = parse_num(key, value)?,
            "scan_rate" => self.scan_rate = parse_num(key, value)?,
            "noise_sigma" => self.noise_sigma = parse_num(key, value)?,
            "h_fov" => self.h_fov = parse_num(key, value)?,
            "v_fov" => self.v_fov = parse_num(key, value)?,
            "gamma_full_angle" => self.gamma_full_angle = parse_bool(key, value)?,
            "w_obstacle" => self.w_obstacle = parse_num(key, value)?,
            "w_heading" => self.w_heading = parse_num(key, value)?,
            "w_height" => self.w_height = parse_num(key, value)?,
            "w_distance" => self.w_distance = parse_num(key, value)?,
            "t_hover" => self.t_hover = parse_num(key, value)?,
            "v_max" => self.v_max = parse_num(key, value)?,
            "omega_max" => self.omega_max = parse_num(key, value)?,
            "arrival_tol" => self.arrival_tol = parse_num(key, value)?,
            "decision_period" => self.decision_period = parse_num(key, value)?,
            "revisit_threshold" => self.revisit_threshold = parse_num(key, value)?,
            "connectivity" => {
                self.connectivity = match value {
                    "6" => Connectivity::Six,
                    "26" => Connectivity::TwentySix,
                    _ => {
                        return Err(Error::InvalidParameter(format!(
                            "key 'connectivity': expected 6 or 26, got '{value}'"
                        )))
                    }
                }
            }
            "start_x" => self.start_x = Some(parse_num(key, value)?),
            "start_y" => self.start_y = Some(parse_num(key, value)?),
            "start_z" => self.start_z = Some(parse_num(key, value)?),
            "home_x" => self.home_x = Some(parse_num(key, value)?),
            "home_y" => self.home_y = Some(parse_num(key, value)?),
            "home_z" => self.home_z = Some(parse_num(key, value)?),
            "out_dir" => self.out_dir = Some(PathBuf::from(value)),
            _ => return Err(Error::UnknownConfigKey(key.to_string())),
        }
        Ok(())
    }

    pub fn resolved_truth_res(&self) -> f64 {
        self.truth_res.unwrap_or(self.v_res / 2.0)
    }

    pub fn resolved_cleaning_radius(&self) -> f64 {
        self.cleaning_radius
            .unwrap_or(DEFAULT_CLEANING_FRACTION * self.sensor_range)
    }

    fn triple(
        name: &str,
        x: Option<f64>,
        y: Option<f64>,
        z: Option<f64>,
    ) -> Result<Option<Point3<f64>>> {
        match (x, y, z) {
            (None, None, None) => Ok(None),
            (Some(x), Some(y), Some(z)) => Ok(Some(Point3::new(x, y, z))),
            _ => Err(Error::InvalidParameter(format!(
                "{name}_x, {name}_y and {name}_z must be given together"
            ))),
        }
    }

    /// Explicit start position, if all three components are present.
    pub fn start(&self) -> Result<Option<Point3<f64>>> {
        Self::triple("start", self.start_x, self.start_y, self.start_z)
    }

    /// Explicit home position; the mission falls back to the start.
    pub fn home(&self) -> Result<Option<Point3<f64>>> {
        Self::triple("home", self.home_x, self.home_y, self.home_z)
    }

    pub fn gen_params(&self) -> WorldGenParams {
        WorldGenParams {
            truth_res: self.resolved_truth_res(),
            extent: self.extent,
            corridor_length: self.corridor_length,
            tunnel_radius: self.tunnel_radius,
            radius_min: self.radius_min,
            radius_max: self.radius_max,
            branches: self.branches,
        }
    }

    pub fn frontier_params(&self) -> Result<FrontierParams> {
        FrontierParams::new(
            self.min_unknown,
            self.risk_margin,
            self.resolved_cleaning_radius(),
            self.sensor_range,
        )
    }

    pub fn selection_config(&self) -> SelectionConfig {
        SelectionConfig {
            w_obstacle: self.w_obstacle,
            w_heading: self.w_heading,
            w_height: self.w_height,
            w_distance: self.w_distance,
            h_fov: self.h_fov,
            v_fov: self.v_fov,
            sensor_range: self.sensor_range,
            gamma_full_angle: self.gamma_full_angle,
        }
    }

    pub fn lidar_spec(&self) -> LidarSpec {
        LidarSpec {
            range: self.sensor_range,
            h_rays: self.h_rays,
            v_rays: self.v_rays,
            v_fov: self.v_fov,
            rate: self.scan_rate,
            noise_sigma: self.noise_sigma,
        }
    }

    /// Build the ground truth: load the file when one is set, otherwise run
    /// the generator.
    pub fn build_world(&self) -> Result<WorldModel> {
        match &self.world_file {
            Some(path) => {
                let f = std::fs::File::open(path)?;
                WorldModel::load(std::io::BufReader::new(f))
            }
            None => generate_world(self.world_kind, self.seed, &self.gen_params()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v_res > 0.0 && self.v_res.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "v_res must be positive, got {}",
                self.v_res
            )));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "duration must be positive, got {}",
                self.duration
            )));
        }
        if !(self.decision_period > 0.0 && self.decision_period.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "decision_period must be positive, got {}",
                self.decision_period
            )));
        }
        if !(0.0..=1.0).contains(&self.revisit_threshold) {
            return Err(Error::InvalidParameter(format!(
                "revisit_threshold must be in [0, 1], got {}",
                self.revisit_threshold
            )));
        }
        if !(self.t_hover >= 0.0 && self.t_hover.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "t_hover must be non-negative, got {}",
                self.t_hover
            )));
        }
        self.frontier_params()?;
        self.selection_config().validate()?;
        self.lidar_spec().validate()?;
        self.start()?;
        self.home()?;
        Ok(())
    }
}
