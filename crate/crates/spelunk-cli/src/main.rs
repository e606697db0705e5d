//! `spelunk`: run deterministic exploration missions and generate worlds.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use spelunk_core::{coverage_report, run_mission, write_outputs, MissionConfig, Mode};

#[derive(Parser)]
#[command(
    name = "spelunk",
    version,
    about = "Deterministic frontier-based exploration simulator"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a closed-loop exploration mission and write CSV telemetry.
    Explore(ExploreArgs),
    /// Generate a ground-truth world and save it as a .voxworld file.
    GenWorld(GenWorldArgs),
}

#[derive(Args)]
struct ExploreArgs {
    /// Mission configuration file: flat `key = value` lines, `#` comments.
    #[arg(long)]
    config: Option<PathBuf>,
    /// World generator seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Mission duration budget override, in seconds.
    #[arg(long)]
    duration: Option<f64>,
    /// Ground-truth world file to load instead of generating one.
    #[arg(long, conflicts_with = "gen")]
    world: Option<PathBuf>,
    /// Procedural world kind: corridor | branching_cave | loop.
    #[arg(long, value_name = "KIND")]
    gen: Option<String>,
    /// Output directory for mission.csv, trajectory.csv, selections.csv
    /// and map.voxmap (default: out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Map voxel resolution override, in meters.
    #[arg(long)]
    res: Option<f64>,
    /// Additional `key=value` config overrides, applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct GenWorldArgs {
    /// World kind: corridor | branching_cave | loop.
    #[arg(long, default_value = "branching_cave")]
    kind: String,
    /// Generator seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Destination .voxworld file.
    #[arg(long)]
    out: PathBuf,
    /// Generator parameter overrides (`key=value`, e.g. extent_x=40).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn apply_overrides(cfg: &mut MissionConfig, pairs: &[String]) -> Result<()> {
    for pair in pairs {
        let (key, value) = pair
            .split_once('=')
            .with_context(|| format!("--set needs key=value, got `{pair}`"))?;
        cfg.apply_kv(key.trim(), value.trim())
            .with_context(|| format!("bad override `{pair}`"))?;
    }
    Ok(())
}

fn explore(args: &ExploreArgs) -> Result<ExitCode> {
    let mut cfg = match &args.config {
        Some(path) => MissionConfig::from_file(path)
            .with_context(|| format!("loading config {}", path.display()))?,
        None => MissionConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.apply_kv("seed", &seed.to_string())?;
    }
    if let Some(duration) = args.duration {
        cfg.apply_kv("duration", &duration.to_string())?;
    }
    if let Some(world) = &args.world {
        cfg.apply_kv("world_file", &world.display().to_string())?;
    }
    if let Some(kind) = &args.gen {
        cfg.world_file = None;
        cfg.apply_kv("world_kind", kind)?;
    }
    if let Some(out) = &args.out {
        cfg.apply_kv("out_dir", &out.display().to_string())?;
    }
    if let Some(res) = args.res {
        cfg.apply_kv("v_res", &res.to_string())?;
    }
    apply_overrides(&mut cfg, &args.set)?;
    cfg.validate().context("invalid mission configuration")?;

    let world = cfg.build_world().context("building the world")?;
    let outcome = run_mission(&cfg, &world).context("running the mission")?;
    let out_dir = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
    write_outputs(&outcome, &out_dir)
        .with_context(|| format!("writing outputs to {}", out_dir.display()))?;

    let last = outcome.log.rows.last().expect("missions log at least one row");
    let start = cfg
        .start()?
        .unwrap_or_else(|| world.start());
    let coverage = coverage_report(&outcome.map, &world, &start);
    println!("mission finished: mode {}", outcome.final_mode);
    println!("  simulated time     {:.1} s over {} ticks", last.t, outcome.log.rows.len());
    println!("  explored volume    {:.1} m^3", last.volume);
    println!("  distance flown     {:.1} m", last.distance);
    println!("  coverage           {:.3}", coverage);
    println!("  revisit fraction   {:.3}", outcome.stats.revisit_fraction);
    println!(
        "  decisions          {} ({:.1} s hover overhead at t_hover = {} s)",
        outcome.stats.decisions, outcome.stats.hover_overhead_s, cfg.t_hover
    );
    if outcome.stats.margin_breach_ticks > 0 {
        println!(
            "  margin breaches    {} transient tick(s)",
            outcome.stats.margin_breach_ticks
        );
    }
    for w in &outcome.stats.warnings {
        eprintln!("warning: {w}");
    }
    println!("outputs written to {}", out_dir.display());

    if outcome.collided {
        eprintln!("error: the vehicle collided with the environment");
        return Ok(ExitCode::from(1));
    }
    if !outcome.stats.warnings.is_empty() && outcome.final_mode != Mode::Done {
        // Ended in place without finishing (trapped or home unreachable).
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn gen_world(args: &GenWorldArgs) -> Result<ExitCode> {
    let mut cfg = MissionConfig::default();
    cfg.apply_kv("world_kind", &args.kind)?;
    cfg.apply_kv("seed", &args.seed.to_string())?;
    apply_overrides(&mut cfg, &args.set)?;
    let world = spelunk_core::generate_world(cfg.world_kind, cfg.seed, &cfg.gen_params())
        .context("generating the world")?;
    let file = File::create(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let mut writer = BufWriter::new(file);
    world.save(&mut writer).context("writing the world file")?;
    writer.flush()?;
    let b = world.bounds();
    let s = world.start();
    println!("wrote {}", args.out.display());
    println!(
        "  bounds     [{:.2} {:.2} {:.2}] .. [{:.2} {:.2} {:.2}] at {:.3} m",
        b.min.x,
        b.min.y,
        b.min.z,
        b.max.x,
        b.max.y,
        b.max.z,
        world.truth_res()
    );
    println!("  free space {} voxels", world.free_count());
    println!("  suggested start (config keys):");
    println!("    start_x = {:.3}", s.x);
    println!("    start_y = {:.3}", s.y);
    println!("    start_z = {:.3}", s.z);
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Command::Explore(args) => explore(args),
        Command::GenWorld(args) => gen_world(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
