//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or other failure, 2 configuration could not
//! be loaded, 3 goal is not a free surface cell, 4 plan start cannot reach the
//! goal, 5 simulated module cannot reach the goal, 6 thickness out of bounds.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use datom_core::geometry::{derive_params_with, max_thickness, GeometryError};
use datom_core::gradient::{compute_field, descend, FieldError};
use datom_core::simkernel::{run as simulate, SimError, SimParams};
use datom_core::{CellPos, ModuleId, ThicknessConvention};

use crate::config::{self, Loaded};
use crate::formats::{field_csv, plan_jsonl, render, trace_jsonl, SurfaceReport};
use crate::scene;

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_GOAL: i32 = 3;
pub const EXIT_START: i32 = 4;
pub const EXIT_UNREACHABLE: i32 = 5;
pub const EXIT_THICKNESS: i32 = 6;

#[derive(Debug, Parser)]
#[command(name = "datom", version, about = "Deformable-module lattice planner and simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print module dimensions for a radius and wall thickness.
    Geometry {
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 0.0)]
        thickness: f64,
        /// Corrected radius r + t/2 instead of r - t/2.
        #[arg(long)]
        compat: bool,
    },
    /// List bundled scenes.
    Scenes,
    /// Distance field to the goal as CSV.
    Field {
        #[command(flatten)]
        src: Source,
        #[arg(long, value_parser = parse_cell)]
        goal: Option<CellPos>,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Motions from start to goal as JSON lines.
    Plan {
        #[command(flatten)]
        src: Source,
        #[arg(long, value_parser = parse_cell)]
        goal: Option<CellPos>,
        #[arg(long, value_parser = parse_cell)]
        start: Option<CellPos>,
    },
    /// Run the message-passing simulation and write its trace.
    Simulate {
        #[command(flatten)]
        src: Source,
        #[arg(long, value_parser = parse_cell)]
        goal: Option<CellPos>,
        #[arg(long)]
        mobile: Option<ModuleId>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        lmsg: u64,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        tdef: u64,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        tmove: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the trace here instead of stdout.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the final configuration here.
        #[arg(long = "final")]
        final_config: Option<PathBuf>,
    },
    /// ASCII view of one lattice plane.
    Render {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        layer: i32,
        #[arg(long, value_parser = parse_cell)]
        goal: Option<CellPos>,
    },
    /// Which free surface cells can reach the goal.
    EverySurface {
        #[command(flatten)]
        src: Source,
        #[arg(long, value_parser = parse_cell)]
        goal: Option<CellPos>,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Configuration JSON file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Bundled scene name.
    #[arg(long)]
    scene: Option<String>,
}

fn parse_cell(s: &str) -> Result<CellPos, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected i,j,k, got {s:?}"));
    }
    let mut v = [0i32; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.parse().map_err(|_| format!("not an integer: {p:?}"))?;
    }
    Ok(v.into())
}

struct Failure {
    code: i32,
    message: String,
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

type Outcome = Result<(), Failure>;

fn load_source(src: &Source) -> Result<Loaded, Failure> {
    if let Some(path) = &src.config {
        return config::load(path).map_err(|e| fail(EXIT_CONFIG, e.to_string()));
    }
    let name = src.scene.as_deref().expect("clap enforces one source");
    match scene::load(name) {
        Some(r) => r.map_err(|e| fail(EXIT_CONFIG, format!("scene {name}: {e}"))),
        None => {
            let known: Vec<_> = scene::names().collect();
            Err(fail(EXIT_CONFIG, format!("unknown scene {name:?} (known: {})", known.join(", "))))
        }
    }
}

fn goal_of(flag: Option<CellPos>, loaded: &Loaded) -> Result<CellPos, Failure> {
    flag.or(loaded.goal)
        .ok_or_else(|| fail(EXIT_USAGE, "no goal: pass --goal or add a goal-marker module"))
}

fn write_to(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Outcome {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| fail(EXIT_USAGE, format!("cannot write {}: {e}", p.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| fail(EXIT_USAGE, format!("cannot write output: {e}"))),
    }
}

fn field_error(e: FieldError) -> Failure {
    match e {
        FieldError::GoalNotOnSurface(_) => fail(EXIT_GOAL, e.to_string()),
        FieldError::NotInField(_) => fail(EXIT_START, e.to_string()),
        _ => fail(EXIT_USAGE, e.to_string()),
    }
}

fn geometry(radius: f64, thickness: f64, compat: bool, out: &mut dyn Write) -> Outcome {
    let conv = if compat { ThicknessConvention::Compat } else { ThicknessConvention::Strict };
    let p = derive_params_with(radius, thickness, conv).map_err(|e| match e {
        GeometryError::ThicknessTooLarge { .. } => fail(EXIT_THICKNESS, e.to_string()),
        _ => fail(EXIT_USAGE, e.to_string()),
    })?;
    let conv_name = if compat { "compat" } else { "strict" };
    let text = format!(
        "r={}\nt={}\nc={}\ne={}\na={}\nr_corr={}\nc_corr={}\ne_corr={}\ncore_edge={}\nconvention={}\nmax_thickness={}\n",
        p.r,
        p.t,
        p.c,
        p.e,
        p.a,
        p.r_corr,
        p.c_corr,
        p.e_corr,
        p.core_edge,
        conv_name,
        max_thickness(radius, conv)
    );
    write_to(None, &text, out)
}

fn execute(cmd: Command, out: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Geometry { radius, thickness, compat } => geometry(radius, thickness, compat, out),
        Command::Scenes => {
            let mut text = String::new();
            for name in scene::names() {
                let s = scene::load(name).expect("bundled").expect("bundled scenes load");
                text.push_str(&format!("{name}\t{}\n", s.description.unwrap_or_default()));
            }
            write_to(None, &text, out)
        }
        Command::Field { src, goal, csv } => {
            let loaded = load_source(&src)?;
            let goal = goal_of(goal, &loaded)?;
            let field = compute_field(&loaded.fixed(), goal).map_err(field_error)?;
            write_to(csv.as_deref(), &field_csv(&field), out)
        }
        Command::Plan { src, goal, start } => {
            let loaded = load_source(&src)?;
            let goal = goal_of(goal, &loaded)?;
            let start = start
                .or(loaded.mobile_pos())
                .or(loaded.start)
                .ok_or_else(|| fail(EXIT_USAGE, "no start: pass --start or mark a mobile module"))?;
            let fixed = loaded.fixed();
            let field = compute_field(&fixed, goal).map_err(field_error)?;
            if fixed.is_occupied(start) {
                return Err(fail(EXIT_START, format!("start {start} is occupied")));
            }
            let plan = descend(&fixed, start, &field).map_err(field_error)?;
            write_to(None, &plan_jsonl(&plan, &field), out)
        }
        Command::Simulate { src, goal, mobile, lmsg, tdef, tmove, seed, trace, final_config } => {
            let loaded = load_source(&src)?;
            let goal = goal_of(goal, &loaded)?;
            let mobile = mobile
                .or(loaded.mobile)
                .ok_or_else(|| fail(EXIT_USAGE, "no mobile module: pass --mobile or set a role"))?;
            let params = SimParams { l_msg: lmsg, t_def: tdef, t_move: tmove, seed };
            let outcome = simulate(&loaded.config, goal, mobile, &params).map_err(|e| match e {
                SimError::UnknownModule(_) => fail(EXIT_USAGE, e.to_string()),
                SimError::Field(f) => field_error(f),
                SimError::Unreachable(_) => fail(EXIT_UNREACHABLE, e.to_string()),
                _ => fail(EXIT_USAGE, e.to_string()),
            })?;
            write_to(trace.as_deref(), &trace_jsonl(&outcome.trace), out)?;
            if let Some(p) = final_config {
                write_to(Some(&p), &config::to_json(&outcome.config, Some(mobile)), out)?;
            }
            Ok(())
        }
        Command::Render { src, layer, goal } => {
            let loaded = load_source(&src)?;
            let goal = goal.or(loaded.goal);
            write_to(None, &render(&loaded.config, layer, goal), out)
        }
        Command::EverySurface { src, goal } => {
            let loaded = load_source(&src)?;
            let goal = goal_of(goal, &loaded)?;
            let fixed = loaded.fixed();
            let field = compute_field(&fixed, goal).map_err(field_error)?;
            write_to(None, &SurfaceReport::new(&fixed, &field).to_text(), out)
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "datom: {}", f.message);
            f.code
        }
    }
}
