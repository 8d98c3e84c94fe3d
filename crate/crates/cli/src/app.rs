//! Argument parsing and the subcommands.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use spiderlab_core::{
    build_workspace, census, coulomb_charges_for, default_window, equilibria, gradient_flow, hooke_weights_for,
    lift_census, robust_domain, trapping_domain, Arc, Corner, Coulomb, Error, FlowOptions, Hooke, LiftInput,
    MorseConfig, Point, Potential, SegmentTag, Side, SpiderSpec, Trajectory, WeightedHooke,
};

use spiderlab_core::workspace::BoundaryComponent;

use crate::config::{ConfigError, SpiderConfig};
use crate::render::{render_svg, Scene};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

/// Grid resolution override shared by every command that samples a grid.
pub const GRID_ENV: &str = "SPIDERLAB_GRID_N";

#[derive(Debug, Parser)]
#[command(name = "spiderlab", version, about = "Workspaces, energy landscapes and control of tripod spiders")]
pub struct Cli {
    /// Spider description (JSON).
    #[arg(long, short, global = true, default_value = "spider.json")]
    pub config: PathBuf,
    /// Directory for report files; created if missing.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PotentialKind {
    Hooke,
    Weighted,
    Coulomb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Hooke,
    Coulomb,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Boundary arcs, corners and Betti numbers of the workspace.
    Workspace,
    /// Morse critical-point census of a potential on the workspace.
    Census {
        #[arg(long, value_enum, default_value = "hooke")]
        potential: PotentialKind,
    },
    /// Critical-point census lifted to the configuration space.
    Cspace {
        #[arg(long, value_enum, default_value = "hooke")]
        potential: PotentialKind,
    },
    /// Grid sample of the trapping domain.
    Trap {
        #[arg(long)]
        resolution: Option<usize>,
        /// Intersect with the workspace.
        #[arg(long)]
        robust: bool,
    },
    /// Parameters that hold the center at a target.
    Control {
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        target: Point,
        #[arg(long, value_enum, default_value = "coulomb")]
        mode: Mode,
    },
    /// Projected gradient flow from a start point.
    Flow {
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        start: Point,
        #[arg(long, value_enum, default_value = "hooke")]
        potential: PotentialKind,
        #[arg(long, default_value_t = FlowOptions::default().step)]
        step: f64,
        #[arg(long, default_value_t = FlowOptions::default().max_steps)]
        max_steps: usize,
        #[arg(long, default_value_t = FlowOptions::default().tol)]
        tol: f64,
    },
    /// Equilibria of the configured charges.
    Equilibria {
        #[arg(long)]
        resolution: Option<usize>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Workspace => "workspace",
            Command::Census { .. } => "census",
            Command::Cspace { .. } => "cspace",
            Command::Trap { .. } => "trap",
            Command::Control { .. } => "control",
            Command::Flow { .. } => "flow",
            Command::Equilibria { .. } => "equilibria",
        }
    }
}

fn parse_point(s: &str) -> Result<Point, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let [x, y] = parts.as_slice() else {
        return Err(format!("expected x,y, got {s:?}"));
    };
    let coord = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    let p = Point::new(coord(x)?, coord(y)?);
    if !p.is_finite() {
        return Err(format!("non-finite point {s:?}"));
    }
    Ok(p)
}

fn grid_override() -> Option<usize> {
    std::env::var(GRID_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

#[derive(Debug, Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    message: String,
}

/// A file destined for the output directory.
struct Artifact {
    name: String,
    contents: String,
}

/// What a command produced: the text for stdout plus files for `--out`.
struct Output {
    stdout: String,
    files: Vec<Artifact>,
}

/// A domain error, with any files that are still worth writing.
struct Failure {
    error: Error,
    files: Vec<Artifact>,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure { error, files: Vec::new() }
    }
}

fn json<T: Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn artifact(name: String, contents: String) -> Artifact {
    Artifact { name, contents }
}

fn potential_for(kind: PotentialKind, spec: &SpiderSpec, cfg: &SpiderConfig) -> Result<Box<dyn Potential>, Error> {
    let tri = spec.feet;
    Ok(match kind {
        PotentialKind::Hooke => Box::new(Hooke { tri }),
        PotentialKind::Weighted => Box::new(WeightedHooke { tri, weights: cfg.weights()? }),
        PotentialKind::Coulomb => Box::new(Coulomb { tri, charges: cfg.charges()? }),
    })
}

fn morse_config() -> MorseConfig {
    let mut m = MorseConfig::default();
    if let Some(n) = grid_override() {
        m.grid_n = n;
    }
    m
}

#[derive(Serialize)]
struct WorkspaceReport<'a> {
    spec: SpiderConfig,
    betti: [usize; 2],
    euler: i64,
    area: f64,
    arcs: &'a [Arc],
    corners: &'a [Corner],
    components: &'a [BoundaryComponent],
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::Inner => "inner",
        Side::Outer => "outer",
    }
}

fn tag_label(tag: SegmentTag) -> String {
    match tag {
        SegmentTag::Free => "free".into(),
        SegmentTag::Sliding(c) => {
            format!("sliding:{}:{}", spiderlab_core::workspace::leg_name(c.foot), side_name(c.side))
        }
    }
}

/// One row per point; each row carries the tag of the step that reached it.
pub fn trajectory_csv(t: &Trajectory) -> String {
    let mut tags = vec![SegmentTag::Free; t.points.len()];
    if let Some(first) = t.segments.first() {
        tags[0] = first.tag;
    }
    for s in &t.segments {
        for tag in &mut tags[s.start + 1..=s.end] {
            *tag = s.tag;
        }
    }
    let mut out = String::from("step,x,y,value,tag\n");
    for (i, (p, v)) in t.points.iter().zip(&t.values).enumerate() {
        writeln!(out, "{i},{},{},{v},{}", p.x, p.y, tag_label(tags[i])).unwrap();
    }
    out
}

fn execute(cmd: &Command, cfg: &SpiderConfig) -> Result<Output, Failure> {
    let spec = cfg.spec()?;
    let name = cmd.name();
    match *cmd {
        Command::Workspace => {
            let w = build_workspace(&spec)?;
            let (b0, b1) = w.betti();
            let report = json(&WorkspaceReport {
                spec: SpiderConfig::from_spec(&spec),
                betti: [b0, b1],
                euler: w.euler(),
                area: w.area(),
                arcs: w.arcs(),
                corners: w.corners(),
                components: w.components(),
            });
            let svg = render_svg(&Scene::Workspace(&w));
            Ok(Output {
                files: vec![artifact(format!("{name}.json"), report.clone()), artifact(format!("{name}.svg"), svg)],
                stdout: report,
            })
        }
        Command::Census { potential } => {
            let w = build_workspace(&spec)?;
            let f = potential_for(potential, &spec, cfg)?;
            let c = census(f.as_ref(), &w, &morse_config())?;
            let report = json(&c);
            let svg =
                render_svg(&Scene::Field { potential: f.as_ref(), workspace: &w, critical_points: &c.critical_points });
            Ok(Output {
                files: vec![artifact(format!("{name}.json"), report.clone()), artifact(format!("{name}.svg"), svg)],
                stdout: report,
            })
        }
        Command::Cspace { potential } => {
            let w = build_workspace(&spec)?;
            let f = potential_for(potential, &spec, cfg)?;
            let input = LiftInput::collect(f.as_ref(), &w, &morse_config())?;
            let report = json(&lift_census(&input, &w)?);
            Ok(Output { files: vec![artifact(format!("{name}.json"), report.clone())], stdout: report })
        }
        Command::Trap { resolution, robust } => {
            let n = resolution.or_else(grid_override).unwrap_or(256);
            let region = if robust { robust_domain(&spec, n) } else { trapping_domain(&spec.feet, n) };
            let mut csv = String::from("x,y\n");
            for p in &region.sample {
                writeln!(csv, "{},{}", p.x, p.y).unwrap();
            }
            let svg = render_svg(&Scene::Region(&region));
            Ok(Output {
                files: vec![artifact(format!("{name}.csv"), csv.clone()), artifact(format!("{name}.svg"), svg)],
                stdout: csv,
            })
        }
        Command::Control { target, mode } => {
            let sol = match mode {
                Mode::Hooke => hooke_weights_for(target, &spec.feet)?,
                Mode::Coulomb => coulomb_charges_for(target, &spec)?,
            };
            let report = json(&sol);
            Ok(Output { files: vec![artifact(format!("{name}.json"), report.clone())], stdout: report })
        }
        Command::Flow { start, potential, step, max_steps, tol } => {
            let w = build_workspace(&spec)?;
            let f = potential_for(potential, &spec, cfg)?;
            let opts = FlowOptions { step, max_steps, tol };
            let files = |t: &Trajectory| {
                vec![
                    artifact(format!("{name}.csv"), trajectory_csv(t)),
                    artifact(format!("{name}.json"), json(t)),
                    artifact(format!("{name}.svg"), render_svg(&Scene::Trajectory { trajectory: t, workspace: &w })),
                ]
            };
            match gradient_flow(f.as_ref(), start, &w, &opts) {
                Ok(t) => Ok(Output { stdout: trajectory_csv(&t), files: files(&t) }),
                Err(Error::StalledAtSaddle { location, trajectory }) => {
                    let files = files(&trajectory);
                    Err(Failure { error: Error::StalledAtSaddle { location, trajectory }, files })
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Equilibria { resolution } => {
            let n = resolution.or_else(grid_override).unwrap_or(512);
            let eq = equilibria(&spec.feet, &cfg.charges()?, default_window(&spec.feet), n)?;
            let report = json(&eq);
            Ok(Output { files: vec![artifact(format!("{name}.json"), report.clone())], stdout: report })
        }
    }
}

/// Writes through a sibling temporary file so readers never see a partial file.
fn write_atomic(dir: &Path, a: &Artifact) -> std::io::Result<()> {
    let tmp = dir.join(format!(".{}.tmp", a.name));
    fs::write(&tmp, &a.contents)?;
    fs::rename(&tmp, dir.join(&a.name))
}

fn write_files(dir: Option<&Path>, files: &[Artifact]) -> std::io::Result<()> {
    let Some(dir) = dir else { return Ok(()) };
    fs::create_dir_all(dir)?;
    files.iter().try_for_each(|a| write_atomic(dir, a))
}

/// Prints the error report and queues it as `error.json`.
fn report_error(stdout: &mut dyn Write, name: &str, message: String, files: &mut Vec<Artifact>) {
    let report = json(&ErrorReport { error: name, message });
    files.push(artifact("error.json".into(), report.clone()));
    let _ = stdout.write_all(report.as_bytes());
}

/// Runs the command line `args` (including the program name), writing the
/// primary report to `stdout`. Returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return e.exit_code();
        }
    };
    let out_dir = cli.out.as_deref();

    let cfg = fs::read_to_string(&cli.config)
        .map_err(|e| ("ConfigRead", format!("{}: {e}", cli.config.display())))
        .and_then(|text| {
            SpiderConfig::parse(&text).map_err(|e: ConfigError| (e.name(), format!("{}: {e}", cli.config.display())))
        });
    let cfg = match cfg {
        Ok(cfg) => cfg,
        Err((name, message)) => {
            let _ = writeln!(stderr, "error: {message}");
            let mut files = Vec::new();
            report_error(stdout, name, message, &mut files);
            let _ = write_files(out_dir, &files);
            return EXIT_CONFIG;
        }
    };

    let (code, files) = match execute(&cli.command, &cfg) {
        Ok(out) => {
            if stdout.write_all(out.stdout.as_bytes()).is_err() {
                return EXIT_IO;
            }
            (EXIT_OK, out.files)
        }
        Err(Failure { error, mut files }) => {
            let _ = writeln!(stderr, "error: {error}");
            report_error(stdout, error.name(), error.to_string(), &mut files);
            (EXIT_DOMAIN, files)
        }
    };
    if let Err(e) = write_files(out_dir, &files) {
        let _ = writeln!(stderr, "error: writing reports: {e}");
        return EXIT_IO;
    }
    code
}
