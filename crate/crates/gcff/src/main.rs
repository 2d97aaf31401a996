use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use gcff::{io as files, report, stats, svg, tune, Profile};
use gcff_core::metrics::{evaluate, EvalOptions};
use gcff_core::synth::{self, NoiseMode, NoiseSpec};
use gcff_core::{detect_groups, Params, Proposals, DEFAULT_K_REPULSION, DEFAULT_THETA_HAT};

#[derive(Parser)]
#[command(
    name = "gcff",
    version,
    about = "Detect and score free-standing conversational groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect groups in every frame of a frame file.
    Detect(DetectArgs),
    /// Score detected groups against ground truth.
    Eval(EvalArgs),
    /// Grid-search stride and sigma on the first half of the frames.
    Tune(TuneArgs),
    /// Generate annotated synthetic frames.
    Synth(SynthArgs),
    /// Detection F1 under increasing Gaussian noise.
    Sweep(SweepArgs),
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// Named stride/sigma preset.
    #[arg(long, conflicts_with_all = ["stride", "sigma"])]
    profile: Option<Profile>,
    #[arg(long, requires = "sigma")]
    stride: Option<f64>,
    #[arg(long, requires = "stride")]
    sigma: Option<f64>,
    /// Cost per group centre; defaults to sigma squared.
    #[arg(long)]
    mdl_weight: Option<f64>,
    /// Half-angle of the occlusion cone, radians.
    #[arg(long, default_value_t = DEFAULT_THETA_HAT)]
    theta_hat: f64,
    /// Sharpness of the occlusion penalty.
    #[arg(long, default_value_t = DEFAULT_K_REPULSION)]
    k: f64,
    /// Penalise people outside the occlusion cone instead of inside it.
    #[arg(long)]
    literal_gate: bool,
    /// Drop the occlusion penalty altogether.
    #[arg(long)]
    no_visibility: bool,
    /// Offer only each group's current centre and mean as proposals.
    #[arg(long)]
    two_proposals: bool,
}

impl SolverArgs {
    fn base(&self, fallback: Profile) -> (f64, f64) {
        match (self.profile, self.stride, self.sigma) {
            (Some(p), _, _) => p.values(),
            (None, Some(d), Some(s)) => (d, s),
            _ => fallback.values(),
        }
    }

    fn with(&self, stride: f64, sigma: f64) -> Params {
        let mut p = Params::new(stride, sigma);
        if let Some(w) = self.mdl_weight {
            p.mdl_weight = w;
        }
        p.theta_hat = self.theta_hat;
        p.k_repulsion = self.k;
        p.literal_visibility_gate = self.literal_gate;
        p.visibility = !self.no_visibility;
        p.proposals = if self.two_proposals {
            Proposals::PerGroup
        } else {
            Proposals::Neighbourhood
        };
        p
    }

    fn params(&self, fallback: Profile) -> Result<Params> {
        let (d, s) = self.base(fallback);
        let p = self.with(d, s);
        p.validate()?;
        Ok(p)
    }
}

#[derive(Args)]
struct DetectArgs {
    /// Frame file to read.
    #[arg(long)]
    frames: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    /// Group file to write; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also draw one SVG per frame.
    #[arg(long)]
    render: bool,
    /// Directory for the drawings; defaults to the output file's directory.
    #[arg(long)]
    render_dir: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Ground-truth group file.
    #[arg(long)]
    gt: PathBuf,
    /// Detected group file.
    #[arg(long)]
    det: PathBuf,
    #[arg(long, default_value_t = 2.0 / 3.0)]
    tolerance: f64,
    /// Add the F1 curve over tolerances and its area.
    #[arg(long)]
    gtm: bool,
    /// Add F1 per group size.
    #[arg(long)]
    cardinality: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TuneArgs {
    #[arg(long)]
    frames: PathBuf,
    /// Ground-truth group file.
    #[arg(long)]
    groups: PathBuf,
    /// Candidate strides, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    strides: Vec<f64>,
    /// Candidate sigmas, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    sigmas: Vec<f64>,
    #[command(flatten)]
    solver: SolverArgs,
    /// Shuffle frames with this seed before splitting.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 100)]
    scenes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    solver: SolverArgs,
    /// Frame file to write.
    #[arg(long)]
    out: PathBuf,
    /// Ground-truth group file to write.
    #[arg(long)]
    groups: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Position,
    Orientation,
    Both,
}

impl From<Mode> for NoiseMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Position => NoiseMode::PositionOnly,
            Mode::Orientation => NoiseMode::OrientationOnly,
            Mode::Both => NoiseMode::Both,
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    /// Annotated frames; synthetic frames are generated when absent.
    #[arg(long, requires = "groups")]
    frames: Option<PathBuf>,
    #[arg(long)]
    groups: Option<PathBuf>,
    /// Number of synthetic frames to generate.
    #[arg(long, default_value_t = 100)]
    scenes: usize,
    #[arg(long, value_enum, default_value_t = Mode::Both)]
    mode: Mode,
    #[arg(long, default_value_t = 10)]
    max_level: u32,
    #[arg(long, default_value_t = 20.0)]
    sigma_xy: f64,
    #[arg(long, default_value_t = 0.1)]
    sigma_theta: f64,
    #[arg(long, default_value_t = 2.0 / 3.0)]
    tolerance: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    solver: SolverArgs,
    /// Curve file to write; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot write {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn file_stem(frame: &str) -> String {
    frame
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn run_detect(args: DetectArgs) -> Result<()> {
    let params = args.solver.params(Profile::Synthetic)?;
    let scenes = files::read_frames(&args.frames)?;
    let render_dir = args
        .render_dir
        .clone()
        .or_else(|| {
            args.out
                .as_ref()
                .and_then(|p| p.parent())
                .filter(|p| !p.as_os_str().is_empty())
                .map(Path::to_path_buf)
        })
        .unwrap_or_else(|| PathBuf::from("."));
    if args.render {
        fs::create_dir_all(&render_dir).with_context(|| format!("cannot create {}", render_dir.display()))?;
    }
    let mut detected = Vec::with_capacity(scenes.len());
    for scene in &scenes {
        let det = detect_groups(scene, &params).with_context(|| format!("frame `{}`", scene.frame_id))?;
        if args.render {
            let path = render_dir.join(format!("frame-{}.svg", file_stem(&scene.frame_id)));
            fs::write(&path, svg::render(scene, &det, &params))
                .with_context(|| format!("cannot write {}", path.display()))?;
        }
        detected.push((scene.frame_id.clone(), det.groups));
    }
    let mut out = output(args.out.as_deref())?;
    files::write_groups(&mut out, &detected)?;
    out.flush()?;
    Ok(())
}

fn run_eval(args: EvalArgs) -> Result<()> {
    let gt = files::read_groups(&args.gt)?;
    let det = files::read_groups(&args.det)?;
    let frames = files::align_frames(&gt, &det)?;
    let options = EvalOptions {
        gtm: args.gtm,
        cardinality: args.cardinality,
    };
    let report = evaluate(&frames, args.tolerance, options)?;
    let mut out = output(args.out.as_deref())?;
    out.write_all(report::render(&report).as_bytes())?;
    out.flush()?;
    Ok(())
}

fn annotated(frames: &Path, groups: &Path) -> Result<Vec<gcff_core::Scene>> {
    let mut scenes = files::read_frames(frames)?;
    files::attach_groups(&mut scenes, &files::read_groups(groups)?)?;
    Ok(scenes)
}

fn run_tune(args: TuneArgs) -> Result<()> {
    let scenes = annotated(&args.frames, &args.groups)?;
    let solver = args.solver.clone();
    let result = tune::tune(&scenes, &args.strides, &args.sigmas, args.seed, |d, s| {
        solver.with(d, s)
    })?;
    let mut out = output(args.out.as_deref())?;
    writeln!(out, "stride = {}", result.best.stride_d)?;
    writeln!(out, "sigma = {}", result.best.sigma)?;
    writeln!(out, "train_frames = {}", result.train_frames.len())?;
    writeln!(out, "held_out_frames = {}", result.held_out_frames.len())?;
    writeln!(out, "train_f1 = {:.4}", result.train_f1)?;
    writeln!(out, "held_out_f1 = {:.4}", result.held_out_f1)?;
    writeln!(out, "\n[grid]\nstride  sigma  train_f1")?;
    for cell in &result.grid {
        writeln!(out, "{}  {}  {:.4}", cell.stride_d, cell.sigma, cell.train_f1)?;
    }
    out.flush()?;
    Ok(())
}

fn run_synth(args: SynthArgs) -> Result<()> {
    let params = args.solver.params(Profile::Synthetic)?;
    let scenes = synth::synthetic_scenes(args.scenes, args.seed, &params)?;
    let groups: Vec<_> = scenes
        .iter()
        .map(|s| (s.frame_id.clone(), s.ground_truth().cloned().unwrap_or_default()))
        .collect();
    let mut frames = output(Some(&args.out))?;
    files::write_frames(&mut frames, &scenes)?;
    frames.flush()?;
    let mut gt = output(Some(&args.groups))?;
    files::write_groups(&mut gt, &groups)?;
    gt.flush()?;
    Ok(())
}

fn run_sweep(args: SweepArgs) -> Result<()> {
    let params = args.solver.params(Profile::Synthetic)?;
    let scenes = match (&args.frames, &args.groups) {
        (Some(f), Some(g)) => annotated(f, g)?,
        (None, None) => synth::synthetic_scenes(args.scenes, args.seed, &params)?,
        _ => bail!("--frames and --groups go together"),
    };
    let template = NoiseSpec {
        sigma_x: args.sigma_xy,
        sigma_y: args.sigma_xy,
        sigma_theta: args.sigma_theta,
        level: 0,
        seed: args.seed,
    };
    let levels: Vec<u32> = (0..=args.max_level).collect();
    let curve = synth::noise_sweep(&scenes, &params, &template, &levels, args.mode.into(), args.tolerance)?;
    let mut out = output(args.out.as_deref())?;
    files::write_curve(&mut out, &curve)?;
    out.flush()?;
    if let Ok(trend) = stats::curve_trend(&curve) {
        eprintln!("spearman rho = {:.4}, p = {:.3e}", trend.rho, trend.p_value);
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Detect(a) => run_detect(a),
        Command::Eval(a) => run_eval(a),
        Command::Tune(a) => run_tune(a),
        Command::Synth(a) => run_synth(a),
        Command::Sweep(a) => run_sweep(a),
    }
}
