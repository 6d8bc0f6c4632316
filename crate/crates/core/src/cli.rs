//! Command-line front end. Flags override values from `--config`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::grammar::{format_action_list, render_narrative};
use crate::metrics::{evaluate_corpus, read_pairs, EvalConfig};
use crate::model::{validate_plan_with, AnimationPlan, RangePolicy, SlideSpec};
use crate::render::{render_video, RenderOptions};
use crate::stats::{dataset_stats, emit_reports};
use crate::synth::dataset::DATASET_MANIFEST;
use crate::synth::{synth_dataset, DatasetManifest, DatasetOptions, ExternalClient, SynthConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "slideanim", version, about = "Slide-animation dataset synthesis, rendering and caption metrics")]
pub struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a dataset of slides, plans, descriptions and frames.
    Synth(SynthArgs),
    /// Render one plan to a frame sequence.
    Render(RenderArgs),
    /// Print a plan's action list and narrative.
    Describe(DescribeArgs),
    /// Score predicted descriptions against references.
    Eval(EvalArgs),
    /// Dataset statistics reports from a manifest.
    Stats(StatsArgs),
    /// Check a plan against its slide.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct DrawFlags {
    /// Draw hatched blocks instead of text glyphs.
    #[arg(long)]
    pub placeholder_text: bool,
    /// Draw procedural patterns for missing image assets.
    #[arg(long)]
    pub placeholder_images: bool,
    /// Directory image references resolve against.
    #[arg(long)]
    pub assets: Option<PathBuf>,
}

impl DrawFlags {
    fn options(&self) -> RenderOptions {
        RenderOptions {
            placeholder_text: self.placeholder_text,
            placeholder_images: self.placeholder_images,
            asset_root: self.assets.clone(),
        }
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Preset name or JSON config file.
    #[arg(long, default_value = "paper_default")]
    pub config: String,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n_slides: Option<usize>,
    #[arg(long = "schemes")]
    pub schemes: Option<usize>,
    /// Frame rates; repeat or comma-separate for several.
    #[arg(long, value_delimiter = ',')]
    pub fps: Vec<f64>,
    #[arg(long, short)]
    pub out: PathBuf,
    /// Write plans and descriptions only.
    #[arg(long)]
    pub plan_only: bool,
    /// Skip triplets already on disk.
    #[arg(long)]
    pub resume: bool,
    /// Text-generation endpoint for narratives.
    #[arg(long)]
    pub external_endpoint: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    pub external_timeout_ms: u64,
    #[command(flatten)]
    pub draw: DrawFlags,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub slide: PathBuf,
    #[arg(long)]
    pub plan: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    pub fps: f64,
    #[arg(long, short)]
    pub out: PathBuf,
    #[command(flatten)]
    pub draw: DrawFlags,
}

#[derive(Debug, Args)]
pub struct DescribeArgs {
    pub plan: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Predictions, one description per line.
    #[arg(long)]
    pub pred: PathBuf,
    /// References, line-aligned with predictions.
    #[arg(long = "ref")]
    pub reference: PathBuf,
    /// Directory for metrics.csv and summary.txt.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Dataset manifest or the directory holding it.
    pub manifest: PathBuf,
    #[arg(long, short)]
    pub out: PathBuf,
    /// Also draw SVG bar charts.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub plan: PathBuf,
    #[arg(long)]
    pub slide: PathBuf,
    /// Treat timing ranges and step count as errors.
    #[arg(long)]
    pub strict: bool,
}

/// Failure with its exit status.
struct Fail(i32, String);

impl<E: std::fmt::Display> From<E> for Fail {
    fn from(e: E) -> Self {
        Fail(EXIT_FAILURE, e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail(EXIT_FAILURE, format!("{}: {e}", path.display())))
}

fn read_plan(path: &Path) -> Result<AnimationPlan, Fail> {
    AnimationPlan::from_json(&read(path)?).map_err(|e| Fail(EXIT_FAILURE, format!("{}: {e}", path.display())))
}

fn read_slide(path: &Path) -> Result<SlideSpec, Fail> {
    serde_json::from_str(&read(path)?).map_err(|e| Fail(EXIT_FAILURE, format!("{}: {e}", path.display())))
}

/// Config file first, then flags on top.
pub fn effective_config(args: &SynthArgs) -> Result<SynthConfig, String> {
    let mut cfg = SynthConfig::load(&args.config).map_err(|e| e.to_string())?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(n) = args.n_slides {
        cfg.n_slides = n;
    }
    if let Some(n) = args.schemes {
        cfg.schemes_per_slide = n;
    }
    if !args.fps.is_empty() {
        cfg.fps = args.fps.clone();
    }
    if let Some(endpoint) = &args.external_endpoint {
        cfg.external = Some(ExternalClient {
            endpoint: endpoint.clone(),
            timeout_ms: args.external_timeout_ms,
        });
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn banner(err: &mut dyn Write, command: &str, fields: &[(&str, String)]) {
    let mut line = format!("slideanim {} {command}", env!("CARGO_PKG_VERSION"));
    for (k, v) in fields {
        line.push_str(&format!(" {k}={v}"));
    }
    let _ = writeln!(err, "{line}");
}

fn synth(args: &SynthArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Fail> {
    let cfg = effective_config(args).map_err(|e| Fail(EXIT_USAGE, e))?;
    banner(
        err,
        "synth",
        &[
            ("seed", cfg.seed.to_string()),
            ("out", args.out.display().to_string()),
            ("plan_only", args.plan_only.to_string()),
            ("resume", args.resume.to_string()),
            ("config", serde_json::to_string(&cfg)?),
        ],
    );
    let opts = DatasetOptions {
        plan_only: args.plan_only,
        resume: args.resume,
        render: args.draw.options(),
    };
    let manifest = synth_dataset(&cfg, &args.out, &opts)?;
    let complete = manifest.complete().count();
    writeln!(
        out,
        "{complete}/{} triplets complete in {}",
        manifest.records.len(),
        args.out.join(DATASET_MANIFEST).display()
    )?;
    if complete != manifest.records.len() {
        return Err(Fail(EXIT_FAILURE, format!("{} records incomplete", manifest.records.len() - complete)));
    }
    Ok(())
}

fn render(args: &RenderArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Fail> {
    banner(
        err,
        "render",
        &[
            ("slide", args.slide.display().to_string()),
            ("plan", args.plan.display().to_string()),
            ("fps", args.fps.to_string()),
            ("out", args.out.display().to_string()),
        ],
    );
    let slide = read_slide(&args.slide)?;
    let plan = read_plan(&args.plan)?;
    let m = render_video(&slide, &plan, args.fps, &args.out, &args.draw.options())?;
    writeln!(out, "{} frames, {} s", m.n_frames(), m.total_s)?;
    Ok(())
}

fn describe(args: &DescribeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Fail> {
    banner(err, "describe", &[("plan", args.plan.display().to_string())]);
    let plan = read_plan(&args.plan)?;
    writeln!(out, "{}\n\n{}", format_action_list(&plan), render_narrative(&plan))?;
    Ok(())
}

fn eval(args: &EvalArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Fail> {
    let config = EvalConfig::default();
    banner(
        err,
        "eval",
        &[
            ("pred", args.pred.display().to_string()),
            ("ref", args.reference.display().to_string()),
            ("config", serde_json::to_string(&config)?),
        ],
    );
    let pairs = read_pairs(&args.pred, &args.reference)?;
    let report = evaluate_corpus(&pairs, &config)?;
    if let Some(dir) = &args.out {
        report.write(dir)?;
    }
    write!(out, "{}", report.summary())?;
    Ok(())
}

fn stats(args: &StatsArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Fail> {
    let path = if args.manifest.is_dir() {
        args.manifest.join(DATASET_MANIFEST)
    } else {
        args.manifest.clone()
    };
    banner(
        err,
        "stats",
        &[
            ("manifest", path.display().to_string()),
            ("out", args.out.display().to_string()),
            ("svg", args.svg.to_string()),
        ],
    );
    let manifest = DatasetManifest::read(&path)?;
    let root = path.parent().unwrap_or(Path::new("."));
    let st = dataset_stats(&manifest, root)?;
    for f in emit_reports(&st, &args.out, args.svg)? {
        writeln!(out, "{}", f.display())?;
    }
    Ok(())
}

fn validate(args: &ValidateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Fail> {
    banner(
        err,
        "validate",
        &[
            ("plan", args.plan.display().to_string()),
            ("slide", args.slide.display().to_string()),
            ("strict", args.strict.to_string()),
        ],
    );
    let plan = read_plan(&args.plan)?;
    let slide = read_slide(&args.slide)?;
    let policy = if args.strict { RangePolicy::Strict } else { RangePolicy::Lenient };
    let report = validate_plan_with(&plan, &slide, policy)?;
    for p in slide.problems() {
        writeln!(out, "slide: {p}")?;
    }
    for v in &report.warnings {
        writeln!(out, "warning: {v}")?;
    }
    for v in &report.violations {
        writeln!(out, "error: {v}")?;
    }
    if report.is_valid() && slide.problems().is_empty() {
        writeln!(out, "ok")?;
        Ok(())
    } else {
        Err(Fail(EXIT_FAILURE, format!("{} violations", report.violations.len())))
    }
}

/// Runs the CLI and returns the process exit status.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    if let Some(n) = cli.jobs {
        if n == 0 {
            let _ = writeln!(err, "error: --jobs must be at least 1");
            return EXIT_USAGE;
        }
        // Fails only if the global pool already exists, which keeps its size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = match &cli.command {
        Command::Synth(a) => synth(a, out, err),
        Command::Render(a) => render(a, out, err),
        Command::Describe(a) => describe(a, out, err),
        Command::Eval(a) => eval(a, out, err),
        Command::Stats(a) => stats(a, out, err),
        Command::Validate(a) => validate(a, out, err),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Fail(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

pub fn run() -> i32 {
    run_with(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr())
}
