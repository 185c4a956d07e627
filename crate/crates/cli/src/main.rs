mod config;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pcfuse::camera::ViewRig;
use pcfuse::completion::{Completer, CompletionMode, ExternalCompleter, FillCompleter, IdentityCompleter};
use pcfuse::dataset::{input_camera_at, random_input_camera, render_gt_views, render_nocs_image, sample_mesh, GT_POINTS};
use pcfuse::eval::eval_report;
use pcfuse::fusion::{any_texture, FusionConfig};
use pcfuse::io::manifest::parse_vec3;
use pcfuse::io::{
    read_nocs, read_obj, read_ply, read_texture, read_view_set, write_ply, write_raster, write_texture, write_view_set,
    Manifest, Raster,
};
use pcfuse::pipeline::{fuse_completed, reconstruct};
use pcfuse::projection::{project_view, ProjectionConfig, ViewSet, GT_UPSAMPLE, PIPELINE_UPSAMPLE};
use pcfuse::ErrorClass;

use config::Config;

/// Dense colored point-cloud reconstruction from object-coordinate images.
#[derive(Debug, Parser)]
#[command(name = "pcfuse", version)]
struct Cli {
    /// Worker threads (default: all cores). Never changes results.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// `key = value` file with defaults for any option below.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a mesh and render ground-truth views plus one input view.
    Render(RenderArgs),
    /// Reconstruct a cloud from an RGB image and its object-coordinate image.
    Reconstruct(ReconstructArgs),
    /// Fuse a directory of (completed) views into one cloud.
    Fuse(FuseArgs),
    /// Compare a predicted cloud with ground truth.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
struct RenderArgs {
    #[arg(long)]
    mesh: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Surface samples in the ground-truth cloud [default: 100000].
    #[arg(long)]
    points: Option<usize>,
    /// Sampling seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Sub-pixel buffer size for ground-truth views [default: 50].
    #[arg(long)]
    upsample: Option<usize>,
    /// Input camera position `x,y,z`; it looks at the origin.
    #[arg(long, conflicts_with = "random_view")]
    input_view: Option<String>,
    /// Seed for a random input camera on the rig sphere [default: --seed].
    #[arg(long)]
    random_view: Option<u64>,
}

#[derive(Debug, Args)]
struct FusionArgs {
    /// Skip multi-view voting.
    #[arg(long)]
    no_voting: bool,
    /// Skip radius outlier removal.
    #[arg(long)]
    no_radius_filter: bool,
    /// Votes needed to keep a point [default: 5].
    #[arg(long)]
    vote_threshold: Option<usize>,
    /// Voting depth tolerance in object units [default: 0.01].
    #[arg(long)]
    vote_tol: Option<f64>,
    /// Outlier search radius [default: 0.012].
    #[arg(long)]
    radius: Option<f64>,
    /// Neighbors needed within the radius [default: 6].
    #[arg(long)]
    min_neighbors: Option<usize>,
}

#[derive(Debug, Args)]
struct ReconstructArgs {
    #[arg(long)]
    rgb: PathBuf,
    #[arg(long)]
    nocs: PathBuf,
    /// `identity`, `fill[:ITERS]` or `external:DIR` [default: identity].
    #[arg(long)]
    completer: Option<String>,
    /// `texture-depth` or `depth-only` [default: texture-depth].
    #[arg(long)]
    mode: Option<String>,
    /// Sub-pixel buffer size for the partial views [default: 5].
    #[arg(long)]
    upsample: Option<usize>,
    /// Rig manifest; the default rig is used otherwise.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    fusion: FusionArgs,
}

#[derive(Debug, Args)]
struct FuseArgs {
    #[arg(long)]
    views: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// `auto`, `mtdcn` (joint texture-depth) or `mdcn` (depth only) [default: auto].
    #[arg(long)]
    mode: Option<String>,
    #[command(flatten)]
    fusion: FusionArgs,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    gt: PathBuf,
    /// Also report CD after ICP alignment.
    #[arg(long)]
    icp: bool,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    code: u8,
    msg: String,
}

impl CliError {
    pub fn input(msg: String) -> Self {
        CliError { code: 2, msg }
    }

    pub fn format(msg: String) -> Self {
        CliError { code: 3, msg }
    }

    fn from_core(what: &str, e: pcfuse::Error) -> Self {
        let code = match e.class() {
            ErrorClass::Input => 2,
            ErrorClass::Format => 3,
            ErrorClass::Numeric => 4,
        };
        CliError {
            code,
            msg: format!("{what}: {e}"),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

type CliResult<T> = Result<T, CliError>;

trait Context<T> {
    fn context(self, what: impl FnOnce() -> String) -> CliResult<T>;
}

impl<T> Context<T> for pcfuse::Result<T> {
    fn context(self, what: impl FnOnce() -> String) -> CliResult<T> {
        self.map_err(|e| CliError::from_core(&what(), e))
    }
}

fn fusion_config(args: &FusionArgs, cfg: &Config) -> CliResult<FusionConfig> {
    let d = FusionConfig::default();
    let fusion = FusionConfig {
        vote_threshold: cfg.pick(args.vote_threshold, "vote_threshold", d.vote_threshold)?,
        vote_tolerance: cfg.pick(args.vote_tol, "vote_tol", d.vote_tolerance)?,
        radius: cfg.pick(args.radius, "radius", d.radius)?,
        min_neighbors: cfg.pick(args.min_neighbors, "min_neighbors", d.min_neighbors)?,
        voting: cfg.switch(args.no_voting, false, "voting", d.voting)?,
        radius_filter: cfg.switch(args.no_radius_filter, false, "radius_filter", d.radius_filter)?,
    };
    fusion.validate().context(|| "fusion options".into())?;
    Ok(fusion)
}

fn create_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::input(format!("cannot create {}: {e}", dir.display())))
}

fn cmd_render(args: &RenderArgs, cfg: &Config) -> CliResult<()> {
    let points = cfg.pick(args.points, "points", GT_POINTS)?;
    let seed = cfg.pick(args.seed, "seed", 0u64)?;
    let upsample = cfg.pick(args.upsample, "gt_upsample", GT_UPSAMPLE)?;
    let projection = ProjectionConfig::new(upsample).context(|| "render".into())?;

    let mut mesh = read_obj(&args.mesh).context(|| format!("cannot read mesh {}", args.mesh.display()))?;
    mesh.normalize(0.5);
    mesh.color_by_position();
    let gt = sample_mesh(&mesh, points, seed).context(|| "cannot sample mesh".into())?;

    let rig = ViewRig::default();
    let intrinsics = rig.intrinsics();
    let input_view = match &args.input_view {
        Some(s) => Some(s.clone()),
        None => cfg.get::<String>("input_view")?,
    };
    let camera = match input_view {
        Some(s) => {
            let eye = parse_vec3(&s).context(|| "--input-view".into())?;
            input_camera_at(&eye, intrinsics).context(|| "--input-view".into())?
        }
        None => {
            let view_seed = cfg.pick(args.random_view, "random_view", seed)?;
            random_input_camera(view_seed, rig.distance, intrinsics).context(|| "random input view".into())?
        }
    };

    let views = render_gt_views(&gt, &rig, upsample).context(|| "render".into())?;
    let nocs = render_nocs_image(&gt, &camera, upsample).context(|| "render".into())?;
    let rgb = project_view(&gt, &camera, &projection).map.texture;

    let mut manifest = Manifest::new(&rig, upsample);
    manifest.input_eye = Some(camera.pose.center());
    write_view_set(&views, &manifest, &args.out).context(|| format!("cannot write {}", args.out.display()))?;
    let out = &args.out;
    write_raster(&Raster::Nocs(nocs), out.join("nocs.fmap")).context(|| "cannot write nocs".into())?;
    write_texture(&rgb, out.join("rgb.png")).context(|| "cannot write rgb".into())?;
    write_ply(&gt, out.join("gt_cloud.ply")).context(|| "cannot write gt cloud".into())?;
    log::info!("rendered {} points into {}", gt.len(), out.display());
    Ok(())
}

fn parse_mode(s: &str) -> CliResult<CompletionMode> {
    match s {
        "texture-depth" => Ok(CompletionMode::TextureDepth),
        "depth-only" => Ok(CompletionMode::DepthOnly),
        other => Err(CliError::input(format!(
            "unknown mode `{other}` (expected texture-depth or depth-only)"
        ))),
    }
}

const DEFAULT_FILL_ITERATIONS: usize = 8;

fn parse_completer(selector: &str, mode: CompletionMode) -> CliResult<Box<dyn Completer>> {
    if selector == "identity" {
        return Ok(Box::new(IdentityCompleter));
    }
    if selector == "fill" {
        return Ok(Box::new(FillCompleter {
            iterations: DEFAULT_FILL_ITERATIONS,
            mode,
        }));
    }
    if let Some(n) = selector.strip_prefix("fill:") {
        let iterations = n
            .parse()
            .map_err(|_| CliError::input(format!("bad fill iteration count `{n}`")))?;
        return Ok(Box::new(FillCompleter { iterations, mode }));
    }
    if let Some(dir) = selector.strip_prefix("external:") {
        return Ok(Box::new(ExternalCompleter {
            dir: PathBuf::from(dir),
            mode,
        }));
    }
    Err(CliError::input(format!(
        "unknown completer `{selector}` (expected identity, fill[:N] or external:DIR)"
    )))
}

fn rig_from(manifest: Option<&Path>) -> CliResult<ViewRig> {
    match manifest {
        None => Ok(ViewRig::default()),
        Some(p) => Manifest::read(p)
            .and_then(|m| m.rig())
            .context(|| format!("cannot read manifest {}", p.display())),
    }
}

fn cmd_reconstruct(args: &ReconstructArgs, cfg: &Config) -> CliResult<()> {
    let mode_name = match &args.mode {
        Some(m) => m.clone(),
        None => cfg.get("completion_mode")?.unwrap_or_else(|| "texture-depth".into()),
    };
    let mode = parse_mode(&mode_name)?;
    let completer_sel = match &args.completer {
        Some(c) => c.clone(),
        None => cfg.get("completer")?.unwrap_or_else(|| "identity".into()),
    };
    let completer = parse_completer(&completer_sel, mode)?;
    let upsample = cfg.pick(args.upsample, "upsample", PIPELINE_UPSAMPLE)?;
    let projection = ProjectionConfig::new(upsample).context(|| "reconstruct".into())?;
    let fusion = fusion_config(&args.fusion, cfg)?;
    let rig = rig_from(args.manifest.as_deref())?;

    let nocs = read_nocs(&args.nocs).context(|| "cannot read nocs".into())?;
    let rgb = read_texture(&args.rgb).context(|| "cannot read rgb".into())?;
    let out = reconstruct(&rgb, &nocs, completer.as_ref(), &rig, &projection, &fusion)
        .context(|| format!("reconstruct with {}", completer.info().name))?;

    create_dir(&args.out)?;
    let manifest = Manifest::new(&rig, upsample);
    let write = |cloud, name: &str| write_ply(cloud, args.out.join(name)).context(|| format!("cannot write {name}"));
    write(&out.partial, "partial.ply")?;
    write_view_set(&out.views, &manifest, args.out.join("views")).context(|| "cannot write views".into())?;
    write_view_set(&out.completed, &manifest, args.out.join("completed"))
        .context(|| "cannot write completed views".into())?;
    write(&out.fused.cloud, "fused.ply")?;
    if let Some(shape) = &out.depth_only {
        write(shape, "fused_sd.ply")?;
    }
    log::info!(
        "{} partial points, {} fused points",
        out.partial.len(),
        out.fused.len()
    );
    Ok(())
}

fn cmd_fuse(args: &FuseArgs, cfg: &Config) -> CliResult<()> {
    let fusion = fusion_config(&args.fusion, cfg)?;
    let mode_name = match &args.mode {
        Some(m) => m.clone(),
        None => cfg.get("fuse_mode")?.unwrap_or_else(|| "auto".into()),
    };
    let (views, manifest) = read_view_set(&args.views).context(|| format!("cannot read views {}", args.views.display()))?;
    let rig = manifest.rig().context(|| "manifest".into())?;
    let mode = match mode_name.as_str() {
        "mtdcn" => CompletionMode::TextureDepth,
        "mdcn" => CompletionMode::DepthOnly,
        "auto" => auto_mode(&views),
        other => {
            return Err(CliError::input(format!(
                "unknown fuse mode `{other}` (expected auto, mtdcn or mdcn)"
            )))
        }
    };
    let (fused, _) = fuse_completed(&views, mode, &rig, &fusion).context(|| "fuse".into())?;
    write_ply(&fused.cloud, &args.out).context(|| format!("cannot write {}", args.out.display()))?;
    log::info!("fused {} points", fused.len());
    Ok(())
}

/// Joint fusion when every view's texture matches its depth, depth-only
/// fusion otherwise.
fn auto_mode(views: &ViewSet) -> CompletionMode {
    let textures: Vec<_> = views.views.iter().map(|v| v.texture.clone()).collect();
    if any_texture(&textures) && views.views.iter().all(|v| v.mask_mismatches() == 0) {
        CompletionMode::TextureDepth
    } else {
        CompletionMode::DepthOnly
    }
}

fn cmd_eval(args: &EvalArgs, cfg: &Config) -> CliResult<()> {
    let icp = cfg.switch(args.icp, true, "icp", false)?;
    let json = cfg.switch(args.json, true, "json", false)?;
    let pred = read_ply(&args.pred).context(|| format!("cannot read {}", args.pred.display()))?;
    let gt = read_ply(&args.gt).context(|| format!("cannot read {}", args.gt.display()))?;
    let report = eval_report(&pred, &gt, icp).context(|| "eval".into())?;
    if json {
        println!("{}", serde_json::to_string(&report).expect("report serializes"));
    } else {
        println!("cd {:.6}", report.cd);
        if let (Some(after), Some(rel)) = (report.cd_after_icp, report.relative_improvement) {
            println!("cd_after_icp {after:.6}");
            println!("relative_improvement {rel:.6}");
        }
        println!("points {} vs {}", report.pred_points, report.gt_points);
    }
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(threads) = cli.threads.or(cfg.get("threads")?) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::input(format!("cannot start {threads} threads: {e}")))?;
    }
    match &cli.command {
        Command::Render(a) => cmd_render(a, &cfg),
        Command::Reconstruct(a) => cmd_reconstruct(a, &cfg),
        Command::Fuse(a) => cmd_fuse(a, &cfg),
        Command::Eval(a) => cmd_eval(a, &cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pcfuse: {e}");
            ExitCode::from(e.code)
        }
    }
}
