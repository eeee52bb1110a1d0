//! `hfsd`: segment scans, evaluate on Semantic KITTI, benchmark, generate
//! synthetic scenes and export PLY visualizations.
//!
//! Exit codes: 0 success, 2 I/O or data error, 64 usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hfsd_core::eval::{benchmark, evaluate_dataset};
use hfsd_core::io_kitti::{export_ply, read_point_cloud, write_prediction};
use hfsd_core::synth::{generate, write_scene, SceneSpec};
use hfsd_core::{load_config, PointCloudF32, RunConfig, Segmenter, SegmenterF32, SpaceClass};
use rayon::prelude::*;

const EXIT_DATA: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "hfsd", version, about = "LiDAR free space detection from height change features")]
struct Cli {
    /// Print per-scan details.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Segment one scan or a directory of scans into .pred files.
    Segment(SegmentArgs),
    /// Score predictions against Semantic KITTI labels.
    Eval(EvalArgs),
    /// Measure single-threaded segmentation throughput.
    Bench(BenchArgs),
    /// Write a synthetic scene as a .bin/.label pair.
    Synth(SynthArgs),
    /// Write a PLY with classes and normals for one scan.
    Export(ExportArgs),
}

#[derive(Args)]
struct ConfigArg {
    /// JSON run configuration; defaults apply to missing keys.
    #[arg(long, value_name = "JSON")]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SegmentArgs {
    /// A .bin scan or a directory holding .bin scans.
    input: PathBuf,
    #[arg(short, long, value_name = "DIR")]
    out: PathBuf,
    /// Also write a colored PLY per scan.
    #[arg(long)]
    ply: bool,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    config: ConfigArg,
}

#[derive(Args)]
struct EvalArgs {
    /// Dataset root containing `sequences/`.
    #[arg(long)]
    root: PathBuf,
    /// Comma-separated sequence ids, e.g. `08` or `00,01,02`.
    #[arg(long, value_delimiter = ',', required = true)]
    sequences: Vec<String>,
    /// Evaluate at most this many scans.
    #[arg(long)]
    limit: Option<usize>,
    /// Where to write the JSON report.
    #[arg(short, long, default_value = "eval_report.json")]
    out: PathBuf,
    #[command(flatten)]
    config: ConfigArg,
}

#[derive(Args)]
struct BenchArgs {
    /// Scans or directories of scans to time.
    inputs: Vec<PathBuf>,
    /// Time this many synthetic 64x1024 scenes instead of (or besides) files.
    #[arg(long, value_name = "N")]
    synthetic: Option<usize>,
    /// Timed passes over the scan set.
    #[arg(long, default_value_t = 1)]
    repeat: usize,
    /// Untimed runs before sampling; defaults to the config value.
    #[arg(long)]
    warmup: Option<usize>,
    #[command(flatten)]
    config: ConfigArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum SceneArg {
    Plane,
    Ramp,
    Boxes,
    Wall,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum, default_value = "plane")]
    scene: SceneArg,
    #[arg(long, default_value_t = 1.73)]
    sensor_height: f64,
    /// Ramp rise over run.
    #[arg(long, default_value_t = 0.12)]
    grade: f64,
    /// Wall distance ahead of the sensor, meters.
    #[arg(long, default_value_t = 10.0)]
    distance: f64,
    /// Radial noise standard deviation, meters.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// File stem; defaults to the scene name.
    #[arg(long)]
    name: Option<String>,
}

#[derive(Args)]
struct ExportArgs {
    input: PathBuf,
    /// Output PLY; defaults to the input path with a .ply extension.
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArg,
}

enum Failure {
    Usage(String),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

impl From<hfsd_core::Error> for Failure {
    fn from(e: hfsd_core::Error) -> Self {
        Failure::Data(e.into())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Segment(a) => cmd_segment(a, cli.verbose),
        Command::Eval(a) => cmd_eval(a, cli.verbose),
        Command::Bench(a) => cmd_bench(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Export(a) => cmd_export(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_DATA)
        }
    }
}

fn load(config: &ConfigArg) -> Result<RunConfig, Failure> {
    match &config.config {
        Some(p) => Ok(load_config(p)?),
        None => Ok(RunConfig::default()),
    }
}

/// Expands a file-or-directory argument into .bin paths, sorted.
fn collect_scans(input: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let meta = std::fs::metadata(input).with_context(|| format!("cannot read {}", input.display()))?;
    if !meta.is_dir() {
        return Ok(vec![input.to_path_buf()]);
    }
    let mut scans: Vec<PathBuf> = std::fs::read_dir(input)
        .with_context(|| format!("cannot list {}", input.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "bin"))
        .collect();
    scans.sort();
    if scans.is_empty() {
        return Err(anyhow!("no .bin scans in {}", input.display()));
    }
    Ok(scans)
}

fn stem(path: &Path) -> String {
    path.file_stem().unwrap_or_default().to_string_lossy().into_owned()
}

struct ScanSummary {
    name: String,
    free: usize,
    off_ground: usize,
    invalid: usize,
    ms: f64,
    written: Vec<PathBuf>,
}

fn segment_one(path: &Path, out: &Path, ply: bool, seg: &SegmenterF32, written: &mut Vec<PathBuf>) -> anyhow::Result<ScanSummary> {
    let cloud: PointCloudF32 = read_point_cloud(path)?;
    let start = Instant::now();
    let result = seg.segment(&cloud);
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let name = stem(path);

    let per_record = cloud.expand_to_records(&result.point_labels, SpaceClass::Invalid)?;
    let pred = out.join(format!("{name}.pred"));
    written.push(pred.clone());
    write_prediction(&pred, &per_record)?;
    if ply {
        let p = out.join(format!("{name}.ply"));
        written.push(p.clone());
        export_ply(&p, &cloud, &result, None)?;
    }
    Ok(ScanSummary {
        name,
        free: result.count(SpaceClass::Free),
        off_ground: result.count(SpaceClass::OffGround),
        invalid: result.count(SpaceClass::Invalid) + cloud.dropped_records.len(),
        ms,
        written: written.clone(),
    })
}

fn cmd_segment(a: SegmentArgs, verbose: u8) -> CmdResult {
    if a.threads == Some(0) {
        return Err(Failure::Usage("--threads must be at least 1".into()));
    }
    let cfg = load(&a.config)?;
    let scans = collect_scans(&a.input)?;
    std::fs::create_dir_all(&a.out).with_context(|| format!("cannot create {}", a.out.display()))?;
    let seg = SegmenterF32::new(&cfg)?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = a.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| anyhow!("thread pool: {e}"))?;
    let results: Vec<(PathBuf, Vec<PathBuf>, anyhow::Result<ScanSummary>)> = pool.install(|| {
        scans
            .par_iter()
            .map(|p| {
                let mut written = Vec::new();
                let r = segment_one(p, &a.out, a.ply, &seg, &mut written);
                (p.clone(), written, r)
            })
            .collect()
    });

    if let Some((path, _, Err(e))) = results.iter().find(|r| r.2.is_err()) {
        for (_, written, _) in &results {
            for f in written {
                let _ = std::fs::remove_file(f);
            }
        }
        return Err(Failure::Data(anyhow!("{}: {e:#}", path.display())));
    }

    let (mut free, mut og, mut invalid, mut ms) = (0, 0, 0, 0.0);
    for (_, _, r) in &results {
        let s = r.as_ref().expect("errors handled above");
        if verbose > 0 || results.len() == 1 {
            println!("{}: free {}  off-ground {}  invalid {}  {:.2} ms", s.name, s.free, s.off_ground, s.invalid, s.ms);
        }
        if verbose > 1 {
            for f in &s.written {
                println!("  wrote {}", f.display());
            }
        }
        free += s.free;
        og += s.off_ground;
        invalid += s.invalid;
        ms += s.ms;
    }
    if results.len() > 1 {
        println!("{} scans: free {free}  off-ground {og}  invalid {invalid}  {:.2} ms/scan", results.len(), ms / results.len() as f64);
    }
    Ok(())
}

fn cmd_eval(a: EvalArgs, verbose: u8) -> CmdResult {
    let sequences: Vec<String> = a.sequences.into_iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    if sequences.is_empty() {
        return Err(Failure::Usage("--sequences needs at least one sequence id".into()));
    }
    if a.limit == Some(0) {
        return Err(Failure::Usage("--limit must be at least 1".into()));
    }
    let cfg = load(&a.config)?;
    let report = evaluate_dataset::<f32>(&a.root, &sequences, &cfg, a.limit)?;
    std::fs::write(&a.out, report.to_json()).with_context(|| format!("cannot write {}", a.out.display()))?;
    if verbose > 0 {
        print!("{}", report.to_text());
    } else {
        let s = report.aggregate.scores;
        println!(
            "scans {}  mIoU {:.2}%  IoU free {:.2}%  IoU occupied {:.2}%  {:.2} Hz",
            report.scan_count,
            100.0 * s.miou,
            100.0 * s.iou_free,
            100.0 * s.iou_occupied,
            report.timing.mean_hz
        );
    }
    println!("report written to {}", a.out.display());
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> CmdResult {
    if a.repeat == 0 {
        return Err(Failure::Usage("--repeat must be at least 1".into()));
    }
    let cfg = load(&a.config)?;
    let mut scans: Vec<PointCloudF32> = Vec::new();
    for input in &a.inputs {
        for p in collect_scans(input)? {
            scans.push(read_point_cloud(&p)?);
        }
    }
    let model = cfg.projection_model::<f64>()?;
    for seed in 0..a.synthetic.unwrap_or(0) as u64 {
        let spec = SceneSpec::with_default_boxes(cfg.translation[2]).with_model(model).with_noise(0.02, seed);
        scans.push(generate::<f32>(&spec)?.0);
    }
    if scans.is_empty() {
        return Err(Failure::Usage("no scans: pass input paths or --synthetic N".into()));
    }
    let seg = SegmenterF32::new(&cfg)?;
    let warmup = a.warmup.unwrap_or(cfg.warmup_scans);
    let report = benchmark(&scans, &seg, warmup, a.repeat)?;
    println!("samples {}  ({} scans x {} repeats, {} warm-up)", report.samples.len(), scans.len(), a.repeat, warmup);
    println!("mean   {:8.2} Hz  ({:.3} ms)", report.mean_hz, report.mean_seconds * 1e3);
    println!("median {:8.2} Hz  ({:.3} ms)", report.median_hz, report.median_seconds * 1e3);
    let st = report.stages;
    println!("stages ms: projection {:.3}  normals {:.3}  filter {:.3}", st.projection * 1e3, st.normals * 1e3, st.filter * 1e3);
    Ok(())
}

fn cmd_synth(a: SynthArgs) -> CmdResult {
    let (spec, default_name) = match a.scene {
        SceneArg::Plane => (SceneSpec::plane(a.sensor_height), "plane"),
        SceneArg::Ramp => (SceneSpec::ramp(a.sensor_height, a.grade), "ramp"),
        SceneArg::Boxes => (SceneSpec::with_default_boxes(a.sensor_height), "boxes"),
        SceneArg::Wall => (SceneSpec::wall(a.sensor_height, a.distance), "wall"),
    };
    let spec = spec.with_noise(a.noise, a.seed);
    spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let (cloud, gt) = generate::<f32>(&spec)?;
    std::fs::create_dir_all(&a.out).with_context(|| format!("cannot create {}", a.out.display()))?;
    let name = a.name.unwrap_or_else(|| default_name.to_string());
    let (bin, label) = write_scene(a.out.join(&name), &cloud, &gt)?;
    let ground = gt.is_ground.iter().filter(|&&g| g).count();
    println!("{} points: {} ground, {} obstacle", cloud.len(), ground, cloud.len() - ground);
    println!("wrote {} and {}", bin.display(), label.display());
    Ok(())
}

fn cmd_export(a: ExportArgs) -> CmdResult {
    let cfg = load(&a.config)?;
    let cloud: PointCloudF32 = read_point_cloud(&a.input)?;
    let seg = Segmenter::<f32>::new(&cfg)?;
    let (result, inter, _) = seg.segment_detailed(&cloud);
    // Normals come out in the vehicle frame; write the points there too.
    let transform = cfg.transform::<f32>()?;
    let mut vehicle = cloud.clone();
    for p in &mut vehicle.points {
        p.position = transform.apply(p.position);
    }
    let out = a.out.unwrap_or_else(|| a.input.with_extension("ply"));
    export_ply(&out, &vehicle, &result, Some(&inter.normals))?;
    println!("wrote {} ({} points, {} free)", out.display(), cloud.len(), result.count(SpaceClass::Free));
    Ok(())
}
