//! Command-line front end: `detect`, `synth`, `eval` and `bench`.
//!
//! Every output is written through serde with a fixed field order and no
//! timestamps, so two runs with the same inputs and seed produce the same
//! bytes. Only `bench` records wall time.

mod svg;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{evm_detect, rht_detect, EvmConfig, RhtConfig};
use crate::csa::{self, ArcRecord, ArcSummary, CsaConfig};
use crate::error::{Error, Result};
use crate::eval::{
    circles_of, compute_metrics, detected_mask, match_primitives, random_scene_spec, synth_scene, GroundTruth,
    MetricsReport, SceneSpec, Tolerance,
};
use crate::raster::{load_binary, save_binary, BinaryImage, Pixel};

pub use svg::overlay_svg;

/// Environment variable capping the worker threads of `bench` (and of the
/// EVM scoring stage).
pub const THREADS_ENV: &str = "ARCSCAN_THREADS";

#[derive(Debug, Parser)]
#[command(name = "arcscan", version, about = "Detect circles and circular arcs in binary raster images")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect arcs in an image and write them as JSON.
    Detect(DetectArgs),
    /// Draw a scene and write its image and ground truth.
    Synth(SynthArgs),
    /// Score a detection file against a ground truth.
    Eval(EvalArgs),
    /// Run every detector on a list of scenes and write a CSV of times and scores.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Csa,
    Rht,
    Evm,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Csa => "csa",
            Algorithm::Rht => "rht",
            Algorithm::Evm => "evm",
        }
    }
}

/// Detector parameters shared by `detect` and `bench`.
#[derive(Clone, Debug, Args)]
pub struct DetectorArgs {
    /// Area-deviation threshold of the straightness test
    #[arg(long, default_value_t = 2)]
    pub tau_h: i64,
    /// Shortest curve, in pixels, tested for circularity
    #[arg(long, default_value_t = 7)]
    pub tau_c: usize,
    /// Allowed chord-angle spread over the central region, in radians
    #[arg(long, default_value_t = std::f64::consts::PI / 18.0)]
    pub delta_phi: f64,
    /// Most circumcircle triples voted per arc in the Hough refinement
    #[arg(long, default_value_t = 2000)]
    pub budget: usize,
    /// RHT: score at which a parameter-set entry becomes a candidate (2 or 3)
    #[arg(long, default_value_t = 2)]
    pub nt: u32,
    /// RHT: share of the circumference a candidate must cover
    #[arg(long, default_value_t = 0.46)]
    pub tr: f64,
    /// RHT: sampling steps
    #[arg(long, default_value_t = 100_000)]
    pub max_steps: usize,
    /// EVM: existing-rate threshold
    #[arg(long, default_value_t = 0.5)]
    pub te: f64,
    /// EVM: number of sampled object pixels
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Random seed of the RHT and EVM sampling
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl DetectorArgs {
    pub fn csa(&self) -> CsaConfig {
        CsaConfig {
            tau_h: self.tau_h,
            tau_c: self.tau_c,
            delta_phi: self.delta_phi,
            hough_triple_budget: self.budget,
            ..CsaConfig::default()
        }
    }

    pub fn rht(&self) -> RhtConfig {
        RhtConfig {
            n_t: self.nt,
            t_r: self.tr,
            max_steps: self.max_steps,
            rng_seed: self.seed,
            ..RhtConfig::default()
        }
    }

    pub fn evm(&self) -> EvmConfig {
        EvmConfig {
            t_e: self.te,
            sample_count: self.samples,
            rng_seed: self.seed,
            ..EvmConfig::default()
        }
    }

    pub fn run(&self, algo: Algorithm, img: &BinaryImage) -> Result<Vec<ArcRecord>> {
        match algo {
            Algorithm::Csa => csa::detect(img, &self.csa()),
            Algorithm::Rht => rht_detect(img, &self.rht()),
            Algorithm::Evm => evm_detect(img, &self.evm()),
        }
    }
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// Detector
    #[arg(long, value_enum, default_value_t = Algorithm::Csa)]
    pub algo: Algorithm,
    /// Input image (PNG, PGM or PBM)
    #[arg(long = "in", value_name = "IMAGE")]
    pub input: PathBuf,
    /// Output arcs JSON [default: standard output]
    #[arg(long, value_name = "JSON")]
    pub out: Option<PathBuf>,
    /// SVG overlay of the detections on the input [default: none]
    #[arg(long, value_name = "SVG")]
    pub overlay: Option<PathBuf>,
    /// Image of the pixels claimed by the detections [default: none]
    #[arg(long, value_name = "IMAGE")]
    pub mask: Option<PathBuf>,
    /// Gray level below which a pixel is an object pixel
    #[arg(long, default_value_t = 128)]
    pub threshold: u8,
    #[command(flatten)]
    pub detector: DetectorArgs,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Scene description JSON [default: a random scene drawn from --seed]
    #[arg(long, value_name = "JSON")]
    pub spec: Option<PathBuf>,
    /// Seed of the random scene
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Width of the random scene
    #[arg(long, default_value_t = 800)]
    pub width: usize,
    /// Height of the random scene
    #[arg(long, default_value_t = 800)]
    pub height: usize,
    /// Output image (PNG for .png, PBM otherwise)
    #[arg(long, value_name = "IMAGE")]
    pub out: PathBuf,
    /// Output ground-truth JSON; its masks are written next to it
    #[arg(long, value_name = "JSON")]
    pub truth: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Arcs JSON written by `detect`
    #[arg(long = "in", value_name = "JSON")]
    pub input: PathBuf,
    /// Ground-truth JSON written by `synth`
    #[arg(long, value_name = "JSON")]
    pub truth: PathBuf,
    /// Output report, CSV for .csv and JSON otherwise [default: standard output as JSON]
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Largest centre error of a match, in pixels
    #[arg(long, default_value_t = 2.0)]
    pub center_tol: f64,
    /// Largest radius error of a match, in pixels
    #[arg(long, default_value_t = 2.0)]
    pub radius_tol: f64,
    /// Largest radius error of a match as a share of the true radius, if larger
    #[arg(long, default_value_t = 0.02)]
    pub radius_rel_tol: f64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Scene description JSON files [default: random scenes drawn from --seed]
    #[arg(long = "in", value_name = "JSON", num_args = 1..)]
    pub input: Vec<PathBuf>,
    /// Number of random scenes when no files are given
    #[arg(long, default_value_t = 5)]
    pub scenes: u64,
    /// Detectors to run, comma separated
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Algorithm::Csa, Algorithm::Rht, Algorithm::Evm])]
    pub algo: Vec<Algorithm>,
    /// Output CSV [default: standard output]
    #[arg(long, value_name = "CSV")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub detector: DetectorArgs,
}

/// One detected arc as written by `detect`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectedArc {
    #[serde(flatten)]
    pub summary: ArcSummary,
    /// Input pixels claimed by the arc.
    pub pixels: Vec<Pixel>,
}

/// The file written by `detect` and read by `eval`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionFile {
    pub algo: Algorithm,
    pub width: usize,
    pub height: usize,
    pub arcs: Vec<DetectedArc>,
}

impl DetectionFile {
    pub fn new(algo: Algorithm, width: usize, height: usize, arcs: &[ArcRecord]) -> Self {
        DetectionFile {
            algo,
            width,
            height,
            arcs: arcs
                .iter()
                .map(|a| DetectedArc {
                    summary: a.summary(),
                    pixels: a.absorbed.clone(),
                })
                .collect(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Union of the claimed pixels.
    pub fn mask(&self) -> Result<BinaryImage> {
        let mut img = BinaryImage::new(self.width, self.height);
        for p in self.arcs.iter().flat_map(|a| &a.pixels) {
            if !img.in_bounds(*p) {
                return Err(Error::OutOfBounds(format!(
                    "pixel ({}, {}) outside the {}x{} detection canvas",
                    p.x, p.y, self.width, self.height
                )));
            }
            img.set(*p, true);
        }
        Ok(img)
    }
}

/// What `eval` writes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub metrics: MetricsReport,
    pub matched: usize,
    pub missed: usize,
    pub spurious: usize,
}

impl EvalReport {
    pub const CSV_HEADER: &'static str = "n_c,n_g,n_p,n_fa,n_fr,E1,E2,AD,matched,missed,spurious";

    pub fn csv(&self) -> String {
        format!(
            "{}\n{},{},{},{}\n",
            Self::CSV_HEADER,
            self.metrics.csv_row(),
            self.matched,
            self.missed,
            self.spurious
        )
    }
}

/// Bench CSV columns.
pub const BENCH_HEADER: &str = "scene,algo,seed,n_pixels,time_s,E1,E2,AD,matched,missed,spurious";

impl RunConfig {
    /// Parses `argv`, program name first.
    pub fn from_args<I, T>(argv: I) -> std::result::Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        Self::try_parse_from(argv)
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit status: 0 on success, 1 on a failed command, 2 on bad
/// arguments. Diagnostics go to standard error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    cap_threads();
    match execute(&cfg) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("arcscan: {e}");
            1
        }
    }
}

fn cap_threads() {
    let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) else {
        return;
    };
    if n > 0 {
        // fails only when the pool already exists (a second run in-process)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

pub fn execute(cfg: &RunConfig) -> Result<()> {
    match &cfg.command {
        Command::Detect(a) => detect_cmd(a),
        Command::Synth(a) => synth_cmd(a),
        Command::Eval(a) => eval_cmd(a),
        Command::Bench(a) => bench_cmd(a),
    }
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

fn detect_cmd(a: &DetectArgs) -> Result<()> {
    let img = load_binary(&a.input, a.threshold)?;
    let arcs = a.detector.run(a.algo, &img)?;
    let file = DetectionFile::new(a.algo, img.width(), img.height(), &arcs);
    write_text(a.out.as_deref(), &to_json(&file))?;
    if let Some(p) = &a.overlay {
        fs::write(p, overlay_svg(&img, &arcs)).map_err(|e| Error::io(p, e))?;
    }
    if let Some(p) = &a.mask {
        save_binary(&detected_mask(&arcs, img.width(), img.height()), p)?;
    }
    Ok(())
}

fn scene_spec(spec: Option<&Path>, seed: u64, width: usize, height: usize) -> Result<SceneSpec> {
    match spec {
        Some(p) => read_json(p),
        None => Ok(random_scene_spec(seed, width, height)),
    }
}

fn synth_cmd(a: &SynthArgs) -> Result<()> {
    let spec = scene_spec(a.spec.as_deref(), a.seed, a.width, a.height)?;
    let (img, truth) = synth_scene(&spec)?;
    save_binary(&img, &a.out)?;
    truth.save(&a.truth)
}

fn eval_cmd(a: &EvalArgs) -> Result<()> {
    let det = DetectionFile::load(&a.input)?;
    let truth = GroundTruth::load(&a.truth)?;
    let tol = Tolerance {
        center: a.center_tol,
        radius: a.radius_tol,
        radius_rel: a.radius_rel_tol,
    };
    let report = evaluate(&det, &truth, &tol)?;
    let is_csv = a
        .out
        .as_deref()
        .and_then(Path::extension)
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let text = if is_csv { report.csv() } else { to_json(&report) };
    write_text(a.out.as_deref(), &text)
}

/// Scores a detection file against a ground truth.
pub fn evaluate(det: &DetectionFile, truth: &GroundTruth, tol: &Tolerance) -> Result<EvalReport> {
    let mask = det.mask()?;
    let metrics = compute_metrics(&mask, truth)?;
    let circles: Vec<_> = det.arcs.iter().map(|a| a.summary.circle()).collect();
    let m = match_primitives(&circles, &truth.primitives, tol);
    Ok(EvalReport {
        metrics,
        matched: m.matched,
        missed: m.missed,
        spurious: m.spurious,
    })
}

struct BenchScene {
    name: String,
    spec: SceneSpec,
}

fn bench_cmd(a: &BenchArgs) -> Result<()> {
    let scenes: Vec<BenchScene> = if a.input.is_empty() {
        (0..a.scenes)
            .map(|i| {
                let seed = a.detector.seed + i;
                BenchScene {
                    name: format!("seed{seed}"),
                    spec: random_scene_spec(seed, 800, 800),
                }
            })
            .collect()
    } else {
        a.input
            .iter()
            .map(|p| {
                Ok(BenchScene {
                    name: p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned()),
                    spec: read_json(p)?,
                })
            })
            .collect::<Result<_>>()?
    };
    let rows: Vec<Vec<String>> = scenes
        .par_iter()
        .map(|s| bench_scene(s, &a.algo, &a.detector))
        .collect::<Result<_>>()?;
    let mut text = String::from(BENCH_HEADER);
    text.push('\n');
    for row in rows.iter().flatten() {
        text.push_str(row);
        text.push('\n');
    }
    write_text(a.out.as_deref(), &text)
}

fn bench_scene(scene: &BenchScene, algos: &[Algorithm], det: &DetectorArgs) -> Result<Vec<String>> {
    let (img, truth) = synth_scene(&scene.spec)?;
    let tol = Tolerance {
        radius_rel: 0.02,
        ..Tolerance::default()
    };
    let mut rows = Vec::new();
    for &algo in algos {
        let t = Instant::now();
        let arcs = det.run(algo, &img)?;
        let time = t.elapsed().as_secs_f64();
        let metrics = compute_metrics(&detected_mask(&arcs, img.width(), img.height()), &truth)?;
        let m = match_primitives(&circles_of(&arcs), &truth.primitives, &tol);
        rows.push(format!(
            "{},{},{},{},{:.6},{},{:.3},{:.3},{},{},{}",
            scene.name,
            algo.name(),
            det.seed,
            img.count(),
            time,
            crate::eval::fmt_e1(metrics.e1),
            metrics.e2,
            metrics.ad,
            m.matched,
            m.missed,
            m.spurious
        ));
    }
    Ok(rows)
}
