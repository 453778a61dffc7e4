//! End-to-end runs: synthesize, estimate, deconvolve, score.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::deconv::inverse_filter;
use crate::error::{Error, Result, Stage};
use crate::estimate::{estimate_kernel, EstimationConfig, KernelEstimate, LengthAggregate};
use crate::kernel::{
    add_noise, angle_distance, blur, make_psf, render_plate_with, Boundary, KernelParams, NoiseSpec, PlateStyle,
};
use crate::raster::{load_image, save_image, Image};

/// Peak signal-to-noise ratio in dB; identical images give `Infinite`,
/// serialized as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Psnr {
    Finite(f64),
    Infinite,
}

impl Psnr {
    pub fn db(self) -> f64 {
        match self {
            Psnr::Finite(v) => v,
            Psnr::Infinite => f64::INFINITY,
        }
    }
}

impl std::fmt::Display for Psnr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Psnr::Finite(v) => write!(f, "{v}"),
            Psnr::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Psnr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Psnr::Finite(v) => s.serialize_f64(*v),
            Psnr::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Psnr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Psnr, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Psnr::Finite(v)),
            Raw::Str(s) if s == "inf" => Ok(Psnr::Infinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad psnr {s:?}"))),
        }
    }
}

/// `10 log10(1 / MSE)` over all channels, samples taken as-is in `[0, 1]` units.
pub fn psnr(reference: &Image, candidate: &Image) -> Result<Psnr> {
    if reference.width() != candidate.width()
        || reference.height() != candidate.height()
        || reference.channels() != candidate.channels()
    {
        return Err(Error::DimensionMismatch(format!(
            "reference {}x{}x{} vs candidate {}x{}x{}",
            reference.width(),
            reference.height(),
            reference.channels(),
            candidate.width(),
            candidate.height(),
            candidate.channels()
        )));
    }
    let mut sum = 0.0;
    for (a, b) in reference.planes().iter().zip(candidate.planes()) {
        for (x, y) in a.iter().zip(b) {
            sum += (x - y).powi(2);
        }
    }
    let mse = sum / (reference.len() * reference.channels()) as f64;
    Ok(if mse == 0.0 {
        Psnr::Infinite
    } else {
        Psnr::Finite(10.0 * (1.0 / mse).log10())
    })
}

/// 180-degree-periodic angle error in `[0, 90]`.
pub fn angle_error(estimated: f64, truth: f64) -> f64 {
    angle_distance(estimated, truth)
}

/// Wall-clock per stage, milliseconds. Informational only.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub load_ms: f64,
    pub angle_ms: f64,
    pub length_ms: f64,
    pub deconvolve_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerChannelEstimates {
    pub angles: Vec<Option<f64>>,
    pub lengths: Vec<Option<usize>>,
}

/// Report written next to every deblurred image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub status: String,
    pub input_path: String,
    pub ground_truth: Option<KernelParams>,
    pub estimated: KernelParams,
    pub angle_error: Option<f64>,
    pub length_error: Option<usize>,
    pub psnr_db: Option<Psnr>,
    pub per_channel_estimates: PerChannelEstimates,
    pub warnings: Vec<String>,
    pub config_echo: EstimationConfig,
    pub epsilon: f64,
    pub timings: Timings,
}

/// Report written when a deblur run fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureReport {
    pub status: String,
    pub input_path: String,
    pub stage: Option<Stage>,
    pub error: String,
    pub config_echo: EstimationConfig,
    pub epsilon: f64,
}

impl FailureReport {
    pub fn new(input: &Path, err: &Error, cfg: &EstimationConfig, epsilon: f64) -> FailureReport {
        FailureReport {
            status: "error".into(),
            input_path: input.display().to_string(),
            stage: err.stage(),
            error: err.root().to_string(),
            config_echo: cfg.clone(),
            epsilon,
        }
    }
}

/// Optional references for scoring a deblur run.
#[derive(Debug, Clone, Default)]
pub struct DeblurOptions {
    pub ground_truth: Option<KernelParams>,
    /// Sharp image to compute PSNR against.
    pub reference: Option<PathBuf>,
}

pub struct DeblurOutput {
    pub result: RunResult,
    pub estimate: KernelEstimate,
    pub image: Image,
}

impl DeblurOutput {
    /// Writes the restored image and the JSON report.
    pub fn save(&self, image_path: &Path, report_path: &Path) -> Result<()> {
        save_image(&self.image, image_path)?;
        write_json(report_path, &self.result)
    }
}

/// Estimate the kernel of `img` and inverse-filter with it.
pub fn deblur_image(img: &Image, cfg: &EstimationConfig, epsilon: f64) -> Result<(KernelEstimate, Image)> {
    let estimate = estimate_kernel(img, cfg)?;
    let psf = make_psf(estimate.params).map_err(|e| e.at(Stage::Deconvolve))?;
    let restored = inverse_filter(img, &psf, epsilon).map_err(|e| e.at(Stage::Deconvolve))?;
    Ok((estimate, restored))
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Load, estimate, build the PSF, inverse-filter. Nothing is written.
pub fn run_deblur(input: &Path, cfg: &EstimationConfig, epsilon: f64, opts: &DeblurOptions) -> Result<DeblurOutput> {
    cfg.validate()?;
    let start = Instant::now();
    let img = load_image(input).map_err(|e| e.at(Stage::Load))?;
    let reference = opts
        .reference
        .as_ref()
        .map(|p| load_image(p).map_err(|e| e.at(Stage::Load)))
        .transpose()?;
    let mut timings = Timings {
        load_ms: ms_since(start),
        ..Timings::default()
    };

    let t = Instant::now();
    let angle = crate::estimate::estimate_angle(&img, cfg).map_err(|e| e.at(Stage::Angle))?;
    timings.angle_ms = ms_since(t);

    let t = Instant::now();
    let length = crate::estimate::estimate_length(&img, angle.angle, cfg).map_err(|e| e.at(Stage::Length))?;
    timings.length_ms = ms_since(t);
    let params = KernelParams::new(angle.angle, length.length)?;

    let t = Instant::now();
    let psf = make_psf(params).map_err(|e| e.at(Stage::Deconvolve))?;
    let image = inverse_filter(&img, &psf, epsilon).map_err(|e| e.at(Stage::Deconvolve))?;
    timings.deconvolve_ms = ms_since(t);

    let psnr_db = reference.as_ref().map(|r| psnr(r, &image)).transpose()?;
    timings.total_ms = ms_since(start);

    let mut warnings = angle.warnings.clone();
    warnings.extend(length.warnings.iter().cloned());
    let result = RunResult {
        status: "ok".into(),
        input_path: input.display().to_string(),
        ground_truth: opts.ground_truth,
        estimated: params,
        angle_error: opts.ground_truth.map(|g| angle_error(params.angle, g.angle)),
        length_error: opts.ground_truth.map(|g| params.length.abs_diff(g.length)),
        psnr_db,
        per_channel_estimates: PerChannelEstimates {
            angles: angle.per_channel.clone(),
            lengths: length.per_channel.clone(),
        },
        warnings,
        config_echo: cfg.clone(),
        epsilon,
        timings,
    };
    Ok(DeblurOutput {
        result,
        estimate: KernelEstimate { params, angle, length },
        image,
    })
}

/// Where a sharp image comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SharpSource {
    /// Rendered plate text.
    Plate {
        text: String,
        #[serde(default = "default_plate_width")]
        width: usize,
        #[serde(default = "default_plate_height")]
        height: usize,
        #[serde(default)]
        color: bool,
    },
    /// Image file on disk.
    Path(PathBuf),
}

fn default_plate_width() -> usize {
    256
}

fn default_plate_height() -> usize {
    256
}

impl SharpSource {
    pub fn plate(text: impl Into<String>) -> SharpSource {
        SharpSource::Plate {
            text: text.into(),
            width: default_plate_width(),
            height: default_plate_height(),
            color: false,
        }
    }

    pub fn load(&self) -> Result<Image> {
        match self {
            SharpSource::Plate {
                text,
                width,
                height,
                color,
            } => {
                let style = if *color { PlateStyle::color() } else { PlateStyle::gray() };
                render_plate_with(text, *width, *height, &style)
            }
            SharpSource::Path(p) => load_image(p),
        }
    }
}

/// Ground truth recorded beside a synthesized image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSidecar {
    pub source: SharpSource,
    pub ground_truth: KernelParams,
    pub noise: NoiseSpec,
    pub boundary: Boundary,
}

pub struct SynthOutput {
    pub sharp: Image,
    pub blurred: Image,
    pub sidecar: SynthSidecar,
}

/// Degrades `sharp` as `blur(sharp, psf) + noise`.
pub fn degrade(sharp: &Image, truth: KernelParams, noise: NoiseSpec, boundary: Boundary) -> Result<Image> {
    let psf = make_psf(truth)?;
    add_noise(&blur(sharp, &psf, boundary)?, noise)
}

pub fn run_synth(source: &SharpSource, truth: KernelParams, noise: NoiseSpec, boundary: Boundary) -> Result<SynthOutput> {
    let truth = KernelParams::new(truth.angle, truth.length)?;
    let sharp = source.load()?;
    let blurred = degrade(&sharp, truth, noise, boundary)?;
    Ok(SynthOutput {
        sharp,
        blurred,
        sidecar: SynthSidecar {
            source: source.clone(),
            ground_truth: truth,
            noise,
            boundary,
        },
    })
}

/// Grid swept by [`run_eval`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub angles: Vec<f64>,
    pub lengths: Vec<usize>,
    pub noise_sigmas: Vec<f64>,
    pub seeds: Vec<u64>,
    pub base_images: Vec<SharpSource>,
    #[serde(default)]
    pub boundary: Boundary,
}

impl SweepSpec {
    pub fn validate(&self, cfg: &EstimationConfig) -> Result<()> {
        let empty = |name: &str| Err(Error::InvalidArgument(format!("sweep field {name} is empty")));
        if self.angles.is_empty() {
            return empty("angles");
        }
        if self.lengths.is_empty() {
            return empty("lengths");
        }
        if self.noise_sigmas.is_empty() {
            return empty("noise_sigmas");
        }
        if self.seeds.is_empty() {
            return empty("seeds");
        }
        if self.base_images.is_empty() {
            return empty("base_images");
        }
        if let Some(l) = self.lengths.iter().find(|&&l| l < 1 || l > cfg.max_length) {
            return Err(Error::InvalidArgument(format!(
                "sweep length {l} outside [1, {}]",
                cfg.max_length
            )));
        }
        if let Some(s) = self.noise_sigmas.iter().find(|s| s.is_nan() || **s < 0.0) {
            return Err(Error::InvalidArgument(format!("sweep sigma {s} is negative")));
        }
        if let Some(a) = self.angles.iter().find(|a| !a.is_finite()) {
            return Err(Error::InvalidArgument(format!("sweep angle {a} is not finite")));
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<SweepSpec> {
        if !path.exists() {
            return Err(Error::FileNotFound(path.to_path_buf()));
        }
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    pub fn cell_count(&self) -> usize {
        self.base_images.len() * self.noise_sigmas.len() * self.seeds.len() * self.angles.len() * self.lengths.len()
    }

    /// The noiseless 7x7 grid over the operating range, on one rendered plate.
    pub fn standard_grid(text: &str) -> SweepSpec {
        SweepSpec {
            angles: vec![40.0, 55.0, 70.0, 85.0, 100.0, 115.0, 130.0],
            lengths: vec![10, 15, 20, 25, 30, 35, 40],
            noise_sigmas: vec![0.0],
            seeds: vec![0],
            base_images: vec![SharpSource::plate(text)],
            boundary: Boundary::Wrap,
        }
    }
}

/// Success thresholds used by the harness summary.
pub const ANGLE_TOLERANCE_DEG: f64 = 2.0;
pub const LENGTH_TOLERANCE_PX: usize = 2;

/// One CSV row. Column order is part of the output format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub angle_true: f64,
    pub length_true: usize,
    pub sigma: f64,
    pub seed: u64,
    pub angle_est: Option<f64>,
    pub length_est_max: Option<usize>,
    pub length_est_min: Option<usize>,
    pub length_est_median: Option<usize>,
    pub angle_err: Option<f64>,
    pub length_err_max: Option<usize>,
    pub length_err_min: Option<usize>,
    pub length_err_median: Option<usize>,
    pub psnr_db: Option<String>,
    pub status: String,
}

impl EvalRow {
    pub fn length_est(&self, rule: LengthAggregate) -> Option<usize> {
        match rule {
            LengthAggregate::Max => self.length_est_max,
            LengthAggregate::Min => self.length_est_min,
            LengthAggregate::Median => self.length_est_median,
        }
    }

    pub fn length_err(&self, rule: LengthAggregate) -> Option<usize> {
        match rule {
            LengthAggregate::Max => self.length_err_max,
            LengthAggregate::Min => self.length_err_min,
            LengthAggregate::Median => self.length_err_median,
        }
    }

    pub fn angle_hit(&self) -> bool {
        self.angle_err.is_some_and(|e| e <= ANGLE_TOLERANCE_DEG)
    }

    pub fn length_hit(&self, rule: LengthAggregate) -> bool {
        self.length_err(rule).is_some_and(|e| e <= LENGTH_TOLERANCE_PX)
    }

    fn psnr_value(&self) -> Option<f64> {
        self.psnr_db.as_deref().map(|s| if s == "inf" { f64::INFINITY } else { s.parse().unwrap_or(f64::NAN) })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthRates {
    pub max: f64,
    pub min: f64,
    pub median: f64,
}

/// Success rates of one group of rows; failed cells count as misses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub sigma: Option<f64>,
    pub cells: usize,
    pub failed_cells: usize,
    pub angle_success_rate: f64,
    pub length_success_rate: LengthRates,
    /// Angle and length (under the configured rule) both within tolerance.
    pub joint_success_rate: f64,
    /// Mean over finite PSNR values of restored images.
    pub mean_psnr_db: Option<f64>,
}

impl GroupStats {
    pub fn from_rows<'a>(rows: impl IntoIterator<Item = &'a EvalRow>, sigma: Option<f64>, rule: LengthAggregate) -> GroupStats {
        let rows: Vec<&EvalRow> = rows.into_iter().collect();
        let n = rows.len();
        let rate = |hits: usize| if n == 0 { 0.0 } else { hits as f64 / n as f64 };
        let count = |f: &dyn Fn(&EvalRow) -> bool| rows.iter().filter(|r| f(r)).count();
        let psnrs: Vec<f64> = rows.iter().filter_map(|r| r.psnr_value()).filter(|v| v.is_finite()).collect();
        GroupStats {
            sigma,
            cells: n,
            failed_cells: count(&|r| r.status != "ok"),
            angle_success_rate: rate(count(&|r| r.angle_hit())),
            length_success_rate: LengthRates {
                max: rate(count(&|r| r.length_hit(LengthAggregate::Max))),
                min: rate(count(&|r| r.length_hit(LengthAggregate::Min))),
                median: rate(count(&|r| r.length_hit(LengthAggregate::Median))),
            },
            joint_success_rate: rate(count(&|r| r.angle_hit() && r.length_hit(rule))),
            mean_psnr_db: if psnrs.is_empty() {
                None
            } else {
                Some(psnrs.iter().sum::<f64>() / psnrs.len() as f64)
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub angle_deg: f64,
    pub length_px: usize,
}

/// Totals over all cells, milliseconds.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalTimings {
    pub synth_ms: f64,
    pub angle_ms: f64,
    pub length_ms: f64,
    pub deconvolve_ms: f64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub cells: usize,
    pub thresholds: Thresholds,
    pub overall: GroupStats,
    /// Rows with sigma = 0, when the sweep has any.
    pub noiseless: Option<GroupStats>,
    pub by_sigma: Vec<GroupStats>,
    pub config_echo: EstimationConfig,
    pub epsilon: f64,
    pub sweep: SweepSpec,
    pub timings: EvalTimings,
}

impl EvalSummary {
    /// Recomputes every statistic from `rows`.
    pub fn from_rows(rows: &[EvalRow], sweep: &SweepSpec, cfg: &EstimationConfig, epsilon: f64, timings: EvalTimings) -> EvalSummary {
        let rule = cfg.length_aggregate;
        let noiseless: Vec<&EvalRow> = rows.iter().filter(|r| r.sigma == 0.0).collect();
        let by_sigma = sweep
            .noise_sigmas
            .iter()
            .map(|&s| GroupStats::from_rows(rows.iter().filter(|r| r.sigma == s), Some(s), rule))
            .collect();
        EvalSummary {
            cells: rows.len(),
            thresholds: Thresholds {
                angle_deg: ANGLE_TOLERANCE_DEG,
                length_px: LENGTH_TOLERANCE_PX,
            },
            overall: GroupStats::from_rows(rows, None, rule),
            noiseless: (!noiseless.is_empty()).then(|| GroupStats::from_rows(noiseless, Some(0.0), rule)),
            by_sigma,
            config_echo: cfg.clone(),
            epsilon,
            sweep: sweep.clone(),
            timings,
        }
    }
}

pub struct EvalOutput {
    pub rows: Vec<EvalRow>,
    pub summary: EvalSummary,
}

impl EvalOutput {
    pub fn csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Writes `results.csv` and `summary.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let csv_path = dir.join("results.csv");
        let json_path = dir.join("summary.json");
        fs::write(&csv_path, self.csv_string()?)?;
        write_json(&json_path, &self.summary)?;
        Ok((csv_path, json_path))
    }
}

pub fn read_rows(csv_text: &str) -> Result<Vec<EvalRow>> {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

struct CellTimings {
    synth: f64,
    angle: f64,
    length: f64,
    deconvolve: f64,
}

fn status_code(err: &Error) -> String {
    match (err.stage(), err.root()) {
        (_, Error::NoBlurStructure) => "no_blur_structure".into(),
        (_, Error::NoLengthStructure) => "no_length_structure".into(),
        (Some(stage), _) => format!("{stage}_failed"),
        (None, e) if e.is_io_failure() => "io_error".into(),
        _ => "error".into(),
    }
}

#[allow(clippy::too_many_arguments)]
fn eval_cell(
    sharp: &Image,
    truth: KernelParams,
    sigma: f64,
    seed: u64,
    boundary: Boundary,
    cfg: &EstimationConfig,
    epsilon: f64,
) -> (EvalRow, CellTimings) {
    let mut row = EvalRow {
        angle_true: truth.angle,
        length_true: truth.length,
        sigma,
        seed,
        angle_est: None,
        length_est_max: None,
        length_est_min: None,
        length_est_median: None,
        angle_err: None,
        length_err_max: None,
        length_err_min: None,
        length_err_median: None,
        psnr_db: None,
        status: "ok".into(),
    };
    let mut times = CellTimings {
        synth: 0.0,
        angle: 0.0,
        length: 0.0,
        deconvolve: 0.0,
    };
    let t = Instant::now();
    let blurred = match NoiseSpec::new(sigma, seed).and_then(|n| degrade(sharp, truth, n, boundary)) {
        Ok(b) => b,
        Err(e) => {
            row.status = status_code(&e);
            return (row, times);
        }
    };
    times.synth = ms_since(t);

    let t = Instant::now();
    let angle = match crate::estimate::estimate_angle(&blurred, cfg) {
        Ok(a) => a,
        Err(e) => {
            row.status = status_code(&e.at(Stage::Angle));
            return (row, times);
        }
    };
    times.angle = ms_since(t);
    row.angle_est = Some(angle.angle);
    row.angle_err = Some(angle_error(angle.angle, truth.angle));

    let t = Instant::now();
    let length = match crate::estimate::estimate_length(&blurred, angle.angle, cfg) {
        Ok(l) => l,
        Err(e) => {
            row.status = status_code(&e.at(Stage::Length));
            return (row, times);
        }
    };
    times.length = ms_since(t);
    let (lmax, lmin, lmed) = (
        length.under(LengthAggregate::Max),
        length.under(LengthAggregate::Min),
        length.under(LengthAggregate::Median),
    );
    row.length_est_max = Some(lmax);
    row.length_est_min = Some(lmin);
    row.length_est_median = Some(lmed);
    row.length_err_max = Some(lmax.abs_diff(truth.length));
    row.length_err_min = Some(lmin.abs_diff(truth.length));
    row.length_err_median = Some(lmed.abs_diff(truth.length));

    let t = Instant::now();
    let restored = KernelParams::new(angle.angle, length.length)
        .and_then(make_psf)
        .and_then(|psf| inverse_filter(&blurred, &psf, epsilon))
        .and_then(|r| psnr(sharp, &r));
    times.deconvolve = ms_since(t);
    match restored {
        Ok(p) => row.psnr_db = Some(p.to_string()),
        Err(e) => row.status = status_code(&e.at(Stage::Deconvolve)),
    }
    (row, times)
}

/// Runs every cell of `sweep`. Cells execute in parallel; rows come back
/// in grid order (base image, sigma, seed, angle, length). Failed cells
/// are recorded with a status code and the sweep continues.
pub fn run_eval(sweep: &SweepSpec, cfg: &EstimationConfig, epsilon: f64) -> Result<EvalOutput> {
    cfg.validate()?;
    sweep.validate(cfg)?;
    let wall = Instant::now();
    let bases = sweep.base_images.iter().map(SharpSource::load).collect::<Result<Vec<_>>>()?;

    let mut cells = Vec::with_capacity(sweep.cell_count());
    for base in &bases {
        for &sigma in &sweep.noise_sigmas {
            for &seed in &sweep.seeds {
                for &angle in &sweep.angles {
                    for &length in &sweep.lengths {
                        cells.push((base, sigma, seed, angle, length));
                    }
                }
            }
        }
    }
    let results: Vec<(EvalRow, CellTimings)> = cells
        .par_iter()
        .map(|&(base, sigma, seed, angle, length)| {
            let truth = KernelParams { angle: crate::kernel::normalize_angle(angle), length };
            eval_cell(base, truth, sigma, seed, sweep.boundary, cfg, epsilon)
        })
        .collect();

    let mut timings = EvalTimings::default();
    let mut rows = Vec::with_capacity(results.len());
    for (row, t) in results {
        timings.synth_ms += t.synth;
        timings.angle_ms += t.angle;
        timings.length_ms += t.length;
        timings.deconvolve_ms += t.deconvolve;
        rows.push(row);
    }
    timings.wall_ms = ms_since(wall);
    let summary = EvalSummary::from_rows(&rows, sweep, cfg, epsilon, timings);
    Ok(EvalOutput { rows, summary })
}

/// Pretty-printed UTF-8 JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    if !path.exists() {
        return Err(Error::FileNotFound(path.to_path_buf()));
    }
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psnr_closed_forms() {
        let zero = Image::filled(8, 8, 0.0);
        assert_eq!(psnr(&zero, &zero).unwrap(), Psnr::Infinite);
        assert!((psnr(&zero, &Image::filled(8, 8, 1.0)).unwrap().db() - 0.0).abs() < 1e-12);
        assert!((psnr(&zero, &Image::filled(8, 8, 0.1)).unwrap().db() - 20.0).abs() < 1e-9);
        assert!(psnr(&zero, &Image::filled(4, 8, 0.0)).is_err());
    }

    #[test]
    fn psnr_serializes_inf_as_string() {
        assert_eq!(serde_json::to_string(&Psnr::Infinite).unwrap(), "\"inf\"");
        assert_eq!(serde_json::to_string(&Psnr::Finite(20.5)).unwrap(), "20.5");
        let back: Psnr = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(back, Psnr::Infinite);
    }

    #[test]
    fn periodic_angle_error() {
        assert_eq!(angle_error(179.0, 1.0), 2.0);
        assert_eq!(angle_error(70.0, 72.5), 2.5);
    }

    #[test]
    fn sweep_validation() {
        let cfg = EstimationConfig::default();
        let mut s = SweepSpec::standard_grid("AB 12");
        assert!(s.validate(&cfg).is_ok());
        assert_eq!(s.cell_count(), 49);
        s.lengths.push(80);
        assert!(s.validate(&cfg).is_err());
        s.lengths.clear();
        assert!(s.validate(&cfg).is_err());
    }

    #[test]
    fn sweep_spec_json_shape() {
        let text = r#"{
            "angles": [70], "lengths": [24], "noise_sigmas": [0.0], "seeds": [1],
            "base_images": [{"plate": {"text": "KA-01-1234"}}, {"path": "sharp.png"}]
        }"#;
        let s: SweepSpec = serde_json::from_str(text).unwrap();
        assert_eq!(s.base_images[0], SharpSource::plate("KA-01-1234"));
        assert_eq!(s.base_images[1], SharpSource::Path("sharp.png".into()));
        assert_eq!(s.boundary, Boundary::Wrap);
    }

    #[test]
    fn synth_with_identity_kernel_returns_sharp() {
        let out = run_synth(
            &SharpSource::Plate {
                text: "KA-01-1234".into(),
                width: 128,
                height: 64,
                color: false,
            },
            KernelParams::new(70.0, 1).unwrap(),
            NoiseSpec::none(),
            Boundary::Wrap,
        )
        .unwrap();
        assert_eq!(out.sharp, out.blurred);
    }
}
