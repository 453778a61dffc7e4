use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use plate_deblur::estimate::centered_cepstrum;
use plate_deblur::pipeline::{read_json, write_json, FailureReport, SynthSidecar};
use plate_deblur::raster::to_channels;
use plate_deblur::{
    load_image, run_deblur, run_eval, run_synth, save_image, Boundary, DeblurOptions, Error, EstimationConfig, Image,
    KernelParams, LengthAggregate, NoiseSpec, SharpSource, SweepSpec, DEFAULT_EPSILON,
};

/// Estimate and remove linear motion blur from licence-plate images.
#[derive(Parser)]
#[command(name = "plate-deblur", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the blur kernel of an image and inverse-filter it.
    Deblur {
        input: PathBuf,
        output: PathBuf,
        /// Report path; defaults to the output path with a .json extension.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Sidecar written by `synth`, used to score the estimate.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Sharp image to compute PSNR against.
        #[arg(long)]
        reference: Option<PathBuf>,
        #[command(flatten)]
        est: EstimationArgs,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
    },
    /// Render or load a sharp image and blur it with a known kernel.
    Synth {
        /// Blurred image path. The sidecar goes next to it with a .json extension.
        #[arg(long)]
        out: PathBuf,
        /// Also write the sharp image here.
        #[arg(long)]
        sharp_out: Option<PathBuf>,
        /// Plate text to render.
        #[arg(long, default_value = "KA-01-1234", conflicts_with = "input")]
        text: String,
        /// Sharp image to blur instead of a rendered plate.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 256)]
        width: usize,
        #[arg(long, default_value_t = 256)]
        height: usize,
        /// Render a three-channel plate.
        #[arg(long)]
        color: bool,
        #[arg(long, default_value_t = 70.0, allow_negative_numbers = true)]
        angle: f64,
        #[arg(long, default_value_t = 24)]
        length: usize,
        #[arg(long, default_value_t = 0.0)]
        noise_sigma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// wrap or replicate
        #[arg(long, default_value = "wrap")]
        boundary: Boundary,
    },
    /// Run a parameter sweep and write results.csv and summary.json.
    Eval {
        #[arg(long)]
        sweep: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        est: EstimationArgs,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
    },
    /// Write the centered cepstrum of an image, rescaled for viewing.
    Cepstrum {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, default_value_t = plate_deblur::spectral::DEFAULT_CEPSTRUM_FLOOR)]
        floor: f64,
    },
}

#[derive(Args)]
struct EstimationArgs {
    /// JSON file with a full or partial EstimationConfig; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    theta_min: Option<f64>,
    #[arg(long)]
    theta_max: Option<f64>,
    #[arg(long)]
    theta_step: Option<f64>,
    #[arg(long)]
    max_length: Option<usize>,
    #[arg(long)]
    min_length: Option<usize>,
    #[arg(long)]
    edge_threshold: Option<f64>,
    #[arg(long)]
    edge_exclusion: Option<usize>,
    #[arg(long)]
    rho_resolution: Option<f64>,
    /// max, min or median
    #[arg(long)]
    length_aggregate: Option<LengthAggregate>,
}

impl EstimationArgs {
    fn resolve(&self) -> plate_deblur::Result<EstimationConfig> {
        let mut cfg = match &self.config {
            Some(p) => read_json(p)?,
            None => EstimationConfig::default(),
        };
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = self.$f { cfg.$f = v; })* };
        }
        set!(theta_min, theta_max, theta_step, max_length, min_length, edge_threshold, edge_exclusion, rho_resolution, length_aggregate);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn exit_code(err: &Error) -> u8 {
    use plate_deblur::Stage;
    match err.stage() {
        Some(Stage::Angle | Stage::Length) => 2,
        _ if err.is_estimation_failure() => 2,
        _ if err.is_io_failure() => 3,
        _ => 4,
    }
}

fn emit(text: &str) {
    // stdout may be a closed pipe
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn sidecar_path(p: &Path) -> PathBuf {
    p.with_extension("json")
}

fn deblur(
    input: &Path,
    output: &Path,
    report: Option<PathBuf>,
    truth: Option<PathBuf>,
    reference: Option<PathBuf>,
    est: &EstimationArgs,
    epsilon: f64,
) -> plate_deblur::Result<()> {
    let cfg = est.resolve()?;
    let report = report.unwrap_or_else(|| sidecar_path(output));
    let ground_truth = truth
        .map(|p| read_json::<SynthSidecar>(&p).map(|s| s.ground_truth))
        .transpose()?;
    let opts = DeblurOptions { ground_truth, reference };
    match run_deblur(input, &cfg, epsilon, &opts) {
        Ok(out) => {
            out.save(output, &report)?;
            emit(&serde_json::to_string_pretty(&out.result)?);
            Ok(())
        }
        Err(e) => {
            let failure = FailureReport::new(input, &e, &cfg, epsilon);
            // a failed report write must not mask the original error
            let _ = write_json(&report, &failure);
            emit(&serde_json::to_string_pretty(&failure)?);
            Err(e)
        }
    }
}

/// Stretches the 1st..99th percentile range of each channel onto [0, 1].
fn viewable(plane: &Image) -> Image {
    let mut sorted = plane.plane(0).to_vec();
    sorted.sort_by(f64::total_cmp);
    let pick = |q: f64| sorted[((sorted.len() - 1) as f64 * q).round() as usize];
    let (lo, hi) = (pick(0.01), pick(0.99));
    let span = if hi > lo { hi - lo } else { 1.0 };
    plane.map(|v| ((v - lo) / span).clamp(0.0, 1.0))
}

fn dump_cepstrum(input: &Path, output: &Path, floor: f64) -> plate_deblur::Result<()> {
    let img = load_image(input)?;
    let planes = to_channels(&img)
        .iter()
        .map(|ch| Ok(viewable(&centered_cepstrum(ch, floor)?).into_planes().remove(0)))
        .collect::<plate_deblur::Result<Vec<_>>>()?;
    save_image(&Image::from_planes(img.width(), img.height(), planes)?, output)
}

fn run(cli: Cli) -> plate_deblur::Result<()> {
    match cli.command {
        Command::Deblur {
            input,
            output,
            report,
            truth,
            reference,
            est,
            epsilon,
        } => deblur(&input, &output, report, truth, reference, &est, epsilon),
        Command::Synth {
            out,
            sharp_out,
            text,
            input,
            width,
            height,
            color,
            angle,
            length,
            noise_sigma,
            seed,
            boundary,
        } => {
            let source = match input {
                Some(p) => SharpSource::Path(p),
                None => SharpSource::Plate { text, width, height, color },
            };
            let synth = run_synth(&source, KernelParams::new(angle, length)?, NoiseSpec::new(noise_sigma, seed)?, boundary)?;
            save_image(&synth.blurred, &out)?;
            write_json(&sidecar_path(&out), &synth.sidecar)?;
            if let Some(p) = sharp_out {
                save_image(&synth.sharp, &p)?;
            }
            Ok(())
        }
        Command::Eval {
            sweep,
            out_dir,
            est,
            epsilon,
        } => {
            let cfg = est.resolve()?;
            let spec = SweepSpec::from_file(&sweep)?;
            let out = run_eval(&spec, &cfg, epsilon)?;
            let (csv, json) = out.write(&out_dir)?;
            let s = &out.summary.overall;
            println!(
                "{} cells: angle {:.1}%, length max/min/median {:.1}/{:.1}/{:.1}%",
                out.summary.cells,
                100.0 * s.angle_success_rate,
                100.0 * s.length_success_rate.max,
                100.0 * s.length_success_rate.min,
                100.0 * s.length_success_rate.median
            );
            println!("wrote {} and {}", csv.display(), json.display());
            Ok(())
        }
        Command::Cepstrum { input, output, floor } => dump_cepstrum(&input, &output, floor),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(4);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
