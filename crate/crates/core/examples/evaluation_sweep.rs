//! Run the 7x7 noiseless grid, plus a noisy pass, and write the results.
//!
//!     cargo run --release --example evaluation_sweep -- [out-dir]

use plate_deblur::{run_eval, EstimationConfig, SweepSpec, DEFAULT_EPSILON};

fn main() -> plate_deblur::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "eval-out".into());
    let mut sweep = SweepSpec::standard_grid("KA-01-1234");
    sweep.noise_sigmas = vec![0.0, 0.005];
    let cfg = EstimationConfig::default();

    let out = run_eval(&sweep, &cfg, DEFAULT_EPSILON)?;
    for g in &out.summary.by_sigma {
        println!(
            "sigma {:<6} angle {:5.1}%  length max {:5.1}% min {:5.1}% median {:5.1}%  psnr {:.2} dB",
            g.sigma.unwrap_or_default(),
            100.0 * g.angle_success_rate,
            100.0 * g.length_success_rate.max,
            100.0 * g.length_success_rate.min,
            100.0 * g.length_success_rate.median,
            g.mean_psnr_db.unwrap_or(f64::NAN),
        );
    }
    let (csv, json) = out.write(std::path::Path::new(&dir))?;
    println!("wrote {} and {}", csv.display(), json.display());
    println!("wall clock {:.0} ms", out.summary.timings.wall_ms);
    Ok(())
}
