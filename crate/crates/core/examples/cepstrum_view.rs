//! Save the centered cepstrum of a blurred plate and print the collapsed
//! profile whose dip marks the blur length.
//!
//!     cargo run --example cepstrum_view -- [out.png]

use plate_deblur::estimate::{centered_cepstrum, length_profile};
use plate_deblur::spectral::DEFAULT_CEPSTRUM_FLOOR;
use plate_deblur::{blur, make_psf, render_plate, save_image, Boundary, EstimationConfig, KernelParams};

fn main() -> plate_deblur::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "cepstrum.png".into());
    let truth = KernelParams::new(70.0, 24)?;
    let blurred = blur(&render_plate("KA-01-1234", 256, 256)?, &make_psf(truth)?, Boundary::Wrap)?;

    let ceps = centered_cepstrum(&blurred, DEFAULT_CEPSTRUM_FLOOR)?;
    // the origin spike swamps everything else; clip it for display
    let (lo, hi) = ceps.range();
    let top = lo + 0.02 * (hi - lo);
    save_image(&ceps.map(|v| ((v - lo) / (top - lo)).clamp(0.0, 1.0)), std::path::Path::new(&out))?;

    let cfg = EstimationConfig::default();
    let profile = length_profile(&blurred, truth.angle, &cfg)?;
    // offsets from the quefrency origin at w / 2
    let right = &profile[blurred.width() / 2..=blurred.width() / 2 + cfg.max_length];
    let (best, _) = right
        .iter()
        .enumerate()
        .skip(cfg.min_length)
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    for (d, v) in right.iter().enumerate().skip(cfg.min_length) {
        let mark = if d == best { " <" } else { "" };
        println!("{d:3} {v:+.5}{mark}");
    }
    println!("dip at {best} px, truth {}", truth.length);
    Ok(())
}
