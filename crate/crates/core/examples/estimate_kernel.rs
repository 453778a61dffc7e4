//! Estimate the motion kernel of a blurred image.
//!
//!     cargo run --example estimate_kernel -- [blurred.png]
//!
//! Without an argument a plate blurred at 70 degrees over 24 px is used.

use plate_deblur::{blur, estimate_kernel, load_image, make_psf, render_plate, Boundary, EstimationConfig, KernelParams};

fn main() -> plate_deblur::Result<()> {
    let img = match std::env::args().nth(1) {
        Some(p) => load_image(std::path::Path::new(&p))?,
        None => blur(
            &render_plate("KA-01-1234", 256, 256)?,
            &make_psf(KernelParams::new(70.0, 24)?)?,
            Boundary::Wrap,
        )?,
    };
    let cfg = EstimationConfig::default();
    let est = estimate_kernel(&img, &cfg)?;
    println!("angle  {:.1} deg", est.params.angle);
    println!("length {} px ({} rule)", est.params.length, est.length.aggregate.name());
    for (c, (a, l)) in est.angle.per_channel.iter().zip(&est.length.per_channel).enumerate() {
        println!("  channel {c}: angle {a:?} length {l:?}");
    }
    for w in est.angle.warnings.iter().chain(&est.length.warnings) {
        println!("warning: {w}");
    }
    Ok(())
}
