//! Blind deblurring: estimate the kernel, inverse-filter, compare PSNR.
//!
//!     cargo run --example deblur_image -- [angle] [length] [epsilon]

use plate_deblur::{
    blur, deblur_image, inverse_filter, make_psf, psnr, render_plate, save_image, Boundary, EstimationConfig,
    KernelParams, DEFAULT_EPSILON,
};

fn main() -> plate_deblur::Result<()> {
    let mut args = std::env::args().skip(1);
    let angle: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(70.0);
    let length: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(24);
    let epsilon: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_EPSILON);

    let sharp = render_plate("KA-01-1234", 256, 256)?;
    let truth = KernelParams::new(angle, length)?;
    let blurred = blur(&sharp, &make_psf(truth)?, Boundary::Wrap)?;

    let (est, restored) = deblur_image(&blurred, &EstimationConfig::default(), epsilon)?;
    let oracle = inverse_filter(&blurred, &make_psf(truth)?, 1e-6)?;

    println!("truth     {:.1} deg, {} px", truth.angle, truth.length);
    println!("estimate  {:.1} deg, {} px", est.params.angle, est.params.length);
    println!("blurred   {:.2} dB", psnr(&sharp, &blurred)?.db());
    println!("restored  {:.2} dB (epsilon {epsilon})", psnr(&sharp, &restored)?.db());
    println!("true psf  {:.2} dB (epsilon 1e-6)", psnr(&sharp, &oracle)?.db());
    save_image(&restored, std::path::Path::new("restored.png"))?;
    Ok(())
}
