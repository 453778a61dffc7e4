//! Render a plate, blur it with a known kernel and save both images.
//!
//!     cargo run --example synthesize_plate -- [out-dir]

use std::path::PathBuf;

use plate_deblur::{add_noise, blur, make_psf, render_plate, save_image, Boundary, KernelParams, NoiseSpec};

fn main() -> plate_deblur::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    std::fs::create_dir_all(&dir)?;

    let sharp = render_plate("KA-01-1234", 256, 256)?;
    let psf = make_psf(KernelParams::new(70.0, 24)?)?;
    println!("psf {}x{}, {} taps", psf.width(), psf.height(), psf.taps().count());

    let blurred = blur(&sharp, &psf, Boundary::Wrap)?;
    let noisy = add_noise(&blurred, NoiseSpec::new(0.01, 7)?)?;

    save_image(&sharp, dir.join("sharp.png"))?;
    save_image(&blurred, dir.join("blurred.png"))?;
    save_image(&noisy, dir.join("blurred_noisy.png"))?;
    println!("wrote sharp.png, blurred.png, blurred_noisy.png to {}", dir.display());
    Ok(())
}
