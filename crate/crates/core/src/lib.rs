//! Motion-blur estimation and removal for licence-plate images.
//!
//! The blur model is `P = n * M + Q`: a sharp image `M` convolved with a
//! linear motion kernel of angle `theta` and length `L`, plus noise.
//! The kernel is recovered from the cepstrum of the blurred image and
//! removed by guarded inverse filtering.
//!
//! ```no_run
//! use std::path::Path;
//! use plate_deblur::{deblur_image, load_image, save_image, EstimationConfig, DEFAULT_EPSILON};
//!
//! let blurred = load_image(Path::new("blurred.png"))?;
//! let (estimate, restored) = deblur_image(&blurred, &EstimationConfig::default(), DEFAULT_EPSILON)?;
//! println!("angle {} length {}", estimate.params.angle, estimate.params.length);
//! save_image(&restored, Path::new("restored.png"))?;
//! # Ok::<(), plate_deblur::Error>(())
//! ```

pub mod deconv;
pub mod error;
pub mod estimate;
mod font;
pub mod kernel;
pub mod pipeline;
pub mod raster;
pub mod spectral;

pub use deconv::{guard_zeros, inverse_filter, psf_to_otf, Otf, DEFAULT_EPSILON};
pub use error::{Error, Result, Stage};
pub use estimate::{
    estimate_angle, estimate_kernel, estimate_length, hough_accumulate, AngleEstimate, EstimationConfig,
    HoughAccumulator, HoughParams, KernelEstimate, LengthAggregate, LengthEstimate,
};
pub use kernel::{add_noise, blur, make_psf, render_plate, Boundary, KernelParams, NoiseSpec, PlateStyle, Psf};
pub use pipeline::{
    deblur_image, psnr, run_deblur, run_eval, run_synth, DeblurOptions, EvalOutput, Psnr, RunResult, SharpSource,
    SweepSpec,
};
pub use raster::{load_image, rotate, save_image, BinaryMap, Image, Interpolation};
pub use spectral::{cepstrum, fft2, fftshift, ifft2, ifftshift, Spectrum};
