//! Non-blind restoration by guarded inverse filtering.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::Psf;
use crate::raster::{to_channels, Image};
use crate::spectral::{fft2, ifft2, Spectrum};

/// Zero guard used by the command line and the evaluation harness.
///
/// Plain inverse filtering amplifies every frequency where the estimated
/// OTF is small by up to `1 / epsilon`; with an estimated kernel a large
/// floor keeps mismatched OTF zeros from dominating the result.
pub const DEFAULT_EPSILON: f64 = 0.05;

/// Transfer function of a PSF at full image size.
#[derive(Debug, Clone, PartialEq)]
pub struct Otf {
    spectrum: Spectrum,
    epsilon: Option<f64>,
}

impl Otf {
    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// Guard applied so far, if any.
    pub fn epsilon(&self) -> Option<f64> {
        self.epsilon
    }

    pub fn width(&self) -> usize {
        self.spectrum.width()
    }

    pub fn height(&self) -> usize {
        self.spectrum.height()
    }
}

/// Places the PSF center at index (0, 0) of a `width x height` plane,
/// wrapping negative offsets, and transforms it.
///
/// With this placement, dividing by the OTF exactly undoes `blur` with
/// `Boundary::Wrap`.
pub fn psf_to_otf(psf: &Psf, width: usize, height: usize) -> Result<Otf> {
    if psf.width() > width || psf.height() > height {
        return Err(Error::PsfTooLarge {
            psf_width: psf.width(),
            psf_height: psf.height(),
            width,
            height,
        });
    }
    let mut plane = vec![0.0; width * height];
    for (dx, dy, w) in psf.taps() {
        let x = dx.rem_euclid(width as isize) as usize;
        let y = dy.rem_euclid(height as isize) as usize;
        plane[y * width + x] += w;
    }
    let plane = Image::from_gray(width, height, plane)?;
    Ok(Otf {
        spectrum: fft2(&plane)?,
        epsilon: None,
    })
}

/// Lifts every coefficient with magnitude below `epsilon` onto the circle
/// of radius `epsilon`, keeping its phase; exact zeros become `epsilon + 0i`.
pub fn guard_zeros(otf: &Otf, epsilon: f64) -> Result<Otf> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} must be > 0")));
    }
    // a coefficient already lifted can land a rounding error under epsilon;
    // the slack keeps a second pass from touching it
    let cutoff = epsilon * (1.0 - 8.0 * f64::EPSILON);
    let mut spectrum = otf.spectrum.clone();
    for c in spectrum.data_mut() {
        let m = c.norm();
        if m < cutoff {
            *c = if m == 0.0 {
                Complex64::new(epsilon, 0.0)
            } else {
                *c * (epsilon / m)
            };
        }
    }
    let epsilon = Some(otf.epsilon.map_or(epsilon, |e| e.max(epsilon)));
    Ok(Otf { spectrum, epsilon })
}

/// Divides each channel's spectrum by the guarded OTF of `psf` and inverts.
/// The output is not clamped.
pub fn inverse_filter(img: &Image, psf: &Psf, epsilon: f64) -> Result<Image> {
    let otf = guard_zeros(&psf_to_otf(psf, img.width(), img.height())?, epsilon)?;
    let planes = to_channels(img)
        .iter()
        .map(|ch| {
            let mut spec = fft2(ch)?;
            for (c, h) in spec.data_mut().iter_mut().zip(otf.spectrum().data()) {
                *c /= *h;
            }
            Ok(ifft2(&spec).into_planes().pop().unwrap())
        })
        .collect::<Result<Vec<_>>>()?;
    Image::from_planes(img.width(), img.height(), planes)
}
