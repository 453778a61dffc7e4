//! 2-D DFT at native size, quadrant shifts and the real cepstrum.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::raster::Image;

/// Complex coefficients of a `width x height` plane, row-major, DC at (0, 0).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    width: usize,
    height: usize,
    data: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(width: usize, height: usize, data: Vec<Complex64>) -> Result<Spectrum> {
        if width == 0 || height == 0 || data.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for a {width}x{height} spectrum",
                data.len()
            )));
        }
        if data.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument("spectrum has non-finite coefficients".into()));
        }
        Ok(Spectrum { width, height, data })
    }

    pub fn zeros(width: usize, height: usize) -> Spectrum {
        Spectrum {
            width,
            height,
            data: vec![Complex64::new(0.0, 0.0); width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn get(&self, x: usize, y: usize) -> Complex64 {
        self.data[y * self.width + x]
    }
}

#[derive(Clone, Copy)]
enum Direction {
    Forward,
    Inverse,
}

// Row pass then column pass, in place. Unnormalized.
fn transform(width: usize, height: usize, data: &mut [Complex64], dir: Direction) {
    let mut planner = FftPlanner::<f64>::new();
    let (row_fft, col_fft) = match dir {
        Direction::Forward => (planner.plan_fft_forward(width), planner.plan_fft_forward(height)),
        Direction::Inverse => (planner.plan_fft_inverse(width), planner.plan_fft_inverse(height)),
    };
    row_fft.process(data);

    let mut column = vec![Complex64::new(0.0, 0.0); height];
    let mut scratch = vec![Complex64::new(0.0, 0.0); col_fft.get_inplace_scratch_len()];
    for x in 0..width {
        for (y, c) in column.iter_mut().enumerate() {
            *c = data[y * width + x];
        }
        col_fft.process_with_scratch(&mut column, &mut scratch);
        for (y, c) in column.iter().enumerate() {
            data[y * width + x] = *c;
        }
    }
}

/// Unnormalized forward DFT of a single-channel plane.
pub fn fft2(plane: &Image) -> Result<Spectrum> {
    plane.require_single_channel("fft2")?;
    let (w, h) = (plane.width(), plane.height());
    let mut data: Vec<Complex64> = plane.plane(0).iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform(w, h, &mut data, Direction::Forward);
    Ok(Spectrum { width: w, height: h, data })
}

/// Inverse DFT (scaled by `1 / (w * h)`), keeping the real part. Also
/// returns the largest discarded imaginary magnitude.
pub fn ifft2_with_residual(spec: &Spectrum) -> (Image, f64) {
    let (w, h) = (spec.width, spec.height);
    let mut data = spec.data.clone();
    transform(w, h, &mut data, Direction::Inverse);
    let scale = 1.0 / (w * h) as f64;
    let residual = data.iter().map(|c| (c.im * scale).abs()).fold(0.0, f64::max);
    let real = data.iter().map(|c| c.re * scale).collect();
    (Image::from_planes_unchecked(w, h, vec![real]), residual)
}

/// Inverse DFT, real part only.
pub fn ifft2(spec: &Spectrum) -> Image {
    ifft2_with_residual(spec).0
}

/// Default magnitude floor applied before the logarithm.
pub const DEFAULT_CEPSTRUM_FLOOR: f64 = 1e-10;

/// Real cepstrum `ifft2(log(max(|fft2(plane)|, floor)))`, real part.
pub fn cepstrum(plane: &Image, floor: f64) -> Result<Image> {
    cepstrum_with_residual(plane, floor).map(|(c, _)| c)
}

/// As [`cepstrum`], also reporting the imaginary residual of the inverse.
pub fn cepstrum_with_residual(plane: &Image, floor: f64) -> Result<(Image, f64)> {
    if !(floor > 0.0 && floor.is_finite()) {
        return Err(Error::InvalidArgument(format!("cepstrum floor {floor} must be > 0")));
    }
    let mut spec = fft2(plane)?;
    for c in spec.data_mut() {
        *c = Complex64::new(c.norm().max(floor).ln(), 0.0);
    }
    Ok(ifft2_with_residual(&spec))
}

fn roll<T: Copy>(data: &[T], w: usize, h: usize, dx: usize, dy: usize) -> Vec<T> {
    let mut out = data.to_vec();
    for y in 0..h {
        let ny = (y + dy) % h;
        for x in 0..w {
            out[ny * w + (x + dx) % w] = data[y * w + x];
        }
    }
    out
}

/// Types whose quadrants can be swapped to center the DC term.
pub trait QuadrantShift: Sized {
    /// Moves index (0, 0) to `(w / 2, h / 2)`.
    fn fftshift(&self) -> Self;
    /// Exact inverse of [`QuadrantShift::fftshift`] for every size.
    fn ifftshift(&self) -> Self;
}

impl QuadrantShift for Image {
    fn fftshift(&self) -> Image {
        let (w, h) = (self.width(), self.height());
        let planes = self.planes().iter().map(|p| roll(p, w, h, w / 2, h / 2)).collect();
        Image::from_planes_unchecked(w, h, planes)
    }

    fn ifftshift(&self) -> Image {
        let (w, h) = (self.width(), self.height());
        let planes = self
            .planes()
            .iter()
            .map(|p| roll(p, w, h, w - w / 2, h - h / 2))
            .collect();
        Image::from_planes_unchecked(w, h, planes)
    }
}

impl QuadrantShift for Spectrum {
    fn fftshift(&self) -> Spectrum {
        let (w, h) = (self.width, self.height);
        Spectrum {
            width: w,
            height: h,
            data: roll(&self.data, w, h, w / 2, h / 2),
        }
    }

    fn ifftshift(&self) -> Spectrum {
        let (w, h) = (self.width, self.height);
        Spectrum {
            width: w,
            height: h,
            data: roll(&self.data, w, h, w - w / 2, h - h / 2),
        }
    }
}

pub fn fftshift<T: QuadrantShift>(value: &T) -> T {
    value.fftshift()
}

pub fn ifftshift<T: QuadrantShift>(value: &T) -> T {
    value.ifftshift()
}
