//! Linear motion PSFs, forward blurring, AWGN and synthetic plate rendering.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::font;
use crate::raster::Image;

/// Angle (degrees, raster convention) and length (pixels) of a linear
/// uniform motion kernel.
///
/// The angle is measured from the +x axis toward +y, i.e. clockwise on
/// screen since rows grow downward. Rotating an image anti-clockwise by
/// the same angle makes the blur direction horizontal. Angles are folded
/// into `[0, 180)` since a line has no orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub angle: f64,
    pub length: usize,
}

impl KernelParams {
    pub fn new(angle: f64, length: usize) -> Result<KernelParams> {
        if !angle.is_finite() {
            return Err(Error::InvalidArgument(format!("kernel angle {angle} is not finite")));
        }
        if length < 1 {
            return Err(Error::InvalidArgument("kernel length must be >= 1".into()));
        }
        Ok(KernelParams {
            angle: normalize_angle(angle),
            length,
        })
    }
}

/// Folds an angle in degrees into `[0, 180)`.
pub fn normalize_angle(angle: f64) -> f64 {
    let a = angle.rem_euclid(180.0);
    // rem_euclid can round up to exactly 180 for tiny negative inputs
    if a >= 180.0 {
        0.0
    } else {
        a
    }
}

/// 180-degree-periodic distance between two line angles, in `[0, 90]`.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(180.0);
    d.min(180.0 - d)
}

/// A normalized, non-negative blur kernel with its generating parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Psf {
    width: usize,
    height: usize,
    weights: Vec<f64>,
    params: KernelParams,
}

impl Psf {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, x: usize, y: usize) -> f64 {
        self.weights[y * self.width + x]
    }

    pub fn params(&self) -> KernelParams {
        self.params
    }

    pub fn angle(&self) -> f64 {
        self.params.angle
    }

    pub fn length(&self) -> usize {
        self.params.length
    }

    /// Index of the kernel origin inside the plane.
    pub fn center(&self) -> (usize, usize) {
        (self.width / 2, self.height / 2)
    }

    pub fn identity() -> Psf {
        Psf {
            width: 1,
            height: 1,
            weights: vec![1.0],
            params: KernelParams { angle: 0.0, length: 1 },
        }
    }

    /// Iterates `(dx, dy, weight)` over non-zero taps, offsets relative to the center.
    pub fn taps(&self) -> impl Iterator<Item = (isize, isize, f64)> + '_ {
        let (cx, cy) = self.center();
        self.weights.iter().enumerate().filter(|(_, &w)| w != 0.0).map(move |(i, &w)| {
            let (x, y) = (i % self.width, i / self.width);
            (x as isize - cx as isize, y as isize - cy as isize, w)
        })
    }
}

// Length of the segment p0->p1 inside the axis-aligned box (Liang-Barsky).
fn clipped_length(p0: (f64, f64), p1: (f64, f64), bx: (f64, f64), by: (f64, f64)) -> f64 {
    let (dx, dy) = (p1.0 - p0.0, p1.1 - p0.1);
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    for (p, q) in [
        (-dx, p0.0 - bx.0),
        (dx, bx.1 - p0.0),
        (-dy, p0.1 - by.0),
        (dy, by.1 - p0.1),
    ] {
        if p == 0.0 {
            if q < 0.0 {
                return 0.0;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    (t1 - t0).max(0.0) * dx.hypot(dy)
}

// Coverage below this (in pixels of path length) is treated as a corner graze.
const MIN_COVERAGE: f64 = 1e-9;

/// Rasterizes a centered segment of `length` pixels at `angle`.
///
/// Each pixel the zero-width segment crosses gets weight equal to the
/// path length inside it; the plane is then cropped to the smallest
/// odd-sized box around the center and normalized to unit sum.
pub fn make_psf(params: KernelParams) -> Result<Psf> {
    let params = KernelParams::new(params.angle, params.length)?;
    if params.length == 1 {
        return Ok(Psf::identity());
    }
    let half = params.length as f64 / 2.0;
    let (sin, cos) = params.angle.to_radians().sin_cos();
    let (ex, ey) = (half * cos, half * sin);
    let reach = half.ceil() as isize + 1;
    let side = (2 * reach + 1) as usize;
    let mut cover = vec![0.0; side * side];
    for y in -reach..=reach {
        for x in -reach..=reach {
            let (xf, yf) = (x as f64, y as f64);
            let len = clipped_length((-ex, -ey), (ex, ey), (xf - 0.5, xf + 0.5), (yf - 0.5, yf + 0.5));
            if len > MIN_COVERAGE {
                cover[(y + reach) as usize * side + (x + reach) as usize] = len;
            }
        }
    }
    let (mut rx, mut ry) = (0isize, 0isize);
    for y in -reach..=reach {
        for x in -reach..=reach {
            if cover[(y + reach) as usize * side + (x + reach) as usize] > 0.0 {
                rx = rx.max(x.abs());
                ry = ry.max(y.abs());
            }
        }
    }
    let (width, height) = ((2 * rx + 1) as usize, (2 * ry + 1) as usize);
    let mut weights = Vec::with_capacity(width * height);
    for y in -ry..=ry {
        for x in -rx..=rx {
            weights.push(cover[(y + reach) as usize * side + (x + reach) as usize]);
        }
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    Ok(Psf {
        width,
        height,
        weights,
        params,
    })
}

/// How `blur` reads samples outside the raster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Periodic extension; blur becomes circular convolution.
    #[default]
    Wrap,
    /// Edge samples repeat outward.
    Replicate,
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Boundary> {
        match s {
            "wrap" => Ok(Boundary::Wrap),
            "replicate" => Ok(Boundary::Replicate),
            other => Err(Error::InvalidArgument(format!("unknown boundary {other:?}"))),
        }
    }
}

/// Convolves each channel with `psf`.
pub fn blur(img: &Image, psf: &Psf, boundary: Boundary) -> Result<Image> {
    let (w, h) = (img.width(), img.height());
    if psf.width() > w || psf.height() > h {
        return Err(Error::PsfTooLarge {
            psf_width: psf.width(),
            psf_height: psf.height(),
            width: w,
            height: h,
        });
    }
    let taps: Vec<_> = psf.taps().collect();
    let index = |v: isize, n: usize| -> usize {
        match boundary {
            Boundary::Wrap => v.rem_euclid(n as isize) as usize,
            Boundary::Replicate => v.clamp(0, n as isize - 1) as usize,
        }
    };
    let planes = img
        .planes()
        .iter()
        .map(|plane| {
            let mut out = vec![0.0; w * h];
            for (dx, dy, wt) in &taps {
                // out(x, y) += k(d) * in(x - d)
                for y in 0..h {
                    let sy = index(y as isize - dy, h);
                    let row = &plane[sy * w..(sy + 1) * w];
                    let dst = &mut out[y * w..(y + 1) * w];
                    for (x, o) in dst.iter_mut().enumerate() {
                        *o += wt * row[index(x as isize - dx, w)];
                    }
                }
            }
            out
        })
        .collect();
    Ok(Image::from_planes_unchecked(w, h, planes))
}

/// Additive white Gaussian noise parameters.
///
/// Samples come from `ChaCha20Rng::seed_from_u64(seed)` (rand_chacha)
/// through `rand_distr::Normal`, drawn channel by channel in row-major
/// order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(sigma: f64, seed: u64) -> Result<NoiseSpec> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!("noise sigma {sigma} must be >= 0")));
        }
        Ok(NoiseSpec { sigma, seed })
    }

    pub fn none() -> NoiseSpec {
        NoiseSpec { sigma: 0.0, seed: 0 }
    }
}

/// Adds seeded i.i.d. N(0, sigma^2) noise. The result is not clamped.
pub fn add_noise(img: &Image, spec: NoiseSpec) -> Result<Image> {
    let spec = NoiseSpec::new(spec.sigma, spec.seed)?;
    if spec.sigma == 0.0 {
        return Ok(img.clone());
    }
    let normal = Normal::new(0.0, spec.sigma).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let planes = img
        .planes()
        .iter()
        .map(|p| p.iter().map(|&v| v + normal.sample(&mut rng)).collect())
        .collect();
    Ok(Image::from_planes_unchecked(img.width(), img.height(), planes))
}

/// Shades used by [`render_plate_with`]; one entry per output channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlateStyle {
    pub background: Vec<f64>,
    pub panel: Vec<f64>,
    pub ink: Vec<f64>,
}

impl PlateStyle {
    pub fn gray() -> PlateStyle {
        PlateStyle {
            background: vec![0.25],
            panel: vec![0.9],
            ink: vec![0.1],
        }
    }

    /// Yellow plate on a blue-gray car body.
    pub fn color() -> PlateStyle {
        PlateStyle {
            background: vec![0.22, 0.26, 0.34],
            panel: vec![0.95, 0.84, 0.28],
            ink: vec![0.08, 0.08, 0.1],
        }
    }

    pub fn channels(&self) -> usize {
        self.panel.len()
    }
}

impl Default for PlateStyle {
    fn default() -> Self {
        PlateStyle::gray()
    }
}

pub const MIN_PLATE_WIDTH: usize = 32;
pub const MIN_PLATE_HEIGHT: usize = 16;

// Adds `amount * overlap(pixel, rect)` for every pixel the rectangle touches.
fn accumulate_rect(acc: &mut [f64], w: usize, h: usize, x0: f64, x1: f64, y0: f64, y1: f64) {
    let xs = x0.floor().max(0.0) as usize;
    let xe = (x1.ceil() as usize).min(w);
    let ys = y0.floor().max(0.0) as usize;
    let ye = (y1.ceil() as usize).min(h);
    for y in ys..ye {
        let oy = (y1.min(y as f64 + 1.0) - y0.max(y as f64)).max(0.0);
        if oy == 0.0 {
            continue;
        }
        for x in xs..xe {
            let ox = (x1.min(x as f64 + 1.0) - x0.max(x as f64)).max(0.0);
            acc[y * w + x] += ox * oy;
        }
    }
}

/// Renders `text` in the embedded 5x7 font on a light panel, gray style.
pub fn render_plate(text: &str, width: usize, height: usize) -> Result<Image> {
    render_plate_with(text, width, height, &PlateStyle::gray())
}

/// Renders `text` with explicit shades.
///
/// Glyph cells are laid out at a fractional scale and every pixel takes the
/// exact area coverage of the panel and ink rectangles, so glyph edges are
/// anti-aliased and not tied to the pixel grid.
pub fn render_plate_with(text: &str, width: usize, height: usize, style: &PlateStyle) -> Result<Image> {
    if text.is_empty() {
        return Err(Error::InvalidArgument("plate text is empty".into()));
    }
    if width < MIN_PLATE_WIDTH || height < MIN_PLATE_HEIGHT {
        return Err(Error::InvalidArgument(format!(
            "plate must be at least {MIN_PLATE_WIDTH}x{MIN_PLATE_HEIGHT}, got {width}x{height}"
        )));
    }
    let channels = style.channels();
    if (channels != 1 && channels != 3)
        || style.background.len() != channels
        || style.ink.len() != channels
    {
        return Err(Error::InvalidArgument("plate style needs 1 or 3 shades per role".into()));
    }
    let glyphs = text
        .chars()
        .map(|c| font::glyph(c).ok_or(Error::UnsupportedCharacter(c)))
        .collect::<Result<Vec<_>>>()?;

    // text grid: glyph columns plus one spacing column between glyphs,
    // with a one-cell margin of panel all around
    let cols = glyphs.len() * (font::GLYPH_WIDTH + 1) - 1;
    let rows = font::GLYPH_HEIGHT;
    let (w, h) = (width as f64, height as f64);
    let cell = 0.9 * (w / (cols + 2) as f64).min(h / (rows + 2) as f64);
    let panel_w = (cols + 2) as f64 * cell;
    let panel_h = (rows + 2) as f64 * cell;
    let px0 = (w - panel_w) / 2.0;
    let py0 = (h - panel_h) / 2.0;

    let mut panel = vec![0.0; width * height];
    accumulate_rect(&mut panel, width, height, px0, px0 + panel_w, py0, py0 + panel_h);
    let mut ink = vec![0.0; width * height];
    for (i, rows_bits) in glyphs.iter().enumerate() {
        for r in 0..font::GLYPH_HEIGHT {
            for c in 0..font::GLYPH_WIDTH {
                if font::is_set(rows_bits, c, r) {
                    let gx = px0 + (1 + i * (font::GLYPH_WIDTH + 1) + c) as f64 * cell;
                    let gy = py0 + (1 + r) as f64 * cell;
                    accumulate_rect(&mut ink, width, height, gx, gx + cell, gy, gy + cell);
                }
            }
        }
    }
    let planes = (0..channels)
        .map(|k| {
            let (bg, pa, ik) = (style.background[k], style.panel[k], style.ink[k]);
            panel
                .iter()
                .zip(&ink)
                .map(|(&p, &i)| bg + p * (pa - bg) + i.min(1.0) * (ik - pa))
                .collect()
        })
        .collect();
    Image::from_planes(width, height, planes)
}
