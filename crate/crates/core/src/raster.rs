//! Planar real-valued rasters, PNG/PGM I/O, rotation and Sobel edge maps.
//!
//! Coordinates follow raster order throughout the crate: `x` is the column,
//! `y` is the row and `y` grows downward. "Anti-clockwise" always means
//! anti-clockwise as the image is displayed.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A planar raster with 1 or 3 channels of `f64` samples.
///
/// Loaded images carry samples in `[0, 1]`. Intermediates (cepstra, deblurred
/// output) may leave that range; the only requirement is that samples are
/// finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    planes: Vec<Vec<f64>>,
}

impl Image {
    /// Builds an image from per-channel row-major planes.
    pub fn from_planes(width: usize, height: usize, planes: Vec<Vec<f64>>) -> Result<Image> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "zero dimension {width}x{height}"
            )));
        }
        if planes.len() != 1 && planes.len() != 3 {
            return Err(Error::InvalidImage(format!(
                "expected 1 or 3 channels, got {}",
                planes.len()
            )));
        }
        for (k, plane) in planes.iter().enumerate() {
            if plane.len() != width * height {
                return Err(Error::InvalidImage(format!(
                    "channel {k} has {} samples, expected {}",
                    plane.len(),
                    width * height
                )));
            }
            if let Some(i) = plane.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidImage(format!(
                    "channel {k} sample {i} is not finite"
                )));
            }
        }
        Ok(Image {
            width,
            height,
            planes,
        })
    }

    /// Single-channel image from a row-major buffer.
    pub fn from_gray(width: usize, height: usize, data: Vec<f64>) -> Result<Image> {
        Image::from_planes(width, height, vec![data])
    }

    /// Single-channel image filled with `value`.
    pub fn filled(width: usize, height: usize, value: f64) -> Image {
        assert!(width > 0 && height > 0 && value.is_finite());
        Image {
            width,
            height,
            planes: vec![vec![value; width * height]],
        }
    }

    /// Single-channel image sampled from `f(x, y)`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Image {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Image::from_gray(width, height, data).expect("from_fn produced an invalid image")
    }

    // Internal constructor for planes already known to be valid.
    pub(crate) fn from_planes_unchecked(width: usize, height: usize, planes: Vec<Vec<f64>>) -> Image {
        debug_assert!(planes.iter().all(|p| p.len() == width * height));
        Image {
            width,
            height,
            planes,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.planes.len()
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn plane(&self, channel: usize) -> &[f64] {
        &self.planes[channel]
    }

    pub fn planes(&self) -> &[Vec<f64>] {
        &self.planes
    }

    pub fn into_planes(self) -> Vec<Vec<f64>> {
        self.planes
    }

    pub fn get(&self, channel: usize, x: usize, y: usize) -> f64 {
        self.planes[channel][y * self.width + x]
    }

    /// Quefrency/frequency origin used by `fftshift`, rotation and the Hough
    /// transform: `(width / 2, height / 2)` in integer division.
    pub fn center(&self) -> (usize, usize) {
        (self.width / 2, self.height / 2)
    }

    pub(crate) fn require_single_channel(&self, what: &str) -> Result<()> {
        if self.channels() != 1 {
            return Err(Error::InvalidArgument(format!(
                "{what} expects a single-channel plane, got {} channels",
                self.channels()
            )));
        }
        Ok(())
    }

    /// Applies `f` to every sample of every channel.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Image {
        let planes = self
            .planes
            .iter()
            .map(|p| p.iter().map(|&v| f(v)).collect())
            .collect();
        Image::from_planes(self.width, self.height, planes).expect("map produced non-finite samples")
    }

    /// Applies `f` to each channel plane independently.
    pub fn map_planes(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Image {
        let planes = self.planes.iter().map(|p| f(p)).collect();
        Image::from_planes(self.width, self.height, planes).expect("map_planes produced an invalid plane")
    }

    /// Rescales each channel affinely to `[0, 1]`; constant channels become 0.
    pub fn normalized(&self) -> Image {
        self.map_planes(|p| {
            let lo = p.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let span = hi - lo;
            if span > 0.0 {
                p.iter().map(|v| (v - lo) / span).collect()
            } else {
                vec![0.0; p.len()]
            }
        })
    }

    /// Smallest and largest sample over all channels.
    pub fn range(&self) -> (f64, f64) {
        self.planes
            .iter()
            .flatten()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Mean sample value over all channels.
    pub fn mean(&self) -> f64 {
        let n = (self.len() * self.channels()) as f64;
        self.planes.iter().flatten().sum::<f64>() / n
    }
}

/// One boolean per pixel, same dimensions as the plane it was derived from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMap {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMap {
    pub fn new(width: usize, height: usize) -> BinaryMap {
        BinaryMap {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Result<BinaryMap> {
        if bits.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "{} bits for a {width}x{height} map",
                bits.len()
            )));
        }
        Ok(BinaryMap {
            width,
            height,
            bits,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Iterates `(x, y)` of every set pixel in raster order.
    pub fn points(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i % w, i / w))
    }

    pub fn center(&self) -> (usize, usize) {
        (self.width / 2, self.height / 2)
    }
}

fn extension(path: &Path) -> Option<String> {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
}

/// Reads an 8-bit PNG (gray, gray+alpha, RGB, RGBA) or binary PGM.
///
/// Samples are scaled by 1/255. Alpha is dropped; gray+alpha loads as gray.
pub fn load_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::FileNotFound(path.to_path_buf()));
    }
    let format = match extension(path).as_deref() {
        Some("png") => image::ImageFormat::Png,
        Some("pgm") => image::ImageFormat::Pnm,
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "{} (extension {:?})",
                path.display(),
                other.unwrap_or("")
            )))
        }
    };
    let bytes = std::fs::read(path)?;
    let decoded = image::load_from_memory_with_format(&bytes, format).map_err(|e| Error::Decode {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let (width, height) = (decoded.width() as usize, decoded.height() as usize);
    if width == 0 || height == 0 {
        return Err(Error::InvalidImage(format!(
            "{} has zero dimension",
            path.display()
        )));
    }
    let scale = |v: u8| f64::from(v) / 255.0;
    let planes = if decoded.color().has_color() {
        let rgb = decoded.to_rgb8();
        let mut planes: Vec<Vec<f64>> = (0..3).map(|_| Vec::with_capacity(width * height)).collect();
        for px in rgb.pixels() {
            for (plane, &v) in planes.iter_mut().zip(px.0.iter()) {
                plane.push(scale(v));
            }
        }
        planes
    } else {
        if decoded.color().bytes_per_pixel() / decoded.color().channel_count() > 1 {
            return Err(Error::UnsupportedFormat(format!(
                "{}: only 8-bit samples are supported",
                path.display()
            )));
        }
        vec![decoded.to_luma8().into_raw().into_iter().map(scale).collect()]
    };
    Image::from_planes(width, height, planes)
}

fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Writes `img` as 8-bit PNG or binary PGM, chosen by extension.
///
/// Samples are clamped to `[0, 1]` and stored as `round(v * 255)`. A PGM
/// destination requires a single-channel image.
pub fn save_image(img: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let (w, h) = (img.width() as u32, img.height() as u32);
    let format = match extension(path).as_deref() {
        Some("png") => image::ImageFormat::Png,
        Some("pgm") => {
            if img.channels() != 1 {
                return Err(Error::UnsupportedFormat(format!(
                    "{}: PGM holds a single channel, image has {}",
                    path.display(),
                    img.channels()
                )));
            }
            image::ImageFormat::Pnm
        }
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "{} (extension {:?})",
                path.display(),
                other.unwrap_or("")
            )))
        }
    };
    let encode_err = |e: image::ImageError| match e {
        image::ImageError::IoError(io) => Error::Io(io),
        other => Error::Encode {
            path: path.to_path_buf(),
            reason: other.to_string(),
        },
    };
    if img.channels() == 1 {
        let raw: Vec<u8> = img.plane(0).iter().map(|&v| quantize(v)).collect();
        let buf = image::GrayImage::from_raw(w, h, raw).expect("buffer size matches dimensions");
        // the pnm encoder picks P5 for 8-bit luma
        buf.save_with_format(path, format).map_err(encode_err)
    } else {
        let mut raw = Vec::with_capacity(img.len() * 3);
        for i in 0..img.len() {
            for c in 0..3 {
                raw.push(quantize(img.plane(c)[i]));
            }
        }
        let buf = image::RgbImage::from_raw(w, h, raw).expect("buffer size matches dimensions");
        buf.save_with_format(path, format).map_err(encode_err)
    }
}

/// Splits an image into single-channel images, one per channel.
pub fn to_channels(img: &Image) -> Vec<Image> {
    img.planes()
        .iter()
        .map(|p| Image::from_planes_unchecked(img.width(), img.height(), vec![p.clone()]))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interpolation {
    Nearest,
    #[default]
    Bilinear,
}

/// Rotates every channel anti-clockwise by `angle` degrees about
/// `img.center()`.
///
/// The output keeps the input dimensions; source positions outside the
/// raster read as 0. With `y` growing downward, a point at `(cx + d, cy)`
/// lands on `(cx, cy - d)` for `angle = 90`.
pub fn rotate(img: &Image, angle: f64, interpolation: Interpolation) -> Image {
    assert!(angle.is_finite(), "rotation angle must be finite");
    let (w, h) = (img.width(), img.height());
    let (cx, cy) = img.center();
    let (sin, cos) = angle.to_radians().sin_cos();
    let planes = img
        .planes()
        .iter()
        .map(|plane| {
            let sample = |x: isize, y: isize| -> f64 {
                if x < 0 || y < 0 || x as usize >= w || y as usize >= h {
                    0.0
                } else {
                    plane[y as usize * w + x as usize]
                }
            };
            let mut out = Vec::with_capacity(w * h);
            for y in 0..h {
                let dy = y as f64 - cy as f64;
                for x in 0..w {
                    let dx = x as f64 - cx as f64;
                    // inverse map: destination offset rotated back clockwise
                    let sx = dx * cos - dy * sin + cx as f64;
                    let sy = dx * sin + dy * cos + cy as f64;
                    let v = match interpolation {
                        Interpolation::Nearest => sample(sx.round() as isize, sy.round() as isize),
                        Interpolation::Bilinear => {
                            let x0 = sx.floor();
                            let y0 = sy.floor();
                            let fx = sx - x0;
                            let fy = sy - y0;
                            let (x0, y0) = (x0 as isize, y0 as isize);
                            let mut acc = (1.0 - fx) * (1.0 - fy) * sample(x0, y0);
                            if fx != 0.0 {
                                acc += fx * (1.0 - fy) * sample(x0 + 1, y0);
                            }
                            if fy != 0.0 {
                                acc += (1.0 - fx) * fy * sample(x0, y0 + 1);
                                if fx != 0.0 {
                                    acc += fx * fy * sample(x0 + 1, y0 + 1);
                                }
                            }
                            acc
                        }
                    };
                    out.push(v);
                }
            }
            out
        })
        .collect();
    Image::from_planes_unchecked(w, h, planes)
}

/// Parameters of the Sobel edge detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeConfig {
    /// Relative threshold `t`: a pixel is an edge iff its gradient magnitude
    /// is `>= t * max` (max taken over non-excluded pixels).
    pub threshold: f64,
    /// Pixels within this Chebyshev distance of `center()` are forced to
    /// non-edges and ignored when computing the maximum. 0 disables.
    pub center_exclusion: usize,
}

impl Default for EdgeConfig {
    fn default() -> Self {
        EdgeConfig {
            threshold: 0.5,
            center_exclusion: 0,
        }
    }
}

/// 3x3 Sobel gradient magnitude. Border pixels are replicated outward, so a
/// constant plane has zero gradient everywhere.
pub fn sobel_magnitude(img: &Image) -> Result<Vec<f64>> {
    img.require_single_channel("sobel_magnitude")?;
    let (w, h) = (img.width() as isize, img.height() as isize);
    let p = img.plane(0);
    let at = |x: isize, y: isize| -> f64 {
        let x = x.clamp(0, w - 1);
        let y = y.clamp(0, h - 1);
        p[(y * w + x) as usize]
    };
    let mut mag = Vec::with_capacity(p.len());
    for y in 0..h {
        for x in 0..w {
            let gx = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1));
            let gy = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1));
            mag.push(gx.hypot(gy));
        }
    }
    Ok(mag)
}

/// Thresholded Sobel edge map of a single-channel plane.
///
/// A flat plane (zero gradient everywhere outside the exclusion zone) yields
/// an empty map.
pub fn edge_map(img: &Image, cfg: &EdgeConfig) -> Result<BinaryMap> {
    if !(cfg.threshold > 0.0 && cfg.threshold <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "edge threshold {} outside (0, 1]",
            cfg.threshold
        )));
    }
    let mut mag = sobel_magnitude(img)?;
    let (w, h) = (img.width(), img.height());
    if cfg.center_exclusion > 0 {
        let (cx, cy) = img.center();
        let r = cfg.center_exclusion;
        for y in cy.saturating_sub(r)..(cy + r + 1).min(h) {
            for x in cx.saturating_sub(r)..(cx + r + 1).min(w) {
                mag[y * w + x] = 0.0;
            }
        }
    }
    let max = mag.iter().cloned().fold(0.0, f64::max);
    if max <= 0.0 {
        return Ok(BinaryMap::new(w, h));
    }
    let cut = cfg.threshold * max;
    let bits = mag.iter().map(|&m| m > 0.0 && m >= cut).collect();
    BinaryMap::from_bits(w, h, bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(w: usize, h: usize) -> Image {
        Image::from_fn(w, h, |x, y| (x as f64 + 0.5 * y as f64) / (w as f64 + 0.5 * h as f64))
    }

    #[test]
    fn rejects_bad_channel_counts_and_non_finite() {
        assert!(Image::from_planes(2, 2, vec![vec![0.0; 4]; 2]).is_err());
        assert!(Image::from_gray(2, 2, vec![0.0, f64::NAN, 0.0, 0.0]).is_err());
        assert!(Image::from_gray(0, 2, vec![]).is_err());
    }

    #[test]
    fn pgm_bytes_scale_by_255() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tiny.pgm");
        let mut bytes = b"P5\n2 2\n255\n".to_vec();
        bytes.extend_from_slice(&[0, 255, 128, 64]);
        std::fs::write(&path, bytes).unwrap();
        let img = load_image(&path).unwrap();
        assert_eq!(img.channels(), 1);
        assert_eq!(img.plane(0), &[0.0, 1.0, 128.0 / 255.0, 64.0 / 255.0]);
    }

    #[test]
    fn missing_file_and_bad_extension() {
        let err = load_image("/definitely/not/here.png").unwrap_err();
        assert!(err.to_string().contains("file not found"));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.bmp");
        std::fs::write(&path, b"junk").unwrap();
        assert!(matches!(load_image(&path), Err(Error::UnsupportedFormat(_))));
        assert!(matches!(
            save_image(&Image::filled(2, 2, 0.5), dir.path().join("x.tiff")),
            Err(Error::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn rgb_png_loads_three_channels() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rgb.png");
        let img = Image::from_planes(
            3,
            2,
            vec![vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0], vec![1.0; 6], vec![0.5; 6]],
        )
        .unwrap();
        save_image(&img, &path).unwrap();
        let back = load_image(&path).unwrap();
        assert_eq!(back.channels(), 3);
        for c in 0..3 {
            for (a, b) in img.plane(c).iter().zip(back.plane(c)) {
                assert!((a - b).abs() <= 0.5 / 255.0 + 1e-12);
            }
        }
    }

    #[test]
    fn save_clamps_overshoot() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("clamp.pgm");
        save_image(&Image::from_gray(2, 1, vec![1.3, -0.1]).unwrap(), &path).unwrap();
        assert_eq!(load_image(&path).unwrap().plane(0), &[1.0, 0.0]);
    }

    #[test]
    fn pgm_rejects_color() {
        let dir = tempfile::tempdir().unwrap();
        let img = Image::from_planes(2, 2, vec![vec![0.0; 4]; 3]).unwrap();
        assert!(save_image(&img, dir.path().join("c.pgm")).is_err());
    }

    #[test]
    fn channels_split_preserves_samples() {
        let img = Image::from_planes(2, 1, vec![vec![0.1, 0.2], vec![0.3, 0.4], vec![0.5, 0.6]]).unwrap();
        let parts = to_channels(&img);
        assert_eq!(parts.len(), 3);
        for (k, p) in parts.iter().enumerate() {
            assert_eq!((p.width(), p.height(), p.channels()), (2, 1, 1));
            assert_eq!(p.plane(0), img.plane(k));
        }
        let gray = Image::filled(3, 3, 0.7);
        assert_eq!(to_channels(&gray), vec![gray.clone()]);
    }

    #[test]
    fn rotate_zero_is_identity() {
        let img = ramp(9, 7);
        assert_eq!(rotate(&img, 0.0, Interpolation::Nearest), img);
        assert_eq!(rotate(&img, 0.0, Interpolation::Bilinear), img);
    }

    #[test]
    fn rotate_quarter_turn_matches_coordinate_oracle() {
        let (w, h) = (21, 17);
        let (cx, cy) = (w / 2, h / 2);
        for d in [1usize, 3, 6] {
            let mut data = vec![0.0; w * h];
            data[cy * w + cx + d] = 1.0;
            let img = Image::from_gray(w, h, data).unwrap();
            let out = rotate(&img, 90.0, Interpolation::Nearest);
            // independent oracle: forward-map each lit pixel
            // anti-clockwise on screen is (x, y) -> (y, -x) in offsets
            let mut expect = vec![0.0; w * h];
            for y in 0..h {
                for x in 0..w {
                    if img.get(0, x, y) > 0.0 {
                        let (ox, oy) = (x as isize - cx as isize, y as isize - cy as isize);
                        let (nx, ny) = (oy, -ox);
                        expect[(ny + cy as isize) as usize * w + (nx + cx as isize) as usize] = 1.0;
                    }
                }
            }
            assert_eq!(out.plane(0), expect.as_slice());
            assert_eq!(out.get(0, cx, cy - d), 1.0);
        }
    }

    #[test]
    fn rotate_round_trip_on_ramp() {
        let img = ramp(64, 48);
        let back = rotate(&rotate(&img, 37.0, Interpolation::Bilinear), -37.0, Interpolation::Bilinear);
        // compare away from the zero-filled corners
        let (cx, cy) = img.center();
        let mut sum = 0.0;
        let mut n = 0usize;
        for y in 0..img.height() {
            for x in 0..img.width() {
                let r = ((x as f64 - cx as f64).powi(2) + (y as f64 - cy as f64).powi(2)).sqrt();
                if r < 20.0 {
                    sum += (img.get(0, x, y) - back.get(0, x, y)).abs();
                    n += 1;
                }
            }
        }
        assert!(sum / (n as f64) < 0.05);
    }

    #[test]
    fn edges_of_constant_image_are_empty() {
        let map = edge_map(&Image::filled(16, 16, 0.4), &EdgeConfig::default()).unwrap();
        assert_eq!(map.count(), 0);
        assert_eq!((map.width(), map.height()), (16, 16));
    }

    #[test]
    fn vertical_step_edges_hug_the_step() {
        let c = 8;
        let img = Image::from_fn(16, 12, |x, _| if x >= c { 1.0 } else { 0.0 });
        let map = edge_map(
            &img,
            &EdgeConfig {
                threshold: 0.9,
                center_exclusion: 0,
            },
        )
        .unwrap();
        // brute-force Sobel oracle away from the zero-padded border:
        // |gx| = 4 at columns c-1 and c, 0 elsewhere
        assert!(map.count() > 0);
        for (x, y) in map.points() {
            if y > 0 && y + 1 < 12 && x + 1 < 16 {
                assert!((c - 1..=c + 1).contains(&x), "edge at column {x}");
            }
        }
        for y in 1..11 {
            assert!(map.get(c - 1, y) && map.get(c, y));
        }
    }

    #[test]
    fn threshold_one_keeps_only_the_maximum() {
        let img = Image::from_fn(9, 9, |x, y| if (x, y) == (4, 4) { 1.0 } else { 0.0 });
        let mag = sobel_magnitude(&img).unwrap();
        let max = mag.iter().cloned().fold(0.0, f64::max);
        let map = edge_map(
            &img,
            &EdgeConfig {
                threshold: 1.0,
                center_exclusion: 0,
            },
        )
        .unwrap();
        assert!(map.count() > 0);
        for (x, y) in map.points() {
            assert_eq!(mag[y * 9 + x], max);
        }
    }

    #[test]
    fn edge_map_requires_single_channel() {
        let img = Image::from_planes(4, 4, vec![vec![0.0; 16]; 3]).unwrap();
        assert!(edge_map(&img, &EdgeConfig::default()).is_err());
    }

    #[test]
    fn center_exclusion_masks_origin() {
        let img = Image::from_fn(15, 15, |x, y| if (x, y) == (7, 7) { 1.0 } else { 0.0 });
        let cfg = EdgeConfig {
            threshold: 0.1,
            center_exclusion: 2,
        };
        assert_eq!(edge_map(&img, &cfg).unwrap().count(), 0);
    }
}
