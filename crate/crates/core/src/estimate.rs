//! Blind estimation of a linear motion kernel.
//!
//! Both stages work on the fftshifted cepstrum of each channel. Uniform
//! linear blur leaves a streak through the quefrency origin along the blur
//! direction, with a negative dip at a distance equal to the blur length.
//!
//! * Angle: Sobel edge map of the cepstrum, then a Hough vote. A streak at
//!   kernel angle `a` is a line through the origin whose normal is at
//!   `a + 90`, so the sweep runs over normals `[theta_min + 90,
//!   theta_max + 90]` and the winning normal is mapped back.
//! * Length: rotate the cepstrum anti-clockwise by the angle so the streak
//!   is horizontal, average each column, and take the offset of the
//!   smallest column mean in `[min_length, max_length]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Stage};
use crate::kernel::{normalize_angle, KernelParams};
use crate::raster::{edge_map, rotate, to_channels, BinaryMap, EdgeConfig, Image, Interpolation};
use crate::spectral::{cepstrum, QuadrantShift, DEFAULT_CEPSTRUM_FLOOR};

/// How per-channel lengths combine into one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthAggregate {
    #[default]
    Max,
    Min,
    /// Lower median for an even number of channels.
    Median,
}

impl LengthAggregate {
    pub const ALL: [LengthAggregate; 3] = [LengthAggregate::Max, LengthAggregate::Min, LengthAggregate::Median];

    /// Combines `values`; `None` when empty.
    pub fn apply(self, values: &[usize]) -> Option<usize> {
        if values.is_empty() {
            return None;
        }
        match self {
            LengthAggregate::Max => values.iter().copied().max(),
            LengthAggregate::Min => values.iter().copied().min(),
            LengthAggregate::Median => {
                let mut v = values.to_vec();
                v.sort_unstable();
                Some(v[(v.len() - 1) / 2])
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LengthAggregate::Max => "max",
            LengthAggregate::Min => "min",
            LengthAggregate::Median => "median",
        }
    }
}

impl std::str::FromStr for LengthAggregate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" => Ok(LengthAggregate::Max),
            "min" => Ok(LengthAggregate::Min),
            "median" => Ok(LengthAggregate::Median),
            other => Err(Error::InvalidArgument(format!("unknown length aggregate {other:?}"))),
        }
    }
}

/// How per-channel angles combine. Only the arithmetic mean is offered; the
/// operating range never straddles the 0/180 wrap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleAggregate {
    #[default]
    Mean,
}

/// All knobs of the estimator. Serialized verbatim into every run report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimationConfig {
    /// Smallest candidate kernel angle, degrees.
    pub theta_min: f64,
    /// Largest candidate kernel angle, degrees (inclusive).
    pub theta_max: f64,
    pub theta_step: f64,
    /// Upper end `R` of the length search, pixels.
    pub max_length: usize,
    /// Lower end of the length search. Offsets below this sit inside the
    /// central cepstral peak.
    pub min_length: usize,
    /// Relative Sobel threshold for the cepstrum edge map.
    pub edge_threshold: f64,
    /// Half-width of the square around the quefrency origin that is left
    /// out of the edge map.
    pub edge_exclusion: usize,
    /// Width of a Hough distance bin, pixels.
    pub rho_resolution: f64,
    pub cepstrum_floor: f64,
    pub angle_aggregate: AngleAggregate,
    pub length_aggregate: LengthAggregate,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        EstimationConfig {
            theta_min: 40.0,
            theta_max: 140.0,
            theta_step: 1.0,
            max_length: 50,
            min_length: 3,
            edge_threshold: 0.1,
            edge_exclusion: 3,
            rho_resolution: 1.0,
            cepstrum_floor: DEFAULT_CEPSTRUM_FLOOR,
            angle_aggregate: AngleAggregate::Mean,
            length_aggregate: LengthAggregate::Max,
        }
    }
}

impl EstimationConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.theta_min.is_finite() && self.theta_max.is_finite() && self.theta_min < self.theta_max) {
            return bad(format!("theta range [{}, {}] is empty", self.theta_min, self.theta_max));
        }
        if !(self.theta_step > 0.0 && self.theta_step.is_finite()) {
            return bad(format!("theta step {} must be > 0", self.theta_step));
        }
        if self.min_length < 1 || self.min_length >= self.max_length {
            return bad(format!(
                "length range [{}, {}] is invalid",
                self.min_length, self.max_length
            ));
        }
        if !(self.edge_threshold > 0.0 && self.edge_threshold <= 1.0) {
            return bad(format!("edge threshold {} outside (0, 1]", self.edge_threshold));
        }
        if !(self.rho_resolution > 0.0 && self.rho_resolution.is_finite()) {
            return bad(format!("rho resolution {} must be > 0", self.rho_resolution));
        }
        if self.cepstrum_floor.is_nan() || self.cepstrum_floor <= 0.0 {
            return bad(format!("cepstrum floor {} must be > 0", self.cepstrum_floor));
        }
        Ok(())
    }

    pub fn edge_config(&self) -> EdgeConfig {
        EdgeConfig {
            threshold: self.edge_threshold,
            center_exclusion: self.edge_exclusion,
        }
    }

    /// Hough sweep over line normals matching the kernel-angle range.
    pub fn hough_params(&self) -> HoughParams {
        HoughParams {
            theta_min: self.theta_min + 90.0,
            theta_max: self.theta_max + 90.0,
            theta_step: self.theta_step,
            rho_resolution: self.rho_resolution,
        }
    }
}

/// Sweep definition for [`hough_accumulate`]; angles are line normals in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoughParams {
    pub theta_min: f64,
    pub theta_max: f64,
    pub theta_step: f64,
    pub rho_resolution: f64,
}

impl HoughParams {
    pub fn new(theta_min: f64, theta_max: f64, theta_step: f64, rho_resolution: f64) -> HoughParams {
        HoughParams {
            theta_min,
            theta_max,
            theta_step,
            rho_resolution,
        }
    }

    /// Inclusive grid `theta_min, theta_min + step, ...` up to `theta_max`.
    pub fn thetas(&self) -> Vec<f64> {
        let n = ((self.theta_max - self.theta_min) / self.theta_step + 1e-9).floor() as usize + 1;
        (0..n).map(|k| self.theta_min + k as f64 * self.theta_step).collect()
    }
}

/// Vote counts over `(rho bin, theta bin)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HoughAccumulator {
    counts: Vec<u32>,
    thetas: Vec<f64>,
    rho_bins: usize,
    // bin index of rho = 0
    rho_offset: usize,
    rho_resolution: f64,
    theta_step: f64,
}

/// The winning accumulator cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoughPeak {
    /// Line normal, degrees.
    pub theta: f64,
    /// Signed distance of the line from the plane center, pixels.
    pub rho: f64,
    pub count: u32,
}

impl HoughAccumulator {
    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn theta_min(&self) -> f64 {
        self.thetas[0]
    }

    pub fn theta_max(&self) -> f64 {
        *self.thetas.last().unwrap()
    }

    pub fn theta_step(&self) -> f64 {
        self.theta_step
    }

    pub fn rho_resolution(&self) -> f64 {
        self.rho_resolution
    }

    pub fn rho_bins(&self) -> usize {
        self.rho_bins
    }

    pub fn rho_of_bin(&self, bin: usize) -> f64 {
        (bin as f64 - self.rho_offset as f64) * self.rho_resolution
    }

    /// Count at `(rho bin, theta index)`.
    pub fn count(&self, rho_bin: usize, theta_index: usize) -> u32 {
        self.counts[theta_index * self.rho_bins + rho_bin]
    }

    /// Count of the cell containing `rho` at `theta_index`.
    pub fn count_at(&self, rho: f64, theta_index: usize) -> u32 {
        let bin = (rho / self.rho_resolution).round() as isize + self.rho_offset as isize;
        if bin < 0 || bin as usize >= self.rho_bins {
            0
        } else {
            self.count(bin as usize, theta_index)
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| u64::from(c)).sum()
    }

    /// Global maximum. Ties go to the smallest theta, then the smallest
    /// `|rho|`, then negative rho. `None` when every count is zero.
    pub fn peak(&self) -> Option<HoughPeak> {
        let mut best: Option<(u32, usize, usize)> = None;
        for t in 0..self.thetas.len() {
            for r in 0..self.rho_bins {
                let c = self.count(r, t);
                if c == 0 {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bc, bt, br)) => {
                        let dist = r.abs_diff(self.rho_offset);
                        let bdist = br.abs_diff(self.rho_offset);
                        c > bc || (c == bc && t == bt && (dist < bdist || (dist == bdist && r < br)))
                    }
                };
                if better {
                    best = Some((c, t, r));
                }
            }
        }
        best.map(|(count, t, r)| HoughPeak {
            theta: self.thetas[t],
            rho: self.rho_of_bin(r),
            count,
        })
    }
}

/// Casts one vote per `(edge point, theta)` with `rho = x cos(theta) + y sin(theta)`.
///
/// Point coordinates are offsets from `edges.center()`, so lines through
/// the middle of the map land at `rho = 0`. The distance axis covers the
/// half-diagonal in both directions.
pub fn hough_accumulate(edges: &BinaryMap, params: &HoughParams) -> HoughAccumulator {
    assert!(params.theta_step > 0.0 && params.rho_resolution > 0.0);
    let thetas = params.thetas();
    let (w, h) = (edges.width(), edges.height());
    let half_diag = (w as f64).hypot(h as f64) / 2.0;
    let rho_offset = (half_diag / params.rho_resolution).ceil() as usize + 1;
    let rho_bins = 2 * rho_offset + 1;
    let trig: Vec<(f64, f64)> = thetas.iter().map(|t| t.to_radians().sin_cos()).collect();
    let mut counts = vec![0u32; rho_bins * thetas.len()];
    let (cx, cy) = edges.center();
    for (px, py) in edges.points() {
        let x = px as f64 - cx as f64;
        let y = py as f64 - cy as f64;
        for (t, &(sin, cos)) in trig.iter().enumerate() {
            let v = x * cos + y * sin;
            let bin = ((v / params.rho_resolution).round() as isize + rho_offset as isize) as usize;
            counts[t * rho_bins + bin] += 1;
        }
    }
    HoughAccumulator {
        counts,
        thetas,
        rho_bins,
        rho_offset,
        rho_resolution: params.rho_resolution,
        theta_step: params.theta_step,
    }
}

/// Kernel angle implied by a cepstral edge map: the Hough peak over the
/// normal sweep of `cfg`, rotated back by 90 degrees.
pub fn kernel_angle_from_edges(edges: &BinaryMap, cfg: &EstimationConfig) -> Result<f64> {
    let acc = hough_accumulate(edges, &cfg.hough_params());
    let peak = acc.peak().ok_or(Error::NoBlurStructure)?;
    Ok(normalize_angle(peak.theta - 90.0))
}

fn is_flat(values: &[f64]) -> bool {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    hi - lo <= 1e-12 * hi.abs().max(lo.abs()).max(1.0)
}

/// Centered cepstrum of a single-channel plane.
pub fn centered_cepstrum(channel: &Image, floor: f64) -> Result<Image> {
    Ok(cepstrum(channel, floor)?.fftshift())
}

/// Edge map the angle stage votes on.
pub fn cepstral_edges(channel: &Image, cfg: &EstimationConfig) -> Result<BinaryMap> {
    let ceps = centered_cepstrum(channel, cfg.cepstrum_floor)?;
    edge_map(&ceps, &cfg.edge_config())
}

/// Kernel angle of one channel, degrees in `[0, 180)`.
pub fn estimate_angle_channel(channel: &Image, cfg: &EstimationConfig) -> Result<f64> {
    cfg.validate()?;
    channel.require_single_channel("estimate_angle_channel")?;
    if is_flat(channel.plane(0)) {
        return Err(Error::NoBlurStructure);
    }
    let edges = cepstral_edges(channel, cfg)?;
    if edges.count() == 0 {
        return Err(Error::NoBlurStructure);
    }
    kernel_angle_from_edges(&edges, cfg)
}

/// Combined angle plus what each channel reported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleEstimate {
    pub angle: f64,
    pub per_channel: Vec<Option<f64>>,
    pub warnings: Vec<String>,
}

/// Mean of the per-channel angles. Channels that fail are skipped with a
/// warning; the call fails only if every channel does.
pub fn estimate_angle(img: &Image, cfg: &EstimationConfig) -> Result<AngleEstimate> {
    cfg.validate()?;
    let mut per_channel = Vec::with_capacity(img.channels());
    let mut warnings = Vec::new();
    let mut first_err = None;
    for (k, ch) in to_channels(img).iter().enumerate() {
        match estimate_angle_channel(ch, cfg) {
            Ok(a) => per_channel.push(Some(a)),
            Err(e) => {
                warnings.push(format!("channel {k}: {e}"));
                first_err.get_or_insert(e);
                per_channel.push(None);
            }
        }
    }
    let ok: Vec<f64> = per_channel.iter().flatten().copied().collect();
    if ok.is_empty() {
        return Err(first_err.unwrap_or(Error::NoBlurStructure));
    }
    let angle = match cfg.angle_aggregate {
        AngleAggregate::Mean => ok.iter().sum::<f64>() / ok.len() as f64,
    };
    Ok(AngleEstimate {
        angle,
        per_channel,
        warnings,
    })
}

/// Mean of each column.
pub fn collapse_columns(plane: &Image) -> Vec<f64> {
    let (w, h) = (plane.width(), plane.height());
    let p = plane.plane(0);
    let mut sums = vec![0.0; w];
    for row in p.chunks_exact(w) {
        for (s, v) in sums.iter_mut().zip(row) {
            *s += v;
        }
    }
    sums.iter().map(|s| s / h as f64).collect()
}

/// Collapsed profile of the centered cepstrum after aligning `angle` with
/// the x axis. Index `w / 2` is the quefrency origin.
pub fn length_profile(channel: &Image, angle: f64, cfg: &EstimationConfig) -> Result<Vec<f64>> {
    channel.require_single_channel("length_profile")?;
    let ceps = centered_cepstrum(channel, cfg.cepstrum_floor)?;
    let aligned = rotate(&ceps, angle, Interpolation::Bilinear);
    Ok(collapse_columns(&aligned))
}

/// Kernel length of one channel given the kernel angle.
pub fn estimate_length_channel(channel: &Image, angle: f64, cfg: &EstimationConfig) -> Result<usize> {
    cfg.validate()?;
    channel.require_single_channel("estimate_length_channel")?;
    if !angle.is_finite() {
        return Err(Error::InvalidArgument(format!("angle {angle} is not finite")));
    }
    let (w, cx) = (channel.width(), channel.width() / 2);
    if cx + cfg.max_length >= w {
        return Err(Error::InvalidArgument(format!(
            "max length {} exceeds half the plane width {w}",
            cfg.max_length
        )));
    }
    if is_flat(channel.plane(0)) {
        return Err(Error::NoLengthStructure);
    }
    let profile = length_profile(channel, angle, cfg)?;
    let window = &profile[cx + cfg.min_length..=cx + cfg.max_length];
    if is_flat(window) {
        return Err(Error::NoLengthStructure);
    }
    let (best, _) = window
        .iter()
        .enumerate()
        .fold((0usize, f64::INFINITY), |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) });
    Ok(cfg.min_length + best)
}

/// Combined length plus what each channel reported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthEstimate {
    pub length: usize,
    pub aggregate: LengthAggregate,
    pub per_channel: Vec<Option<usize>>,
    pub warnings: Vec<String>,
}

impl LengthEstimate {
    /// Length under a different aggregation rule.
    pub fn under(&self, rule: LengthAggregate) -> usize {
        let ok: Vec<usize> = self.per_channel.iter().flatten().copied().collect();
        rule.apply(&ok).expect("a length estimate always has one successful channel")
    }
}

/// Per-channel lengths combined by `cfg.length_aggregate`.
pub fn estimate_length(img: &Image, angle: f64, cfg: &EstimationConfig) -> Result<LengthEstimate> {
    cfg.validate()?;
    let mut per_channel = Vec::with_capacity(img.channels());
    let mut warnings = Vec::new();
    let mut first_err = None;
    for (k, ch) in to_channels(img).iter().enumerate() {
        match estimate_length_channel(ch, angle, cfg) {
            Ok(l) => per_channel.push(Some(l)),
            Err(e) => {
                warnings.push(format!("channel {k}: {e}"));
                first_err.get_or_insert(e);
                per_channel.push(None);
            }
        }
    }
    let ok: Vec<usize> = per_channel.iter().flatten().copied().collect();
    let Some(length) = cfg.length_aggregate.apply(&ok) else {
        return Err(first_err.unwrap_or(Error::NoLengthStructure));
    };
    Ok(LengthEstimate {
        length,
        aggregate: cfg.length_aggregate,
        per_channel,
        warnings,
    })
}

/// Full estimate with per-stage details.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelEstimate {
    pub params: KernelParams,
    pub angle: AngleEstimate,
    pub length: LengthEstimate,
}

/// Angle first, then length along that angle.
pub fn estimate_kernel(img: &Image, cfg: &EstimationConfig) -> Result<KernelEstimate> {
    cfg.validate()?;
    let angle = estimate_angle(img, cfg).map_err(|e| e.at(Stage::Angle))?;
    let length = estimate_length(img, angle.angle, cfg).map_err(|e| e.at(Stage::Length))?;
    let params = KernelParams::new(angle.angle, length.length)?;
    Ok(KernelEstimate { params, angle, length })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map_from_points(w: usize, h: usize, pts: &[(isize, isize)]) -> BinaryMap {
        let mut m = BinaryMap::new(w, h);
        let (cx, cy) = m.center();
        for &(x, y) in pts {
            m.set((x + cx as isize) as usize, (y + cy as isize) as usize, true);
        }
        m
    }

    #[test]
    fn empty_map_gives_zero_accumulator() {
        let acc = hough_accumulate(&BinaryMap::new(20, 20), &HoughParams::new(0.0, 179.0, 1.0, 1.0));
        assert_eq!(acc.total(), 0);
        assert!(acc.peak().is_none());
    }

    #[test]
    fn single_point_votes_once_per_theta() {
        let m = map_from_points(31, 31, &[(4, -3)]);
        let params = HoughParams::new(40.0, 140.0, 1.0, 1.0);
        let acc = hough_accumulate(&m, &params);
        assert_eq!(acc.thetas().len(), 101);
        assert_eq!(acc.total(), 101);
        for t in 0..acc.thetas().len() {
            let col: u32 = (0..acc.rho_bins()).map(|r| acc.count(r, t)).sum();
            assert_eq!(col, 1);
        }
    }

    #[test]
    fn diagonal_through_origin_peaks_at_135() {
        let m = map_from_points(21, 21, &[(0, 0), (1, 1), (2, 2)]);
        let acc = hough_accumulate(&m, &HoughParams::new(40.0, 140.0, 1.0, 1.0));
        let t = acc.thetas().iter().position(|&t| t == 135.0).unwrap();
        assert_eq!(acc.count_at(0.0, t), 3);
        let peak = acc.peak().unwrap();
        assert_eq!(peak.count, 3);
    }

    #[test]
    fn aggregates() {
        assert_eq!(LengthAggregate::Max.apply(&[24, 24, 23]), Some(24));
        assert_eq!(LengthAggregate::Min.apply(&[24, 24, 23]), Some(23));
        assert_eq!(LengthAggregate::Median.apply(&[24, 23, 30]), Some(24));
        assert_eq!(LengthAggregate::Median.apply(&[20, 30]), Some(20));
        assert_eq!(LengthAggregate::Max.apply(&[]), None);
    }

    #[test]
    fn column_means() {
        let p = Image::from_gray(3, 2, vec![1.0, 2.0, 3.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(collapse_columns(&p), vec![2.0, 3.0, 4.0]);
        let c = Image::filled(5, 4, 0.25);
        assert!(collapse_columns(&c).iter().all(|&v| v == 0.25));
    }

    #[test]
    fn constant_image_has_no_structure() {
        let cfg = EstimationConfig::default();
        let flat = Image::filled(128, 128, 0.5);
        assert!(matches!(estimate_angle_channel(&flat, &cfg), Err(Error::NoBlurStructure)));
        assert!(matches!(
            estimate_length_channel(&flat, 0.0, &cfg),
            Err(Error::NoLengthStructure)
        ));
        let err = estimate_kernel(&flat, &cfg).unwrap_err();
        assert_eq!(err.stage(), Some(Stage::Angle));
        assert!(err.is_estimation_failure());
    }

    #[test]
    fn max_length_must_fit() {
        let cfg = EstimationConfig::default();
        let img = Image::from_fn(64, 64, |x, y| ((x * y) % 7) as f64 / 7.0);
        assert!(matches!(
            estimate_length_channel(&img, 0.0, &cfg),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn config_validation() {
        let mut cfg = EstimationConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.theta_min = 150.0;
        assert!(cfg.validate().is_err());
        let cfg = EstimationConfig {
            min_length: 50,
            ..EstimationConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = EstimationConfig {
            theta_step: 0.0,
            ..EstimationConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn inclusive_theta_grid() {
        assert_eq!(HoughParams::new(40.0, 140.0, 1.0, 1.0).thetas().len(), 101);
        assert_eq!(HoughParams::new(0.0, 1.0, 0.25, 1.0).thetas(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
