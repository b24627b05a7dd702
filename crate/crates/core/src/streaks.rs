//! Procedural rain streak patterns.
//!
//! A pattern is a set of straight, anti-aliased line segments scattered
//! uniformly over the image and combined by per-pixel maximum. Every random
//! draw comes from one seeded stream, so a parameter set maps to exactly one
//! pattern.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::raster::ScalarMap;
use crate::rng::seeded_rng;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(default, deny_unknown_fields)
)]
pub struct StreakPatternParams {
    pub seed: u64,
    /// Streaks per megapixel.
    pub density: f64,
    /// Mean streak direction, degrees clockwise from vertical.
    pub angle_mean: f64,
    /// Half-width of the uniform angle distribution, degrees.
    pub angle_jitter: f64,
    /// `[min, max]` streak length in pixels.
    pub length_range: [f64; 2],
    /// Stroke width in pixels.
    pub width: f64,
    /// `[min, max]` peak intensity, within `[0, 1]`.
    pub intensity_range: [f64; 2],
}

impl Default for StreakPatternParams {
    fn default() -> Self {
        Self {
            seed: 0,
            density: 2000.0,
            angle_mean: 10.0,
            angle_jitter: 5.0,
            length_range: [10.0, 40.0],
            width: 1.0,
            intensity_range: [0.5, 1.0],
        }
    }
}

impl StreakPatternParams {
    pub fn validate(&self) -> Result<()> {
        let invalid = |name, reason| Err(Error::InvalidParameter { name, reason });
        if !(self.density.is_finite() && self.density >= 0.0) {
            return invalid("density", "must be finite and >= 0");
        }
        if !self.angle_mean.is_finite() {
            return invalid("angle_mean", "must be finite");
        }
        if !(self.angle_jitter.is_finite() && self.angle_jitter >= 0.0) {
            return invalid("angle_jitter", "must be finite and >= 0");
        }
        let [lo, hi] = self.length_range;
        if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
            return invalid("length_range", "must satisfy 0 <= min <= max");
        }
        if !(self.width.is_finite() && self.width > 0.0) {
            return invalid("width", "must be finite and > 0");
        }
        let [lo, hi] = self.intensity_range;
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return invalid("intensity_range", "must satisfy 0 <= min <= max <= 1");
        }
        Ok(())
    }

    /// Number of segments drawn on a `width × height` image.
    pub fn segment_count(&self, width: usize, height: usize) -> usize {
        let n = self.density * (width * height) as f64 / 1e6;
        libm::floor(n + 0.5) as usize
    }
}

/// One rendered streak, in pixel coordinates (pixel centres at `+0.5`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreakSegment {
    pub start: [f64; 2],
    pub end: [f64; 2],
    pub angle_deg: f64,
    pub intensity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreakPattern {
    pub map: ScalarMap,
    /// Every segment emitted, in draw order.
    pub segments: Vec<StreakSegment>,
}

pub fn generate_streak_pattern(
    width: usize,
    height: usize,
    params: &StreakPatternParams,
) -> Result<StreakPattern> {
    params.validate()?;
    if width == 0 || height == 0 {
        return Err(Error::EmptyRaster);
    }
    let mut rng = seeded_rng(params.seed);
    let count = params.segment_count(width, height);
    let mut data = alloc::vec![0.0f64; width * height];
    let mut segments = Vec::with_capacity(count);

    for _ in 0..count {
        let cx = rng.gen::<f64>() * width as f64;
        let cy = rng.gen::<f64>() * height as f64;
        let angle_deg = params.angle_mean + params.angle_jitter * (2.0 * rng.gen::<f64>() - 1.0);
        let length = lerp(params.length_range, rng.gen::<f64>());
        let intensity = lerp(params.intensity_range, rng.gen::<f64>());

        let theta = angle_deg.to_radians();
        let (dx, dy) = (
            libm::sin(theta) * length / 2.0,
            libm::cos(theta) * length / 2.0,
        );
        let segment = StreakSegment {
            start: [cx - dx, cy - dy],
            end: [cx + dx, cy + dy],
            angle_deg,
            intensity,
        };
        draw_segment(&mut data, width, height, &segment, params.width);
        segments.push(segment);
    }

    Ok(StreakPattern {
        map: ScalarMap::from_raw_clamped(width, height, data),
        segments,
    })
}

fn lerp([lo, hi]: [f64; 2], u: f64) -> f64 {
    lo + (hi - lo) * u
}

/// Coverage falls off linearly over one pixel beyond the stroke half-width.
fn draw_segment(data: &mut [f64], width: usize, height: usize, seg: &StreakSegment, stroke: f64) {
    let reach = stroke / 2.0 + 0.5;
    let x_lo = libm::floor(seg.start[0].min(seg.end[0]) - reach).max(0.0) as usize;
    let y_lo = libm::floor(seg.start[1].min(seg.end[1]) - reach).max(0.0) as usize;
    let x_hi = libm::ceil(seg.start[0].max(seg.end[0]) + reach);
    let y_hi = libm::ceil(seg.start[1].max(seg.end[1]) + reach);
    if x_hi < 0.0 || y_hi < 0.0 {
        return;
    }
    let x_hi = (x_hi as usize).min(width);
    let y_hi = (y_hi as usize).min(height);

    for y in y_lo..y_hi {
        for x in x_lo..x_hi {
            let p = [x as f64 + 0.5, y as f64 + 0.5];
            let coverage = (reach - point_segment_distance(p, seg.start, seg.end)).clamp(0.0, 1.0);
            let v = seg.intensity * coverage;
            let cell = &mut data[y * width + x];
            if v > *cell {
                *cell = v;
            }
        }
    }
}

fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let d = [ap[0] - t * ab[0], ap[1] - t * ab[1]];
    libm::sqrt(d[0] * d[0] + d[1] * d[1])
}
