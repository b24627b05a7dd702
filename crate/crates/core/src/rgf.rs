//! Rolling guidance filter and the structure/detail decomposition built on it.
//!
//! One step is a joint bilateral filter of the *original* input, steered by
//! the current guidance image:
//!
//! ```text
//! J'(p) = 1/K_p * Σ_{q ∈ N(p)} W_s(|p - q|) · W_r(|J(p) - J(q)|) · I(q)
//! ```
//!
//! `W_s` and `W_r` are unnormalised Gaussians; the range distance is the
//! Euclidean distance over the three guidance channels. `N(p)` is a square
//! window clipped at the image border, with `K_p` renormalising whatever
//! remains. Sums are accumulated as weighted differences from the centre
//! sample, which makes constant regions exact fixed points. The filter
//! starts from `J⁰ = 0`, so the first step is a plain Gaussian blur; that
//! step takes the separable path.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::raster::{ensure_same_dims, RgbImage, SignedImage};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(default, deny_unknown_fields)
)]
pub struct RgfParams {
    /// Spatial standard deviation, pixels.
    pub sigma_s: f64,
    /// Range standard deviation, unit intensity.
    pub sigma_r: f64,
    pub n_iter: usize,
    /// Window half-size; `ceil(3 * sigma_s)` when unset.
    pub window_radius: Option<usize>,
}

impl Default for RgfParams {
    fn default() -> Self {
        Self {
            sigma_s: 3.0,
            sigma_r: 0.1,
            n_iter: 6,
            window_radius: None,
        }
    }
}

impl RgfParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_s.is_finite() && self.sigma_s > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sigma_s",
                reason: "must be finite and > 0",
            });
        }
        if !(self.sigma_r.is_finite() && self.sigma_r > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sigma_r",
                reason: "must be finite and > 0",
            });
        }
        if self.n_iter == 0 {
            return Err(Error::InvalidParameter {
                name: "n_iter",
                reason: "must be >= 1",
            });
        }
        Ok(())
    }

    pub fn radius(&self) -> usize {
        self.window_radius
            .unwrap_or_else(|| libm::ceil(3.0 * self.sigma_s) as usize)
    }
}

fn spatial_kernel_1d(sigma: f64, radius: usize) -> Vec<f64> {
    let inv = 1.0 / (2.0 * sigma * sigma);
    (0..=2 * radius)
        .map(|i| {
            let d = i as f64 - radius as f64;
            libm::exp(-d * d * inv)
        })
        .collect()
}

#[inline]
fn window(center: usize, radius: usize, len: usize) -> (usize, usize) {
    (
        center.saturating_sub(radius),
        (center + radius + 1).min(len),
    )
}

fn blur_raw(input: &[f64], width: usize, height: usize, sigma: f64, radius: usize) -> Vec<f64> {
    let kernel = spatial_kernel_1d(sigma, radius);
    let mut horizontal = alloc::vec![0.0; input.len()];
    for y in 0..height {
        let row = &input[y * width * 3..(y + 1) * width * 3];
        for x in 0..width {
            let (lo, hi) = window(x, radius, width);
            let center = &row[x * 3..x * 3 + 3];
            let mut acc = [0.0; 3];
            let mut norm = 0.0;
            for qx in lo..hi {
                let w = kernel[qx + radius - x];
                norm += w;
                for c in 0..3 {
                    acc[c] += w * (row[qx * 3 + c] - center[c]);
                }
            }
            for c in 0..3 {
                horizontal[(y * width + x) * 3 + c] = center[c] + acc[c] / norm;
            }
        }
    }
    let mut out = alloc::vec![0.0; input.len()];
    for y in 0..height {
        let (lo, hi) = window(y, radius, height);
        let norm: f64 = (lo..hi).map(|qy| kernel[qy + radius - y]).sum();
        for x in 0..width {
            let p = (y * width + x) * 3;
            let mut acc = [0.0; 3];
            for qy in lo..hi {
                let w = kernel[qy + radius - y];
                let i = (qy * width + x) * 3;
                for c in 0..3 {
                    acc[c] += w * (horizontal[i + c] - horizontal[p + c]);
                }
            }
            for c in 0..3 {
                out[p + c] = horizontal[p + c] + acc[c] / norm;
            }
        }
    }
    out
}

/// Gaussian blur with a square window of half-size `radius`, clipped and
/// renormalised at the border. Separable, since a clipped square window is
/// still a rectangle.
pub fn gaussian_blur(input: &RgbImage, sigma: f64, radius: usize) -> Result<RgbImage> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidParameter {
            name: "sigma",
            reason: "must be finite and > 0",
        });
    }
    let (w, h) = input.dims();
    Ok(RgbImage::from_raw_clamped(
        w,
        h,
        blur_raw(input.data(), w, h, sigma, radius),
    ))
}

fn bilateral_raw(
    input: &[f64],
    guidance: &[f64],
    width: usize,
    height: usize,
    params: &RgfParams,
) -> Vec<f64> {
    let radius = params.radius();
    let span = 2 * radius + 1;
    let inv_s = 1.0 / (2.0 * params.sigma_s * params.sigma_s);
    let inv_r = 1.0 / (2.0 * params.sigma_r * params.sigma_r);
    let mut spatial = Vec::with_capacity(span * span);
    for dy in 0..span {
        for dx in 0..span {
            let (fx, fy) = (dx as f64 - radius as f64, dy as f64 - radius as f64);
            spatial.push(libm::exp(-(fx * fx + fy * fy) * inv_s));
        }
    }

    let mut out = alloc::vec![0.0; input.len()];
    for y in 0..height {
        let (y_lo, y_hi) = window(y, radius, height);
        for x in 0..width {
            let (x_lo, x_hi) = window(x, radius, width);
            let p = (y * width + x) * 3;
            let g = [guidance[p], guidance[p + 1], guidance[p + 2]];
            let v = [input[p], input[p + 1], input[p + 2]];
            let mut acc = [0.0; 3];
            let mut norm = 0.0;
            for qy in y_lo..y_hi {
                let ws_row = &spatial[(qy + radius - y) * span..];
                for qx in x_lo..x_hi {
                    let q = (qy * width + qx) * 3;
                    let d0 = g[0] - guidance[q];
                    let d1 = g[1] - guidance[q + 1];
                    let d2 = g[2] - guidance[q + 2];
                    let w =
                        ws_row[qx + radius - x] * libm::exp(-(d0 * d0 + d1 * d1 + d2 * d2) * inv_r);
                    norm += w;
                    acc[0] += w * (input[q] - v[0]);
                    acc[1] += w * (input[q + 1] - v[1]);
                    acc[2] += w * (input[q + 2] - v[2]);
                }
            }
            out[p] = v[0] + acc[0] / norm;
            out[p + 1] = v[1] + acc[1] / norm;
            out[p + 2] = v[2] + acc[2] / norm;
        }
    }
    out
}

/// One joint bilateral step: filter `input` with weights taken from `guidance`.
pub fn joint_bilateral_step(
    input: &RgbImage,
    guidance: &RgbImage,
    params: &RgfParams,
) -> Result<RgbImage> {
    params.validate()?;
    ensure_same_dims(input.dims(), guidance.dims())?;
    let (w, h) = input.dims();
    Ok(RgbImage::from_raw_clamped(
        w,
        h,
        bilateral_raw(input.data(), guidance.data(), w, h, params),
    ))
}

/// All iterates `J¹ … J^n_iter` of the rolling guidance filter.
pub fn rolling_guidance_iterates(input: &RgbImage, params: &RgfParams) -> Result<Vec<RgbImage>> {
    params.validate()?;
    let (w, h) = input.dims();
    let mut iterates = Vec::with_capacity(params.n_iter);
    let first = blur_raw(input.data(), w, h, params.sigma_s, params.radius());
    iterates.push(RgbImage::from_raw_clamped(w, h, first));
    for _ in 1..params.n_iter {
        let guidance = iterates.last().expect("at least one iterate");
        let next = bilateral_raw(input.data(), guidance.data(), w, h, params);
        iterates.push(RgbImage::from_raw_clamped(w, h, next));
    }
    Ok(iterates)
}

/// Runs `n_iter` joint bilateral steps starting from a zero guidance image
/// and returns the last iterate.
pub fn rolling_guidance_filter(input: &RgbImage, params: &RgfParams) -> Result<RgbImage> {
    params.validate()?;
    let (w, h) = input.dims();
    let first = blur_raw(input.data(), w, h, params.sigma_s, params.radius());
    let mut current = RgbImage::from_raw_clamped(w, h, first);
    for _ in 1..params.n_iter {
        let next = bilateral_raw(input.data(), current.data(), w, h, params);
        current = RgbImage::from_raw_clamped(w, h, next);
    }
    Ok(current)
}

/// Structure (`low`) and detail (`high`) parts of an image.
///
/// `high` is `input - low` rounded to `f64`. The rounding error of that
/// subtraction is kept alongside, so [`Decomposition::reconstruct`] returns
/// the input bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub low: RgbImage,
    pub high: SignedImage,
    compensation: Vec<f64>,
}

impl Decomposition {
    /// `low + high`, exact.
    pub fn reconstruct(&self) -> RgbImage {
        let (w, h) = self.low.dims();
        let data = self
            .low
            .data()
            .iter()
            .zip(self.high.data())
            .zip(&self.compensation)
            .map(|((&l, &hi), &lo)| recombine(l, hi, lo))
            .collect();
        RgbImage::from_raw_clamped(w, h, data)
    }

    /// Rounding error of each `high` sample, `(input - low) - high`.
    pub fn compensation(&self) -> &[f64] {
        &self.compensation
    }
}

/// Error-free sum: `a + b = s + e` exactly.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn recombine(low: f64, high: f64, compensation: f64) -> f64 {
    let (s, e) = two_sum(low, high);
    s + (e + compensation)
}

pub fn decompose(input: &RgbImage, params: &RgfParams) -> Result<Decomposition> {
    let low = rolling_guidance_filter(input, params)?;
    let (w, h) = input.dims();
    let mut high = Vec::with_capacity(input.data().len());
    let mut compensation = Vec::with_capacity(input.data().len());
    for (&x, &l) in input.data().iter().zip(low.data()) {
        let (hi, lo) = two_sum(x, -l);
        if recombine(l, hi, lo) == x {
            high.push(hi);
            compensation.push(lo);
        } else {
            // Only reachable for inputs below ~2^-53; fold the whole input
            // into the compensation term.
            high.push(-l);
            compensation.push(x);
        }
    }
    Ok(Decomposition {
        low,
        high: SignedImage::new(w, h, high)?,
        compensation,
    })
}
