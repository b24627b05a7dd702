//! Raindrop cover-layer blending on the 0–255 scale.
//!
//! `a` is the background byte, `b` the cover byte, `a_t = 255 - a` and
//! `b_t = 255 - b` their anti-phases. Every mode evaluates in `f64`, then
//! rounds half-up and clamps to `0..=255`. The `≤ 128` branch conditions and
//! the division by 128 are deliberate and produce a discontinuity between
//! 128 and 129.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::raster::{
    ensure_same_dims, from_byte_domain, round_half_up_byte, to_byte_domain, BinaryMask, ByteImage,
    RgbImage,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "lowercase")
)]
pub enum BlendMode {
    Overlay,
    Highlight,
    Transparency,
    Final,
}

impl BlendMode {
    pub const ALL: [BlendMode; 4] = [
        BlendMode::Overlay,
        BlendMode::Highlight,
        BlendMode::Transparency,
        BlendMode::Final,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BlendMode::Overlay => "overlay",
            BlendMode::Highlight => "highlight",
            BlendMode::Transparency => "transparency",
            BlendMode::Final => "final",
        }
    }

    pub fn uses_transparency(self) -> bool {
        matches!(self, BlendMode::Transparency | BlendMode::Final)
    }
}

impl core::str::FromStr for BlendMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BlendMode::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or(Error::InvalidParameter {
                name: "mode",
                reason: "expected overlay, highlight, transparency or final",
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(default, deny_unknown_fields)
)]
pub struct BlendParams {
    pub mode: BlendMode,
    /// Background weight for the transparency-based modes.
    pub t: f64,
    /// Raindrop-mask threshold in byte units.
    pub tau_d: f64,
}

impl Default for BlendParams {
    fn default() -> Self {
        Self {
            mode: BlendMode::Final,
            t: 0.7,
            tau_d: 10.0,
        }
    }
}

impl BlendParams {
    pub fn validate(&self) -> Result<()> {
        match self.mode {
            BlendMode::Transparency if !(0.0..=1.0).contains(&self.t) => {
                return Err(Error::InvalidParameter {
                    name: "t",
                    reason: "transparency mode needs 0 <= t <= 1",
                })
            }
            BlendMode::Final if !(self.t > 0.0 && self.t < 1.0) => {
                return Err(Error::InvalidParameter {
                    name: "t",
                    reason: "final mode needs 0 < t < 1",
                })
            }
            _ => {}
        }
        if !(0.0..=255.0).contains(&self.tau_d) {
            return Err(Error::InvalidParameter {
                name: "tau_d",
                reason: "must lie in [0, 255]",
            });
        }
        Ok(())
    }
}

#[inline]
fn anti(v: u8) -> f64 {
    f64::from(255 - v)
}

/// Unrounded overlay value, conditioned on the background.
#[inline]
pub fn overlay_value(a: u8, b: u8) -> f64 {
    if a <= 128 {
        f64::from(a) * f64::from(b) / 128.0
    } else {
        255.0 - anti(a) * anti(b) / 128.0
    }
}

/// Unrounded highlight value, conditioned on the cover.
#[inline]
pub fn highlight_value(a: u8, b: u8) -> f64 {
    if b <= 128 {
        f64::from(a) * f64::from(b) / 128.0
    } else {
        255.0 - anti(a) * anti(b) / 128.0
    }
}

/// `t * a + (1 - t) * b` on real-valued inputs.
#[inline]
pub fn transparency_value(a: f64, b: f64, t: f64) -> f64 {
    t * a + (1.0 - t) * b
}

/// Unrounded final-mode value, conditioned on the cover.
#[inline]
pub fn final_value(a: u8, b: u8, t: f64) -> f64 {
    if b <= 128 {
        t * f64::from(a) * (1.0 - t) * f64::from(b) / 128.0
    } else {
        255.0 - t * anti(a) * (1.0 - t) * anti(b) / 128.0
    }
}

pub fn blend_overlay(a: u8, b: u8) -> u8 {
    round_half_up_byte(overlay_value(a, b))
}

pub fn blend_highlight(a: u8, b: u8) -> u8 {
    round_half_up_byte(highlight_value(a, b))
}

pub fn blend_transparency(a: u8, b: u8, t: f64) -> u8 {
    round_half_up_byte(transparency_value(f64::from(a), f64::from(b), t))
}

pub fn blend_final(a: u8, b: u8, t: f64) -> u8 {
    round_half_up_byte(final_value(a, b, t))
}

/// Dispatches to the scalar blend for `mode`; `t` is ignored by the modes
/// that do not use it.
#[inline]
pub fn blend_byte(mode: BlendMode, a: u8, b: u8, t: f64) -> u8 {
    match mode {
        BlendMode::Overlay => blend_overlay(a, b),
        BlendMode::Highlight => blend_highlight(a, b),
        BlendMode::Transparency => blend_transparency(a, b, t),
        BlendMode::Final => blend_final(a, b, t),
    }
}

/// Blended image and the derived raindrop mask.
#[derive(Debug, Clone, PartialEq)]
pub struct BlendResult {
    pub composite: RgbImage,
    pub m_d: BinaryMask,
}

/// Byte-domain counterpart of [`BlendResult`].
#[derive(Debug, Clone, PartialEq)]
pub struct ByteBlendResult {
    pub composite: ByteImage,
    pub m_d: BinaryMask,
}

/// Blends `cover` onto `background` per pixel and channel and marks every
/// pixel whose largest channel deviation from the background exceeds
/// `tau_d` bytes.
pub fn composite_bytes(
    background: &ByteImage,
    cover: &ByteImage,
    params: &BlendParams,
) -> Result<ByteBlendResult> {
    params.validate()?;
    ensure_same_dims(background.dims(), cover.dims())?;
    let (w, h) = background.dims();
    let mut out = Vec::with_capacity(w * h * 3);
    let mut mask = Vec::with_capacity(w * h);
    for (a_px, b_px) in background
        .data()
        .chunks_exact(3)
        .zip(cover.data().chunks_exact(3))
    {
        let mut deviation = 0u8;
        for (&a, &b) in a_px.iter().zip(b_px) {
            let c = blend_byte(params.mode, a, b, params.t);
            deviation = deviation.max(c.abs_diff(a));
            out.push(c);
        }
        mask.push(u8::from(f64::from(deviation) > params.tau_d));
    }
    Ok(ByteBlendResult {
        composite: ByteImage::new(w, h, out)?,
        m_d: BinaryMask::new(w, h, mask)?,
    })
}

/// [`composite_bytes`] on unit-domain images; inputs are quantised with
/// [`to_byte_domain`] first.
pub fn composite_with_mask(
    background: &RgbImage,
    cover: &RgbImage,
    params: &BlendParams,
) -> Result<BlendResult> {
    let r = composite_bytes(&to_byte_domain(background), &to_byte_domain(cover), params)?;
    Ok(BlendResult {
        composite: from_byte_domain(&r.composite),
        m_d: r.m_d,
    })
}
