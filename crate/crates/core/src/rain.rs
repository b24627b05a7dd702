//! Depth-driven rain streak and rainy haze layers, the mixture-of-rain
//! composition and its algebraic inverse.
//!
//! The captured image is modelled per pixel and channel as
//!
//! ```text
//! I = (1 - M_d) * [ B * (1 - S - A) + S + A0 * A ] + D
//! ```
//!
//! with `S = pattern * t_r`, `t_r = exp(-alpha * max(d1, d))` and
//! `A = 1 - exp(-beta * d)`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::raster::{ensure_same_dims, BinaryMask, DepthMap, RgbImage, ScalarMap};

/// Default streak-mask threshold applied to `S`.
pub const DEFAULT_STREAK_THRESHOLD: f64 = 0.05;

/// Default guard on the `1 - S - A` denominator when inverting.
pub const DEFAULT_INVERSION_EPSILON: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(default, deny_unknown_fields)
)]
pub struct RainParams {
    /// Streak attenuation coefficient, 1/m.
    pub alpha: f64,
    /// Haze attenuation coefficient, 1/m.
    pub beta: f64,
    /// Depth below which streak intensity saturates, m.
    pub d1: f64,
    /// Atmospheric light.
    pub a0: f64,
}

impl Default for RainParams {
    fn default() -> Self {
        Self {
            alpha: 0.01,
            beta: 0.005,
            d1: 50.0,
            a0: 0.8,
        }
    }
}

impl RainParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: "must be finite and > 0",
            });
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "beta",
                reason: "must be finite and >= 0",
            });
        }
        if !(self.d1.is_finite() && self.d1 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "d1",
                reason: "must be finite and > 0",
            });
        }
        if !(0.0..=1.0).contains(&self.a0) {
            return Err(Error::InvalidParameter {
                name: "a0",
                reason: "must lie in [0, 1]",
            });
        }
        Ok(())
    }

    /// Streak transmission inside the near-field plateau, `exp(-alpha * d1)`.
    pub fn plateau_transmission(&self) -> f64 {
        libm::exp(-self.alpha * self.d1)
    }
}

/// Ground-truth layers of one synthesized sample. All maps share one size.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthMaps {
    /// Thresholded streak locations.
    pub m_s: BinaryMask,
    /// Raindrop locations.
    pub m_d: BinaryMask,
    /// Rainy haze layer.
    pub a: ScalarMap,
    /// Rain streak layer.
    pub s: ScalarMap,
    /// Raindrop layer.
    pub d_layer: ScalarMap,
}

impl GroundTruthMaps {
    pub fn new(
        m_s: BinaryMask,
        m_d: BinaryMask,
        a: ScalarMap,
        s: ScalarMap,
        d_layer: ScalarMap,
    ) -> Result<Self> {
        let dims = s.dims();
        ensure_same_dims(dims, m_s.dims())?;
        ensure_same_dims(dims, m_d.dims())?;
        ensure_same_dims(dims, a.dims())?;
        ensure_same_dims(dims, d_layer.dims())?;
        Ok(Self {
            m_s,
            m_d,
            a,
            s,
            d_layer,
        })
    }

    /// Maps for an image with streaks and haze only: no raindrops, `D = 0`.
    pub fn streaks_and_haze(s: ScalarMap, a: ScalarMap, tau_s: f64) -> Result<Self> {
        let (w, h) = s.dims();
        let m_s = threshold_streak_mask(&s, tau_s)?;
        Self::new(m_s, BinaryMask::zeros(w, h)?, a, s, ScalarMap::zeros(w, h)?)
    }

    pub fn dims(&self) -> (usize, usize) {
        self.s.dims()
    }
}

/// `t_r(x) = exp(-alpha * max(d1, d(x)))`.
pub fn streak_transmission(depth: &DepthMap, params: &RainParams) -> Result<ScalarMap> {
    params.validate()?;
    let (w, h) = depth.dims();
    let data = depth
        .data()
        .iter()
        .map(|&d| libm::exp(-params.alpha * params.d1.max(d)))
        .collect();
    Ok(ScalarMap::from_raw_clamped(w, h, data))
}

/// `A(x) = 1 - exp(-beta * d(x))`.
pub fn haze_layer(depth: &DepthMap, params: &RainParams) -> Result<ScalarMap> {
    params.validate()?;
    let (w, h) = depth.dims();
    let data = depth
        .data()
        .iter()
        .map(|&d| -libm::expm1(-params.beta * d))
        .collect();
    Ok(ScalarMap::from_raw_clamped(w, h, data))
}

/// Pixel-wise product `S = pattern * t_r`.
pub fn streak_layer(pattern: &ScalarMap, t_r: &ScalarMap) -> Result<ScalarMap> {
    ensure_same_dims(pattern.dims(), t_r.dims())?;
    let (w, h) = pattern.dims();
    let data = pattern
        .data()
        .iter()
        .zip(t_r.data())
        .map(|(p, t)| p * t)
        .collect();
    Ok(ScalarMap::from_raw_clamped(w, h, data))
}

/// `M_s(x) = 1` iff `s(x) > tau_s`.
pub fn threshold_streak_mask(s: &ScalarMap, tau_s: f64) -> Result<BinaryMask> {
    if !(0.0..=1.0).contains(&tau_s) {
        return Err(Error::InvalidParameter {
            name: "tau_s",
            reason: "must lie in [0, 1]",
        });
    }
    let (w, h) = s.dims();
    let data = s.data().iter().map(|&v| u8::from(v > tau_s)).collect();
    BinaryMask::new(w, h, data)
}

/// Applies the mixture-of-rain model to a clean image and clamps the result
/// to `[0, 1]`. `1 - S - A` may be negative; the formula is used as is.
pub fn compose_mor(b: &RgbImage, maps: &GroundTruthMaps, params: &RainParams) -> Result<RgbImage> {
    params.validate()?;
    ensure_same_dims(b.dims(), maps.dims())?;
    let (w, h) = b.dims();
    let m_d = maps.m_d.data();
    let s = maps.s.data();
    let a = maps.a.data();
    let d = maps.d_layer.data();
    let mut out = Vec::with_capacity(w * h * 3);
    for (p, rgb) in b.data().chunks_exact(3).enumerate() {
        if m_d[p] == 1 {
            out.extend_from_slice(&[d[p]; 3]);
            continue;
        }
        let transmission = 1.0 - s[p] - a[p];
        let veil = s[p] + params.a0 * a[p];
        for &c in rgb {
            out.push(c * transmission + veil + d[p]);
        }
    }
    Ok(RgbImage::from_raw_clamped(w, h, out))
}

/// Result of [`invert_mor`].
#[derive(Debug, Clone, PartialEq)]
pub struct Inversion {
    /// Recovered background, 0 where recovery is impossible. Clamped to `[0, 1]`.
    pub background: RgbImage,
    /// 1 where the background could be recovered.
    pub valid: BinaryMask,
}

/// Recovers `B` from a composed image and the exact maps used to compose it.
pub fn invert_mor(i: &RgbImage, maps: &GroundTruthMaps, params: &RainParams) -> Result<Inversion> {
    invert_mor_with_epsilon(i, maps, params, DEFAULT_INVERSION_EPSILON)
}

/// [`invert_mor`] with an explicit guard on the `1 - S - A` denominator.
pub fn invert_mor_with_epsilon(
    i: &RgbImage,
    maps: &GroundTruthMaps,
    params: &RainParams,
    epsilon: f64,
) -> Result<Inversion> {
    params.validate()?;
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: "must be finite and >= 0",
        });
    }
    ensure_same_dims(i.dims(), maps.dims())?;
    let (w, h) = i.dims();
    let m_d = maps.m_d.data();
    let s = maps.s.data();
    let a = maps.a.data();
    let d = maps.d_layer.data();
    let mut out = Vec::with_capacity(w * h * 3);
    let mut valid = Vec::with_capacity(w * h);
    for (p, rgb) in i.data().chunks_exact(3).enumerate() {
        let transmission = 1.0 - s[p] - a[p];
        if m_d[p] == 1 || transmission <= epsilon {
            out.extend_from_slice(&[0.0; 3]);
            valid.push(0);
            continue;
        }
        let veil = s[p] + params.a0 * a[p];
        for &c in rgb {
            out.push((c - d[p] - veil) / transmission);
        }
        valid.push(1);
    }
    Ok(Inversion {
        background: RgbImage::from_raw_clamped(w, h, out),
        valid: BinaryMask::new(w, h, valid)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn single(v: f64) -> ScalarMap {
        ScalarMap::filled(1, 1, v).unwrap()
    }

    fn params(alpha: f64, beta: f64, d1: f64, a0: f64) -> RainParams {
        RainParams {
            alpha,
            beta,
            d1,
            a0,
        }
    }

    #[test]
    fn transmission_examples() {
        let p = params(0.01, 0.0, 50.0, 0.8);
        let depth = DepthMap::new(3, 1, alloc::vec![20.0, 100.0, 1e9]).unwrap();
        let t = streak_transmission(&depth, &p).unwrap();
        assert!(close(t.data()[0], (-0.5f64).exp(), 1e-15));
        assert!(close(t.data()[0], 0.60653, 1e-5));
        assert!(close(t.data()[1], 0.36788, 1e-5));
        assert!(t.data()[2] < 1e-300);
    }

    #[test]
    fn transmission_plateau_is_exact() {
        let p = RainParams::default();
        let depth = DepthMap::from_fn(8, 8, |x, y| (x * 8 + y) as f64 * 50.0 / 63.0).unwrap();
        let t = streak_transmission(&depth, &p).unwrap();
        for v in t.data() {
            assert_eq!(*v, p.plateau_transmission());
        }
    }

    #[test]
    fn haze_examples() {
        let depth = DepthMap::new(2, 1, alloc::vec![0.0, 100.0]).unwrap();
        let a = haze_layer(&depth, &params(0.01, 0.01, 50.0, 0.8)).unwrap();
        assert_eq!(a.data()[0], 0.0);
        assert!(close(a.data()[1], 0.63212, 1e-5));
        let none = haze_layer(&depth, &params(0.01, 0.0, 50.0, 0.8)).unwrap();
        assert!(none.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn streak_layer_examples() {
        assert_eq!(
            streak_layer(&single(0.0), &single(0.7)).unwrap().data()[0],
            0.0
        );
        assert_eq!(
            streak_layer(&single(1.0), &single(0.36788)).unwrap().data()[0],
            0.36788
        );
        assert!(close(
            streak_layer(&single(0.5), &single(0.6)).unwrap().data()[0],
            0.3,
            1e-15
        ));
        let wide = ScalarMap::zeros(2, 1).unwrap();
        assert!(matches!(
            streak_layer(&wide, &single(0.5)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn threshold_examples() {
        let s = ScalarMap::new(4, 1, alloc::vec![0.0, 0.04, 0.06, 1.0]).unwrap();
        let m = threshold_streak_mask(&s, DEFAULT_STREAK_THRESHOLD).unwrap();
        assert_eq!(m.data(), &[0, 0, 1, 1]);
        let m = threshold_streak_mask(&s, 0.0).unwrap();
        assert_eq!(m.data(), &[0, 1, 1, 1]);
        let m = threshold_streak_mask(&s, 1.0).unwrap();
        assert_eq!(m.count_ones(), 0);
        assert!(threshold_streak_mask(&s, 1.5).is_err());
        assert!(threshold_streak_mask(&s, -0.1).is_err());
    }

    fn maps_1x1(m_d: u8, s: f64, a: f64, d: f64) -> GroundTruthMaps {
        GroundTruthMaps::new(
            BinaryMask::new(1, 1, alloc::vec![0]).unwrap(),
            BinaryMask::new(1, 1, alloc::vec![m_d]).unwrap(),
            single(a),
            single(s),
            single(d),
        )
        .unwrap()
    }

    #[test]
    fn compose_examples() {
        let p = params(0.01, 0.005, 50.0, 0.8);
        let b = RgbImage::filled(1, 1, [0.5; 3]).unwrap();
        let out = compose_mor(&b, &maps_1x1(0, 0.2, 0.3, 0.0), &p).unwrap();
        assert!(close(out.data()[0], 0.69, 1e-12));

        let out = compose_mor(&b, &maps_1x1(1, 0.9, 0.9, 0.37), &p).unwrap();
        assert_eq!(out.data(), &[0.37; 3]);

        let out = compose_mor(&b, &maps_1x1(0, 0.0, 0.0, 0.0), &p).unwrap();
        assert_eq!(out, b);
    }

    #[test]
    fn compose_clamps_when_layers_overlap() {
        let p = params(0.01, 0.005, 50.0, 1.0);
        let b = RgbImage::filled(1, 1, [0.0; 3]).unwrap();
        // 1 - S - A < 0 with B = 0 still lands in range; push D on top.
        let out = compose_mor(&b, &maps_1x1(0, 0.9, 0.9, 0.5), &p).unwrap();
        assert_eq!(out.data(), &[1.0; 3]);
    }

    #[test]
    fn invert_examples() {
        let p = params(0.01, 0.005, 50.0, 0.8);
        let i = RgbImage::filled(1, 1, [0.69; 3]).unwrap();
        let inv = invert_mor(&i, &maps_1x1(0, 0.2, 0.3, 0.0), &p).unwrap();
        assert!(close(inv.background.data()[0], 0.5, 1e-12));
        assert_eq!(inv.valid.data(), &[1]);

        let inv = invert_mor(&i, &maps_1x1(0, 0.0, 0.0, 0.0), &p).unwrap();
        assert_eq!(inv.background, i);

        let inv = invert_mor(&i, &maps_1x1(1, 0.0, 0.0, 0.0), &p).unwrap();
        assert_eq!(inv.valid.data(), &[0]);
        assert_eq!(inv.background.data(), &[0.0; 3]);

        // denominator below the guard
        let inv = invert_mor(&i, &maps_1x1(0, 0.6, 0.3995, 0.0), &p).unwrap();
        assert_eq!(inv.valid.data(), &[0]);
    }

    #[test]
    fn params_validation() {
        assert!(RainParams::default().validate().is_ok());
        assert!(params(0.0, 0.0, 50.0, 0.8).validate().is_err());
        assert!(params(0.01, -1.0, 50.0, 0.8).validate().is_err());
        assert!(params(0.01, 0.0, 0.0, 0.8).validate().is_err());
        assert!(params(0.01, 0.0, 50.0, 1.2).validate().is_err());
    }
}
