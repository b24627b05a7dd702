//! Closed-form training objectives evaluated on maps and scalars.
//!
//! These are plain functions of their inputs: no network is involved. The
//! perceptual term of the generator objective needs pretrained features
//! and is not available here; see [`generator_loss`].

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::metrics::{mean_square, mse};
use crate::raster::{BinaryMask, Samples, ScalarMap};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(default, deny_unknown_fields)
)]
pub struct LossWeights {
    /// Per-scale weights of the multi-scale loss.
    pub lambdas: Vec<f64>,
    /// Weight of the attention-map term in the discriminator loss.
    pub gamma: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            lambdas: alloc::vec![0.4, 0.6, 0.8, 1.0],
            gamma: 0.10,
        }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<()> {
        if self.lambdas.is_empty() {
            return Err(Error::InvalidParameter {
                name: "lambdas",
                reason: "must not be empty",
            });
        }
        if self.lambdas.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(Error::InvalidParameter {
                name: "lambdas",
                reason: "must be finite and >= 0",
            });
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: "must be finite and >= 0",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttentionLosses {
    /// Streak attention against the streak mask.
    pub hfam: f64,
    /// Haze attention against the haze layer.
    pub lfam: f64,
    /// Raindrop attention against the raindrop mask.
    pub rsam: f64,
}

impl AttentionLosses {
    pub fn total(&self) -> f64 {
        self.hfam + self.lfam + self.rsam
    }
}

pub fn attention_losses(
    a_hn: &ScalarMap,
    a_fn: &ScalarMap,
    a_rn: &ScalarMap,
    m_s: &BinaryMask,
    a: &ScalarMap,
    m_d: &BinaryMask,
) -> Result<AttentionLosses> {
    Ok(AttentionLosses {
        hfam: mse(a_hn, m_s)?,
        lfam: mse(a_fn, a)?,
        rsam: mse(a_rn, m_d)?,
    })
}

/// `Σ λ_i · mse(preds[i], targets[i])`; one pair per weight.
pub fn multiscale_loss<P: Samples, T: Samples>(
    preds: &[P],
    targets: &[T],
    weights: &LossWeights,
) -> Result<f64> {
    weights.validate()?;
    let n = weights.lambdas.len();
    for len in [preds.len(), targets.len()] {
        if len != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: len,
            });
        }
    }
    preds
        .iter()
        .zip(targets)
        .zip(&weights.lambdas)
        .try_fold(0.0, |acc, ((p, t), l)| Ok(acc + l * mse(p, t)?))
}

/// Attention-guided discriminator map loss. The map of the restored image is
/// pulled towards each attention map; the map of the clean image towards 0.
pub fn discriminator_map_loss(
    d_map_o: &ScalarMap,
    d_map_r: &ScalarMap,
    a_hn: &ScalarMap,
    a_fn: &ScalarMap,
    a_rn: &ScalarMap,
) -> Result<f64> {
    if d_map_o.dims() != d_map_r.dims() {
        return Err(Error::DimensionMismatch {
            expected: d_map_o.dims(),
            found: d_map_r.dims(),
        });
    }
    Ok(mse(d_map_o, a_hn)? + mse(d_map_o, a_fn)? + mse(d_map_o, a_rn)? + mean_square(d_map_r))
}

/// Discriminator objective `-ln D(R) - ln(1 - D(O)) + γ · L_map`.
///
/// Both probabilities must lie strictly inside (0, 1); callers clamp.
pub fn gan_losses(d_r: f64, d_o: f64, l_map: f64, weights: &LossWeights) -> Result<f64> {
    weights.validate()?;
    for (name, value) in [("d_r", d_r), ("d_o", d_o)] {
        if !(value > 0.0 && value < 1.0) {
            return Err(Error::ProbabilityOutOfRange { name, value });
        }
    }
    Ok(-libm::log(d_r) - libm::log1p(-d_o) + weights.gamma * l_map)
}

/// Generator objective restricted to the terms computable without
/// pretrained features.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorLoss {
    pub total: f64,
    /// Always `false`: the perceptual term is omitted from `total`.
    pub includes_perceptual: bool,
}

pub fn generator_loss(attention: &AttentionLosses, multiscale: f64) -> GeneratorLoss {
    GeneratorLoss {
        total: attention.total() + multiscale,
        includes_perceptual: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(v: f64) -> ScalarMap {
        ScalarMap::filled(4, 3, v).unwrap()
    }

    fn mask() -> BinaryMask {
        BinaryMask::from_fn(4, 3, |x, y| (x + y) % 3 == 0).unwrap()
    }

    #[test]
    fn attention_examples() {
        let m_s = mask();
        let m_d = BinaryMask::from_fn(4, 3, |x, _| x == 1).unwrap();
        let a = ScalarMap::from_fn(4, 3, |x, y| (x + y) as f64 / 10.0).unwrap();
        let as_map = |m: &BinaryMask| {
            ScalarMap::new(4, 3, m.data().iter().map(|&v| f64::from(v)).collect()).unwrap()
        };
        let perfect = attention_losses(&as_map(&m_s), &a, &as_map(&m_d), &m_s, &a, &m_d).unwrap();
        assert_eq!(
            perfect,
            AttentionLosses {
                hfam: 0.0,
                lfam: 0.0,
                rsam: 0.0
            }
        );

        let half = attention_losses(&map(0.5), &a, &map(0.0), &m_s, &a, &m_d).unwrap();
        assert_eq!(half.hfam, 0.25);
        assert_eq!(half.lfam, 0.0);
        assert_eq!(half.rsam, 3.0 / 12.0);
    }

    #[test]
    fn multiscale_examples() {
        let w = LossWeights::default();
        let zeros = [map(0.0), map(0.0), map(0.0), map(0.0)];
        let ones = [map(1.0), map(1.0), map(1.0), map(1.0)];
        assert_eq!(multiscale_loss(&zeros, &zeros, &w).unwrap(), 0.0);
        assert_eq!(multiscale_loss(&zeros, &ones, &w).unwrap(), 2.8);

        // pair i = 3 carries mse 2 (values beyond the unit range on a
        // feature map) with λ = 1.0
        struct Feature(alloc::vec::Vec<f64>);
        impl Samples for Feature {
            fn shape(&self) -> (usize, usize, usize) {
                (self.0.len(), 1, 1)
            }
            fn sample(&self, i: usize) -> f64 {
                self.0[i]
            }
        }
        let preds: alloc::vec::Vec<Feature> = (0..4)
            .map(|i| Feature(alloc::vec![if i == 3 { 3.0 } else { 0.0 }; 2]))
            .collect();
        let targets: alloc::vec::Vec<Feature> = (0..4)
            .map(|i| Feature(alloc::vec![if i == 3 { 3.0 - 2f64.sqrt() } else { 0.0 }; 2]))
            .collect();
        let got = multiscale_loss(&preds, &targets, &w).unwrap();
        assert!((got - 2.0).abs() < 1e-12);

        assert!(matches!(
            multiscale_loss(&zeros[..3], &ones[..3], &w),
            Err(Error::LengthMismatch {
                expected: 4,
                found: 3
            })
        ));
    }

    #[test]
    fn discriminator_map_examples() {
        let z = map(0.0);
        assert_eq!(discriminator_map_loss(&z, &z, &z, &z, &z).unwrap(), 0.0);
        let one = map(1.0);
        assert_eq!(
            discriminator_map_loss(&one, &z, &one, &one, &one).unwrap(),
            0.0
        );
        let half = map(0.5);
        assert_eq!(
            discriminator_map_loss(&half, &half, &z, &z, &one).unwrap(),
            1.0
        );
    }

    #[test]
    fn gan_examples() {
        let w = LossWeights::default();
        let v = gan_losses(0.5, 0.5, 0.0, &w).unwrap();
        assert!((v - 2.0 * core::f64::consts::LN_2).abs() < 1e-12);
        let near_perfect = gan_losses(1.0 - 1e-12, 1e-12, 0.0, &w).unwrap();
        assert!(near_perfect.abs() < 1e-11);
        let with_map = gan_losses(0.5, 0.5, 10.0, &w).unwrap();
        assert!((with_map - v - 1.0).abs() < 1e-12);
        for (r, o) in [
            (0.0, 0.5),
            (1.0, 0.5),
            (0.5, 0.0),
            (0.5, 1.0),
            (f64::NAN, 0.5),
        ] {
            assert!(matches!(
                gan_losses(r, o, 0.0, &w),
                Err(Error::ProbabilityOutOfRange { .. })
            ));
        }
    }

    #[test]
    fn generator_loss_flags_missing_perceptual_term() {
        let att = AttentionLosses {
            hfam: 0.5,
            lfam: 0.25,
            rsam: 0.125,
        };
        let g = generator_loss(&att, 1.0);
        assert_eq!(g.total, 1.875);
        assert!(!g.includes_perceptual);
    }
}
