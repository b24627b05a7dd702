//! Mixture-of-rain image synthesis and evaluation primitives.
//!
//! The crate is `no_std` (it needs `alloc`) and holds every numeric piece of
//! the pipeline: raster types, the depth-driven rain streak and haze model,
//! the byte-domain raindrop blend modes, the rolling guidance filter, image
//! quality metrics, the closed-form training losses and the grouped
//! train/test splitter. File formats, configuration and the command line
//! live in the `mor-synth` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

pub mod blend;
pub mod error;
pub mod losses;
pub mod metrics;
pub mod rain;
pub mod raster;
pub mod rgf;
pub mod rng;
pub mod split;
pub mod streaks;

pub use blend::{composite_with_mask, BlendMode, BlendParams, BlendResult};
pub use error::{Error, Result};
pub use losses::{AttentionLosses, LossWeights};
pub use metrics::{mse, psnr, ssim};
pub use rain::{compose_mor, invert_mor, GroundTruthMaps, Inversion, RainParams};
pub use raster::{
    from_byte_domain, to_byte_domain, BinaryMask, ByteImage, DepthMap, RgbImage, Samples,
    ScalarMap, SignedImage,
};
pub use rgf::{decompose, rolling_guidance_filter, Decomposition, RgfParams};
pub use split::{split_groups, GroupSplit};
pub use streaks::{generate_streak_pattern, StreakPattern, StreakPatternParams};
