//! Resolved synthesis configuration: one JSON document mirroring the
//! parameter records. Command-line flags are applied on top.

use std::path::Path;

use mor_core::rain::DEFAULT_STREAK_THRESHOLD;
use mor_core::{BlendParams, RainParams, RgfParams, StreakPatternParams};
use serde::{Deserialize, Serialize};

use crate::error::{CoreContext, Result, SynthError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmitFlags {
    /// Write the streak layer `S` as a map.
    pub s: bool,
    /// Write the RGF low/high decomposition of the rainy image.
    pub decomposition: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub rain: RainParams,
    pub streaks: StreakPatternParams,
    pub blend: BlendParams,
    pub rgf: RgfParams,
    /// Streak-mask threshold on `S`.
    pub tau_s: f64,
    /// Metres per unit for 16-bit PNG depth.
    pub depth_scale: Option<f64>,
    /// Rain variants rendered per input scene.
    pub variants: usize,
    pub emit: EmitFlags,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            rain: RainParams::default(),
            streaks: StreakPatternParams::default(),
            blend: BlendParams::default(),
            rgf: RgfParams::default(),
            tau_s: DEFAULT_STREAK_THRESHOLD,
            depth_scale: None,
            variants: 1,
            emit: EmitFlags::default(),
        }
    }
}

impl SynthConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| SynthError::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| SynthError::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Loads `path` when given, defaults otherwise.
    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn validate(&self) -> Result<()> {
        self.rain.validate().context("rain")?;
        self.streaks.validate().context("streaks")?;
        self.blend.validate().context("blend")?;
        self.rgf.validate().context("rgf")?;
        if !(0.0..=1.0).contains(&self.tau_s) {
            return Err(SynthError::Usage(format!(
                "tau_s must lie in [0, 1], got {}",
                self.tau_s
            )));
        }
        if let Some(s) = self.depth_scale {
            if !(s.is_finite() && s > 0.0) {
                return Err(SynthError::Usage(format!(
                    "depth_scale must be > 0, got {s}"
                )));
            }
        }
        if self.variants == 0 {
            return Err(SynthError::Usage("variants must be >= 1".into()));
        }
        Ok(())
    }
}
