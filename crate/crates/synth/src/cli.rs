//! Command-line surface of `mor-synth`.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use mor_core::blend::composite_bytes;
use mor_core::{decompose, BlendMode, ByteImage};
use serde_json::json;

use crate::config::SynthConfig;
use crate::error::{CoreContext, Result, SynthError};
use crate::manifest::{Manifest, MANIFEST_FILE};
use crate::{io, pipeline, report};

#[derive(Debug, Parser)]
#[command(
    name = "mor-synth",
    version,
    about = "Mixture-of-rain dataset synthesis and evaluation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Base seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON configuration; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Default, Args)]
pub struct RainArgs {
    /// Streak attenuation coefficient (1/m).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Haze attenuation coefficient (1/m).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Near-field streak saturation depth (m).
    #[arg(long)]
    pub d1: Option<f64>,
    /// Atmospheric light.
    #[arg(long)]
    pub a0: Option<f64>,
    /// Streaks per megapixel.
    #[arg(long)]
    pub density: Option<f64>,
    /// Mean streak angle, degrees from vertical.
    #[arg(long)]
    pub angle_mean: Option<f64>,
    /// Streak angle half-range, degrees.
    #[arg(long)]
    pub angle_jitter: Option<f64>,
    /// Streak stroke width, pixels.
    #[arg(long)]
    pub streak_width: Option<f64>,
    /// Streak-mask threshold on S.
    #[arg(long)]
    pub tau_s: Option<f64>,
    /// Metres per unit for 16-bit PNG depth.
    #[arg(long)]
    pub depth_scale: Option<f64>,
}

impl RainArgs {
    fn apply(&self, c: &mut SynthConfig) {
        set(&mut c.rain.alpha, self.alpha);
        set(&mut c.rain.beta, self.beta);
        set(&mut c.rain.d1, self.d1);
        set(&mut c.rain.a0, self.a0);
        set(&mut c.streaks.density, self.density);
        set(&mut c.streaks.angle_mean, self.angle_mean);
        set(&mut c.streaks.angle_jitter, self.angle_jitter);
        set(&mut c.streaks.width, self.streak_width);
        set(&mut c.tau_s, self.tau_s);
        if self.depth_scale.is_some() {
            c.depth_scale = self.depth_scale;
        }
    }
}

#[derive(Debug, Default, Args)]
pub struct BlendArgs {
    /// Blend mode: overlay, highlight, transparency or final.
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<BlendMode>,
    /// Transparency t.
    #[arg(long)]
    pub t: Option<f64>,
    /// Raindrop-mask threshold, byte units.
    #[arg(long)]
    pub tau_d: Option<f64>,
}

impl BlendArgs {
    fn apply(&self, c: &mut SynthConfig) {
        set(&mut c.blend.mode, self.mode);
        set(&mut c.blend.t, self.t);
        set(&mut c.blend.tau_d, self.tau_d);
    }
}

#[derive(Debug, Default, Args)]
pub struct RgfArgs {
    #[arg(long)]
    pub sigma_s: Option<f64>,
    #[arg(long)]
    pub sigma_r: Option<f64>,
    #[arg(long)]
    pub n_iter: Option<usize>,
    #[arg(long)]
    pub window_radius: Option<usize>,
}

impl RgfArgs {
    fn apply(&self, c: &mut SynthConfig) {
        set(&mut c.rgf.sigma_s, self.sigma_s);
        set(&mut c.rgf.sigma_r, self.sigma_r);
        set(&mut c.rgf.n_iter, self.n_iter);
        if self.window_radius.is_some() {
            c.rgf.window_radius = self.window_radius;
        }
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn parse_mode(s: &str) -> std::result::Result<BlendMode, String> {
    s.parse().map_err(|e: mor_core::Error| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build rainy samples from clean images and depth maps.
    Synth {
        #[command(flatten)]
        common: Common,
        /// Clean PNG, or a directory of them.
        #[arg(long, required_unless_present = "from_manifest")]
        clean: Option<PathBuf>,
        /// Depth file (PFM or 16-bit PNG), or a directory matched by stem.
        #[arg(long, required_unless_present = "from_manifest")]
        depth: Option<PathBuf>,
        /// Raindrop cover PNG, or a directory matched by stem.
        #[arg(long)]
        cover: Option<PathBuf>,
        /// Regenerate the samples of an existing manifest.
        #[arg(long, conflicts_with_all = ["clean", "depth", "cover"])]
        from_manifest: Option<PathBuf>,
        /// Rain variants per scene.
        #[arg(long)]
        variants: Option<usize>,
        /// Also write the streak layer S.
        #[arg(long)]
        emit_s: bool,
        /// Also write the RGF decomposition of each rainy image.
        #[arg(long)]
        emit_decomposition: bool,
        /// Worker threads.
        #[arg(long, env = "MOR_SYNTH_JOBS")]
        jobs: Option<usize>,
        #[command(flatten)]
        rain: RainArgs,
        #[command(flatten)]
        blend: BlendArgs,
        #[command(flatten)]
        rgf: RgfArgs,
    },
    /// Blend a cover layer onto a background and derive the raindrop mask.
    Blend {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        background: PathBuf,
        #[arg(long)]
        cover: PathBuf,
        #[command(flatten)]
        blend: BlendArgs,
    },
    /// Split an image into RGF structure and detail.
    Decompose {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        rgf: RgfArgs,
    },
    /// Write the rain ground-truth maps for a depth map.
    Maps {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        depth: PathBuf,
        /// With --cover, also derive the raindrop mask.
        #[arg(long, requires = "cover")]
        background: Option<PathBuf>,
        #[arg(long, requires = "background")]
        cover: Option<PathBuf>,
        #[command(flatten)]
        rain: RainArgs,
        #[command(flatten)]
        blend: BlendArgs,
    },
    /// Group a manifest's samples and draw train/test ids.
    Split {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = 20)]
        group_size: usize,
        /// Training samples drawn per group.
        #[arg(long, default_value_t = 5)]
        train: usize,
        /// Test samples drawn per group.
        #[arg(long, default_value_t = 0)]
        test: usize,
    },
    /// Score predictions against ground truth by file name.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
    },
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => match run(cli) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        },
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            code
        }
    }
}

fn create_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| SynthError::io(dir, e))
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON value serializes");
    text.push('\n');
    fs::write(path, text).map_err(|e| SynthError::io(path, e))
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth {
            common,
            clean,
            depth,
            cover,
            from_manifest,
            variants,
            emit_s,
            emit_decomposition,
            jobs,
            rain,
            blend,
            rgf,
        } => {
            if let Some(path) = from_manifest {
                let manifest = Manifest::load(&path)?;
                let rebuilt = pipeline::rebuild(&manifest, &common.out, jobs)?;
                println!(
                    "rebuilt {} samples into {}",
                    rebuilt.samples.len(),
                    common.out.display()
                );
                return Ok(());
            }
            let mut config = SynthConfig::load_or_default(common.config.as_deref())?;
            rain.apply(&mut config);
            blend.apply(&mut config);
            rgf.apply(&mut config);
            set(&mut config.variants, variants);
            config.emit.s |= emit_s;
            config.emit.decomposition |= emit_decomposition;
            config.validate()?;
            let (clean, depth) = (
                clean.expect("required by clap"),
                depth.expect("required by clap"),
            );
            let scenes = pipeline::discover_scenes(&clean, &depth, cover.as_deref())?;
            let base_seed = common.seed.unwrap_or(0);
            let jobs_list = pipeline::plan(&scenes, &config, base_seed)?;
            let manifest = pipeline::build(&jobs_list, &config, base_seed, &common.out, jobs)?;
            println!(
                "wrote {} samples to {}",
                manifest.samples.len(),
                common.out.display()
            );
            Ok(())
        }
        Command::Blend {
            common,
            background,
            cover,
            blend,
        } => {
            let mut config = SynthConfig::load_or_default(common.config.as_deref())?;
            blend.apply(&mut config);
            let bg = io::load_bytes(&background)?;
            let cv = io::load_bytes(&cover)?;
            let r = composite_bytes(&bg, &cv, &config.blend).context("blend")?;
            create_out(&common.out)?;
            io::save_bytes(&r.composite, &common.out.join("composite.png"))?;
            io::save_mask(&r.m_d, &common.out.join("m_d.png"))?;
            write_json(
                &common.out.join("blend.json"),
                &json!({ "background": background, "cover": cover, "blend": config.blend }),
            )
        }
        Command::Decompose { common, input, rgf } => {
            let mut config = SynthConfig::load_or_default(common.config.as_deref())?;
            rgf.apply(&mut config);
            let img = io::load_image(&input)?;
            let d = decompose(&img, &config.rgf).context("decompose")?;
            create_out(&common.out)?;
            io::save_image(&d.low, &common.out.join("low.png"))?;
            io::save_bytes(&d.high.to_bytes(), &common.out.join("high.png"))?;
            write_json(
                &common.out.join("decomposition.json"),
                &json!({
                    "input": input,
                    "rgf": config.rgf,
                    "low": "low.png",
                    "high": "high.png",
                    "high_encoding": "byte = round_half_up((h + 1) / 2 * 255), h = (byte / 255) * 2 - 1",
                }),
            )
        }
        Command::Maps {
            common,
            depth,
            background,
            cover,
            rain,
            blend,
        } => {
            let mut config = SynthConfig::load_or_default(common.config.as_deref())?;
            rain.apply(&mut config);
            blend.apply(&mut config);
            set(&mut config.streaks.seed, common.seed);
            config.validate()?;
            let depth_map = io::load_depth(&depth, config.depth_scale)?;
            let layers = pipeline::rain_layers(&depth_map, &config)?;
            let m_s =
                mor_core::rain::threshold_streak_mask(&layers.s, config.tau_s).context("m_s")?;
            create_out(&common.out)?;
            let out = |name: &str| common.out.join(name);
            io::save_map(&layers.t_r, &out("t_r.png"))?;
            io::save_map(&layers.pattern, &out("pattern.png"))?;
            io::save_map(&layers.s, &out("s.png"))?;
            io::save_map(&layers.a, &out("a.png"))?;
            io::save_mask(&m_s, &out("m_s.png"))?;
            if let (Some(bg), Some(cv)) = (&background, &cover) {
                let bg: ByteImage = io::load_bytes(bg)?;
                let cv = io::load_bytes(cv)?;
                let r = composite_bytes(&bg, &cv, &config.blend).context("blend")?;
                io::save_mask(&r.m_d, &out("m_d.png"))?;
            }
            write_json(
                &out("maps.json"),
                &json!({ "depth": depth, "config": config }),
            )
        }
        Command::Split {
            common,
            manifest,
            group_size,
            train,
            test,
        } => {
            let mut m = Manifest::load(&manifest)?;
            m.apply_split(group_size, train, test, common.seed.unwrap_or(0))?;
            create_out(&common.out)?;
            let path = common.out.join(MANIFEST_FILE);
            m.save(&path)?;
            let split = m.split.as_ref().expect("split just applied");
            println!(
                "{} groups, {} train, {} test -> {}",
                m.groups.len(),
                split.train.len(),
                split.test.len(),
                path.display()
            );
            Ok(())
        }
        Command::Eval { common, pred, gt } => {
            let r = report::evaluate(&pred, &gt)?;
            create_out(&common.out)?;
            let (json_path, csv_path) = report::report_paths(&common.out);
            r.write_json(&json_path)?;
            r.write_csv(&csv_path)?;
            println!(
                "mean PSNR {} dB, mean SSIM {:.4}",
                r.mean_psnr_db, r.mean_ssim
            );
            Ok(())
        }
    }
}
