//! Per-sample synthesis and the batch builder.
//!
//! Order per sample: streak transmission, haze, streak pattern and streak
//! layer from depth; streaks and haze composed onto the clean image with
//! `M_d = 0, D = 0`; then, when a cover layer is given, the configured blend
//! produces the final image and `M_d`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use mor_core::rain::{haze_layer, streak_layer, streak_transmission};
use mor_core::rng::derive_seed;
use mor_core::{
    compose_mor, composite_with_mask, decompose, from_byte_domain, generate_streak_pattern,
    to_byte_domain, ByteImage, Decomposition, DepthMap, GroundTruthMaps, ScalarMap,
};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::config::SynthConfig;
use crate::error::{CoreContext, Result, SynthError};
use crate::io;
use crate::manifest::{DatasetSample, Manifest, MapPaths, SourceInputs};

/// One clean scene with its depth and optional raindrop cover layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SceneInput {
    pub name: String,
    pub clean: PathBuf,
    pub depth: PathBuf,
    pub cover: Option<PathBuf>,
}

/// A fully specified sample: rendering it needs nothing else.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleJob {
    pub id: String,
    pub seed: u64,
    pub source: SourceInputs,
    pub params: SynthConfig,
}

/// Depth-driven rain layers of one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct RainLayers {
    pub t_r: ScalarMap,
    pub pattern: ScalarMap,
    pub s: ScalarMap,
    pub a: ScalarMap,
}

pub fn rain_layers(depth: &DepthMap, config: &SynthConfig) -> Result<RainLayers> {
    let (w, h) = depth.dims();
    let t_r = streak_transmission(depth, &config.rain).context("streak transmission")?;
    let a = haze_layer(depth, &config.rain).context("haze layer")?;
    let pattern = generate_streak_pattern(w, h, &config.streaks)
        .context("streak pattern")?
        .map;
    let s = streak_layer(&pattern, &t_r).context("streak layer")?;
    Ok(RainLayers { t_r, pattern, s, a })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub clean: ByteImage,
    pub rainy: ByteImage,
    pub maps: GroundTruthMaps,
    pub decomposition: Option<Decomposition>,
}

/// Renders one sample in memory.
pub fn render(
    clean: &ByteImage,
    depth: &DepthMap,
    cover: Option<&ByteImage>,
    config: &SynthConfig,
) -> Result<Rendered> {
    config.validate()?;
    if clean.dims() != depth.dims() {
        return Err(SynthError::Data(format!(
            "clean image is {:?} but depth is {:?}",
            clean.dims(),
            depth.dims()
        )));
    }
    let layers = rain_layers(depth, config)?;
    let mut maps =
        GroundTruthMaps::streaks_and_haze(layers.s, layers.a, config.tau_s).context("maps")?;
    let streaked =
        compose_mor(&from_byte_domain(clean), &maps, &config.rain).context("composition")?;
    let rainy = match cover {
        Some(cover) => {
            if cover.dims() != clean.dims() {
                return Err(SynthError::Data(format!(
                    "cover layer is {:?} but clean image is {:?}",
                    cover.dims(),
                    clean.dims()
                )));
            }
            let blended = composite_with_mask(&streaked, &from_byte_domain(cover), &config.blend)
                .context("blend")?;
            maps.m_d = blended.m_d;
            to_byte_domain(&blended.composite)
        }
        None => to_byte_domain(&streaked),
    };
    let decomposition = if config.emit.decomposition {
        Some(decompose(&from_byte_domain(&rainy), &config.rgf).context("decomposition")?)
    } else {
        None
    };
    Ok(Rendered {
        clean: clean.clone(),
        rainy,
        maps,
        decomposition,
    })
}

/// Pairs clean images with depth (and cover) files by file stem. Each
/// argument may be a single file or a directory.
pub fn discover_scenes(
    clean: &Path,
    depth: &Path,
    cover: Option<&Path>,
) -> Result<Vec<SceneInput>> {
    if !clean.is_dir() {
        if depth.is_dir() || cover.is_some_and(Path::is_dir) {
            return Err(SynthError::Usage(
                "a single clean image needs a single depth (and cover) file".into(),
            ));
        }
        let name = stem(clean)?;
        return Ok(vec![SceneInput {
            name,
            clean: clean.to_path_buf(),
            depth: depth.to_path_buf(),
            cover: cover.map(Path::to_path_buf),
        }]);
    }
    let cleans = list_by_stem(clean, Some("png"))?;
    if cleans.is_empty() {
        return Err(SynthError::Data(format!(
            "{}: no PNG files",
            clean.display()
        )));
    }
    let depths = list_by_stem(depth, None)?;
    let covers = match cover {
        Some(c) if c.is_dir() => Some(list_by_stem(c, Some("png"))?),
        _ => None,
    };
    cleans
        .into_iter()
        .map(|(name, clean)| {
            let depth = depths.get(&name).cloned().ok_or_else(|| {
                SynthError::Data(format!(
                    "no depth file for scene {name:?} in {}",
                    depth.display()
                ))
            })?;
            let cover = match (&covers, cover) {
                (Some(map), Some(dir)) => Some(map.get(&name).cloned().ok_or_else(|| {
                    SynthError::Data(format!("no cover for scene {name:?} in {}", dir.display()))
                })?),
                (None, Some(file)) => Some(file.to_path_buf()),
                _ => None,
            };
            Ok(SceneInput {
                name,
                clean,
                depth,
                cover,
            })
        })
        .collect()
}

fn stem(path: &Path) -> Result<String> {
    path.file_stem()
        .and_then(|s| s.to_str())
        .map(str::to_owned)
        .ok_or_else(|| SynthError::Usage(format!("{}: no usable file name", path.display())))
}

fn list_by_stem(dir: &Path, extension: Option<&str>) -> Result<BTreeMap<String, PathBuf>> {
    if !dir.is_dir() {
        return Err(SynthError::Usage(format!(
            "{} is not a directory",
            dir.display()
        )));
    }
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(|e| SynthError::io(dir, e))? {
        let path = entry.map_err(|e| SynthError::io(dir, e))?.path();
        if !path.is_file() {
            continue;
        }
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        if extension.is_some_and(|want| ext.as_deref() != Some(want)) {
            continue;
        }
        let name = stem(&path)?;
        if let Some(prev) = out.insert(name.clone(), path.clone()) {
            return Err(SynthError::Data(format!(
                "{} and {} share the stem {name:?}",
                prev.display(),
                path.display()
            )));
        }
    }
    Ok(out)
}

/// Expands scenes into jobs: `config.variants` samples per scene, each with
/// its own seed derived from `base_seed` and the sample index.
pub fn plan(scenes: &[SceneInput], config: &SynthConfig, base_seed: u64) -> Result<Vec<SampleJob>> {
    config.validate()?;
    let digits = config.variants.saturating_sub(1).to_string().len().max(3);
    let mut jobs = Vec::with_capacity(scenes.len() * config.variants);
    for scene in scenes {
        let source = SourceInputs {
            clean: absolute(&scene.clean)?,
            depth: absolute(&scene.depth)?,
            cover: scene.cover.as_deref().map(absolute).transpose()?,
        };
        for v in 0..config.variants {
            let seed = derive_seed(base_seed, jobs.len() as u64);
            let mut params = config.clone();
            params.streaks.seed = seed;
            jobs.push(SampleJob {
                id: format!("{}_{v:0digits$}", scene.name),
                seed,
                source: source.clone(),
                params,
            });
        }
    }
    Ok(jobs)
}

fn absolute(path: &Path) -> Result<PathBuf> {
    fs::canonicalize(path).map_err(|e| SynthError::io(path, e))
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| SynthError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Renders `job` and writes its files under `out_dir/<id>/`.
pub fn build_sample(job: &SampleJob, out_dir: &Path) -> Result<DatasetSample> {
    let clean = io::load_bytes(&job.source.clean)?;
    let depth = io::load_depth(&job.source.depth, job.params.depth_scale)?;
    let cover = job
        .source
        .cover
        .as_deref()
        .map(io::load_bytes)
        .transpose()?;
    let rendered = render(&clean, &depth, cover.as_ref(), &job.params)?;

    let dir = out_dir.join(&job.id);
    fs::create_dir_all(&dir).map_err(|e| SynthError::io(&dir, e))?;
    let rel = |name: &str| format!("{}/{name}", job.id);
    let mut hashes = BTreeMap::new();
    let mut emit = |name: &str, write: &dyn Fn(&Path) -> Result<()>| -> Result<String> {
        let path = dir.join(name);
        write(&path)?;
        hashes.insert(rel(name), sha256_file(&path)?);
        Ok(rel(name))
    };

    let rainy = emit("rainy.png", &|p| io::save_bytes(&rendered.rainy, p))?;
    let clean_rel = emit("clean.png", &|p| io::save_bytes(&rendered.clean, p))?;
    let depth_ext = job
        .source
        .depth
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("pfm")
        .to_ascii_lowercase();
    let depth_rel = emit(&format!("depth.{depth_ext}"), &|p| {
        fs::copy(&job.source.depth, p)
            .map(drop)
            .map_err(|e| SynthError::io(p, e))
    })?;
    let m_s = emit("m_s.png", &|p| io::save_mask(&rendered.maps.m_s, p))?;
    let m_d = emit("m_d.png", &|p| io::save_mask(&rendered.maps.m_d, p))?;
    let a = emit("a.png", &|p| io::save_map(&rendered.maps.a, p))?;
    let s = if job.params.emit.s {
        Some(emit("s.png", &|p| io::save_map(&rendered.maps.s, p))?)
    } else {
        None
    };
    let (low, high) = match &rendered.decomposition {
        Some(d) => (
            Some(emit("low.png", &|p| io::save_image(&d.low, p))?),
            Some(emit("high.png", &|p| {
                io::save_bytes(&d.high.to_bytes(), p)
            })?),
        ),
        None => (None, None),
    };

    Ok(DatasetSample {
        id: job.id.clone(),
        seed: job.seed,
        rainy,
        clean: clean_rel,
        depth: depth_rel,
        maps: MapPaths {
            m_s,
            m_d,
            a,
            s,
            low,
            high,
        },
        params: job.params.clone(),
        source: job.source.clone(),
        hashes,
    })
}

/// Runs `f` on a pool of `threads` workers; `None` uses rayon's default.
fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| SynthError::Data(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Builds every job and writes `manifest.json` once all samples are done.
pub fn build(
    jobs: &[SampleJob],
    config: &SynthConfig,
    base_seed: u64,
    out_dir: &Path,
    threads: Option<usize>,
) -> Result<Manifest> {
    fs::create_dir_all(out_dir).map_err(|e| SynthError::io(out_dir, e))?;
    let samples = with_pool(threads, || {
        jobs.par_iter()
            .map(|job| build_sample(job, out_dir))
            .collect::<Result<Vec<_>>>()
    })??;
    let manifest = Manifest::new(base_seed, config.clone(), samples);
    manifest.save(&out_dir.join(crate::manifest::MANIFEST_FILE))?;
    Ok(manifest)
}

/// Regenerates every sample of `manifest` into `out_dir` from its recorded
/// sources and parameter snapshot. Groups and split are carried over.
pub fn rebuild(manifest: &Manifest, out_dir: &Path, threads: Option<usize>) -> Result<Manifest> {
    let jobs: Vec<SampleJob> = manifest
        .samples
        .iter()
        .map(|s| SampleJob {
            id: s.id.clone(),
            seed: s.seed,
            source: s.source.clone(),
            params: s.params.clone(),
        })
        .collect();
    let mut rebuilt = build(
        &jobs,
        &manifest.config,
        manifest.base_seed,
        out_dir,
        threads,
    )?;
    rebuilt.groups = manifest.groups.clone();
    rebuilt.split = manifest.split.clone();
    rebuilt.save(&out_dir.join(crate::manifest::MANIFEST_FILE))?;
    Ok(rebuilt)
}
