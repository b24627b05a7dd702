#![allow(dead_code)]

use std::path::{Path, PathBuf};

use mor_core::{ByteImage, DepthMap};
use mor_synth::io;

/// Street-like test scene: smooth shading with a few hard edges.
pub fn scene(w: usize, h: usize, variant: usize) -> ByteImage {
    let phase = variant as f64 * 0.7;
    ByteImage::from_fn(w, h, |x, y| {
        let (fx, fy) = (x as f64, y as f64);
        let base = 0.45 + 0.25 * (fx / 37.0 + phase).sin() * (fy / 29.0).cos();
        let edge = if (x / 64 + y / 48) % 2 == 0 {
            0.15
        } else {
            -0.1
        };
        let v = (base + edge).clamp(0.0, 1.0);
        [
            (v * 255.0).round() as u8,
            (v * 0.9 * 255.0).round() as u8,
            ((1.0 - v) * 0.6 * 255.0).round() as u8,
        ]
    })
    .unwrap()
}

/// Depth growing from 5 m at the bottom row to 200 m at the top.
pub fn depth(w: usize, h: usize) -> DepthMap {
    DepthMap::from_fn(w, h, |_, y| {
        5.0 + 195.0 * (h - 1 - y) as f64 / (h - 1).max(1) as f64
    })
    .unwrap()
}

/// Raindrop cover layer: mid-grey with a few bright and dark blobs.
pub fn cover(w: usize, h: usize) -> ByteImage {
    ByteImage::from_fn(w, h, |x, y| {
        let blob = |cx: f64, cy: f64, r: f64| {
            let d = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt();
            (1.0 - d / r).max(0.0)
        };
        let v = 128.0 + 120.0 * blob(w as f64 * 0.3, h as f64 * 0.4, 20.0)
            - 100.0 * blob(w as f64 * 0.7, h as f64 * 0.6, 15.0);
        [v.round().clamp(0.0, 255.0) as u8; 3]
    })
    .unwrap()
}

/// Writes `n` scenes as `scene_XX.png` / `scene_XX.pfm` under `dir`.
pub fn write_scenes(dir: &Path, n: usize, w: usize, h: usize) -> (PathBuf, PathBuf) {
    let clean = dir.join("clean");
    let depth_dir = dir.join("depth");
    std::fs::create_dir_all(&clean).unwrap();
    std::fs::create_dir_all(&depth_dir).unwrap();
    for i in 0..n {
        io::save_bytes(&scene(w, h, i), &clean.join(format!("scene_{i:02}.png"))).unwrap();
        io::save_depth(&depth(w, h), &depth_dir.join(format!("scene_{i:02}.pfm"))).unwrap();
    }
    (clean, depth_dir)
}
