//! Quality reports: per-image PSNR/SSIM over two directories of PNGs.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use mor_core::{psnr, ssim};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{CoreContext, Result, SynthError};
use crate::io;

pub const COLOR_SPACE_NOTE: &str =
    "PSNR over all RGB samples jointly, peak 1.0; SSIM per RGB channel, averaged; stored PNG values used directly";

/// PSNR in dB, serialized as the string `"inf"` for identical images.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decibels(pub f64);

impl Serialize for Decibels {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() && self.0 > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl std::fmt::Display for Decibels {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_infinite() && self.0 > 0.0 {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub id: String,
    pub psnr_db: Decibels,
    pub ssim: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QualityReport {
    pub color_space: &'static str,
    pub rows: Vec<ReportRow>,
    pub mean_psnr_db: Decibels,
    pub mean_ssim: f64,
}

impl QualityReport {
    pub fn from_rows(rows: Vec<ReportRow>) -> Self {
        let n = rows.len() as f64;
        let mean_psnr_db = Decibels(rows.iter().map(|r| r.psnr_db.0).sum::<f64>() / n);
        let mean_ssim = rows.iter().map(|r| r.ssim).sum::<f64>() / n;
        Self {
            color_space: COLOR_SPACE_NOTE,
            rows,
            mean_psnr_db,
            mean_ssim,
        }
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self).map_err(|source| SynthError::Json {
            path: path.to_path_buf(),
            source,
        })?;
        text.push('\n');
        fs::write(path, text).map_err(|e| SynthError::io(path, e))
    }

    /// Columns `id,psnr_db,ssim`; the last row has id `mean`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let err = |source| SynthError::Csv {
            path: path.to_path_buf(),
            source,
        };
        let mut w = csv::Writer::from_path(path).map_err(err)?;
        w.write_record(["id", "psnr_db", "ssim"]).map_err(err)?;
        for r in &self.rows {
            w.write_record([r.id.clone(), r.psnr_db.to_string(), r.ssim.to_string()])
                .map_err(err)?;
        }
        w.write_record([
            "mean".to_string(),
            self.mean_psnr_db.to_string(),
            self.mean_ssim.to_string(),
        ])
        .map_err(err)?;
        w.flush().map_err(|e| SynthError::io(path, e))
    }
}

fn png_names(dir: &Path) -> Result<BTreeSet<String>> {
    let mut names = BTreeSet::new();
    for entry in fs::read_dir(dir).map_err(|e| SynthError::io(dir, e))? {
        let path = entry.map_err(|e| SynthError::io(dir, e))?.path();
        let is_png = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if path.is_file() && is_png {
            if let Some(name) = path.file_name().and_then(|n| n.to_str()) {
                names.insert(name.to_owned());
            }
        }
    }
    Ok(names)
}

/// Scores every PNG in `pred_dir` against the same file name in `gt_dir`.
/// Unmatched files on either side and an empty intersection are errors.
pub fn evaluate(pred_dir: &Path, gt_dir: &Path) -> Result<QualityReport> {
    let pred = png_names(pred_dir)?;
    let gt = png_names(gt_dir)?;
    let unmatched: Vec<&String> = pred.symmetric_difference(&gt).collect();
    if !unmatched.is_empty() {
        return Err(SynthError::Data(format!(
            "files without a counterpart: {}",
            unmatched
                .iter()
                .map(|s| s.as_str())
                .collect::<Vec<_>>()
                .join(", ")
        )));
    }
    if pred.is_empty() {
        return Err(SynthError::Data(format!(
            "no PNG files in common between {} and {}",
            pred_dir.display(),
            gt_dir.display()
        )));
    }
    let names: Vec<&String> = pred.iter().collect();
    let rows = names
        .par_iter()
        .map(|name| score(&pred_dir.join(name), &gt_dir.join(name), name))
        .collect::<Result<Vec<_>>>()?;
    Ok(QualityReport::from_rows(rows))
}

fn score(pred: &Path, gt: &Path, name: &str) -> Result<ReportRow> {
    let p = io::load_image(pred)?;
    let g = io::load_image(gt)?;
    let id = Path::new(name)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| name.to_owned());
    Ok(ReportRow {
        psnr_db: Decibels(psnr(&p, &g, 1.0).context(pred.display())?),
        ssim: ssim(&p, &g).context(pred.display())?,
        id,
    })
}

/// Report file paths inside an output directory.
pub fn report_paths(out_dir: &Path) -> (PathBuf, PathBuf) {
    (out_dir.join("report.json"), out_dir.join("report.csv"))
}
