//! PNG and PFM readers and writers.
//!
//! Colour images are 8-bit RGB PNG, maps and masks 8-bit grayscale PNG.
//! Depth is single-channel PFM in metres, or 16-bit grayscale PNG with an
//! explicit metres-per-unit scale.

use std::fs;
use std::io::{BufReader, BufWriter, Cursor, Write};
use std::path::Path;

use mor_core::{BinaryMask, ByteImage, DepthMap, RgbImage, ScalarMap};
use png::{BitDepth, ColorType, Transformations};

use crate::error::{CoreContext, Result, SynthError};

const PNG_MAGIC: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0d, 0x0a, 0x1a, 0x0a];

struct DecodedPng {
    width: usize,
    height: usize,
    color: ColorType,
    depth: BitDepth,
    data: Vec<u8>,
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| SynthError::io(path, e))
}

fn decode_png(path: &Path, bytes: &[u8]) -> Result<DecodedPng> {
    let err = |source| SynthError::PngDecode {
        path: path.to_path_buf(),
        source,
    };
    let mut decoder = png::Decoder::new(BufReader::new(Cursor::new(bytes)));
    decoder.set_transformations(Transformations::IDENTITY);
    let mut reader = decoder.read_info().map_err(err)?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| SynthError::format(path, "image too large"))?;
    let mut data = vec![0; size];
    let info = reader.next_frame(&mut data).map_err(err)?;
    data.truncate(info.buffer_size());
    if info.width == 0 || info.height == 0 {
        return Err(SynthError::format(path, "zero-sized image"));
    }
    Ok(DecodedPng {
        width: info.width as usize,
        height: info.height as usize,
        color: info.color_type,
        depth: info.bit_depth,
        data,
    })
}

fn check_format(
    path: &Path,
    png: &DecodedPng,
    color: ColorType,
    expected_name: &'static str,
    depth: BitDepth,
) -> Result<()> {
    if png.color != color {
        return Err(SynthError::UnsupportedColor {
            path: path.to_path_buf(),
            found: format!("{:?}", png.color),
            expected: expected_name,
        });
    }
    if png.depth != depth {
        return Err(SynthError::UnsupportedBitDepth {
            path: path.to_path_buf(),
            depth: png.depth as u8,
            expected: depth as u8,
        });
    }
    Ok(())
}

fn encode_png(
    path: &Path,
    width: usize,
    height: usize,
    color: ColorType,
    depth: BitDepth,
    data: &[u8],
) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| SynthError::io(path, e))?;
    let err = |source| SynthError::PngEncode {
        path: path.to_path_buf(),
        source,
    };
    let mut encoder = png::Encoder::new(BufWriter::new(file), width as u32, height as u32);
    encoder.set_color(color);
    encoder.set_depth(depth);
    let mut writer = encoder.write_header().map_err(err)?;
    writer.write_image_data(data).map_err(err)?;
    writer.finish().map_err(err)
}

pub fn load_bytes(path: &Path) -> Result<ByteImage> {
    let png = decode_png(path, &read_file(path)?)?;
    check_format(path, &png, ColorType::Rgb, "8-bit RGB", BitDepth::Eight)?;
    ByteImage::new(png.width, png.height, png.data).context(path.display())
}

pub fn save_bytes(img: &ByteImage, path: &Path) -> Result<()> {
    let (w, h) = img.dims();
    encode_png(path, w, h, ColorType::Rgb, BitDepth::Eight, img.data())
}

pub fn load_image(path: &Path) -> Result<RgbImage> {
    load_bytes(path).map(|b| mor_core::from_byte_domain(&b))
}

pub fn save_image(img: &RgbImage, path: &Path) -> Result<()> {
    save_bytes(&mor_core::to_byte_domain(img), path)
}

/// Loads an 8-bit grayscale PNG as raw bytes.
pub fn load_gray(path: &Path) -> Result<(usize, usize, Vec<u8>)> {
    let png = decode_png(path, &read_file(path)?)?;
    check_format(
        path,
        &png,
        ColorType::Grayscale,
        "grayscale",
        BitDepth::Eight,
    )?;
    Ok((png.width, png.height, png.data))
}

pub fn save_gray(width: usize, height: usize, data: &[u8], path: &Path) -> Result<()> {
    encode_png(
        path,
        width,
        height,
        ColorType::Grayscale,
        BitDepth::Eight,
        data,
    )
}

pub fn save_map(map: &ScalarMap, path: &Path) -> Result<()> {
    let (w, h) = map.dims();
    save_gray(w, h, &map.to_bytes(), path)
}

pub fn load_map(path: &Path) -> Result<ScalarMap> {
    let (w, h, data) = load_gray(path)?;
    ScalarMap::from_bytes(w, h, &data).context(path.display())
}

/// Masks are stored as 0 / 255.
pub fn save_mask(mask: &BinaryMask, path: &Path) -> Result<()> {
    let (w, h) = mask.dims();
    save_gray(w, h, &mask.to_bytes(), path)
}

/// Rejects any byte other than 0 or 255.
pub fn load_mask(path: &Path) -> Result<BinaryMask> {
    let (w, h, data) = load_gray(path)?;
    if let Some(i) = data.iter().position(|&b| b != 0 && b != 255) {
        return Err(SynthError::format(
            path,
            format!("mask value {} at index {i} is neither 0 nor 255", data[i]),
        ));
    }
    BinaryMask::from_bytes(w, h, &data).context(path.display())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepthFormat {
    Pfm,
    Png16,
}

pub fn detect_depth_format(path: &Path, bytes: &[u8]) -> Result<DepthFormat> {
    if bytes.starts_with(&PNG_MAGIC) {
        Ok(DepthFormat::Png16)
    } else if bytes.starts_with(b"Pf") || bytes.starts_with(b"PF") {
        Ok(DepthFormat::Pfm)
    } else {
        Err(SynthError::format(
            path,
            "unknown depth format (expected PFM or 16-bit PNG)",
        ))
    }
}

/// Loads depth in metres. `scale` (metres per unit) is required for 16-bit
/// PNG and ignored for PFM.
pub fn load_depth(path: &Path, scale: Option<f64>) -> Result<DepthMap> {
    let bytes = read_file(path)?;
    match detect_depth_format(path, &bytes)? {
        DepthFormat::Pfm => {
            let (w, h, data) = parse_pfm(path, &bytes)?;
            DepthMap::new(w, h, data).context(path.display())
        }
        DepthFormat::Png16 => {
            let scale = scale.ok_or_else(|| {
                SynthError::Usage(format!(
                    "{}: 16-bit PNG depth needs --depth-scale",
                    path.display()
                ))
            })?;
            if !(scale.is_finite() && scale > 0.0) {
                return Err(SynthError::Usage(format!(
                    "depth scale must be finite and > 0, got {scale}"
                )));
            }
            let png = decode_png(path, &bytes)?;
            check_format(
                path,
                &png,
                ColorType::Grayscale,
                "grayscale",
                BitDepth::Sixteen,
            )?;
            let data = png
                .data
                .chunks_exact(2)
                .map(|c| f64::from(u16::from_be_bytes([c[0], c[1]])) * scale)
                .collect();
            DepthMap::new(png.width, png.height, data).context(path.display())
        }
    }
}

/// Writes depth as 16-bit grayscale PNG, `value = round(d / scale)`.
pub fn save_depth_png16(depth: &DepthMap, scale: f64, path: &Path) -> Result<()> {
    let (w, h) = depth.dims();
    let mut data = Vec::with_capacity(w * h * 2);
    for &d in depth.data() {
        let v = (d / scale).round();
        if !(0.0..=65535.0).contains(&v) {
            return Err(SynthError::format(
                path,
                format!("depth {d} does not fit 16 bits at scale {scale}"),
            ));
        }
        data.extend_from_slice(&(v as u16).to_be_bytes());
    }
    encode_png(path, w, h, ColorType::Grayscale, BitDepth::Sixteen, &data)
}

fn parse_pfm(path: &Path, bytes: &[u8]) -> Result<(usize, usize, Vec<f64>)> {
    // Header: three whitespace-separated tokens, then one whitespace byte.
    let mut tokens = Vec::with_capacity(4);
    let mut pos = 0;
    while tokens.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(SynthError::format(path, "truncated PFM header"));
        }
        tokens.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    pos += 1;
    if tokens[0] != "Pf" {
        return Err(SynthError::format(
            path,
            "only single-channel PFM (Pf) is supported",
        ));
    }
    let parse_dim = |s: &str| {
        s.parse::<usize>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| SynthError::format(path, format!("bad PFM dimension {s:?}")))
    };
    let (w, h) = (parse_dim(&tokens[1])?, parse_dim(&tokens[2])?);
    let scale: f64 = tokens[3]
        .parse()
        .ok()
        .filter(|s: &f64| s.is_finite() && *s != 0.0)
        .ok_or_else(|| SynthError::format(path, format!("bad PFM scale {:?}", tokens[3])))?;
    let little = scale < 0.0;
    let body = bytes.get(pos..).unwrap_or_default();
    if body.len() != w * h * 4 {
        return Err(SynthError::format(
            path,
            format!("PFM body has {} bytes, expected {}", body.len(), w * h * 4),
        ));
    }
    let mut data = vec![0.0; w * h];
    // Rows are stored bottom to top.
    for (row, chunk) in body.chunks_exact(w * 4).enumerate() {
        let y = h - 1 - row;
        for (x, b) in chunk.chunks_exact(4).enumerate() {
            let raw = [b[0], b[1], b[2], b[3]];
            let v = if little {
                f32::from_le_bytes(raw)
            } else {
                f32::from_be_bytes(raw)
            };
            data[y * w + x] = f64::from(v);
        }
    }
    Ok((w, h, data))
}

/// Writes single-channel little-endian PFM. Values are stored as `f32`.
pub fn save_pfm(width: usize, height: usize, data: &[f64], path: &Path) -> Result<()> {
    let mut out = Vec::with_capacity(32 + width * height * 4);
    write!(out, "Pf\n{width} {height}\n-1.0\n").expect("write to Vec");
    for y in (0..height).rev() {
        for &v in &data[y * width..(y + 1) * width] {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    fs::write(path, out).map_err(|e| SynthError::io(path, e))
}

pub fn save_depth(depth: &DepthMap, path: &Path) -> Result<()> {
    let (w, h) = depth.dims();
    save_pfm(w, h, depth.data(), path)
}
