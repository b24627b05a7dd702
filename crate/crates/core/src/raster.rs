//! Raster types shared by every stage of the pipeline.
//!
//! All real-valued rasters are row-major `f64` buffers. Colour images are
//! interleaved RGB. Constructors validate the value domain; operations that
//! produce rasters internally go through the crate-private clamping
//! constructors.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Something that can be compared sample-by-sample with another raster of
/// the same shape.
pub trait Samples {
    /// `(width, height, channels)`.
    fn shape(&self) -> (usize, usize, usize);
    fn sample(&self, index: usize) -> f64;

    fn sample_count(&self) -> usize {
        let (w, h, c) = self.shape();
        w * h * c
    }
}

fn check_dims(width: usize, height: usize, channels: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::EmptyRaster);
    }
    let expected = width * height * channels;
    if len != expected {
        return Err(Error::DataLength {
            expected,
            found: len,
        });
    }
    Ok(())
}

fn check_unit(data: &[f64]) -> Result<()> {
    match data
        .iter()
        .position(|v| !(v.is_finite() && (0.0..=1.0).contains(v)))
    {
        Some(index) => Err(Error::ValueOutOfRange {
            index,
            value: data[index],
        }),
        None => Ok(()),
    }
}

pub(crate) fn ensure_same_dims(expected: (usize, usize), found: (usize, usize)) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

#[inline]
pub(crate) fn clamp_unit(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

/// Maps a unit-domain value to a byte: `floor(v * 255 + 0.5)` clamped to
/// `[0, 255]`.
#[inline]
pub fn unit_to_byte(v: f64) -> u8 {
    round_half_up_byte(v * 255.0)
}

/// Round-half-up followed by a clamp to `[0, 255]`.
#[inline]
pub fn round_half_up_byte(v: f64) -> u8 {
    let r = libm::floor(v + 0.5);
    if r.is_nan() || r <= 0.0 {
        0
    } else if r >= 255.0 {
        255
    } else {
        r as u8
    }
}

#[inline]
pub fn byte_to_unit(b: u8) -> f64 {
    f64::from(b) / 255.0
}

macro_rules! raster_dims {
    ($ty:ty) => {
        impl $ty {
            pub fn width(&self) -> usize {
                self.width
            }

            pub fn height(&self) -> usize {
                self.height
            }

            /// `(width, height)`.
            pub fn dims(&self) -> (usize, usize) {
                (self.width, self.height)
            }

            pub fn data(&self) -> &[<Self as RasterElem>::Elem] {
                &self.data
            }

            pub fn into_raw(self) -> Vec<<Self as RasterElem>::Elem> {
                self.data
            }
        }
    };
}

#[doc(hidden)]
pub trait RasterElem {
    type Elem;
}

/// H×W×3 image with every channel in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl RasterElem for RgbImage {
    type Elem = f64;
}
raster_dims!(RgbImage);

impl RgbImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(width, height, 3, data.len())?;
        check_unit(&data)?;
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, rgb: [f64; 3]) -> Result<Self> {
        Self::from_fn(width, height, |_, _| rgb)
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [f64; 3],
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    /// Clamps every value into `[0, 1]`; NaN maps to 0.
    pub(crate) fn from_raw_clamped(width: usize, height: usize, mut data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height * 3);
        for v in &mut data {
            *v = clamp_unit(*v);
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }
}

/// Interleaved 8-bit RGB raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ByteImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl RasterElem for ByteImage {
    type Elem = u8;
}
raster_dims!(ByteImage);

impl ByteImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        check_dims(width, height, 3, data.len())?;
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [u8; 3],
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }
}

/// Round-half-up quantisation of every channel to `0..=255`.
pub fn to_byte_domain(img: &RgbImage) -> ByteImage {
    ByteImage {
        width: img.width,
        height: img.height,
        data: img.data.iter().map(|&v| unit_to_byte(v)).collect(),
    }
}

/// `v = byte / 255`; exact inverse of [`to_byte_domain`] on all 256 levels.
pub fn from_byte_domain(raster: &ByteImage) -> RgbImage {
    RgbImage {
        width: raster.width,
        height: raster.height,
        data: raster.data.iter().map(|&b| byte_to_unit(b)).collect(),
    }
}

/// Single-channel field with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarMap {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl RasterElem for ScalarMap {
    type Elem = f64;
}
raster_dims!(ScalarMap);

impl ScalarMap {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(width, height, 1, data.len())?;
        check_unit(&data)?;
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        check_dims(width, height, 1, width * height)?;
        Self::new(width, height, alloc::vec![value; width * height])
    }

    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        Self::filled(width, height, 0.0)
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub(crate) fn from_raw_clamped(width: usize, height: usize, mut data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        for v in &mut data {
            *v = clamp_unit(*v);
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    /// 8-bit grey levels, round-half-up.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.data.iter().map(|&v| unit_to_byte(v)).collect()
    }

    pub fn from_bytes(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        Self::new(
            width,
            height,
            bytes.iter().map(|&b| byte_to_unit(b)).collect(),
        )
    }
}

/// Single-channel mask holding exactly 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl RasterElem for BinaryMask {
    type Elem = u8;
}
raster_dims!(BinaryMask);

impl BinaryMask {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        check_dims(width, height, 1, data.len())?;
        if let Some(index) = data.iter().position(|&v| v > 1) {
            return Err(Error::NonBinary {
                index,
                value: data[index],
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        check_dims(width, height, 1, width * height)?;
        Ok(Self {
            width,
            height,
            data: alloc::vec![0; width * height],
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self> {
        check_dims(width, height, 1, width * height)?;
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(u8::from(f(x, y)));
            }
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x] == 1
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().filter(|&&v| v == 1).count()
    }

    /// 0 → 0, 1 → 255.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.data.iter().map(|&v| v * 255).collect()
    }

    /// Any grey level ≥ 128 reads back as set.
    pub fn from_bytes(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        Self::new(
            width,
            height,
            bytes.iter().map(|&b| u8::from(b >= 128)).collect(),
        )
    }
}

/// Scene depth in metres; finite and non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl RasterElem for DepthMap {
    type Elem = f64;
}
raster_dims!(DepthMap);

impl DepthMap {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(width, height, 1, data.len())?;
        if let Some(index) = data.iter().position(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::InvalidDepth {
                index,
                value: data[index],
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, depth: f64) -> Result<Self> {
        check_dims(width, height, 1, width * height)?;
        Self::new(width, height, alloc::vec![depth; width * height])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }
}

/// Interleaved RGB residual with values in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl RasterElem for SignedImage {
    type Elem = f64;
}
raster_dims!(SignedImage);

impl SignedImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(width, height, 3, data.len())?;
        if let Some(index) = data
            .iter()
            .position(|v| !(v.is_finite() && (-1.0..=1.0).contains(v)))
        {
            return Err(Error::ValueOutOfRange {
                index,
                value: data[index],
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Byte encoding `round((h + 1) / 2 * 255)`, round-half-up.
    pub fn to_bytes(&self) -> ByteImage {
        ByteImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&h| encode_signed(h)).collect(),
        }
    }

    /// Inverse of [`SignedImage::to_bytes`]: `h = 2 * byte / 255 - 1`.
    pub fn from_bytes(raster: &ByteImage) -> Self {
        Self {
            width: raster.width,
            height: raster.height,
            data: raster.data.iter().map(|&b| decode_signed(b)).collect(),
        }
    }
}

#[inline]
pub fn encode_signed(h: f64) -> u8 {
    round_half_up_byte((h + 1.0) / 2.0 * 255.0)
}

#[inline]
pub fn decode_signed(b: u8) -> f64 {
    2.0 * f64::from(b) / 255.0 - 1.0
}

macro_rules! impl_samples {
    ($ty:ty, $channels:expr) => {
        impl Samples for $ty {
            fn shape(&self) -> (usize, usize, usize) {
                (self.width, self.height, $channels)
            }

            #[inline]
            fn sample(&self, index: usize) -> f64 {
                f64::from(self.data[index])
            }
        }
    };
}

impl_samples!(RgbImage, 3);
impl_samples!(ByteImage, 3);
impl_samples!(ScalarMap, 1);
impl_samples!(BinaryMask, 1);
impl_samples!(DepthMap, 1);
impl_samples!(SignedImage, 3);
