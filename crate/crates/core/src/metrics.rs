//! Full-reference image quality: MSE, PSNR and SSIM.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::raster::{RgbImage, Samples};

/// SSIM window side length.
pub const SSIM_WINDOW: usize = 11;
/// SSIM Gaussian standard deviation.
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

fn ensure_same_shape<A: Samples + ?Sized, B: Samples + ?Sized>(x: &A, y: &B) -> Result<()> {
    let (xw, xh, xc) = x.shape();
    let (yw, yh, yc) = y.shape();
    if (xw, xh) != (yw, yh) {
        return Err(Error::DimensionMismatch {
            expected: (xw, xh),
            found: (yw, yh),
        });
    }
    if xc != yc {
        return Err(Error::LengthMismatch {
            expected: xc,
            found: yc,
        });
    }
    Ok(())
}

/// Mean of squared differences over every sample.
pub fn mse<A: Samples + ?Sized, B: Samples + ?Sized>(x: &A, y: &B) -> Result<f64> {
    ensure_same_shape(x, y)?;
    let n = x.sample_count();
    let sum: f64 = (0..n)
        .map(|i| {
            let d = x.sample(i) - y.sample(i);
            d * d
        })
        .sum();
    Ok(sum / n as f64)
}

/// Mean of squares, i.e. MSE against an all-zero raster.
pub fn mean_square<A: Samples + ?Sized>(x: &A) -> f64 {
    let n = x.sample_count();
    (0..n).map(|i| x.sample(i) * x.sample(i)).sum::<f64>() / n as f64
}

/// `10 log10(peak² / mse)` over all channels jointly. Identical inputs give
/// `f64::INFINITY`.
pub fn psnr<A: Samples + ?Sized, B: Samples + ?Sized>(pred: &A, gt: &B, peak: f64) -> Result<f64> {
    if !(peak.is_finite() && peak > 0.0) {
        return Err(Error::InvalidParameter {
            name: "peak",
            reason: "must be finite and > 0",
        });
    }
    let err = mse(pred, gt)?;
    if err == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * libm::log10(peak * peak / err))
}

fn ssim_kernel() -> Vec<f64> {
    let r = (SSIM_WINDOW / 2) as f64;
    let inv = 1.0 / (2.0 * SSIM_SIGMA * SSIM_SIGMA);
    let mut k = Vec::with_capacity(SSIM_WINDOW * SSIM_WINDOW);
    for y in 0..SSIM_WINDOW {
        for x in 0..SSIM_WINDOW {
            let (dx, dy) = (x as f64 - r, y as f64 - r);
            k.push(libm::exp(-(dx * dx + dy * dy) * inv));
        }
    }
    let total: f64 = k.iter().sum();
    k.iter_mut().for_each(|w| *w /= total);
    k
}

/// Mean SSIM over every fully-contained 11×11 window, averaged across
/// channels. `data_range` is the dynamic range `L` of the samples.
pub fn ssim_with_range<A: Samples + ?Sized, B: Samples + ?Sized>(
    x: &A,
    y: &B,
    data_range: f64,
) -> Result<f64> {
    ensure_same_shape(x, y)?;
    if !(data_range.is_finite() && data_range > 0.0) {
        return Err(Error::InvalidParameter {
            name: "data_range",
            reason: "must be finite and > 0",
        });
    }
    let (w, h, channels) = x.shape();
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::TooSmall {
            min: SSIM_WINDOW,
            width: w,
            height: h,
        });
    }
    let c1 = (SSIM_K1 * data_range) * (SSIM_K1 * data_range);
    let c2 = (SSIM_K2 * data_range) * (SSIM_K2 * data_range);
    let kernel = ssim_kernel();
    let (out_w, out_h) = (w - SSIM_WINDOW + 1, h - SSIM_WINDOW + 1);

    let mut channel_sum = 0.0;
    for c in 0..channels {
        let idx = |px: usize, py: usize| (py * w + px) * channels + c;
        let mut map_sum = 0.0;
        for oy in 0..out_h {
            for ox in 0..out_w {
                let (mut mx, mut my) = (0.0, 0.0);
                for ky in 0..SSIM_WINDOW {
                    for kx in 0..SSIM_WINDOW {
                        let k = kernel[ky * SSIM_WINDOW + kx];
                        let i = idx(ox + kx, oy + ky);
                        mx += k * x.sample(i);
                        my += k * y.sample(i);
                    }
                }
                let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
                for ky in 0..SSIM_WINDOW {
                    for kx in 0..SSIM_WINDOW {
                        let k = kernel[ky * SSIM_WINDOW + kx];
                        let i = idx(ox + kx, oy + ky);
                        let dx = x.sample(i) - mx;
                        let dy = y.sample(i) - my;
                        sxx += k * dx * dx;
                        syy += k * dy * dy;
                        sxy += k * dx * dy;
                    }
                }
                let luminance = (2.0 * mx * my + c1) / (mx * mx + my * my + c1);
                let structure = (2.0 * sxy + c2) / (sxx + syy + c2);
                map_sum += luminance * structure;
            }
        }
        channel_sum += map_sum / (out_w * out_h) as f64;
    }
    Ok(channel_sum / channels as f64)
}

/// SSIM of two unit-domain colour images (`L = 1`).
pub fn ssim(pred: &RgbImage, gt: &RgbImage) -> Result<f64> {
    ssim_with_range(pred, gt, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::{ByteImage, ScalarMap};

    #[test]
    fn mse_examples() {
        let a = ScalarMap::new(2, 1, alloc::vec![0.0, 0.5]).unwrap();
        let b = ScalarMap::new(2, 1, alloc::vec![0.5, 0.5]).unwrap();
        assert_eq!(mse(&a, &b).unwrap(), 0.125);
        assert_eq!(mse(&a, &a).unwrap(), 0.0);
        let zeros = ScalarMap::zeros(3, 3).unwrap();
        let ones = ScalarMap::filled(3, 3, 1.0).unwrap();
        assert_eq!(mse(&zeros, &ones).unwrap(), 1.0);
        assert!(matches!(
            mse(&a, &zeros),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn psnr_examples() {
        let black = RgbImage::filled(4, 4, [0.0; 3]).unwrap();
        let white = RgbImage::filled(4, 4, [1.0; 3]).unwrap();
        assert_eq!(psnr(&black, &white, 1.0).unwrap(), 0.0);
        assert_eq!(psnr(&black, &black, 1.0).unwrap(), f64::INFINITY);

        let a = ByteImage::from_fn(8, 8, |x, y| [(x * 20) as u8, (y * 20) as u8, 50]).unwrap();
        let b = ByteImage::from_fn(8, 8, |x, y| [(x * 20 + 10) as u8, (y * 20 + 10) as u8, 60])
            .unwrap();
        let expected = 10.0 * libm::log10(255.0 * 255.0 / 100.0);
        assert!((psnr(&a, &b, 255.0).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 28.131).abs() < 1e-3);
    }

    #[test]
    fn ssim_examples() {
        let img = RgbImage::from_fn(16, 16, |x, y| {
            let v = ((x * 7 + y * 13) % 17) as f64 / 16.0;
            [v, 1.0 - v, 0.5]
        })
        .unwrap();
        assert_eq!(ssim(&img, &img).unwrap(), 1.0);

        let a = RgbImage::filled(12, 12, [100.0 / 255.0; 3]).unwrap();
        let b = RgbImage::filled(12, 12, [150.0 / 255.0; 3]).unwrap();
        let (mx, my) = (100.0 / 255.0, 150.0 / 255.0);
        let c1 = 1e-4;
        let closed = (2.0 * mx * my + c1) / (mx * mx + my * my + c1);
        let got = ssim(&a, &b).unwrap();
        assert!((got - closed).abs() < 1e-9);
        assert!((got - 0.9231).abs() < 1e-3);
    }

    #[test]
    fn ssim_rejects_small_images() {
        let a = RgbImage::filled(10, 20, [0.5; 3]).unwrap();
        assert!(matches!(ssim(&a, &a), Err(Error::TooSmall { .. })));
    }
}
