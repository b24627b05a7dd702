mod common;

use mor_core::{BinaryMask, DepthMap, ScalarMap};
use mor_synth::io;
use mor_synth::SynthError;

#[test]
fn png_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let img = common::scene(33, 17, 1);
    let path = dir.path().join("a.png");
    io::save_bytes(&img, &path).unwrap();
    assert_eq!(io::load_bytes(&path).unwrap(), img);
    let unit = io::load_image(&path).unwrap();
    io::save_image(&unit, &dir.path().join("b.png")).unwrap();
    assert_eq!(
        std::fs::read(&path).unwrap(),
        std::fs::read(dir.path().join("b.png")).unwrap()
    );
}

#[test]
fn sixteen_bit_png_is_rejected_as_image() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.png");
    io::save_depth_png16(&DepthMap::filled(4, 4, 1.0).unwrap(), 0.01, &path).unwrap();
    let err = io::load_gray(&path).unwrap_err();
    assert!(err.to_string().contains("unsupported bit depth"), "{err}");
    assert!(matches!(
        io::load_bytes(&path),
        Err(SynthError::UnsupportedColor { .. })
    ));

    // 16-bit RGB is rejected on depth, not colour.
    let rgb16 = dir.path().join("rgb16.png");
    let file = std::fs::File::create(&rgb16).unwrap();
    let mut enc = png::Encoder::new(std::io::BufWriter::new(file), 2, 2);
    enc.set_color(png::ColorType::Rgb);
    enc.set_depth(png::BitDepth::Sixteen);
    let mut w = enc.write_header().unwrap();
    w.write_image_data(&[0u8; 24]).unwrap();
    w.finish().unwrap();
    let err = io::load_bytes(&rgb16).unwrap_err();
    assert!(err.to_string().contains("unsupported bit depth"), "{err}");
}

#[test]
fn truncated_and_missing_files_fail() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.png");
    io::save_bytes(&common::scene(20, 20, 0), &path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    let cut = dir.path().join("cut.png");
    std::fs::write(&cut, &bytes[..bytes.len() / 2]).unwrap();
    assert!(matches!(
        io::load_bytes(&cut),
        Err(SynthError::PngDecode { .. })
    ));
    assert!(matches!(
        io::load_bytes(&dir.path().join("nope.png")),
        Err(SynthError::Io { .. })
    ));
}

#[test]
fn pfm_depth() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.pfm");
    io::save_depth(&DepthMap::filled(5, 3, 10.0).unwrap(), &path).unwrap();
    let d = io::load_depth(&path, None).unwrap();
    assert_eq!(d.dims(), (5, 3));
    assert!(d.data().iter().all(|&v| v == 10.0));

    let ramp = common::depth(6, 4);
    io::save_depth(&ramp, &path).unwrap();
    let back = io::load_depth(&path, None).unwrap();
    for (a, b) in back.data().iter().zip(ramp.data()) {
        assert_eq!(*a, *b as f32 as f64);
    }
    // Rows are stored bottom-up: the first data row is the bottom (nearest) one.
    let bytes = std::fs::read(&path).unwrap();
    let body = &bytes[bytes.len() - 6 * 4 * 4..];
    assert_eq!(f32::from_le_bytes(body[..4].try_into().unwrap()), 5.0);
}

#[test]
fn pfm_rejects_nan_negative_and_colour() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.pfm");
    io::save_pfm(2, 2, &[1.0, f64::NAN, 2.0, 3.0], &path).unwrap();
    assert!(matches!(
        io::load_depth(&path, None),
        Err(SynthError::Core { .. })
    ));
    io::save_pfm(2, 2, &[1.0, -1.0, 2.0, 3.0], &path).unwrap();
    assert!(matches!(
        io::load_depth(&path, None),
        Err(SynthError::Core { .. })
    ));

    let mut colour = b"PF\n1 1\n-1.0\n".to_vec();
    colour.extend_from_slice(&[0u8; 12]);
    std::fs::write(&path, colour).unwrap();
    assert!(matches!(
        io::load_depth(&path, None),
        Err(SynthError::Format { .. })
    ));

    let mut short = b"Pf\n2 2\n-1.0\n".to_vec();
    short.extend_from_slice(&[0u8; 12]);
    std::fs::write(&path, short).unwrap();
    assert!(matches!(
        io::load_depth(&path, None),
        Err(SynthError::Format { .. })
    ));
}

#[test]
fn big_endian_pfm_is_read() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("be.pfm");
    let mut bytes = b"Pf\n2 1\n1.0\n".to_vec();
    bytes.extend_from_slice(&3.5f32.to_be_bytes());
    bytes.extend_from_slice(&7.0f32.to_be_bytes());
    std::fs::write(&path, bytes).unwrap();
    assert_eq!(io::load_depth(&path, None).unwrap().data(), &[3.5, 7.0]);
}

#[test]
fn sixteen_bit_png_depth_uses_scale() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.png");
    io::save_depth_png16(&DepthMap::filled(3, 2, 10.0).unwrap(), 0.01, &path).unwrap();
    let d = io::load_depth(&path, Some(0.01)).unwrap();
    assert!(d.data().iter().all(|&v| (v - 10.0).abs() < 1e-12));
    // raw value is 1000
    let d = io::load_depth(&path, Some(1.0)).unwrap();
    assert_eq!(d.data()[0], 1000.0);
    assert!(matches!(
        io::load_depth(&path, None),
        Err(SynthError::Usage(_))
    ));
}

#[test]
fn unknown_depth_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.bin");
    std::fs::write(&path, b"GIF89a....").unwrap();
    assert!(matches!(
        io::load_depth(&path, None),
        Err(SynthError::Format { .. })
    ));
}

#[test]
fn maps_and_masks_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let map = ScalarMap::from_fn(17, 9, |x, y| ((x * 31 + y * 7) % 100) as f64 / 99.0).unwrap();
    let path = dir.path().join("m.png");
    io::save_map(&map, &path).unwrap();
    let back = io::load_map(&path).unwrap();
    for (a, b) in back.data().iter().zip(map.data()) {
        assert!((a - b).abs() <= 0.5 / 255.0 + 1e-12);
    }
    let mask = BinaryMask::from_fn(17, 9, |x, y| (x ^ y) % 3 == 0).unwrap();
    io::save_mask(&mask, &path).unwrap();
    assert_eq!(io::load_mask(&path).unwrap(), mask);
    io::save_map(&map, &path).unwrap();
    assert!(matches!(
        io::load_mask(&path),
        Err(SynthError::Format { .. })
    ));
}
