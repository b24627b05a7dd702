use mor_core::rain::{haze_layer, streak_transmission};
use mor_core::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_maps(rng: &mut ChaCha8Rng, w: usize, h: usize) -> GroundTruthMaps {
    // S + A stays below 1 - 1e-3, so composition never clamps.
    let s = ScalarMap::from_fn(w, h, |_, _| rng.gen_range(0.0..0.5)).unwrap();
    let a = ScalarMap::from_fn(w, h, |_, _| rng.gen_range(0.0..0.499)).unwrap();
    GroundTruthMaps::streaks_and_haze(s, a, 0.05).unwrap()
}

#[test]
fn round_trip_recovers_background() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let b = RgbImage::from_fn(64, 64, |_, _| rng.gen()).unwrap();
        let maps = random_maps(&mut rng, 64, 64);
        let params = RainParams {
            a0: rng.gen(),
            ..Default::default()
        };
        let img = compose_mor(&b, &maps, &params).unwrap();
        let inv = invert_mor(&img, &maps, &params).unwrap();
        assert_eq!(inv.valid.count_ones(), 64 * 64);
        for (x, y) in inv.background.data().iter().zip(b.data()) {
            worst = worst.max((x - y).abs());
        }
    }
    assert!(worst < 1e-6, "max error {worst}");
}

#[test]
fn raindrop_pixels_equal_drop_layer() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let b = RgbImage::from_fn(1, 1, |_, _| rng.gen()).unwrap();
        let s: f64 = rng.gen();
        let a: f64 = rng.gen();
        let d: f64 = rng.gen();
        let maps = GroundTruthMaps::new(
            BinaryMask::new(1, 1, vec![u8::from(s > 0.05)]).unwrap(),
            BinaryMask::new(1, 1, vec![1]).unwrap(),
            ScalarMap::new(1, 1, vec![a]).unwrap(),
            ScalarMap::new(1, 1, vec![s]).unwrap(),
            ScalarMap::new(1, 1, vec![d]).unwrap(),
        )
        .unwrap();
        let params = RainParams {
            a0: rng.gen(),
            ..Default::default()
        };
        let out = compose_mor(&b, &maps, &params).unwrap();
        assert_eq!(out.data(), &[d, d, d]);
    }
}

proptest! {
    #[test]
    fn plateau_below_d1(d in 0.0..50.0f64, alpha in 1e-4..0.1f64, d1 in 50.0..200.0f64) {
        let params = RainParams { alpha, d1, ..Default::default() };
        let depth = DepthMap::filled(2, 2, d).unwrap();
        let t = streak_transmission(&depth, &params).unwrap();
        prop_assert!(t.data().iter().all(|&v| v == libm::exp(-alpha * d1)));
    }

    #[test]
    fn transmission_decreases_beyond_d1(d in 50.0..500.0f64, step in 0.5..100.0f64) {
        let params = RainParams::default();
        let near = streak_transmission(&DepthMap::filled(1, 1, d + 1e-9).unwrap(), &params).unwrap();
        let far = streak_transmission(&DepthMap::filled(1, 1, d + step).unwrap(), &params).unwrap();
        prop_assert!(far.data()[0] < near.data()[0]);
    }

    #[test]
    fn haze_monotone_in_beta(b1 in 0.0..0.05f64, db in 0.0..0.05f64, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let depth = DepthMap::from_fn(8, 8, |_, _| rng.gen_range(0.0..300.0)).unwrap();
        let lo = haze_layer(&depth, &RainParams { beta: b1, ..Default::default() }).unwrap();
        let hi = haze_layer(&depth, &RainParams { beta: b1 + db, ..Default::default() }).unwrap();
        for (l, h) in lo.data().iter().zip(hi.data()) {
            prop_assert!(l <= h);
            prop_assert!((0.0..1.0).contains(h));
        }
    }

    #[test]
    fn pattern_is_reproducible(seed in any::<u64>(), density in 0.0..5000.0f64) {
        let params = StreakPatternParams { seed, density, ..Default::default() };
        let a = generate_streak_pattern(40, 30, &params).unwrap();
        let b = generate_streak_pattern(40, 30, &params).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.map.data().iter().all(|v| (0.0..=1.0).contains(v)));
    }
}
