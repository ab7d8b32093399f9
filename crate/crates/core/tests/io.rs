use image::codecs::hdr::HdrEncoder;
use image::Rgb;
use proptest::prelude::*;
use pyrtex::imaging::{self, io, ImageBuf};

fn image_strategy() -> impl Strategy<Value = ImageBuf> {
    (1usize..24, 1usize..24, prop_oneof![Just(1usize), Just(3usize)]).prop_flat_map(|(h, w, c)| {
        proptest::collection::vec(0.0f64..=1.0, h * w * c).prop_map(move |data| ImageBuf::new(h, w, c, data).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn png_round_trip_is_within_half_a_level(img in image_strategy()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.png");
        imaging::save_image(&img, &path).unwrap();
        let back = imaging::load_image(&path).unwrap();
        prop_assert_eq!(back.dims(), img.dims());
        prop_assert_eq!(back.channels(), img.channels());
        prop_assert!(imaging::max_abs_diff(&back, &img).unwrap().value <= 0.5 / 255.0 + 1e-12);
    }

    #[test]
    fn pnm_round_trip_is_within_half_a_level(img in image_strategy()) {
        let dir = tempfile::tempdir().unwrap();
        let ext = if img.channels() == 1 { "pgm" } else { "ppm" };
        let path = dir.path().join(format!("x.{ext}"));
        imaging::save_image(&img, &path).unwrap();
        let back = imaging::load_image(&path).unwrap();
        prop_assert!(imaging::max_abs_diff(&back, &img).unwrap().value <= 0.5 / 255.0 + 1e-12);
    }

    #[test]
    fn saved_bytes_are_stable(img in image_strategy()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.png");
        imaging::save_image(&img, &path).unwrap();
        let once = imaging::load_image(&path).unwrap();
        imaging::save_image(&once, &path).unwrap();
        prop_assert_eq!(imaging::load_image(&path).unwrap(), once);
    }
}

#[test]
fn pfm_round_trip_is_exact_for_f32_values() {
    let dir = tempfile::tempdir().unwrap();
    for c in [1, 3] {
        let img = ImageBuf::from_fn(5, 7, c, |y, x, ch| (y * 100 + x * 10 + ch) as f32 as f64 * 0.125 + 1e-3);
        let img = img.map(|v| v as f32 as f64);
        let path = dir.path().join(format!("r{c}.pfm"));
        imaging::save_pfm(&img, &path).unwrap();
        assert_eq!(imaging::load_hdr(&path).unwrap(), img);
    }
}

#[test]
fn radiance_hdr_is_read_as_linear_rgb() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scene.hdr");
    let (w, h) = (6usize, 4usize);
    let pixels: Vec<Rgb<f32>> = (0..w * h).map(|i| Rgb([0.5 * (i + 1) as f32, 1.0, 1000.0])).collect();
    let file = std::fs::File::create(&path).unwrap();
    HdrEncoder::new(file).encode(&pixels, w, h).unwrap();

    let img = imaging::load_hdr(&path).unwrap();
    assert_eq!((img.height(), img.width(), img.channels()), (h, w, 3));
    for (i, px) in img.data().chunks_exact(3).enumerate() {
        // RGBE keeps 8 mantissa bits per pixel.
        let expect = [0.5 * (i + 1) as f64, 1.0, 1000.0];
        for (got, want) in px.iter().zip(expect) {
            assert!((got - want).abs() <= want.max(1000.0) / 128.0, "{got} vs {want}");
        }
    }
}

#[test]
fn pnm_header_comments_and_16_bit_samples() {
    let bytes = b"P5\n# comment\n2 1\n# another\n65535\n\x00\x00\xff\xff";
    let img = io::decode_image(bytes).unwrap();
    assert_eq!(img.data(), &[0.0, 1.0]);
}

#[test]
fn bad_inputs_are_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert!(imaging::load_image(dir.path().join("missing.png")).is_err());
    assert!(io::decode_image(b"not an image").is_err());
    assert!(io::decode_image(b"P6\n2 2\n255\n\x00").is_err());
    let rgb = ImageBuf::filled(2, 2, 3, 0.5);
    assert!(imaging::save_image(&rgb, dir.path().join("x.pgm")).is_err());
    assert!(imaging::save_image(&rgb, dir.path().join("x.bmp")).is_err());
}
