//! Seeded synthetic images: piecewise-constant structure, additive texture
//! and Gaussian noise. Everything here is a pure function of its arguments
//! and seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::ImageBuf;
use crate::error::{ensure, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TexturePattern {
    /// Square blocks of side `period` alternating -1 / +1.
    Checker,
    /// Vertical cosine stripes with wavelength `period`.
    Stripes,
    /// One disc per `period × period` cell at a random offset with a random
    /// sign; zero elsewhere.
    NoiseDots,
}

/// Zero-mean texture field in `[-1, 1]`.
pub fn texture_field(height: usize, width: usize, pattern: TexturePattern, period: usize, seed: u64) -> Vec<f64> {
    match pattern {
        TexturePattern::Checker => (0..height * width)
            .map(|i| {
                let (y, x) = (i / width, i % width);
                if (y / period + x / period).is_multiple_of(2) {
                    -1.0
                } else {
                    1.0
                }
            })
            .collect(),
        TexturePattern::Stripes => (0..height * width)
            .map(|i| {
                let x = (i % width) as f64;
                (2.0 * std::f64::consts::PI * x / period as f64).cos()
            })
            .collect(),
        TexturePattern::NoiseDots => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut field = vec![0.0; height * width];
            let radius = (period as f64 / 4.0).max(0.5);
            let cells_y = height.div_ceil(period);
            let cells_x = width.div_ceil(period);
            for cy in 0..cells_y {
                for cx in 0..cells_x {
                    let oy = rng.random_range(radius..=(period as f64 - radius).max(radius));
                    let ox = rng.random_range(radius..=(period as f64 - radius).max(radius));
                    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    let (y0, x0) = (cy * period, cx * period);
                    for y in y0..(y0 + period).min(height) {
                        for x in x0..(x0 + period).min(width) {
                            let dy = (y - y0) as f64 + 0.5 - oy;
                            let dx = (x - x0) as f64 + 0.5 - ox;
                            if dy * dy + dx * dx <= radius * radius {
                                field[y * width + x] = sign;
                            }
                        }
                    }
                }
            }
            field
        }
    }
}

/// `clamp(structure + amplitude * T)`, with the same texture `T` applied to
/// every channel.
pub fn add_synthetic_texture(
    structure: &ImageBuf,
    pattern: TexturePattern,
    amplitude: f64,
    period: usize,
    seed: u64,
) -> Result<ImageBuf> {
    ensure!(amplitude > 0.0 && amplitude <= 0.5, "texture amplitude {amplitude} outside (0, 0.5]");
    ensure!(period >= 2, "texture period must be at least 2, got {period}");
    let (h, w) = structure.dims();
    let field = texture_field(h, w, pattern, period, seed);
    let c = structure.channels();
    Ok(ImageBuf::from_fn(h, w, c, |y, x, ch| (structure.get(y, x, ch) + amplitude * field[y * w + x]).clamp(0.0, 1.0)))
}

/// `clamp(img + n)` with i.i.d. `n ~ N(0, sigma²)`.
pub fn add_gaussian_noise(img: &ImageBuf, sigma: f64, seed: u64) -> Result<ImageBuf> {
    ensure!((0.0..=0.1).contains(&sigma), "noise sigma {sigma} outside [0, 0.1]");
    if sigma == 0.0 {
        return Ok(img.clone());
    }
    let normal = Normal::new(0.0, sigma).expect("sigma is finite and positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = img.data().iter().map(|&v| (v + normal.sample(&mut rng)).clamp(0.0, 1.0)).collect();
    ImageBuf::new(img.height(), img.width(), img.channels(), data)
}

/// A piecewise-constant "structure only" image: a background split by a
/// diagonal edge plus a handful of random rectangles and discs. Region
/// values stay within `[0.25, 0.75]` so additive textures up to 0.25 do not
/// clip.
pub fn structure_image(height: usize, width: usize, channels: usize, seed: u64) -> ImageBuf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let color = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..channels).map(|_| rng.random_range(0.25..=0.75)).collect() };

    let bg_a = color(&mut rng);
    let bg_b = color(&mut rng);
    let slope = rng.random_range(-0.6..0.6);
    let mut img = ImageBuf::from_fn(height, width, channels, |y, x, c| {
        let edge = height as f64 * 0.5 + slope * (x as f64 - width as f64 * 0.5);
        if (y as f64) < edge {
            bg_a[c]
        } else {
            bg_b[c]
        }
    });

    let (hf, wf) = (height as f64, width as f64);
    let min_side = hf.min(wf);
    for _ in 0..3 {
        let col = color(&mut rng);
        let rh = rng.random_range(0.15..0.4) * hf;
        let rw = rng.random_range(0.15..0.4) * wf;
        let y0 = rng.random_range(0.0..hf - rh);
        let x0 = rng.random_range(0.0..wf - rw);
        for y in (y0 as usize)..((y0 + rh) as usize).min(height) {
            for x in (x0 as usize)..((x0 + rw) as usize).min(width) {
                for (c, &v) in col.iter().enumerate() {
                    img.set(y, x, c, v);
                }
            }
        }
    }
    for _ in 0..2 {
        let col = color(&mut rng);
        let r = rng.random_range(0.1..0.2) * min_side;
        let cy = rng.random_range(r..hf - r);
        let cx = rng.random_range(r..wf - r);
        for y in 0..height {
            for x in 0..width {
                let (dy, dx) = (y as f64 + 0.5 - cy, x as f64 + 0.5 - cx);
                if dy * dy + dx * dx <= r * r {
                    for (c, &v) in col.iter().enumerate() {
                        img.set(y, x, c, v);
                    }
                }
            }
        }
    }
    img
}

/// Uniform random samples in `[0, 1]`.
pub fn random_image(height: usize, width: usize, channels: usize, seed: u64) -> ImageBuf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ImageBuf::from_fn(height, width, channels, |_, _, _| rng.random::<f64>())
}

/// Horizontal gray ramp from 0 at the left edge to 1 at the right edge.
pub fn gray_ramp(height: usize, width: usize) -> ImageBuf {
    let denom = (width.max(2) - 1) as f64;
    ImageBuf::from_fn(height, width, 1, |_, x, _| x as f64 / denom)
}

/// Binary ordered dither with the 8×8 Bayer threshold matrix.
pub fn bayer_dither(img: &ImageBuf) -> ImageBuf {
    const BAYER8: [[u8; 8]; 8] = [
        [0, 32, 8, 40, 2, 34, 10, 42],
        [48, 16, 56, 24, 50, 18, 58, 26],
        [12, 44, 4, 36, 14, 46, 6, 38],
        [60, 28, 52, 20, 62, 30, 54, 22],
        [3, 35, 11, 43, 1, 33, 9, 41],
        [51, 19, 59, 27, 49, 17, 57, 25],
        [15, 47, 7, 39, 13, 45, 5, 37],
        [63, 31, 55, 23, 61, 29, 53, 21],
    ];
    let (h, w) = img.dims();
    ImageBuf::from_fn(h, w, img.channels(), |y, x, c| {
        let threshold = (BAYER8[y % 8][x % 8] as f64 + 0.5) / 64.0;
        if img.get(y, x, c) > threshold {
            1.0
        } else {
            0.0
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checker_on_mid_gray_alternates_in_blocks() {
        let base = ImageBuf::filled(8, 8, 1, 0.5);
        let out = add_synthetic_texture(&base, TexturePattern::Checker, 0.2, 4, 0).unwrap();
        for y in 0..8 {
            for x in 0..8 {
                let expect = if (y / 4 + x / 4) % 2 == 0 { 0.3 } else { 0.7 };
                assert!((out.get(y, x, 0) - expect).abs() < 1e-12, "({y},{x})");
            }
        }
    }

    #[test]
    fn tiny_amplitude_approaches_structure() {
        let base = structure_image(32, 32, 3, 3);
        let out = add_synthetic_texture(&base, TexturePattern::Stripes, 1e-9, 6, 0).unwrap();
        assert!(crate::imaging::max_abs_diff(&base, &out).unwrap().value <= 1e-9 + 1e-15);
    }

    #[test]
    fn texture_preconditions() {
        let base = ImageBuf::filled(4, 4, 1, 0.5);
        assert!(add_synthetic_texture(&base, TexturePattern::Checker, 0.0, 4, 0).is_err());
        assert!(add_synthetic_texture(&base, TexturePattern::Checker, 0.6, 4, 0).is_err());
        assert!(add_synthetic_texture(&base, TexturePattern::Checker, 0.1, 1, 0).is_err());
    }

    #[test]
    fn generators_are_deterministic() {
        let base = ImageBuf::filled(40, 40, 3, 0.5);
        let a = add_synthetic_texture(&base, TexturePattern::NoiseDots, 0.2, 8, 11).unwrap();
        let b = add_synthetic_texture(&base, TexturePattern::NoiseDots, 0.2, 8, 11).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, base);
        assert_eq!(structure_image(50, 70, 3, 5), structure_image(50, 70, 3, 5));
        assert_eq!(add_gaussian_noise(&base, 0.05, 2).unwrap(), add_gaussian_noise(&base, 0.05, 2).unwrap());
    }

    #[test]
    fn zero_noise_is_identity() {
        let img = random_image(16, 16, 3, 1);
        assert_eq!(add_gaussian_noise(&img, 0.0, 9).unwrap(), img);
        assert!(add_gaussian_noise(&img, 0.2, 9).is_err());
    }

    #[test]
    fn noise_standard_deviation_matches_sigma() {
        let base = ImageBuf::filled(256, 256, 1, 0.5);
        let noisy = add_gaussian_noise(&base, 0.02, 42).unwrap();
        let n = noisy.data().len() as f64;
        let mean = noisy.mean();
        let var = noisy.data().iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        let sd = var.sqrt();
        assert!((0.018..=0.022).contains(&sd), "sample sd {sd}");
    }

    #[test]
    fn dither_is_binary_and_tracks_mean() {
        let ramp = gray_ramp(64, 256);
        let d = bayer_dither(&ramp);
        assert!(d.data().iter().all(|&v| v == 0.0 || v == 1.0));
        assert!((d.mean() - ramp.mean()).abs() < 0.01);
    }
}
