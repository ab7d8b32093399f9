//! Joint bilateral filtering and joint bilateral upsampling.
//!
//! The range weight is shared across channels: one scalar per pixel pair,
//! computed from the Euclidean distance between the guide's color vectors.
//! Windows are `d × d` squares with replicate borders, and all weighted sums
//! accumulate in `f64`.

use rayon::prelude::*;

use crate::error::{ensure, Result};
use crate::imaging::ImageBuf;
use crate::pyramid::{half_size, resize_bilinear};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilateralParams {
    pub sigma_s: f64,
    pub sigma_r: f64,
    /// Odd window side, at least 3.
    pub window: usize,
}

impl BilateralParams {
    pub fn new(sigma_s: f64, sigma_r: f64, window: usize) -> Result<Self> {
        let p = Self { sigma_s, sigma_r, window };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.sigma_s > 0.0 && self.sigma_s.is_finite(), "sigma_s must be positive, got {}", self.sigma_s);
        ensure!(self.sigma_r > 0.0 && self.sigma_r.is_finite(), "sigma_r must be positive, got {}", self.sigma_r);
        ensure!(self.window >= 3 && self.window % 2 == 1, "window must be odd and >= 3, got {}", self.window);
        Ok(())
    }

    pub fn radius(&self) -> usize {
        self.window / 2
    }
}

/// `exp(-‖a − b‖² / 2σ_r²)`, one weight for all channels.
pub fn range_weight(a: &[f64], b: &[f64], sigma_r: f64) -> f64 {
    assert_eq!(a.len(), b.len(), "range_weight: channel count mismatch");
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-d2 / (2.0 * sigma_r * sigma_r)).exp()
}

/// `e^x` for `x <= 0`, branch-free so it vectorizes. Relative error is a
/// few ulp; results below `e^-708` flush to that value.
#[inline(always)]
fn exp_nonpositive(x: f64) -> f64 {
    const ROUND: f64 = 6_755_399_441_055_744.0; // 1.5 * 2^52
    const LN2_HI: f64 = 6.931_471_803_691_238e-1;
    const LN2_LO: f64 = 1.908_214_929_270_587_7e-10;
    let x = x.max(-708.0);
    let t = x * std::f64::consts::LOG2_E + ROUND;
    let n = t - ROUND;
    let r = x - n * LN2_HI - n * LN2_LO;
    // Degree-12 Taylor series of e^r on |r| <= ln2/2, Estrin evaluation
    // to keep the dependency chain short.
    let r2 = r * r;
    let r4 = r2 * r2;
    let r8 = r4 * r4;
    let p01 = 1.0 + r;
    let p23 = 1.0 / 2.0 + r * (1.0 / 6.0);
    let p45 = 1.0 / 24.0 + r * (1.0 / 120.0);
    let p67 = 1.0 / 720.0 + r * (1.0 / 5_040.0);
    let p89 = 1.0 / 40_320.0 + r * (1.0 / 362_880.0);
    let p1011 = 1.0 / 3_628_800.0 + r * (1.0 / 39_916_800.0);
    let p12 = 1.0 / 479_001_600.0;
    let q0 = p01 + r2 * p23;
    let q1 = p45 + r2 * p67;
    let q2 = p89 + r2 * p1011;
    let s0 = q0 + r4 * q1;
    let s1 = q2 + r4 * p12;
    let p = s0 + r8 * s1;
    let k = t.to_bits().wrapping_sub(ROUND.to_bits()) as i64;
    p * f64::from_bits(((k + 1023) as u64) << 52)
}

/// Channel planes of `img`, each with `r` replicated border pixels on
/// every side.
fn pad_planes(img: &ImageBuf, r: usize) -> Vec<Vec<f64>> {
    let (h, w) = img.dims();
    let c = img.channels();
    let pw = w + 2 * r;
    let cols: Vec<usize> = (0..pw).map(|px| px.saturating_sub(r).min(w - 1)).collect();
    (0..c)
        .map(|ch| {
            let mut plane = Vec::with_capacity((h + 2 * r) * pw);
            for py in 0..h + 2 * r {
                let row = img.row(py.saturating_sub(r).min(h - 1));
                plane.extend(cols.iter().map(|&sx| row[sx * c + ch]));
            }
            plane
        })
        .collect()
}

fn spatial_table(p: &BilateralParams) -> Vec<f64> {
    let r = p.radius() as isize;
    let inv = 1.0 / (2.0 * p.sigma_s * p.sigma_s);
    let mut t = Vec::with_capacity(p.window * p.window);
    for dy in -r..=r {
        for dx in -r..=r {
            t.push((-((dy * dy + dx * dx) as f64) * inv).exp());
        }
    }
    t
}

struct Plan<'a> {
    input: &'a [Vec<f64>],
    guide: &'a [Vec<f64>],
    spatial: &'a [f64],
    window: usize,
    padded_w: usize,
    width: usize,
    range_scale: f64,
}

impl Plan<'_> {
    /// Filters one output row. `GC`/`IC` are guide/input channel counts.
    ///
    /// The loops run tap-major: for each window offset the whole row is
    /// updated, so every inner loop is a contiguous sweep over `x`. Each
    /// pixel still accumulates its taps in row-major window order.
    #[inline(always)]
    fn row<const GC: usize, const IC: usize>(&self, y: usize, out: &mut [f64]) {
        const TILE: usize = 256;
        let mut x0 = 0;
        while x0 < self.width {
            let len = TILE.min(self.width - x0);
            self.tile::<GC, IC>(y, x0, len, &mut out[x0 * IC..(x0 + len) * IC]);
            x0 += len;
        }
    }

    #[inline(always)]
    fn tile<const GC: usize, const IC: usize>(&self, y: usize, x0: usize, w: usize, out: &mut [f64]) {
        let d = self.window;
        let r = d / 2;
        let pw = self.padded_w;
        let center_start = (y + r) * pw + r + x0;
        let centers: [&[f64]; GC] = std::array::from_fn(|c| &self.guide[c][center_start..center_start + w]);
        let mut acc: [Vec<f64>; IC] = std::array::from_fn(|_| vec![0.0; w]);
        let mut norm = vec![0.0; w];
        let mut weights = vec![0.0; w];
        for dy in 0..d {
            for dx in 0..d {
                let start = (y + dy) * pw + dx + x0;
                let ws = self.spatial[dy * d + dx];
                weights.fill(0.0);
                for (plane, center) in self.guide.iter().zip(&centers) {
                    let neighbors = &plane[start..start + w];
                    for ((wt, &gp), &gq) in weights.iter_mut().zip(*center).zip(neighbors) {
                        let t = gp - gq;
                        *wt += t * t;
                    }
                }
                for wt in weights.iter_mut() {
                    *wt = ws * exp_nonpositive(-*wt * self.range_scale);
                }
                for (acc, plane) in acc.iter_mut().zip(self.input) {
                    for ((a, &wt), &v) in acc.iter_mut().zip(&weights).zip(&plane[start..start + w]) {
                        *a += wt * v;
                    }
                }
                for (n, &wt) in norm.iter_mut().zip(&weights) {
                    *n += wt;
                }
            }
        }
        for (x, o) in out.chunks_exact_mut(IC).enumerate() {
            for c in 0..IC {
                o[c] = acc[c][x] / norm[x];
            }
        }
    }

    fn row_dyn(&self, y: usize, out: &mut [f64]) {
        let d = self.window;
        let r = d / 2;
        let ic = self.input.len();
        let mut acc = vec![0.0; ic];
        for x in 0..self.width {
            let center = (y + r) * self.padded_w + x + r;
            let gp: Vec<f64> = self.guide.iter().map(|g| g[center]).collect();
            acc.iter_mut().for_each(|a| *a = 0.0);
            let mut norm = 0.0;
            for dy in 0..d {
                let base = (y + dy) * self.padded_w + x;
                for dx in 0..d {
                    let q = base + dx;
                    let mut d2 = 0.0;
                    for (&p, plane) in gp.iter().zip(self.guide) {
                        let t = p - plane[q];
                        d2 += t * t;
                    }
                    let wgt = self.spatial[dy * d + dx] * exp_nonpositive(-d2 * self.range_scale);
                    for (a, plane) in acc.iter_mut().zip(self.input) {
                        *a += wgt * plane[q];
                    }
                    norm += wgt;
                }
            }
            for (o, a) in out[x * ic..(x + 1) * ic].iter_mut().zip(&acc) {
                *o = a / norm;
            }
        }
    }
}

/// Joint bilateral filter: smooths `input` with range weights taken from
/// `guide`. The two images must share height and width; channel counts may
/// differ.
pub fn jbf(input: &ImageBuf, guide: &ImageBuf, p: &BilateralParams) -> Result<ImageBuf> {
    p.validate()?;
    ensure!(input.dims() == guide.dims(), "jbf: input {:?} and guide {:?} differ in size", input.dims(), guide.dims());
    let (h, w) = input.dims();
    let (ic, gc) = (input.channels(), guide.channels());
    let r = p.radius();
    let padded_input = pad_planes(input, r);
    let padded_guide = pad_planes(guide, r);
    let spatial = spatial_table(p);
    let plan = Plan {
        input: &padded_input,
        guide: &padded_guide,
        spatial: &spatial,
        window: p.window,
        padded_w: w + 2 * r,
        width: w,
        range_scale: 1.0 / (2.0 * p.sigma_r * p.sigma_r),
    };

    let mut out = vec![0.0; h * w * ic];
    out.par_chunks_mut(w * ic).enumerate().for_each(|(y, row)| match (gc, ic) {
        (1, 1) => plan.row::<1, 1>(y, row),
        (3, 3) => plan.row::<3, 3>(y, row),
        (3, 1) => plan.row::<3, 1>(y, row),
        (1, 3) => plan.row::<1, 3>(y, row),
        _ => plan.row_dyn(y, row),
    });
    Ok(ImageBuf::from_parts_unchecked(h, w, ic, out))
}

/// Joint bilateral upsampling by one pyramid level: bilinear-upsample `low`
/// to the size of `guide_fine`, then run [`jbf`] at the fine resolution with
/// `guide_fine` as guidance.
pub fn jbf_upsample(low: &ImageBuf, guide_fine: &ImageBuf, p: &BilateralParams) -> Result<ImageBuf> {
    let (h, w) = guide_fine.dims();
    ensure!(
        low.dims() == (half_size(h), half_size(w)),
        "jbf_upsample: {:?} is not one pyramid level below {:?}",
        low.dims(),
        (h, w)
    );
    let up = resize_bilinear(low, h, w);
    jbf(&up, guide_fine, p)
}

/// Literal reference implementation of [`jbf`], used only to verify it.
#[cfg(any(test, feature = "test-oracle"))]
pub mod oracle {
    use super::*;

    /// Direct evaluation of the joint bilateral sum: no padding buffers, no
    /// tables, every weight recomputed from its definition with `f64::exp`.
    pub fn jbf_oracle(input: &ImageBuf, guide: &ImageBuf, p: &BilateralParams) -> Result<ImageBuf> {
        p.validate()?;
        ensure!(input.dims() == guide.dims(), "jbf_oracle: size mismatch");
        let (h, w) = input.dims();
        let r = p.radius() as isize;
        let g_s = |dist2: f64| (-dist2 / (2.0 * p.sigma_s * p.sigma_s)).exp();
        let mut out = ImageBuf::filled(h, w, input.channels(), 0.0);
        for py in 0..h as isize {
            for px in 0..w as isize {
                let gp = guide.pixel(py as usize, px as usize);
                let mut sums = vec![0.0; input.channels()];
                let mut k = 0.0;
                for qy in py - r..=py + r {
                    for qx in px - r..=px + r {
                        let sy = qy.clamp(0, h as isize - 1) as usize;
                        let sx = qx.clamp(0, w as isize - 1) as usize;
                        let dist2 = ((py - qy) * (py - qy) + (px - qx) * (px - qx)) as f64;
                        let weight = g_s(dist2) * range_weight(gp, guide.pixel(sy, sx), p.sigma_r);
                        for (c, s) in sums.iter_mut().enumerate() {
                            *s += weight * input.get(sy, sx, c);
                        }
                        k += weight;
                    }
                }
                for (c, s) in sums.iter().enumerate() {
                    out.set(py as usize, px as usize, c, s / k);
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::oracle::jbf_oracle;
    use super::*;
    use crate::imaging::{max_abs_diff, synth};

    fn params(s: f64, r: f64, d: usize) -> BilateralParams {
        BilateralParams::new(s, r, d).unwrap()
    }

    #[test]
    fn fast_exp_matches_std() {
        let mut worst: f64 = 0.0;
        for i in 0..200_000 {
            let x = -(i as f64) * 3.5e-3;
            let rel = (exp_nonpositive(x) - x.exp()).abs() / x.exp();
            worst = worst.max(rel);
        }
        assert!(worst < 1e-15, "worst relative error {worst:e}");
        assert_eq!(exp_nonpositive(0.0), 1.0);
        assert_eq!(exp_nonpositive(-0.0), 1.0);
        assert!(exp_nonpositive(-1e6) >= 0.0);
    }

    #[test]
    fn range_weight_values() {
        assert_eq!(range_weight(&[0.3, 0.2, 0.1], &[0.3, 0.2, 0.1], 0.05), 1.0);
        assert!((range_weight(&[0.5], &[0.57], 0.07) - (-0.5f64).exp()).abs() < 1e-12);
        // 3-4-5 triangle: distance 0.05.
        assert!((range_weight(&[0.0, 0.0, 0.0], &[0.03, 0.04, 0.0], 0.05) - (-0.5f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn params_validation() {
        assert!(BilateralParams::new(1.0, 0.1, 4).is_err());
        assert!(BilateralParams::new(1.0, 0.1, 1).is_err());
        assert!(BilateralParams::new(0.0, 0.1, 3).is_err());
        assert!(BilateralParams::new(1.0, -0.1, 3).is_err());
    }

    #[test]
    fn three_by_three_ramp_center_matches_oracle() {
        let vals: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
        let img = ImageBuf::new(3, 3, 1, vals).unwrap();
        let p = params(1.0, 0.1, 3);
        let fast = jbf(&img, &img, &p).unwrap();
        let slow = jbf_oracle(&img, &img, &p).unwrap();
        assert!((fast.get(1, 1, 0) - slow.get(1, 1, 0)).abs() <= 1e-12);
        // Symmetric neighborhood around 0.5.
        assert!((fast.get(1, 1, 0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn constant_input_stays_constant() {
        let input = ImageBuf::filled(12, 9, 3, 0.5);
        let guide = synth::random_image(12, 9, 3, 4);
        let out = jbf(&input, &guide, &params(2.0, 0.05, 5)).unwrap();
        assert!(out.data().iter().all(|&v| v == 0.5));
    }

    #[test]
    fn constant_guide_is_truncated_gaussian() {
        let input = synth::random_image(10, 11, 3, 8);
        let guide = ImageBuf::filled(10, 11, 1, 0.3);
        let p = params(1.5, 0.05, 5);
        let out = jbf(&input, &guide, &p).unwrap();
        // Direct truncated Gaussian convolution with replicate borders.
        let r = 2isize;
        for y in 0..10isize {
            for x in 0..11isize {
                for c in 0..3 {
                    let (mut s, mut k) = (0.0, 0.0);
                    for qy in y - r..=y + r {
                        for qx in x - r..=x + r {
                            let wgt = (-(((qy - y).pow(2) + (qx - x).pow(2)) as f64) / (2.0 * 1.5 * 1.5)).exp();
                            s += wgt * input.get(qy.clamp(0, 9) as usize, qx.clamp(0, 10) as usize, c);
                            k += wgt;
                        }
                    }
                    assert!((out.get(y as usize, x as usize, c) - s / k).abs() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn huge_sigma_r_matches_constant_guide() {
        let input = synth::random_image(16, 16, 3, 1);
        let guide = synth::random_image(16, 16, 3, 2);
        let p = params(2.0, 1e6, 7);
        let a = jbf(&input, &guide, &p).unwrap();
        let b = jbf(&input, &ImageBuf::filled(16, 16, 1, 0.0), &p).unwrap();
        assert!(max_abs_diff(&a, &b).unwrap().value <= 1e-6);
    }

    #[test]
    fn tiny_sigma_s_returns_input() {
        let img = synth::random_image(8, 8, 1, 3);
        let out = jbf_oracle(&img, &img, &params(1e-3, 0.1, 3)).unwrap();
        assert!(max_abs_diff(&out, &img).unwrap().value < 1e-12);
        let fast = jbf(&img, &img, &params(1e-3, 0.1, 3)).unwrap();
        assert!(max_abs_diff(&fast, &img).unwrap().value < 1e-12);
    }

    #[test]
    fn channel_combinations_agree_with_oracle() {
        for (ic, gc) in [(1, 1), (3, 3), (1, 3), (3, 1), (2, 3), (3, 2)] {
            let input = synth::random_image(9, 300, ic, 10 + ic as u64);
            let guide = synth::random_image(9, 300, gc, 20 + gc as u64);
            let p = params(2.0, 0.1, 5);
            let a = jbf(&input, &guide, &p).unwrap();
            let b = jbf_oracle(&input, &guide, &p).unwrap();
            assert!(max_abs_diff(&a, &b).unwrap().value <= 1e-10, "ic={ic} gc={gc}");
        }
    }

    #[test]
    fn translation_equivariant_in_interior() {
        let big = synth::random_image(24, 24, 3, 5);
        let shifted = ImageBuf::from_fn(23, 23, 3, |y, x, c| big.get(y + 1, x + 1, c));
        let base = ImageBuf::from_fn(23, 23, 3, |y, x, c| big.get(y, x, c));
        let p = params(1.5, 0.1, 5);
        let a = jbf(&base, &base, &p).unwrap();
        let b = jbf(&shifted, &shifted, &p).unwrap();
        for y in 3..19 {
            for x in 3..19 {
                for c in 0..3 {
                    assert!((a.get(y + 1, x + 1, c) - b.get(y, x, c)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn size_mismatch_errors() {
        let a = ImageBuf::filled(4, 4, 1, 0.0);
        let b = ImageBuf::filled(4, 5, 1, 0.0);
        assert!(jbf(&a, &b, &params(1.0, 0.1, 3)).is_err());
        let low = ImageBuf::filled(3, 3, 1, 0.0);
        assert!(jbf_upsample(&low, &a, &params(1.0, 0.1, 3)).is_err());
    }

    #[test]
    fn upsample_constants_and_uniform_guide() {
        let guide = synth::random_image(9, 7, 3, 6);
        let low = ImageBuf::filled(5, 4, 3, 0.25);
        let out = jbf_upsample(&low, &guide, &params(1.0, 0.05, 3)).unwrap();
        assert_eq!(out.dims(), (9, 7));
        assert!(out.data().iter().all(|&v| v == 0.25));

        let low = ImageBuf::new(2, 2, 1, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let flat = ImageBuf::filled(4, 4, 1, 0.5);
        let p = params(1.0, 10.0, 3);
        let out = jbf_upsample(&low, &flat, &p).unwrap();
        let up = crate::pyramid::upsample_bilinear(&low, 4, 4).unwrap();
        let blurred = jbf(&up, &ImageBuf::filled(4, 4, 1, 0.0), &p).unwrap();
        assert!(max_abs_diff(&out, &blurred).unwrap().value <= 1e-12);
    }
}
