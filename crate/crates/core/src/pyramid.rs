//! Gaussian and Laplacian image pyramids.
//!
//! Levels are produced by a 5×5 Gaussian (σ = 1) with replicate borders
//! followed by bilinear resampling to `ceil(h/2) × ceil(w/2)`. Bilinear
//! resampling uses half-pixel-aligned coordinates,
//! `src = (dst + 0.5) · src_size / dst_size − 0.5`, clamped to the border.

use std::path::Path;

use rayon::prelude::*;

use crate::error::{ensure, Result};
use crate::imaging::{self, ImageBuf};

/// Coarsest levels have a long axis in `[MIN_COARSE_AXIS, 2 · MIN_COARSE_AXIS)`.
pub const MIN_COARSE_AXIS: usize = 32;

/// Unnormalized 1-D taps `exp(-x²/2)` for `x ∈ {-2..2}`.
fn raw_taps() -> [f64; 5] {
    std::array::from_fn(|i| {
        let x = i as f64 - 2.0;
        (-x * x / 2.0).exp()
    })
}

/// The normalized 1-D factor of [`gaussian_kernel_5x5`].
pub fn gaussian_taps() -> [f64; 5] {
    let raw = raw_taps();
    let sum: f64 = raw.iter().sum();
    raw.map(|t| t / sum)
}

/// The 5×5 smoothing kernel, an outer product of [`gaussian_taps`].
pub fn gaussian_kernel_5x5() -> [[f64; 5]; 5] {
    let t = gaussian_taps();
    std::array::from_fn(|i| std::array::from_fn(|j| t[i] * t[j]))
}

/// Separable 5×5 Gaussian smoothing with replicate padding.
///
/// Each pass divides by the tap sum rather than using pre-normalized taps;
/// this keeps constant images bit-exact for dyadic values.
pub fn smooth_5x5(img: &ImageBuf) -> ImageBuf {
    let (h, w) = img.dims();
    let c = img.channels();
    let taps = raw_taps();
    let norm: f64 = taps.iter().sum();
    let stride = w * c;

    let mut horiz = vec![0.0; h * stride];
    horiz.par_chunks_mut(stride).enumerate().for_each(|(y, out)| {
        let row = img.row(y);
        for x in 0..w {
            for ch in 0..c {
                let mut acc = 0.0;
                for (k, &t) in taps.iter().enumerate() {
                    let sx = (x as isize + k as isize - 2).clamp(0, w as isize - 1) as usize;
                    acc += t * row[sx * c + ch];
                }
                out[x * c + ch] = acc / norm;
            }
        }
    });

    let mut out = vec![0.0; h * stride];
    out.par_chunks_mut(stride).enumerate().for_each(|(y, out)| {
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (k, &t) in taps.iter().enumerate() {
                let sy = (y as isize + k as isize - 2).clamp(0, h as isize - 1) as usize;
                acc += t * horiz[sy * stride + i];
            }
            *o = acc / norm;
        }
    });
    ImageBuf::from_parts_unchecked(h, w, c, out)
}

/// Source sample positions for each destination index along one axis:
/// `(lower index, upper index, fraction)`.
fn axis_map(src: usize, dst: usize) -> Vec<(usize, usize, f64)> {
    let scale = src as f64 / dst as f64;
    (0..dst)
        .map(|d| {
            let s = ((d as f64 + 0.5) * scale - 0.5).clamp(0.0, (src - 1) as f64);
            let i0 = s.floor() as usize;
            let i1 = (i0 + 1).min(src - 1);
            (i0, i1, s - i0 as f64)
        })
        .collect()
}

#[inline]
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    // Exact when a == b.
    a + (b - a) * t
}

/// Bilinear resampling to an arbitrary size.
pub fn resize_bilinear(img: &ImageBuf, target_h: usize, target_w: usize) -> ImageBuf {
    assert!(target_h >= 1 && target_w >= 1);
    let (h, w) = img.dims();
    if (h, w) == (target_h, target_w) {
        return img.clone();
    }
    let c = img.channels();
    let ys = axis_map(h, target_h);
    let xs = axis_map(w, target_w);
    let stride = target_w * c;
    let mut out = vec![0.0; target_h * stride];
    out.par_chunks_mut(stride).enumerate().for_each(|(y, out)| {
        let (y0, y1, fy) = ys[y];
        let (r0, r1) = (img.row(y0), img.row(y1));
        for (x, &(x0, x1, fx)) in xs.iter().enumerate() {
            for ch in 0..c {
                let top = lerp(r0[x0 * c + ch], r0[x1 * c + ch], fx);
                let bot = lerp(r1[x0 * c + ch], r1[x1 * c + ch], fx);
                out[x * c + ch] = lerp(top, bot, fy);
            }
        }
    });
    ImageBuf::from_parts_unchecked(target_h, target_w, c, out)
}

/// Bilinear upsampling; the target may not be smaller than the source on
/// either axis.
pub fn upsample_bilinear(img: &ImageBuf, target_h: usize, target_w: usize) -> Result<ImageBuf> {
    let (h, w) = img.dims();
    ensure!(target_h >= h && target_w >= w, "upsample target {target_h}x{target_w} is smaller than source {h}x{w}");
    Ok(resize_bilinear(img, target_h, target_w))
}

#[inline]
pub fn half_size(n: usize) -> usize {
    n.div_ceil(2)
}

/// Gaussian smoothing followed by bilinear resampling to half size (ceil).
pub fn downsample_half(img: &ImageBuf) -> Result<ImageBuf> {
    let (h, w) = img.dims();
    ensure!(h >= 2 && w >= 2, "cannot downsample a {h}x{w} image; both sides must be at least 2");
    Ok(resize_bilinear(&smooth_5x5(img), half_size(h), half_size(w)))
}

/// Number of halvings needed for the long axis to first land in `[32, 64)`.
pub fn pyramid_depth(height: usize, width: usize) -> Result<usize> {
    let long = height.max(width);
    ensure!(
        long >= 2 * MIN_COARSE_AXIS,
        "image long axis {long} is below {}; pass an explicit pyramid depth",
        2 * MIN_COARSE_AXIS
    );
    let mut axis = long;
    let mut depth = 0;
    while axis >= 2 * MIN_COARSE_AXIS {
        axis = half_size(axis);
        depth += 1;
    }
    Ok(depth)
}

/// Gaussian pyramid `G_0..G_N`; `G_0` is the source image.
#[derive(Debug, Clone)]
pub struct GaussianPyramid {
    levels: Vec<ImageBuf>,
}

impl GaussianPyramid {
    /// Builds the pyramid. Without `depth_override` the depth follows
    /// [`pyramid_depth`]; an override must be at least 1.
    pub fn build(img: &ImageBuf, depth_override: Option<usize>) -> Result<Self> {
        let depth = match depth_override {
            Some(d) => {
                ensure!(d >= 1, "pyramid depth must be at least 1");
                d
            }
            None => pyramid_depth(img.height(), img.width())?,
        };
        let mut levels = Vec::with_capacity(depth + 1);
        levels.push(img.clone());
        for _ in 0..depth {
            let next = downsample_half(levels.last().expect("non-empty"))?;
            levels.push(next);
        }
        Ok(Self { levels })
    }

    /// `N`, the index of the coarsest level.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[ImageBuf] {
        &self.levels
    }

    pub fn level(&self, k: usize) -> &ImageBuf {
        &self.levels[k]
    }

    pub fn coarsest(&self) -> &ImageBuf {
        self.levels.last().expect("non-empty")
    }
}

/// Laplacian pyramid `L_0..L_N` with `L_k = G_k − upsample(G_{k+1})` and
/// `L_N = G_N`. Levels below `N` are signed and never clamped.
#[derive(Debug, Clone)]
pub struct LaplacianPyramid {
    levels: Vec<ImageBuf>,
}

impl LaplacianPyramid {
    pub fn build(gp: &GaussianPyramid) -> Self {
        let g = gp.levels();
        let n = gp.depth();
        let mut levels: Vec<ImageBuf> = (0..n)
            .into_par_iter()
            .map(|k| {
                let (h, w) = g[k].dims();
                let up = resize_bilinear(&g[k + 1], h, w);
                g[k].zip_map(&up, |a, b| a - b).expect("levels share channel count")
            })
            .collect();
        levels.push(g[n].clone());
        Self { levels }
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[ImageBuf] {
        &self.levels
    }

    pub fn level(&self, k: usize) -> &ImageBuf {
        &self.levels[k]
    }

    /// Reconstructs `G_0` via `G_k = L_k + upsample(G_{k+1})`.
    pub fn collapse(&self) -> ImageBuf {
        let mut acc = self.levels.last().expect("non-empty").clone();
        for lap in self.levels.iter().rev().skip(1) {
            let (h, w) = lap.dims();
            let up = resize_bilinear(&acc, h, w);
            acc = lap.zip_map(&up, |l, u| l + u).expect("levels share channel count");
        }
        acc
    }
}

/// Writes `g{k}.png` and `l{k}.png` for every level. Laplacian levels below
/// the coarsest are offset by +0.5 for viewing.
pub fn dump_pyramids(gp: &GaussianPyramid, lp: &LaplacianPyramid, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    for (k, g) in gp.levels().iter().enumerate() {
        imaging::save_image(g, dir.join(format!("g{k}.png")))?;
    }
    let n = lp.depth();
    for (k, l) in lp.levels().iter().enumerate() {
        let view = if k < n { l.map(|v| (v + 0.5).clamp(0.0, 1.0)) } else { l.clone() };
        imaging::save_image(&view, dir.join(format!("l{k}.png")))?;
    }
    Ok(())
}
