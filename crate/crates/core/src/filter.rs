//! Pyramid texture filtering.
//!
//! The coarsest Gaussian level `G_N` has lost the fine texture but still
//! carries the main structures. It is upsampled one level at a time:
//!
//! ```text
//! H_k = JBF↑(R_{k+1}, G_k)          window d_up,     guide G_k
//! R_k = JBF(H_k + L_k, H_k)         window d_refine, guide H_k
//! ```
//!
//! starting from `R_N = G_N` and ending with the full-resolution `R_0`.
//! The first step transfers the finer level's edges without copying its
//! texture (small window); the second puts the Laplacian detail back and
//! smooths away whatever texture it reintroduces (large window, texture-free
//! guide).
//!
//! Only two parameters drive the whole process. At output level `k` the
//! spatial sigma is `σ_s / 2^k`, the windows are the odd integers nearest
//! `max(σ_{s,k}, 3)` and `max(4σ_{s,k}, 3)` (ties round up), and `σ_r` is the
//! same at every level.

use std::path::Path;

use crate::bilateral::{jbf, jbf_upsample, BilateralParams};
use crate::error::{ensure, Result};
use crate::imaging::{self, ImageBuf};
use crate::pyramid::{half_size, GaussianPyramid, LaplacianPyramid};

/// Recommended operating range for `sigma_s`.
pub const SIGMA_S_RANGE: (f64, f64) = (3.0, 15.0);
/// Recommended operating range for `sigma_r`.
pub const SIGMA_R_RANGE: (f64, f64) = (0.02, 0.09);

/// How the Laplacian level is recombined in each upsampling step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    /// `R = JBF(H + L, H)`.
    #[default]
    Standard,
    /// `R = H + JBF(L, H)`: filter the Laplacian alone, then add it back.
    /// Keeps structure but leaves more texture; kept for comparison.
    LaplacianFirst,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterParams {
    pub sigma_s: f64,
    pub sigma_r: f64,
    /// Overrides the automatic pyramid depth.
    pub depth: Option<usize>,
    pub variant: Variant,
}

impl Default for FilterParams {
    fn default() -> Self {
        Self { sigma_s: 5.0, sigma_r: 0.07, depth: None, variant: Variant::Standard }
    }
}

impl FilterParams {
    /// Parameters inside the recommended envelope
    /// (`σ_s ∈ [3, 15]`, `σ_r ∈ [0.02, 0.09]`).
    pub fn new(sigma_s: f64, sigma_r: f64) -> Result<Self> {
        let p = Self { sigma_s, sigma_r, ..Self::default() };
        p.check_envelope()?;
        Ok(p)
    }

    /// Parameters without the envelope check; only positivity is required.
    pub fn unchecked(sigma_s: f64, sigma_r: f64) -> Self {
        Self { sigma_s, sigma_r, ..Self::default() }
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.depth = Some(depth);
        self
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn check_envelope(&self) -> Result<()> {
        let (slo, shi) = SIGMA_S_RANGE;
        let (rlo, rhi) = SIGMA_R_RANGE;
        ensure!(
            (slo..=shi).contains(&self.sigma_s),
            "sigma_s {} outside the supported range [{slo}, {shi}]",
            self.sigma_s
        );
        ensure!(
            (rlo..=rhi).contains(&self.sigma_r),
            "sigma_r {} outside the supported range [{rlo}, {rhi}]",
            self.sigma_r
        );
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        ensure!(self.sigma_s > 0.0 && self.sigma_s.is_finite(), "sigma_s must be positive");
        ensure!(self.sigma_r > 0.0 && self.sigma_r.is_finite(), "sigma_r must be positive");
        Ok(())
    }
}

/// Odd integer nearest to `x`, at least 3. Exact even values round up.
pub fn nearest_odd(x: f64) -> usize {
    let x = x.max(3.0);
    let below = 2.0 * ((x - 1.0) / 2.0).floor() + 1.0;
    let above = below + 2.0;
    let pick = if x - below < above - x { below } else { above };
    (pick as usize).max(3)
}

/// Bilateral settings for the upsampling step that produces one level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelParams {
    pub sigma_s: f64,
    pub sigma_r: f64,
    /// Window of the joint bilateral upsampling.
    pub up_window: usize,
    /// Window of the Laplacian refinement filter.
    pub refine_window: usize,
}

impl LevelParams {
    pub fn for_level(sigma_s: f64, sigma_r: f64, k: usize) -> Self {
        let sigma_k = sigma_s / 2f64.powi(k as i32);
        Self { sigma_s: sigma_k, sigma_r, up_window: nearest_odd(sigma_k), refine_window: nearest_odd(4.0 * sigma_k) }
    }

    pub fn up_params(&self) -> BilateralParams {
        BilateralParams { sigma_s: self.sigma_s, sigma_r: self.sigma_r, window: self.up_window }
    }

    pub fn refine_params(&self) -> BilateralParams {
        BilateralParams { sigma_s: self.sigma_s, sigma_r: self.sigma_r, window: self.refine_window }
    }
}

/// Per-level settings, indexed by output level `k ∈ 0..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleSchedule {
    levels: Vec<LevelParams>,
}

impl ScaleSchedule {
    pub fn new(sigma_s: f64, sigma_r: f64, depth: usize) -> Result<Self> {
        ensure!(depth >= 1, "schedule depth must be at least 1");
        Ok(Self { levels: (0..depth).map(|k| LevelParams::for_level(sigma_s, sigma_r, k)).collect() })
    }

    pub fn level(&self, k: usize) -> &LevelParams {
        &self.levels[k]
    }

    pub fn levels(&self) -> &[LevelParams] {
        &self.levels
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }
}

pub fn make_schedule(p: &FilterParams, depth: usize) -> Result<ScaleSchedule> {
    ScaleSchedule::new(p.sigma_s, p.sigma_r, depth)
}

fn check_step_shapes(coarse: &ImageBuf, gaussian: &ImageBuf, laplacian: &ImageBuf) -> Result<()> {
    let (h, w) = gaussian.dims();
    ensure!(
        gaussian.dims() == laplacian.dims() && gaussian.channels() == laplacian.channels(),
        "gaussian level {:?} and laplacian level {:?} do not match",
        gaussian.dims(),
        laplacian.dims()
    );
    ensure!(
        coarse.dims() == (half_size(h), half_size(w)) && coarse.channels() == gaussian.channels(),
        "coarse result {:?} is not one level below {:?}",
        coarse.dims(),
        (h, w)
    );
    Ok(())
}

/// The texture-free upsampling `JBF↑(coarse, gaussian)`.
fn guided_upsample(coarse: &ImageBuf, gaussian: &ImageBuf, level: &LevelParams) -> Result<ImageBuf> {
    jbf_upsample(coarse, gaussian, &level.up_params())
}

/// One upsampling step: from the result at level `k+1` and the pyramid
/// levels `G_k`, `L_k`, produce the result at level `k`.
///
/// The sum with the signed Laplacian is not clamped, and neither is the
/// returned level; [`pyramid_texture_filter`] clamps only the final result.
pub fn structure_aware_upsample(
    coarse: &ImageBuf,
    gaussian: &ImageBuf,
    laplacian: &ImageBuf,
    level: &LevelParams,
) -> Result<ImageBuf> {
    check_step_shapes(coarse, gaussian, laplacian)?;
    let upsampled = guided_upsample(coarse, gaussian, level)?;
    let with_detail = upsampled.zip_map(laplacian, |h, l| h + l)?;
    jbf(&with_detail, &upsampled, &level.refine_params())
}

/// The Laplacian-first step, `H + JBF(L, H)`.
pub fn structure_aware_upsample_laplacian_first(
    coarse: &ImageBuf,
    gaussian: &ImageBuf,
    laplacian: &ImageBuf,
    level: &LevelParams,
) -> Result<ImageBuf> {
    check_step_shapes(coarse, gaussian, laplacian)?;
    let upsampled = guided_upsample(coarse, gaussian, level)?;
    let detail = jbf(laplacian, &upsampled, &level.refine_params())?;
    upsampled.zip_map(&detail, |h, d| h + d)
}

/// Result of a filtering run with every intermediate level kept.
#[derive(Debug, Clone)]
pub struct FilterTrace {
    /// `R_N, R_{N-1}, ..., R_0` (unclamped).
    pub levels: Vec<ImageBuf>,
    pub schedule: ScaleSchedule,
}

impl FilterTrace {
    /// The final output, clamped to `[0, 1]`.
    pub fn result(&self) -> ImageBuf {
        self.levels.last().expect("non-empty").clamp01()
    }

    /// Writes each intermediate result as `r{k}.png`.
    pub fn dump(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let n = self.levels.len() - 1;
        for (i, level) in self.levels.iter().enumerate() {
            imaging::save_image(level, dir.join(format!("r{}.png", n - i)))?;
        }
        Ok(())
    }
}

/// Runs the filter on prebuilt pyramids and returns every intermediate.
pub fn filter_pyramids(gp: &GaussianPyramid, lp: &LaplacianPyramid, p: &FilterParams) -> Result<FilterTrace> {
    p.validate()?;
    let n = gp.depth();
    ensure!(lp.depth() == n, "pyramid depths differ: {} vs {}", n, lp.depth());
    let schedule = make_schedule(p, n)?;
    let step = match p.variant {
        Variant::Standard => structure_aware_upsample,
        Variant::LaplacianFirst => structure_aware_upsample_laplacian_first,
    };
    let mut levels = Vec::with_capacity(n + 1);
    levels.push(gp.coarsest().clone());
    for k in (0..n).rev() {
        let coarse = levels.last().expect("non-empty");
        let next = step(coarse, gp.level(k), lp.level(k), schedule.level(k))?;
        levels.push(next);
    }
    Ok(FilterTrace { levels, schedule })
}

/// Builds the pyramids and runs the filter, keeping every intermediate.
pub fn filter_with_trace(img: &ImageBuf, p: &FilterParams) -> Result<FilterTrace> {
    p.validate()?;
    let gp = GaussianPyramid::build(img, p.depth)?;
    let lp = LaplacianPyramid::build(&gp);
    filter_pyramids(&gp, &lp, p)
}

/// Smooths away texture while keeping structure edges. The output has the
/// input's shape and lies in `[0, 1]`.
pub fn pyramid_texture_filter(img: &ImageBuf, p: &FilterParams) -> Result<ImageBuf> {
    Ok(filter_with_trace(img, p)?.result())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::{max_abs_diff, synth};
    use crate::pyramid::resize_bilinear;

    #[test]
    fn nearest_odd_rule() {
        assert_eq!(nearest_odd(5.0), 5);
        assert_eq!(nearest_odd(20.0), 21);
        assert_eq!(nearest_odd(10.0), 11);
        assert_eq!(nearest_odd(2.5), 3);
        assert_eq!(nearest_odd(0.75), 3);
        assert_eq!(nearest_odd(6.9), 7);
        assert_eq!(nearest_odd(7.9), 7);
        assert_eq!(nearest_odd(8.1), 9);
        assert_eq!(nearest_odd(60.0), 61);
    }

    #[test]
    fn schedule_examples() {
        let s = make_schedule(&FilterParams::default(), 3).unwrap();
        assert_eq!(s.level(0), &LevelParams { sigma_s: 5.0, sigma_r: 0.07, up_window: 5, refine_window: 21 });
        assert_eq!(s.level(1), &LevelParams { sigma_s: 2.5, sigma_r: 0.07, up_window: 3, refine_window: 11 });
        let s = make_schedule(&FilterParams::unchecked(3.0, 0.05), 3).unwrap();
        assert_eq!((s.level(2).sigma_s, s.level(2).up_window, s.level(2).refine_window), (0.75, 3, 3));
        assert!(s.levels().iter().all(|l| l.sigma_r == 0.05));
        assert!(make_schedule(&FilterParams::default(), 0).is_err());
    }

    #[test]
    fn envelope_check() {
        assert!(FilterParams::new(5.0, 0.07).is_ok());
        assert!(FilterParams::new(2.0, 0.07).is_err());
        assert!(FilterParams::new(5.0, 0.5).is_err());
        assert!(FilterParams::unchecked(5.0, 0.5).check_envelope().is_err());
    }

    #[test]
    fn step_shape_violations() {
        let g = ImageBuf::filled(8, 8, 3, 0.5);
        let l = ImageBuf::filled(8, 8, 3, 0.0);
        let lvl = LevelParams::for_level(5.0, 0.07, 0);
        assert!(structure_aware_upsample(&ImageBuf::filled(3, 4, 3, 0.5), &g, &l, &lvl).is_err());
        assert!(structure_aware_upsample(&ImageBuf::filled(4, 4, 3, 0.5), &g, &ImageBuf::filled(8, 7, 3, 0.0), &lvl)
            .is_err());
        assert!(structure_aware_upsample(&ImageBuf::filled(4, 4, 1, 0.5), &g, &l, &lvl).is_err());
    }

    #[test]
    fn flat_region_fixed_point() {
        let coarse = ImageBuf::filled(10, 12, 3, 0.25);
        let g = resize_bilinear(&coarse, 20, 24);
        let l = ImageBuf::filled(20, 24, 3, 0.0);
        let lvl = LevelParams::for_level(5.0, 0.07, 0);
        for step in [structure_aware_upsample, structure_aware_upsample_laplacian_first] {
            let out = step(&coarse, &g, &l, &lvl).unwrap();
            assert!(out.data().iter().all(|&v| v == 0.25));
        }
    }

    #[test]
    fn constant_images_are_fixed_exactly() {
        for c in [0.0, 0.5, 1.0, 0.25] {
            let img = ImageBuf::filled(70, 90, 3, c);
            for variant in [Variant::Standard, Variant::LaplacianFirst] {
                let out = pyramid_texture_filter(&img, &FilterParams::default().with_variant(variant)).unwrap();
                assert_eq!(out, img);
            }
        }
    }

    #[test]
    fn trace_shapes_follow_pyramid() {
        let img = synth::random_image(75, 130, 3, 2);
        let trace = filter_with_trace(&img, &FilterParams::default()).unwrap();
        let gp = GaussianPyramid::build(&img, None).unwrap();
        let n = gp.depth();
        assert_eq!(trace.levels.len(), n + 1);
        for (i, r) in trace.levels.iter().enumerate() {
            assert_eq!(r.dims(), gp.level(n - i).dims());
        }
        let out = trace.result();
        assert_eq!(out.dims(), img.dims());
        assert!(out.data().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn single_level_override() {
        let img = synth::structure_image(40, 40, 1, 9);
        let out = pyramid_texture_filter(&img, &FilterParams::default().with_depth(1)).unwrap();
        assert_eq!(out.dims(), (40, 40));
        assert!(max_abs_diff(&out, &img).unwrap().value < 0.5);
        assert!(pyramid_texture_filter(&img, &FilterParams::default()).is_err());
    }
}
