//! Image comparison metrics.

use super::ImageBuf;
use crate::error::{ensure, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Mse,
    /// Decibels, peak value 1.
    Psnr,
    MaxAbsDiff,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metric {
    pub kind: MetricKind,
    pub value: f64,
}

fn check_shapes(a: &ImageBuf, b: &ImageBuf) -> Result<()> {
    ensure!(
        a.same_shape(b),
        "cannot compare {}x{}x{} with {}x{}x{}",
        a.height(),
        a.width(),
        a.channels(),
        b.height(),
        b.width(),
        b.channels()
    );
    Ok(())
}

pub fn mse(a: &ImageBuf, b: &ImageBuf) -> Result<Metric> {
    check_shapes(a, b)?;
    let sum: f64 = a.data().iter().zip(b.data()).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok(Metric { kind: MetricKind::Mse, value: sum / a.data().len() as f64 })
}

/// `10 log10(1 / MSE)`; `+inf` for identical images.
pub fn psnr(a: &ImageBuf, b: &ImageBuf) -> Result<Metric> {
    let m = mse(a, b)?.value;
    let value = if m == 0.0 { f64::INFINITY } else { 10.0 * (1.0 / m).log10() };
    Ok(Metric { kind: MetricKind::Psnr, value })
}

pub fn max_abs_diff(a: &ImageBuf, b: &ImageBuf) -> Result<Metric> {
    check_shapes(a, b)?;
    let value = a.data().iter().zip(b.data()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    Ok(Metric { kind: MetricKind::MaxAbsDiff, value })
}

pub fn mean_abs_diff(a: &ImageBuf, b: &ImageBuf) -> Result<f64> {
    check_shapes(a, b)?;
    let sum: f64 = a.data().iter().zip(b.data()).map(|(x, y)| (x - y).abs()).sum();
    Ok(sum / a.data().len() as f64)
}

/// Anisotropic total variation: sum of absolute forward differences along
/// both axes, over all channels.
pub fn total_variation(img: &ImageBuf) -> f64 {
    let (h, w) = img.dims();
    let c = img.channels();
    let mut tv = 0.0;
    for y in 0..h {
        for x in 0..w {
            for ch in 0..c {
                let v = img.get(y, x, ch);
                if x + 1 < w {
                    tv += (img.get(y, x + 1, ch) - v).abs();
                }
                if y + 1 < h {
                    tv += (img.get(y + 1, x, ch) - v).abs();
                }
            }
        }
    }
    tv
}
