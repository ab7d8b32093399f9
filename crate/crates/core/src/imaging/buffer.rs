use crate::error::{ensure, Result};

/// A row-major `height × width × channels` raster of real intensities.
///
/// Display images hold values in `[0, 1]`. The container itself does not
/// enforce that range: Laplacian levels are signed and HDR radiance maps are
/// unbounded, so clamping is an explicit step ([`ImageBuf::clamp01`]).
#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuf {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<f64>,
}

impl ImageBuf {
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        ensure!(height >= 1 && width >= 1, "image must be at least 1x1, got {height}x{width}");
        ensure!(channels >= 1, "image must have at least one channel");
        ensure!(
            data.len() == height * width * channels,
            "data length {} does not match {height}x{width}x{channels}",
            data.len()
        );
        Ok(Self { height, width, channels, data })
    }

    /// An image with every sample set to `value`.
    pub fn filled(height: usize, width: usize, channels: usize, value: f64) -> Self {
        assert!(height >= 1 && width >= 1 && channels >= 1, "empty image");
        Self { height, width, channels, data: vec![value; height * width * channels] }
    }

    /// Builds an image by evaluating `f(y, x, c)` for every sample.
    pub fn from_fn(
        height: usize,
        width: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Self {
        assert!(height >= 1 && width >= 1 && channels >= 1, "empty image");
        let mut data = Vec::with_capacity(height * width * channels);
        for y in 0..height {
            for x in 0..width {
                for c in 0..channels {
                    data.push(f(y, x, c));
                }
            }
        }
        Self { height, width, channels, data }
    }

    pub(crate) fn from_parts_unchecked(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), height * width * channels);
        Self { height, width, channels, data }
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.channels
    }

    /// `(height, width)`.
    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize, c: usize) -> f64 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    #[inline]
    pub fn set(&mut self, y: usize, x: usize, c: usize, value: f64) {
        self.data[(y * self.width + x) * self.channels + c] = value;
    }

    /// All channels of one pixel.
    #[inline]
    pub fn pixel(&self, y: usize, x: usize) -> &[f64] {
        let start = (y * self.width + x) * self.channels;
        &self.data[start..start + self.channels]
    }

    /// One row, all channels interleaved.
    #[inline]
    pub fn row(&self, y: usize) -> &[f64] {
        let len = self.width * self.channels;
        &self.data[y * len..(y + 1) * len]
    }

    pub fn same_shape(&self, other: &ImageBuf) -> bool {
        self.height == other.height && self.width == other.width && self.channels == other.channels
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ImageBuf {
        let data = self.data.iter().map(|&v| f(v)).collect();
        Self::from_parts_unchecked(self.height, self.width, self.channels, data)
    }

    /// Sample-wise combination of two equally shaped images.
    pub fn zip_map(&self, other: &ImageBuf, f: impl Fn(f64, f64) -> f64) -> Result<ImageBuf> {
        ensure!(
            self.same_shape(other),
            "shape mismatch: {}x{}x{} vs {}x{}x{}",
            self.height,
            self.width,
            self.channels,
            other.height,
            other.width,
            other.channels
        );
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self::from_parts_unchecked(self.height, self.width, self.channels, data))
    }

    pub fn clamp01(&self) -> ImageBuf {
        self.map(|v| v.clamp(0.0, 1.0))
    }

    pub fn min_value(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Extracts a single channel as a one-channel image.
    pub fn channel(&self, c: usize) -> ImageBuf {
        assert!(c < self.channels, "channel {c} out of range");
        let data = self.data.iter().skip(c).step_by(self.channels).copied().collect();
        Self::from_parts_unchecked(self.height, self.width, 1, data)
    }

    /// Per-pixel maximum over channels.
    pub fn max_channel(&self) -> ImageBuf {
        let data = self
            .data
            .chunks_exact(self.channels)
            .map(|px| px.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .collect();
        Self::from_parts_unchecked(self.height, self.width, 1, data)
    }

    /// True when every sample is finite.
    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_lengths_and_empty_dims() {
        assert!(ImageBuf::new(2, 2, 1, vec![0.0; 3]).is_err());
        assert!(ImageBuf::new(0, 2, 1, vec![]).is_err());
        assert!(ImageBuf::new(2, 2, 3, vec![0.0; 12]).is_ok());
    }

    #[test]
    fn indexing_is_row_major_interleaved() {
        let img = ImageBuf::from_fn(2, 3, 2, |y, x, c| (y * 100 + x * 10 + c) as f64);
        assert_eq!(img.get(1, 2, 1), 121.0);
        assert_eq!(img.pixel(0, 1), &[10.0, 11.0]);
        assert_eq!(img.row(1).len(), 6);
        assert_eq!(img.channel(1).get(1, 0, 0), 101.0);
    }

    #[test]
    fn max_channel_picks_brightest() {
        let img = ImageBuf::new(1, 2, 3, vec![0.1, 0.7, 0.3, 0.9, 0.2, 0.4]).unwrap();
        assert_eq!(img.max_channel().data(), &[0.7, 0.9]);
    }
}
