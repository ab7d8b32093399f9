//! Reading and writing PNG, binary PPM/PGM, PFM and Radiance RGBE files.
//!
//! Display formats map 8-bit samples to `v / 255` and 16-bit samples to
//! `v / 65535`; alpha is dropped. Writing clamps to `[0, 1]` and quantizes
//! with `round(v * 255)`. The PPM/PGM codecs are implemented here so their
//! byte layout is fixed and golden files stay reproducible.

use std::fs;
use std::io::Write;
use std::path::Path;

use image::{DynamicImage, ImageFormat};

use super::ImageBuf;
use crate::error::{Error, Result};

const PNG_MAGIC: &[u8] = b"\x89PNG\r\n\x1a\n";

/// Loads a PNG, binary PPM (P6) or binary PGM (P5) image.
pub fn load_image(path: impl AsRef<Path>) -> Result<ImageBuf> {
    let bytes = fs::read(path.as_ref())?;
    decode_image(&bytes)
}

/// Decodes an in-memory PNG/PPM/PGM byte stream.
pub fn decode_image(bytes: &[u8]) -> Result<ImageBuf> {
    if bytes.starts_with(b"P5") || bytes.starts_with(b"P6") {
        decode_pnm(bytes)
    } else if bytes.starts_with(PNG_MAGIC) {
        let img = image::load_from_memory_with_format(bytes, ImageFormat::Png)?;
        Ok(from_dynamic(img))
    } else {
        Err(Error::Format("expected PNG, binary PPM (P6) or binary PGM (P5)".into()))
    }
}

/// Saves `img` with the format chosen by extension: `.png`, `.ppm`, `.pgm`
/// or `.pnm` (PGM for one channel, PPM for three).
pub fn save_image(img: &ImageBuf, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).unwrap_or_default();
    let bytes = match ext.as_str() {
        "png" => encode_png(img)?,
        "pgm" | "ppm" | "pnm" => {
            let want = match ext.as_str() {
                "pgm" => Some(1),
                "ppm" => Some(3),
                _ => None,
            };
            if let Some(want) = want {
                if img.channels() != want {
                    return Err(Error::Format(format!("cannot write a {}-channel image as .{ext}", img.channels())));
                }
            }
            encode_pnm(img)?
        }
        _ => return Err(Error::Format(format!("unsupported output extension {:?}", path.display()))),
    };
    fs::write(path, bytes)?;
    Ok(())
}

#[inline]
pub(crate) fn quantize8(v: f64) -> u8 {
    // f64::round is round-half-away-from-zero.
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

fn quantized(img: &ImageBuf) -> Result<Vec<u8>> {
    match img.channels() {
        1 | 3 => Ok(img.data().iter().map(|&v| quantize8(v)).collect()),
        c => Err(Error::Format(format!("only 1- or 3-channel images can be written, got {c}"))),
    }
}

fn encode_png(img: &ImageBuf) -> Result<Vec<u8>> {
    let raw = quantized(img)?;
    let color = if img.channels() == 1 { image::ExtendedColorType::L8 } else { image::ExtendedColorType::Rgb8 };
    let mut out = Vec::new();
    let encoder = image::codecs::png::PngEncoder::new(&mut out);
    image::ImageEncoder::write_image(encoder, &raw, img.width() as u32, img.height() as u32, color)?;
    Ok(out)
}

/// Binary PGM/PPM bytes, `maxval` 255, single newline separators.
pub fn encode_pnm(img: &ImageBuf) -> Result<Vec<u8>> {
    let raw = quantized(img)?;
    let magic = if img.channels() == 1 { "P5" } else { "P6" };
    let mut out = Vec::with_capacity(raw.len() + 32);
    write!(out, "{magic}\n{} {}\n255\n", img.width(), img.height())?;
    out.extend_from_slice(&raw);
    Ok(out)
}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderReader<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn token(&mut self) -> Result<&'a str> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Format("truncated header".into()));
        }
        std::str::from_utf8(&self.bytes[start..self.pos]).map_err(|_| Error::Format("non-ascii header".into()))
    }

    fn number<T: std::str::FromStr>(&mut self) -> Result<T> {
        let tok = self.token()?;
        tok.parse().map_err(|_| Error::Format(format!("bad header field {tok:?}")))
    }

    /// Consumes the single whitespace byte that ends a header.
    fn end_header(&mut self) -> Result<&'a [u8]> {
        match self.bytes.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => Ok(&self.bytes[self.pos + 1..]),
            _ => Err(Error::Format("missing raster".into())),
        }
    }
}

fn decode_pnm(bytes: &[u8]) -> Result<ImageBuf> {
    let mut rd = HeaderReader { bytes, pos: 0 };
    let channels = match rd.token()? {
        "P5" => 1,
        "P6" => 3,
        m => return Err(Error::Format(format!("unsupported PNM type {m}"))),
    };
    let width: usize = rd.number()?;
    let height: usize = rd.number()?;
    let maxval: u32 = rd.number()?;
    if width == 0 || height == 0 {
        return Err(Error::Format("zero-sized PNM".into()));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Format(format!("PNM maxval {maxval} out of range")));
    }
    let raster = rd.end_header()?;
    let n = width * height * channels;
    let scale = maxval as f64;
    let data: Vec<f64> = if maxval < 256 {
        if raster.len() < n {
            return Err(Error::Format("truncated PNM raster".into()));
        }
        raster[..n].iter().map(|&b| b as f64 / scale).collect()
    } else {
        if raster.len() < 2 * n {
            return Err(Error::Format("truncated PNM raster".into()));
        }
        raster[..2 * n].chunks_exact(2).map(|b| u16::from_be_bytes([b[0], b[1]]) as f64 / scale).collect()
    };
    ImageBuf::new(height, width, channels, data)
}

fn from_dynamic(img: DynamicImage) -> ImageBuf {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let color = img.color();
    let sixteen = color.bytes_per_pixel() / color.channel_count() >= 2;
    let (channels, data): (usize, Vec<f64>) = match (color.has_color(), sixteen) {
        (false, false) => (1, img.to_luma8().into_raw().into_iter().map(|v| v as f64 / 255.0).collect()),
        (true, false) => (3, img.to_rgb8().into_raw().into_iter().map(|v| v as f64 / 255.0).collect()),
        (false, true) => (1, img.to_luma16().into_raw().into_iter().map(|v| v as f64 / 65535.0).collect()),
        (true, true) => (3, img.to_rgb16().into_raw().into_iter().map(|v| v as f64 / 65535.0).collect()),
    };
    ImageBuf::from_parts_unchecked(h, w, channels, data)
}

/// Loads a high-dynamic-range radiance map from a Radiance RGBE (`.hdr`)
/// or Portable Float Map (`.pfm`) file. Values are returned unscaled.
pub fn load_hdr(path: impl AsRef<Path>) -> Result<ImageBuf> {
    let bytes = fs::read(path.as_ref())?;
    if bytes.starts_with(b"PF") || bytes.starts_with(b"Pf") {
        decode_pfm(&bytes)
    } else if bytes.starts_with(b"#?") {
        let img = image::load_from_memory_with_format(&bytes, ImageFormat::Hdr)?.into_rgb32f();
        let (w, h) = (img.width() as usize, img.height() as usize);
        let data = img.into_raw().into_iter().map(f64::from).collect();
        ImageBuf::new(h, w, 3, data)
    } else {
        Err(Error::Format("expected Radiance RGBE (.hdr) or PFM".into()))
    }
}

fn decode_pfm(bytes: &[u8]) -> Result<ImageBuf> {
    let mut rd = HeaderReader { bytes, pos: 0 };
    let channels = match rd.token()? {
        "PF" => 3,
        "Pf" => 1,
        m => return Err(Error::Format(format!("unsupported PFM type {m}"))),
    };
    let width: usize = rd.number()?;
    let height: usize = rd.number()?;
    let scale: f64 = rd.number()?;
    if width == 0 || height == 0 || scale == 0.0 || !scale.is_finite() {
        return Err(Error::Format("bad PFM header".into()));
    }
    let raster = rd.end_header()?;
    let row_len = width * channels;
    if raster.len() < 4 * row_len * height {
        return Err(Error::Format("truncated PFM raster".into()));
    }
    let little = scale < 0.0;
    let mut data = Vec::with_capacity(row_len * height);
    // PFM stores rows bottom to top.
    for y in (0..height).rev() {
        let row = &raster[4 * row_len * y..4 * row_len * (y + 1)];
        data.extend(row.chunks_exact(4).map(|b| {
            let b = [b[0], b[1], b[2], b[3]];
            f64::from(if little { f32::from_le_bytes(b) } else { f32::from_be_bytes(b) })
        }));
    }
    ImageBuf::new(height, width, channels, data)
}

/// Writes a little-endian PFM (`Pf` for one channel, `PF` for three).
pub fn save_pfm(img: &ImageBuf, path: impl AsRef<Path>) -> Result<()> {
    let magic = match img.channels() {
        1 => "Pf",
        3 => "PF",
        c => return Err(Error::Format(format!("PFM needs 1 or 3 channels, got {c}"))),
    };
    let mut out = Vec::with_capacity(img.data().len() * 4 + 32);
    write!(out, "{magic}\n{} {}\n-1.0\n", img.width(), img.height())?;
    for y in (0..img.height()).rev() {
        for &v in img.row(y) {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_extremes_map_to_unit_range() {
        let white = decode_image(b"P5\n1 1\n255\n\xff").unwrap();
        assert_eq!((white.height(), white.width(), white.channels()), (1, 1, 1));
        assert_eq!(white.data(), &[1.0]);
        let black = decode_image(b"P5\n1 1\n255\n\x00").unwrap();
        assert_eq!(black.data(), &[0.0]);
    }

    #[test]
    fn ppm_mid_gray() {
        let mut bytes = b"P6\n2 2\n255\n".to_vec();
        bytes.extend(std::iter::repeat_n(128u8, 12));
        let img = decode_image(&bytes).unwrap();
        assert_eq!(img.channels(), 3);
        for &v in img.data() {
            assert!((v - 0.501_960_784_313_725_5).abs() < 1e-12);
        }
    }

    #[test]
    fn pnm_header_comments_and_sixteen_bit() {
        let img = decode_image(b"P5 # comment\n# another\n1 2\n65535\n\xff\xff\x80\x00").unwrap();
        assert_eq!(img.dims(), (2, 1));
        assert_eq!(img.get(0, 0, 0), 1.0);
        assert!((img.get(1, 0, 0) - 32768.0 / 65535.0).abs() < 1e-15);
    }

    #[test]
    fn pnm_encoding_is_bit_exact() {
        let img = ImageBuf::new(1, 2, 1, vec![0.0, 1.0]).unwrap();
        assert_eq!(encode_pnm(&img).unwrap(), b"P5\n2 1\n255\n\x00\xff".to_vec());
    }

    #[test]
    fn rejects_unknown_and_truncated() {
        assert!(matches!(decode_image(b"GIF89a"), Err(Error::Format(_))));
        assert!(matches!(decode_image(b"P6\n2 2\n255\n\x00"), Err(Error::Format(_))));
        assert!(matches!(decode_image(b"P3\n1 1\n255\n0 0 0"), Err(Error::Format(_))));
    }

    #[test]
    fn quantization_rounds_half_away_from_zero() {
        assert_eq!(quantize8(0.5), 128);
        assert_eq!(quantize8(-0.2), 0);
        assert_eq!(quantize8(1.7), 255);
    }
}
