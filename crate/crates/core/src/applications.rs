//! Applications built on [`pyramid_texture_filter`]: detail enhancement,
//! abstraction, HDR tone mapping, inverse halftoning and low-light
//! enhancement.
//!
//! The tone mapper and the detail recomposition are the usual base/detail
//! recipes with the texture filter as the base extractor; they are
//! conventions of this crate rather than anything tuned to reproduce
//! particular reference images.

use crate::error::{ensure, Result};
use crate::filter::{pyramid_texture_filter, FilterParams};
use crate::imaging::ImageBuf;

/// Floor applied to the smoothed illumination before division.
pub const ILLUMINATION_FLOOR: f64 = 1e-3;

/// Rec. 709 luminance weights.
const LUMA: [f64; 3] = [0.2126, 0.7152, 0.0722];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum App {
    DetailEnhance,
    Abstraction,
    ToneMap,
    InverseHalftone,
    LdrEnhance,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppConfig {
    pub app: App,
    pub filter: FilterParams,
    /// Detail multiplier for [`detail_enhance`].
    pub boost_alpha: f64,
    /// Exponent applied to the illumination map in [`ldr_enhance`], in `(0, 1)`.
    pub gamma: f64,
    /// Contrast ratio (max/min) the tone-mapped base layer is compressed to.
    pub tonemap_target_contrast: f64,
}

impl AppConfig {
    /// Defaults for each application, including its filter parameters.
    pub fn for_app(app: App) -> Self {
        let filter = match app {
            App::DetailEnhance | App::ToneMap => FilterParams::default(),
            App::Abstraction => FilterParams::unchecked(3.0, 0.03),
            App::InverseHalftone => FilterParams::unchecked(4.0, 0.03),
            App::LdrEnhance => FilterParams::unchecked(7.0, 0.07),
        };
        Self { app, filter, boost_alpha: 2.5, gamma: 0.7, tonemap_target_contrast: 5.0 }
    }

    pub fn with_filter(mut self, filter: FilterParams) -> Self {
        self.filter = filter;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.boost_alpha >= 0.0 && self.boost_alpha.is_finite(),
            "alpha must be >= 0, got {}",
            self.boost_alpha
        );
        ensure!(self.gamma > 0.0 && self.gamma < 1.0, "gamma must lie in (0, 1), got {}", self.gamma);
        ensure!(
            self.tonemap_target_contrast > 1.0 && self.tonemap_target_contrast.is_finite(),
            "tone-map target contrast must exceed 1, got {}",
            self.tonemap_target_contrast
        );
        Ok(())
    }
}

/// `base + alpha · (input − base)`, unclamped.
///
/// Evaluated from whichever end is closer so that `alpha = 0` returns
/// `base` and `alpha = 1` returns `input` bit for bit.
pub fn boost_detail(base: &ImageBuf, input: &ImageBuf, alpha: f64) -> Result<ImageBuf> {
    if alpha < 0.5 {
        base.zip_map(input, |b, i| b + alpha * (i - b))
    } else {
        base.zip_map(input, |b, i| i - (1.0 - alpha) * (i - b))
    }
}

/// Amplifies the texture/detail layer `I − R` by `boost_alpha`.
pub fn detail_enhance(img: &ImageBuf, cfg: &AppConfig) -> Result<ImageBuf> {
    cfg.validate()?;
    let base = pyramid_texture_filter(img, &cfg.filter)?;
    Ok(boost_detail(&base, img, cfg.boost_alpha)?.clamp01())
}

/// Cartoon-like abstraction: the texture-smoothed image itself.
pub fn abstraction(img: &ImageBuf, cfg: &AppConfig) -> Result<ImageBuf> {
    cfg.validate()?;
    pyramid_texture_filter(img, &cfg.filter)
}

/// Removes halftone dot patterns by treating them as texture.
pub fn inverse_halftone(img: &ImageBuf, cfg: &AppConfig) -> Result<ImageBuf> {
    cfg.validate()?;
    pyramid_texture_filter(img, &cfg.filter)
}

/// Retinex-style low-light enhancement. The illumination estimate is the
/// per-pixel channel maximum, smoothed by the texture filter and floored at
/// [`ILLUMINATION_FLOOR`]; the output is `I / L_s^gamma`.
pub fn ldr_enhance(img: &ImageBuf, cfg: &AppConfig) -> Result<ImageBuf> {
    cfg.validate()?;
    let illumination = img.max_channel();
    let smoothed = pyramid_texture_filter(&illumination, &cfg.filter)?.map(|v| v.clamp(ILLUMINATION_FLOOR, 1.0));
    let c = img.channels();
    let gamma = cfg.gamma;
    let data = img
        .data()
        .chunks_exact(c)
        .zip(smoothed.data())
        .flat_map(|(px, &l)| {
            let gain = l.powf(gamma);
            px.iter().map(move |v| (v / gain).clamp(0.0, 1.0))
        })
        .collect();
    ImageBuf::new(img.height(), img.width(), c, data)
}

/// Intermediate layers of [`tonemap`], all in log10 luminance.
#[derive(Debug, Clone)]
pub struct ToneMapLayers {
    pub log_lum: ImageBuf,
    pub base: ImageBuf,
    pub detail: ImageBuf,
    pub compressed_base: ImageBuf,
    /// Tone-mapped RGB (or gray), clamped to `[0, 1]`.
    pub output: ImageBuf,
}

/// Relative luminance of a one- or three-channel radiance map.
pub fn luminance(img: &ImageBuf) -> Result<ImageBuf> {
    match img.channels() {
        1 => Ok(img.clone()),
        3 => {
            let data =
                img.data().chunks_exact(3).map(|px| LUMA[0] * px[0] + LUMA[1] * px[1] + LUMA[2] * px[2]).collect();
            ImageBuf::new(img.height(), img.width(), 1, data)
        }
        c => Err(crate::Error::Contract(format!("tone mapping needs 1 or 3 channels, got {c}"))),
    }
}

/// Base/detail tone mapping in the log-luminance domain.
///
/// The log10 luminance is normalized to `[0, 1]` and texture-filtered to get
/// the base layer; detail is what remains. The base is shifted so its
/// maximum sits at 0 (display white) and, if its range exceeds
/// `log10(target_contrast)`, scaled down to that range. Colors are carried
/// over by the per-pixel ratio `RGB / Lum`.
pub fn tonemap_layers(hdr: &ImageBuf, cfg: &AppConfig) -> Result<ToneMapLayers> {
    cfg.validate()?;
    ensure!(hdr.data().iter().all(|&v| v.is_finite() && v >= 0.0), "radiance must be finite and non-negative");
    let lum = luminance(hdr)?;
    ensure!(lum.data().iter().all(|&l| l > 0.0), "radiance must be positive everywhere");

    let log_lum = lum.map(f64::log10);
    let (lo, hi) = (log_lum.min_value(), log_lum.max_value());
    let span = hi - lo;
    let base = if span > 0.0 {
        let normalized = log_lum.map(|v| (v - lo) / span);
        pyramid_texture_filter(&normalized, &cfg.filter)?.map(|v| lo + v * span)
    } else {
        log_lum.clone()
    };
    let detail = log_lum.zip_map(&base, |l, b| l - b)?;

    let (bmin, bmax) = (base.min_value(), base.max_value());
    let target = cfg.tonemap_target_contrast.log10();
    let scale = if bmax > bmin { (target / (bmax - bmin)).min(1.0) } else { 1.0 };
    let compressed_base = base.map(|b| (b - bmax) * scale);

    let out_log = compressed_base.zip_map(&detail, |b, d| b + d)?;
    let c = hdr.channels();
    let data = hdr
        .data()
        .chunks_exact(c)
        .zip(lum.data().iter().zip(out_log.data()))
        .flat_map(|(px, (&l, &ol))| {
            let out_lum = 10f64.powf(ol);
            px.iter().map(move |v| (v / l * out_lum).clamp(0.0, 1.0))
        })
        .collect();
    let output = ImageBuf::new(hdr.height(), hdr.width(), c, data)?;
    Ok(ToneMapLayers { log_lum, base, detail, compressed_base, output })
}

/// Tone-maps an HDR radiance map to a displayable `[0, 1]` image.
pub fn tonemap(hdr: &ImageBuf, cfg: &AppConfig) -> Result<ImageBuf> {
    Ok(tonemap_layers(hdr, cfg)?.output)
}

/// Dispatches on `cfg.app`. Tone mapping expects a radiance map.
pub fn run_app(img: &ImageBuf, cfg: &AppConfig) -> Result<ImageBuf> {
    match cfg.app {
        App::DetailEnhance => detail_enhance(img, cfg),
        App::Abstraction => abstraction(img, cfg),
        App::ToneMap => tonemap(img, cfg),
        App::InverseHalftone => inverse_halftone(img, cfg),
        App::LdrEnhance => ldr_enhance(img, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::synth;

    #[test]
    fn boost_endpoints_are_exact() {
        let base = synth::random_image(8, 8, 3, 1);
        let input = synth::random_image(8, 8, 3, 2);
        assert_eq!(boost_detail(&base, &input, 1.0).unwrap(), input);
        assert_eq!(boost_detail(&base, &input, 0.0).unwrap(), base);
    }

    #[test]
    fn ldr_enhance_constant_gray() {
        let img = ImageBuf::filled(64, 64, 3, 0.25);
        let out = ldr_enhance(&img, &AppConfig::for_app(App::LdrEnhance)).unwrap();
        let expect = 0.25f64.powf(0.3);
        assert!(out.data().iter().all(|v| (v - expect).abs() < 1e-6));
    }

    #[test]
    fn ldr_enhance_fully_lit_is_identity() {
        // Channel max is 1 everywhere, so the illumination map is flat 1.
        let img = ImageBuf::from_fn(64, 64, 3, |y, x, c| if c == 0 { 1.0 } else { ((y + x) % 7) as f64 / 7.0 });
        let out = ldr_enhance(&img, &AppConfig::for_app(App::LdrEnhance)).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn config_validation() {
        let mut cfg = AppConfig::for_app(App::LdrEnhance);
        cfg.gamma = 1.0;
        assert!(cfg.validate().is_err());
        cfg.gamma = 0.7;
        cfg.boost_alpha = -1.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn tonemap_rejects_nonpositive_radiance() {
        let mut hdr = ImageBuf::filled(64, 64, 3, 2.0);
        hdr.set(3, 3, 0, -1.0);
        assert!(tonemap(&hdr, &AppConfig::for_app(App::ToneMap)).is_err());
        let dark = ImageBuf::filled(64, 64, 3, 0.0);
        assert!(tonemap(&dark, &AppConfig::for_app(App::ToneMap)).is_err());
    }

    #[test]
    fn tonemap_constant_radiance_is_constant() {
        let hdr = ImageBuf::filled(64, 80, 3, 37.5);
        let out = tonemap(&hdr, &AppConfig::for_app(App::ToneMap)).unwrap();
        let first = out.data()[0];
        assert!(out.data().iter().all(|&v| v == first));
    }
}
