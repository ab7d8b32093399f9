//! HDR tone mapping. Without an argument, a synthetic radiance map spanning
//! four decades is written as PFM, read back, and tone-mapped.
//!
//! cargo run --release --example tonemap [input.hdr|input.pfm] [out_dir]

use std::path::PathBuf;

use pyrtex::applications::{tonemap_layers, App};
use pyrtex::imaging::{self, synth, ImageBuf};
use pyrtex::AppConfig;

fn synthetic_radiance() -> ImageBuf {
    let structure = synth::structure_image(192, 256, 3, 4);
    ImageBuf::from_fn(192, 256, 3, |y, x, c| {
        // A bright window on the right, fine texture everywhere.
        let window = if x > 170 && (40..120).contains(&y) { 800.0 } else { 1.0 };
        let texture = 1.0 + 0.3 * ((x as f64 * 0.9).sin() * (y as f64 * 0.7).cos());
        0.05 * window * texture * (0.2 + structure.get(y, x, c))
    })
}

fn main() -> pyrtex::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let out_dir = PathBuf::from(args.get(1).map(String::as_str).unwrap_or("tonemap-out"));
    std::fs::create_dir_all(&out_dir)?;
    let path = match args.first() {
        Some(path) => PathBuf::from(path),
        None => {
            let path = out_dir.join("synthetic.pfm");
            imaging::save_pfm(&synthetic_radiance(), &path)?;
            path
        }
    };
    let hdr = imaging::load_hdr(&path)?;

    let cfg = AppConfig::for_app(App::ToneMap);
    let layers = tonemap_layers(&hdr, &cfg)?;
    let range = |img: &ImageBuf| img.max_value() - img.min_value();
    println!("log10 luminance range: {:.2} decades", range(&layers.log_lum));
    println!(
        "base range {:.2} -> {:.2} decades (target {:.2})",
        range(&layers.base),
        range(&layers.compressed_base),
        cfg.tonemap_target_contrast.log10()
    );

    imaging::save_image(&layers.output, out_dir.join("tonemapped.png"))?;
    let normalize = |img: &ImageBuf| {
        let (lo, hi) = (img.min_value(), img.max_value());
        img.map(|v| if hi > lo { (v - lo) / (hi - lo) } else { 0.5 })
    };
    imaging::save_image(&normalize(&layers.base), out_dir.join("base.png"))?;
    imaging::save_image(&normalize(&layers.detail), out_dir.join("detail.png"))?;
    println!("wrote {}", out_dir.display());
    Ok(())
}
