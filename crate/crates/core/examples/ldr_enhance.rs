//! Low-light enhancement: divide by a texture-free illumination estimate.
//!
//! cargo run --release --example ldr_enhance [input.png] [out_dir]

use std::path::PathBuf;

use pyrtex::applications::{ldr_enhance, App};
use pyrtex::imaging::{self, synth, TexturePattern};
use pyrtex::AppConfig;

fn main() -> pyrtex::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let out_dir = PathBuf::from(args.get(1).map(String::as_str).unwrap_or("ldr-out"));
    std::fs::create_dir_all(&out_dir)?;
    let input = match args.first() {
        Some(path) => imaging::load_image(path)?,
        None => {
            let scene = synth::structure_image(240, 320, 3, 2);
            let textured = synth::add_synthetic_texture(&scene, TexturePattern::Stripes, 0.1, 5, 2)?;
            // Underexpose, darker towards the left.
            let w = textured.width() as f64;
            pyrtex::ImageBuf::from_fn(240, 320, 3, |y, x, c| textured.get(y, x, c) * (0.05 + 0.25 * x as f64 / w))
        }
    };

    let cfg = AppConfig::for_app(App::LdrEnhance);
    let out = ldr_enhance(&input, &cfg)?;
    println!("mean intensity {:.3} -> {:.3} (gamma {})", input.mean(), out.mean(), cfg.gamma);

    imaging::save_image(&input, out_dir.join("input.png"))?;
    imaging::save_image(&out, out_dir.join("enhanced.png"))?;
    println!("wrote {}", out_dir.display());
    Ok(())
}
