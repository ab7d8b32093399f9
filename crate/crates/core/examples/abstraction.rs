//! Image abstraction: flatten texture while keeping region boundaries.
//!
//! cargo run --release --example abstraction [input.png] [out_dir]

use std::path::PathBuf;

use pyrtex::applications::{abstraction, App};
use pyrtex::imaging::{self, synth, TexturePattern};
use pyrtex::AppConfig;

fn main() -> pyrtex::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let out_dir = PathBuf::from(args.get(1).map(String::as_str).unwrap_or("abstraction-out"));
    std::fs::create_dir_all(&out_dir)?;
    let input = match args.first() {
        Some(path) => imaging::load_image(path)?,
        None => {
            let base = synth::structure_image(256, 256, 3, 9);
            let dots = synth::add_synthetic_texture(&base, TexturePattern::NoiseDots, 0.15, 6, 9)?;
            imaging::add_gaussian_noise(&dots, 0.02, 9)?
        }
    };

    let cfg = AppConfig::for_app(App::Abstraction);
    let out = abstraction(&input, &cfg)?;
    println!(
        "sigma_s {}, sigma_r {}: total variation {:.1} -> {:.1}",
        cfg.filter.sigma_s,
        cfg.filter.sigma_r,
        imaging::total_variation(&input),
        imaging::total_variation(&out)
    );
    imaging::save_image(&input, out_dir.join("input.png"))?;
    imaging::save_image(&out, out_dir.join("abstraction.png"))?;
    println!("wrote {}", out_dir.display());
    Ok(())
}
