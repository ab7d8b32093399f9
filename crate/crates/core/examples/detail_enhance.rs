//! Detail enhancement: amplify the layer the texture filter removes.
//!
//! cargo run --release --example detail_enhance [input.png] [out_dir] [alpha]

use std::path::PathBuf;

use pyrtex::applications::{boost_detail, detail_enhance, App};
use pyrtex::imaging::{self, synth, TexturePattern};
use pyrtex::{pyramid_texture_filter, AppConfig};

fn main() -> pyrtex::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let out_dir = PathBuf::from(args.get(1).map(String::as_str).unwrap_or("detail-out"));
    std::fs::create_dir_all(&out_dir)?;
    let input = match args.first() {
        Some(path) => imaging::load_image(path)?,
        None => {
            let base = synth::structure_image(240, 320, 3, 5);
            synth::add_synthetic_texture(&base, TexturePattern::Stripes, 0.08, 6, 5)?
        }
    };

    let mut cfg = AppConfig::for_app(App::DetailEnhance);
    if let Some(alpha) = args.get(2) {
        cfg.boost_alpha = alpha.parse().expect("alpha must be a number");
    }

    let base = pyramid_texture_filter(&input, &cfg.filter)?;
    let unclamped = boost_detail(&base, &input, cfg.boost_alpha)?;
    let out = detail_enhance(&input, &cfg)?;
    let clipped = unclamped.data().iter().filter(|v| !(0.0..=1.0).contains(*v)).count();
    println!(
        "alpha {}: total variation {:.1} -> {:.1}, {:.2}% of samples clipped",
        cfg.boost_alpha,
        imaging::total_variation(&input),
        imaging::total_variation(&out),
        100.0 * clipped as f64 / out.data().len() as f64
    );

    imaging::save_image(&input, out_dir.join("input.png"))?;
    imaging::save_image(&base, out_dir.join("base.png"))?;
    imaging::save_image(&out, out_dir.join("enhanced.png"))?;
    println!("wrote {}", out_dir.display());
    Ok(())
}
