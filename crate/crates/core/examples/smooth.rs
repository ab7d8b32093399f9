//! Texture smoothing on a synthetic textured image (or on an image given on
//! the command line), with every intermediate level written out.
//!
//! cargo run --release --example smooth [input.png] [out_dir]

use std::path::PathBuf;

use pyrtex::filter::filter_with_trace;
use pyrtex::imaging::{self, synth, TexturePattern};
use pyrtex::FilterParams;

fn main() -> pyrtex::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let out_dir = PathBuf::from(args.get(1).map(String::as_str).unwrap_or("smooth-out"));
    std::fs::create_dir_all(&out_dir)?;

    let (input, clean) = match args.first() {
        Some(path) => (imaging::load_image(path)?, None),
        None => {
            let clean = synth::structure_image(256, 256, 3, 7);
            let textured = synth::add_synthetic_texture(&clean, TexturePattern::Checker, 0.2, 8, 7)?;
            (textured, Some(clean))
        }
    };

    let params = FilterParams::new(5.0, 0.07)?;
    let trace = filter_with_trace(&input, &params)?;
    let output = trace.result();

    println!("input {}x{}, {} levels", input.width(), input.height(), trace.levels.len());
    for (k, level) in trace.schedule.levels().iter().enumerate() {
        println!(
            "  level {k}: sigma_s {:.3}, upsample window {}, refine window {}",
            level.sigma_s, level.up_window, level.refine_window
        );
    }
    if let Some(clean) = clean {
        println!(
            "PSNR vs clean: input {:.2} dB, output {:.2} dB",
            imaging::psnr(&input, &clean)?.value,
            imaging::psnr(&output, &clean)?.value
        );
        imaging::save_image(&clean, out_dir.join("clean.png"))?;
    }

    imaging::save_image(&input, out_dir.join("input.png"))?;
    imaging::save_image(&output, out_dir.join("output.png"))?;
    trace.dump(out_dir.join("levels"))?;
    println!("wrote {}", out_dir.display());
    Ok(())
}
