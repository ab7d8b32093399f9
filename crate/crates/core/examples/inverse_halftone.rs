//! Inverse halftoning: an ordered-dither halftone is treated as texture and
//! smoothed away.
//!
//! cargo run --release --example inverse_halftone [out_dir]

use std::path::PathBuf;

use pyrtex::applications::{inverse_halftone, App};
use pyrtex::imaging::{self, synth};
use pyrtex::AppConfig;

fn main() -> pyrtex::Result<()> {
    let out_dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "halftone-out".into()));
    std::fs::create_dir_all(&out_dir)?;

    let ramp = synth::gray_ramp(128, 512);
    let dithered = synth::bayer_dither(&ramp);
    let cfg = AppConfig::for_app(App::InverseHalftone);
    let restored = inverse_halftone(&dithered, &cfg)?;

    println!(
        "PSNR vs ramp: dithered {:.2} dB, restored {:.2} dB",
        imaging::psnr(&dithered, &ramp)?.value,
        imaging::psnr(&restored, &ramp)?.value
    );

    imaging::save_image(&dithered, out_dir.join("dithered.png"))?;
    imaging::save_image(&restored, out_dir.join("restored.png"))?;
    println!("wrote {}", out_dir.display());
    Ok(())
}
