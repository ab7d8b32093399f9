//! Compares the standard filter with the Laplacian-first variant and with
//! plain bilinear upsampling of the coarsest Gaussian level, over a small
//! set of synthetic textured images with known clean versions.
//!
//! cargo run --release --example ablation

use pyrtex::imaging::{self, synth, TexturePattern};
use pyrtex::pyramid::resize_bilinear;
use pyrtex::{pyramid_texture_filter, FilterParams, GaussianPyramid, Variant};

fn main() -> pyrtex::Result<()> {
    let params = FilterParams::new(5.0, 0.07)?;
    let laplacian_first = params.with_variant(Variant::LaplacianFirst);
    println!("{:>6} {:>9} {:>8} {:>9} {:>9} {:>9}", "seed", "pattern", "input", "bilinear", "lap-first", "standard");
    for seed in 0..3 {
        for (name, pattern) in [
            ("checker", TexturePattern::Checker),
            ("stripes", TexturePattern::Stripes),
            ("dots", TexturePattern::NoiseDots),
        ] {
            let clean = synth::structure_image(256, 256, 3, seed);
            let textured = synth::add_synthetic_texture(&clean, pattern, 0.2, 8, seed)?;
            let gp = GaussianPyramid::build(&textured, None)?;
            let bilinear = resize_bilinear(gp.coarsest(), 256, 256);
            let psnr = |img: &pyrtex::ImageBuf| imaging::psnr(img, &clean).map(|m| m.value);
            println!(
                "{seed:>6} {name:>9} {:>8.2} {:>9.2} {:>9.2} {:>9.2}",
                psnr(&textured)?,
                psnr(&bilinear)?,
                psnr(&pyramid_texture_filter(&textured, &laplacian_first)?)?,
                psnr(&pyramid_texture_filter(&textured, &params)?)?
            );
        }
    }
    Ok(())
}
