//! Joint bilateral filtering: denoise a noisy image guided by its clean
//! version, check the optimized filter against the literal reference sum,
//! and upsample a coarse image under fine guidance.
//!
//! cargo run --release --example joint_bilateral --features test-oracle

use pyrtex::bilateral::{jbf, jbf_upsample};
use pyrtex::imaging::{self, synth};
use pyrtex::pyramid::{downsample_half, resize_bilinear};
use pyrtex::BilateralParams;

fn main() -> pyrtex::Result<()> {
    let clean = synth::structure_image(128, 160, 3, 11);
    let noisy = imaging::add_gaussian_noise(&clean, 0.05, 11)?;
    let params = BilateralParams::new(2.0, 0.1, 7)?;

    let self_guided = jbf(&noisy, &noisy, &params)?;
    let clean_guided = jbf(&noisy, &clean, &params)?;
    println!("PSNR noisy        {:.2} dB", imaging::psnr(&noisy, &clean)?.value);
    println!("PSNR self-guided  {:.2} dB", imaging::psnr(&self_guided, &clean)?.value);
    println!("PSNR clean-guided {:.2} dB", imaging::psnr(&clean_guided, &clean)?.value);

    let low = downsample_half(&clean)?;
    let bilinear = resize_bilinear(&low, clean.height(), clean.width());
    let guided = jbf_upsample(&low, &clean, &BilateralParams::new(1.0, 0.05, 3)?)?;
    println!(
        "upsampling PSNR: bilinear {:.2} dB, guided {:.2} dB",
        imaging::psnr(&bilinear, &clean)?.value,
        imaging::psnr(&guided, &clean)?.value
    );

    #[cfg(feature = "test-oracle")]
    {
        let crop = synth::random_image(16, 16, 3, 1);
        let guide = synth::random_image(16, 16, 3, 2);
        let fast = jbf(&crop, &guide, &params)?;
        let slow = pyrtex::bilateral::oracle::jbf_oracle(&crop, &guide, &params)?;
        println!("optimized vs reference: {:.3e}", imaging::max_abs_diff(&fast, &slow)?.value);
    }
    Ok(())
}
