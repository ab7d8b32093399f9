//! Gaussian / Laplacian pyramid construction, exact reconstruction, and a
//! dump of every level.
//!
//! cargo run --release --example pyramid [out_dir]

use std::path::PathBuf;

use pyrtex::imaging::{self, synth};
use pyrtex::pyramid::{dump_pyramids, pyramid_depth};
use pyrtex::{GaussianPyramid, LaplacianPyramid};

fn main() -> pyrtex::Result<()> {
    let out_dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "pyramid-out".into()));

    for (h, w) in [(64, 64), (600, 600), (720, 1280), (1080, 1920)] {
        println!("{w}x{h}: depth {}", pyramid_depth(h, w)?);
    }

    let img = synth::structure_image(300, 420, 3, 3);
    let gp = GaussianPyramid::build(&img, None)?;
    let lp = LaplacianPyramid::build(&gp);
    for (k, level) in gp.levels().iter().enumerate() {
        println!("G{k}: {}x{}", level.width(), level.height());
    }

    let back = lp.collapse();
    println!("reconstruction max abs error: {:.3e}", imaging::max_abs_diff(&back, &img)?.value);

    dump_pyramids(&gp, &lp, &out_dir)?;
    println!("wrote {}", out_dir.display());
    Ok(())
}
