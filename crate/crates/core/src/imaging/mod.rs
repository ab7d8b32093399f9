//! Image container, file I/O, quality metrics and synthetic test images.

mod buffer;
pub mod io;
pub mod metrics;
pub mod synth;

pub use buffer::ImageBuf;
pub use io::{load_hdr, load_image, save_image, save_pfm};
pub use metrics::{max_abs_diff, mean_abs_diff, mse, psnr, total_variation, Metric, MetricKind};
pub use synth::{add_gaussian_noise, add_synthetic_texture, TexturePattern};
