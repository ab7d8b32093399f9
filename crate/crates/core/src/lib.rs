//! Structure-preserving texture smoothing by pyramid-guided upsampling.
//!
//! The filter builds Gaussian and Laplacian pyramids of the input, takes the
//! coarsest Gaussian level (which has lost the fine-scale texture but keeps
//! the large structures) and upsamples it level by level back to full
//! resolution. Each upsampling step is a joint bilateral upsampling guided by
//! the finer Gaussian level, followed by a joint bilateral filter that
//! reinjects the Laplacian detail using the texture-free intermediate as
//! guidance.
//!
//! ```no_run
//! use pyrtex::{imaging, FilterParams};
//!
//! let input = imaging::load_image("in.png")?;
//! let smooth = pyrtex::pyramid_texture_filter(&input, &FilterParams::default())?;
//! imaging::save_image(&smooth, "out.png")?;
//! # Ok::<(), pyrtex::Error>(())
//! ```
//!
//! Runnable programs for each capability live in the crate's `examples/`
//! directory.

pub mod applications;
pub mod bilateral;
pub mod cli;
mod error;
pub mod filter;
pub mod imaging;
pub mod pyramid;

pub use applications::AppConfig;
pub use bilateral::BilateralParams;
pub use error::{Error, Result};
pub use filter::{pyramid_texture_filter, FilterParams, ScaleSchedule, Variant};
pub use imaging::ImageBuf;
pub use pyramid::{GaussianPyramid, LaplacianPyramid};
