//! The `pyrtex` command-line front end.
//!
//! Exit codes: 0 on success, 1 for runtime failures (I/O, bad image, failed
//! self-test), 2 for usage errors including out-of-range parameters.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::applications::{self, App, AppConfig};
use crate::error::{Error, Result};
use crate::filter::{self, FilterParams, Variant};
use crate::imaging::{self, synth, ImageBuf, TexturePattern};
use crate::pyramid::{self, GaussianPyramid, LaplacianPyramid};

#[derive(Debug, Parser)]
#[command(name = "pyrtex", version, about = "Structure-preserving texture smoothing with image pyramids")]
pub struct Cli {
    /// Worker threads; results do not depend on this value.
    #[arg(long, global = true, env = "PYRTEX_THREADS", value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Texture smoothing.
    Smooth {
        #[command(flatten)]
        io: InOut,
        #[command(flatten)]
        filter: FilterArgs,
        /// Recombination rule for the Laplacian levels.
        #[arg(long, value_enum, default_value_t = VariantArg::Standard)]
        variant: VariantArg,
        /// Write every Gaussian/Laplacian level as PNG into DIR.
        #[arg(long, value_name = "DIR")]
        dump_pyramid: Option<PathBuf>,
        /// Write every intermediate result R_k as PNG into DIR.
        #[arg(long, value_name = "DIR")]
        dump_intermediate: Option<PathBuf>,
    },
    /// Detail enhancement: boost the layer removed by the filter.
    Enhance {
        #[command(flatten)]
        io: InOut,
        #[command(flatten)]
        filter: FilterArgs,
        #[arg(long, default_value_t = 2.5)]
        alpha: f64,
    },
    /// Image abstraction (defaults sigma_s=3, sigma_r=0.03).
    Abstract {
        #[command(flatten)]
        io: InOut,
        #[command(flatten)]
        filter: FilterArgs,
    },
    /// HDR tone mapping of a Radiance .hdr or .pfm radiance map.
    Tonemap {
        #[command(flatten)]
        io: InOut,
        #[command(flatten)]
        filter: FilterArgs,
        /// Contrast ratio of the compressed base layer.
        #[arg(long, default_value_t = 5.0)]
        target_contrast: f64,
    },
    /// Inverse halftoning (defaults sigma_s=4, sigma_r=0.03).
    Halftone {
        #[command(flatten)]
        io: InOut,
        #[command(flatten)]
        filter: FilterArgs,
    },
    /// Low-light enhancement (defaults sigma_s=7, sigma_r=0.07).
    Ldr {
        #[command(flatten)]
        io: InOut,
        #[command(flatten)]
        filter: FilterArgs,
        #[arg(long, default_value_t = 0.7)]
        gamma: f64,
    },
    /// Time the filter on a generated textured image.
    Bench {
        /// Image size as WIDTHxHEIGHT.
        #[arg(long, default_value = "1280x720", value_parser = parse_size)]
        size: (usize, usize),
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        repeat: usize,
    },
    /// Check core invariants on generated images.
    Selftest {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
pub struct InOut {
    pub input: PathBuf,
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long)]
    pub sigma_s: Option<f64>,
    #[arg(long)]
    pub sigma_r: Option<f64>,
    /// Pyramid depth; required for images whose long side is below 64.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub depth: Option<u32>,
    /// Accept sigma values outside [3, 15] x [0.02, 0.09].
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VariantArg {
    Standard,
    LaplacianFirst,
}

fn parse_size(s: &str) -> std::result::Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected WIDTHxHEIGHT, got {s:?}"))?;
    let w: usize = w.trim().parse().map_err(|_| format!("bad width in {s:?}"))?;
    let h: usize = h.trim().parse().map_err(|_| format!("bad height in {s:?}"))?;
    if w == 0 || h == 0 {
        return Err("size must be non-zero".into());
    }
    Ok((w, h))
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

impl FilterArgs {
    fn resolve(&self, defaults: FilterParams) -> std::result::Result<FilterParams, Failure> {
        let mut p = defaults;
        if let Some(s) = self.sigma_s {
            p.sigma_s = s;
        }
        if let Some(r) = self.sigma_r {
            p.sigma_r = r;
        }
        p.depth = self.depth.map(|d| d as usize);
        if !(p.sigma_s > 0.0 && p.sigma_r > 0.0 && p.sigma_s.is_finite() && p.sigma_r.is_finite()) {
            return Err(Failure::Usage("sigma values must be positive".into()));
        }
        if !self.force {
            p.check_envelope().map_err(|e| Failure::Usage(format!("{e} (use --force to override)")))?;
        }
        Ok(p)
    }
}

/// Parses `argv` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        builder = builder.num_threads(n as usize);
    }
    let pool = match builder.build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return 1;
        }
    };
    match pool.install(|| execute(cli.command)) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn app_config(app: App, args: &FilterArgs) -> std::result::Result<AppConfig, Failure> {
    let defaults = AppConfig::for_app(app);
    let filter = args.resolve(defaults.filter)?;
    Ok(defaults.with_filter(filter))
}

fn execute(command: Command) -> std::result::Result<i32, Failure> {
    match command {
        Command::Smooth { io, filter, variant, dump_pyramid, dump_intermediate } => {
            let variant = match variant {
                VariantArg::Standard => Variant::Standard,
                VariantArg::LaplacianFirst => Variant::LaplacianFirst,
            };
            let params = filter.resolve(FilterParams::default())?.with_variant(variant);
            let input = imaging::load_image(&io.input)?;
            let gp = GaussianPyramid::build(&input, params.depth)?;
            let lp = LaplacianPyramid::build(&gp);
            if let Some(dir) = &dump_pyramid {
                pyramid::dump_pyramids(&gp, &lp, dir)?;
            }
            let trace = filter::filter_pyramids(&gp, &lp, &params)?;
            if let Some(dir) = &dump_intermediate {
                trace.dump(dir)?;
            }
            imaging::save_image(&trace.result(), &io.output)?;
        }
        Command::Enhance { io, filter, alpha } => {
            let mut cfg = app_config(App::DetailEnhance, &filter)?;
            cfg.boost_alpha = alpha;
            cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            run_ldr_app(&io, &cfg)?;
        }
        Command::Abstract { io, filter } => run_ldr_app(&io, &app_config(App::Abstraction, &filter)?)?,
        Command::Halftone { io, filter } => run_ldr_app(&io, &app_config(App::InverseHalftone, &filter)?)?,
        Command::Ldr { io, filter, gamma } => {
            let mut cfg = app_config(App::LdrEnhance, &filter)?;
            cfg.gamma = gamma;
            cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            run_ldr_app(&io, &cfg)?;
        }
        Command::Tonemap { io, filter, target_contrast } => {
            let mut cfg = app_config(App::ToneMap, &filter)?;
            cfg.tonemap_target_contrast = target_contrast;
            cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            let hdr = imaging::load_hdr(&io.input)?;
            imaging::save_image(&applications::tonemap(&hdr, &cfg)?, &io.output)?;
        }
        Command::Bench { size: (w, h), seed, repeat } => bench(w, h, seed, repeat.max(1))?,
        Command::Selftest { seed } => return Ok(selftest(seed)),
    }
    Ok(0)
}

fn run_ldr_app(io: &InOut, cfg: &AppConfig) -> Result<()> {
    let input = imaging::load_image(&io.input)?;
    let out = applications::run_app(&input, cfg)?;
    imaging::save_image(&out, &io.output)
}

/// Structure image with dot texture, the input used by `bench`.
pub fn bench_image(width: usize, height: usize, seed: u64) -> ImageBuf {
    let structure = synth::structure_image(height, width, 3, seed);
    synth::add_synthetic_texture(&structure, TexturePattern::NoiseDots, 0.2, 8, seed)
        .expect("fixed texture parameters are valid")
}

fn bench(width: usize, height: usize, seed: u64, repeat: usize) -> Result<()> {
    let img = bench_image(width, height, seed);
    let params = FilterParams::default();
    let depth = pyramid::pyramid_depth(height, width)?;
    println!(
        "bench: {width}x{height}, depth {depth}, sigma_s {}, sigma_r {}, threads {}",
        params.sigma_s,
        params.sigma_r,
        rayon::current_num_threads()
    );
    let mut best = f64::INFINITY;
    for i in 0..repeat {
        let start = Instant::now();
        let out = filter::pyramid_texture_filter(&img, &params)?;
        let secs = start.elapsed().as_secs_f64();
        std::hint::black_box(&out);
        best = best.min(secs);
        println!("run {}: {:.3} s", i + 1, secs);
    }
    let mp = (width * height) as f64 / 1e6;
    println!("best: {best:.3} s, {:.2} megapixels/s", mp / best);
    Ok(())
}

struct Check {
    name: &'static str,
    outcome: std::result::Result<String, String>,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<std::result::Result<String, String>>) -> Check {
    let outcome = f().unwrap_or_else(|e| Err(format!("error: {e}")));
    Check { name, outcome }
}

fn verdict(ok: bool, detail: String) -> std::result::Result<String, String> {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Runs the embedded invariant suite and prints one line per check.
/// Returns 0 when every check passes, 1 otherwise.
pub fn selftest(seed: u64) -> i32 {
    let checks = vec![
        check("pyramid reconstruction", || {
            let img = synth::random_image(150, 97, 3, seed);
            let gp = GaussianPyramid::build(&img, None)?;
            let back = LaplacianPyramid::build(&gp).collapse();
            let err = imaging::max_abs_diff(&back, &img)?.value;
            Ok(verdict(err <= 1e-6, format!("max abs diff {err:.2e}")))
        }),
        check("depth rule", || {
            let got = [(600, 600), (720, 1280), (64, 64)].map(|(h, w)| pyramid::pyramid_depth(h, w));
            let got: Vec<usize> = got.into_iter().collect::<Result<_>>()?;
            Ok(verdict(got == [4, 5, 1], format!("depths {got:?}")))
        }),
        check("constant image is a fixed point", || {
            let img = ImageBuf::filled(80, 120, 3, 0.5);
            let out = filter::pyramid_texture_filter(&img, &FilterParams::default())?;
            Ok(verdict(out == img, "0.5 gray".into()))
        }),
        check("texture removal", || {
            let gt = synth::structure_image(256, 256, 3, seed);
            let textured = synth::add_synthetic_texture(&gt, TexturePattern::Checker, 0.2, 8, seed)?;
            let out = filter::pyramid_texture_filter(&textured, &FilterParams::default())?;
            let gain = imaging::psnr(&out, &gt)?.value - imaging::psnr(&textured, &gt)?.value;
            Ok(verdict(gain >= 5.0, format!("PSNR gain {gain:.2} dB")))
        }),
        check("thread-count independence", || {
            let img = bench_image(160, 120, seed);
            let run_with = |n: usize| -> Result<ImageBuf> {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::Contract(e.to_string()))?;
                pool.install(|| filter::pyramid_texture_filter(&img, &FilterParams::default()))
            };
            let (a, b) = (run_with(1)?, run_with(4)?);
            Ok(verdict(a == b, "1 vs 4 threads".into()))
        }),
        check("output range and shape", || {
            let img = synth::random_image(90, 70, 3, seed);
            let out = filter::pyramid_texture_filter(&img, &FilterParams::default())?;
            let ok = out.dims() == img.dims() && out.data().iter().all(|v| (0.0..=1.0).contains(v));
            Ok(verdict(ok, format!("{:?}", out.dims())))
        }),
    ];
    let mut failed = 0;
    for c in &checks {
        match &c.outcome {
            Ok(detail) => println!("[PASS] {}: {detail}", c.name),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {}: {detail}", c.name);
            }
        }
    }
    println!("{} of {} checks passed", checks.len() - failed, checks.len());
    i32::from(failed > 0)
}
