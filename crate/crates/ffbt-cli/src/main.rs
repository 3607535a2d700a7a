//! `ffbt` — analysis, synthesis and convolution of disk-supported
//! functions through finite Fourier-Bessel transforms, plus quadrature
//! oracles and convergence studies.

mod study;

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use ffbt::cases::{analysis_case, convolution_case};
use ffbt::coefficients::{plan_order, ErrorBudget, KernelKind, PlanMode};
use ffbt::io::{
    format_f64, read_field, read_spectrum, write_field, write_spectrum, KernelStore,
};
use ffbt::oracle::{
    direct_convolution, fb_coefficient_quadrature, fourier_integral_quadrature,
    partial_sum_reference, truncated_closed_form, ConvFactor, QuadratureSpec,
};
use ffbt::sampling::{sample_scaled, SampledField};
use ffbt::transform::{ffbt_block, ffbt_with_kernel};
use ffbt::{
    bessel_zero, ensure_zeros, finite_fourier_disk, steer_residual, FrequencyIndex, HarmonicIndex,
};

#[derive(Parser)]
#[command(
    name = "ffbt",
    version,
    about = "Finite Fourier-Bessel transforms on disks",
    long_about = None
)]
struct Cli {
    /// Worker threads (default: hardware parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Seed for operations that sample randomly. Every built-in study is
    /// deterministic, so this only pins down future randomized ops.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output encoding for single-value results.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate Bessel zeros z_{m,n} as CSV `m,n,z`.
    Zeros {
        #[arg(long = "m-max")]
        m_max: i32,
        #[arg(long = "n-max")]
        n_max: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Precompute and store the folded kernel matrices Q and Qx for one mode.
    Kernel {
        #[arg(long, allow_negative_numbers = true)]
        m: i32,
        #[arg(long)]
        n: usize,
        #[arg(long = "K")]
        order: i64,
        /// Cache directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Finite Fourier transforms f^(k;L) of a field, CSV `k1,k2,re,im`.
    Fourier {
        #[arg(long, conflicts_with = "case")]
        input: Option<PathBuf>,
        /// Sample a named case instead of reading a field file.
        #[arg(long, requires = "grid")]
        case: Option<String>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        kmax: i64,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Forward block analysis: field -> spectrum file. A --case input is
    /// sampled on the definitional grid L = 2K+1.
    Analyze {
        #[arg(long, conflicts_with = "case")]
        input: Option<PathBuf>,
        #[arg(long)]
        case: Option<String>,
        #[arg(long = "M")]
        m_max: Option<i32>,
        #[arg(long = "N")]
        n_max: Option<usize>,
        #[arg(long = "K")]
        order: Option<i64>,
        /// Kernel cache directory: folded Q matrices are loaded from here
        /// (and stored on miss) instead of rebuilt.
        #[arg(long = "kernel-cache")]
        kernel_cache: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Inverse synthesis: spectrum file -> field file on an evaluation grid.
    Synthesize {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long = "eval-grid")]
        eval_grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Steerability residuals |C^K(R_phi f) - e^{im phi} C^K(f)| over a K list.
    Steer {
        #[arg(long, default_value = "skewed-bump")]
        case: String,
        #[arg(long, allow_negative_numbers = true)]
        m: i32,
        #[arg(long)]
        n: usize,
        /// Rotation angle in radians.
        #[arg(long, allow_negative_numbers = true)]
        phi: f64,
        #[arg(long = "K-list", value_delimiter = ',', default_value = "8,16,32")]
        k_list: Vec<i64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Unified convolution synthesis of two fields (or a named pair case).
    Convolve {
        #[arg(long, conflicts_with = "case")]
        f: Option<PathBuf>,
        #[arg(long, conflicts_with = "case", requires = "f")]
        g: Option<PathBuf>,
        #[arg(long)]
        case: Option<String>,
        #[arg(long = "M")]
        m_max: Option<i32>,
        #[arg(long = "N")]
        n_max: Option<usize>,
        #[arg(long = "K")]
        order: Option<i64>,
        /// Disk radius a; factors must be supported in B_{a/2}.
        #[arg(long)]
        a: Option<f64>,
        #[arg(long = "eval-grid")]
        eval_grid: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Convergence study of a named case over a K list; writes CSV
    /// `K,max_abs_err,mode_err` and the synthesized grids as field files.
    Study {
        #[arg(long)]
        case: String,
        #[arg(long = "K-list", value_delimiter = ',')]
        k_list: Option<Vec<i64>>,
        #[arg(long = "M")]
        m_max: Option<i32>,
        #[arg(long = "N")]
        n_max: Option<usize>,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long = "eval-grid")]
        eval_grid: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        /// Directory for the synthesized grids (default: `<out>.fields/`).
        #[arg(long = "fields-dir")]
        fields_dir: Option<PathBuf>,
    },
    /// Unified-vs-sampled convolution coefficient gaps over a K list; CSV
    /// `K,mode,m,n,gap`.
    ConvStudy {
        #[arg(long)]
        case: String,
        #[arg(long = "K-list", value_delimiter = ',')]
        k_list: Option<Vec<i64>>,
        #[arg(long = "M")]
        m_max: Option<i32>,
        #[arg(long = "N")]
        n_max: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Quadrature oracles, one value at a time (debugging aid).
    Oracle {
        /// One of: fb-coeff, fourier-int, closed-form, conv, partial-sum.
        #[arg(long)]
        op: String,
        /// Analysis case (fb-coeff, fourier-int, closed-form, partial-sum)
        /// or convolution case (conv).
        #[arg(long)]
        case: String,
        #[arg(long, allow_negative_numbers = true)]
        m: Option<i32>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long = "M")]
        m_max: Option<i32>,
        #[arg(long = "N")]
        n_max: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        k1: Option<i64>,
        #[arg(long, allow_negative_numbers = true)]
        k2: Option<i64>,
        #[arg(long)]
        cutoff: Option<i64>,
        #[arg(long, allow_negative_numbers = true)]
        x: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        y: Option<f64>,
        #[arg(long = "radial-nodes", default_value_t = 256)]
        radial_nodes: usize,
        #[arg(long = "angular-nodes", default_value_t = 512)]
        angular_nodes: usize,
        #[arg(long = "cartesian-nodes", default_value_t = 256)]
        cartesian_nodes: usize,
    },
    /// Recommend the order K (and grid L = 2K+1) for a target accuracy.
    EpsilonPlan {
        /// Target absolute error.
        #[arg(long)]
        eps: f64,
        /// single | block | conv (conv plans a block when M/N given, else a
        /// single mode).
        #[arg(long)]
        mode: String,
        #[arg(long, allow_negative_numbers = true)]
        m: Option<i32>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long = "M")]
        m_max: Option<i32>,
        #[arg(long = "N")]
        n_max: Option<usize>,
        /// c_f = max(96 |grad f|_inf / pi, |f|_A).
        #[arg(long = "c-f")]
        c_f: Option<f64>,
        /// d_{f,g} = max(kappa* c_{f,g}, 2 c_{f*g}).
        #[arg(long = "d-fg")]
        d_fg: Option<f64>,
        #[arg(long = "beta-cutoff", default_value_t = 64)]
        beta_cutoff: i64,
    },
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("thread pool")?;
    }
    let _ = cli.seed; // studies are deterministic; reserved for randomized ops
    run(cli)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Zeros { m_max, n_max, out } => {
            if m_max < 0 || n_max < 1 {
                bail!("zeros needs --m-max >= 0 and --n-max >= 1");
            }
            ensure_zeros(m_max, n_max)?;
            let mut text = String::from("m,n,z\n");
            for m in 0..=m_max {
                for n in 1..=n_max {
                    text.push_str(&format!("{m},{n},{}\n", format_f64(bessel_zero(m, n)?)));
                }
            }
            fs::write(&out, text).with_context(|| format!("writing {}", out.display()))?;
            println!("wrote {} zeros to {}", (m_max + 1) as usize * n_max, out.display());
        }

        Command::Kernel { m, n, order, out } => {
            let store = KernelStore::new(&out)?;
            let idx = HarmonicIndex::new(m, n)?;
            let q_path = store.store(idx, order, KernelKind::Plain)?;
            let qx_path = store.store(idx, order, KernelKind::Cross)?;
            println!("{}", q_path.display());
            println!("{}", qx_path.display());
        }

        Command::Fourier {
            input,
            case,
            grid,
            kmax,
            out,
        } => {
            let field = load_field(input, case.as_deref(), grid)?;
            let regime = (field.len() as i64 - 1) / 2;
            if kmax > regime {
                log::warn!(
                    "kmax={kmax} exceeds (L-1)/2 = {regime}; transforms beyond it are \
                     defined but outside the accuracy regime"
                );
            }
            let mut text = String::from("k1,k2,re,im\n");
            for k1 in -kmax..=kmax {
                for k2 in -kmax..=kmax {
                    let v = finite_fourier_disk(&field, FrequencyIndex::new(k1, k2));
                    text.push_str(&format!(
                        "{k1},{k2},{},{}\n",
                        format_f64(v.re),
                        format_f64(v.im)
                    ));
                }
            }
            emit(out.as_deref(), &text)?;
        }

        Command::Analyze {
            input,
            case,
            m_max,
            n_max,
            order,
            kernel_cache,
            out,
        } => {
            let defaults = case.as_deref().map(analysis_case).transpose()?;
            let m_max = m_max
                .or(defaults.map(|c| c.m_max))
                .context("--M is required without --case")?;
            let n_max = n_max
                .or(defaults.map(|c| c.n_max))
                .context("--N is required without --case")?;
            let order = order
                .or(defaults.map(|c| c.order))
                .context("--K is required without --case")?;
            let field = match (&input, defaults) {
                (Some(path), _) => read_field(path)?,
                (None, Some(c)) => sample_scaled(c.f, c.a, (2 * order + 1) as usize)?,
                (None, None) => bail!("analyze needs --input or --case"),
            };
            let spectrum = match kernel_cache {
                Some(dir) => {
                    let store = KernelStore::new(&dir)?;
                    let mut spectrum =
                        ffbt::Spectrum::new(m_max, n_max, order, field.radius())?;
                    for m in -m_max..=m_max {
                        for n in 1..=n_max {
                            let idx = HarmonicIndex::new(m, n)?;
                            let q = store.get_or_build(idx, order, KernelKind::Plain)?;
                            spectrum.set(m, n, ffbt_with_kernel(&field, &q, order)?);
                        }
                    }
                    spectrum
                }
                None => ffbt_block(&field, m_max, n_max, order)?,
            };
            write_spectrum(&spectrum, &out)?;
            println!(
                "wrote spectrum M={m_max} N={n_max} K={order} a={} to {}",
                spectrum.radius(),
                out.display()
            );
        }

        Command::Synthesize {
            spec,
            eval_grid,
            out,
        } => {
            let spectrum = read_spectrum(&spec)?;
            let field = study::synthesize_grid(&spectrum, eval_grid)?;
            write_field(&field, &out)?;
            println!(
                "wrote {}x{} synthesis (a={}) to {}",
                eval_grid,
                eval_grid,
                spectrum.radius(),
                out.display()
            );
        }

        Command::Steer {
            case,
            m,
            n,
            phi,
            k_list,
            out,
        } => {
            let c = analysis_case(&case)?;
            let idx = HarmonicIndex::new(m, n)?;
            let mut text = String::from("K,residual\n");
            for &order in &k_list {
                let r = steer_residual(c.f, idx, order, phi)?;
                text.push_str(&format!("{order},{}\n", format_f64(r)));
            }
            emit(out.as_deref(), &text)?;
        }

        Command::Convolve {
            f,
            g,
            case,
            m_max,
            n_max,
            order,
            a,
            eval_grid,
            out,
        } => {
            let defaults = case.as_deref().map(convolution_case).transpose()?;
            let m_max = m_max
                .or(defaults.map(|c| c.m_max))
                .context("--M is required without --case")?;
            let n_max = n_max
                .or(defaults.map(|c| c.n_max))
                .context("--N is required without --case")?;
            let order = order
                .or(defaults.map(|c| c.order))
                .context("--K is required without --case")?;
            let a = a.or(defaults.map(|c| c.a)).unwrap_or(1.0);
            let eval_grid = eval_grid.or(defaults.map(|c| c.eval_grid)).unwrap_or(41);
            let len = (2 * order + 1) as usize;
            let (field_f, field_g) = match (&f, &g, defaults) {
                (Some(pf), Some(pg), _) => {
                    let (ff, fg) = (read_field(pf)?, read_field(pg)?);
                    if ff.radius() != fg.radius() {
                        bail!(
                            "factor radii differ: {} vs {}",
                            ff.radius(),
                            fg.radius()
                        );
                    }
                    (ff, fg)
                }
                (None, None, Some(c)) => {
                    (sample_scaled(c.f, a, len)?, sample_scaled(c.g, a, len)?)
                }
                _ => bail!("convolve needs --f and --g, or --case"),
            };
            let spectrum =
                ffbt::convolution::ffbt_conv_block(&field_f, &field_g, m_max, n_max, order)?;
            let jacobian = spectrum.radius() * spectrum.radius();
            let field = study::synthesize_grid(&spectrum, eval_grid)?;
            write_field(&field, &out)?;
            println!(
                "wrote unified convolution synthesis to {} (a={}; physical f*g = {} x value)",
                out.display(),
                spectrum.radius(),
                format_f64(jacobian)
            );
        }

        Command::Study {
            case,
            k_list,
            m_max,
            n_max,
            a,
            eval_grid,
            out,
            fields_dir,
        } => {
            let passed = study::run_study(study::StudyArgs {
                case,
                k_list,
                m_max,
                n_max,
                a,
                eval_grid,
                out,
                fields_dir,
            })?;
            if !passed {
                std::process::exit(1);
            }
        }

        Command::ConvStudy {
            case,
            k_list,
            m_max,
            n_max,
            out,
        } => {
            let passed = study::run_conv_study(&case, k_list, m_max, n_max, &out)?;
            if !passed {
                std::process::exit(1);
            }
        }

        Command::Oracle {
            op,
            case,
            m,
            n,
            m_max,
            n_max,
            k1,
            k2,
            cutoff,
            x,
            y,
            radial_nodes,
            angular_nodes,
            cartesian_nodes,
        } => {
            let q = QuadratureSpec::new(radial_nodes, angular_nodes, cartesian_nodes)?;
            let value = match op.as_str() {
                "fb-coeff" => {
                    let c = analysis_case(&case)?;
                    let idx = HarmonicIndex::new(
                        m.context("--m required")?,
                        n.context("--n required")?,
                    )?;
                    let a = c.a;
                    fb_coefficient_quadrature(move |u, v| (c.f)(a * u, a * v), idx, &q)
                }
                "fourier-int" => {
                    let c = analysis_case(&case)?;
                    let a = c.a;
                    fourier_integral_quadrature(
                        move |u, v| (c.f)(a * u, a * v),
                        FrequencyIndex::new(k1.context("--k1")?, k2.context("--k2")?),
                        &q,
                    )
                }
                "closed-form" => {
                    let c = analysis_case(&case)?;
                    let idx = HarmonicIndex::new(
                        m.context("--m required")?,
                        n.context("--n required")?,
                    )?;
                    let a = c.a;
                    truncated_closed_form(
                        move |u, v| (c.f)(a * u, a * v),
                        idx,
                        cutoff.context("--cutoff required")?,
                        &q,
                    )?
                }
                "conv" => {
                    let c = convolution_case(&case)?;
                    let ff = ConvFactor {
                        f: &c.f,
                        support_radius: c.f_support,
                        disk_radius: c.f_disk,
                    };
                    let gg = ConvFactor {
                        f: &c.g,
                        support_radius: c.g_support,
                        disk_radius: c.g_disk,
                    };
                    direct_convolution(
                        &ff,
                        &gg,
                        (x.context("--x required")?, y.context("--y required")?),
                        &q,
                    )
                }
                "partial-sum" => {
                    let c = analysis_case(&case)?;
                    let a = c.a;
                    let reference = partial_sum_reference(
                        move |u, v| (c.f)(a * u, a * v),
                        m_max.unwrap_or(c.m_max),
                        n_max.unwrap_or(c.n_max),
                        &q,
                    )?;
                    reference.eval(x.context("--x required")?, y.context("--y required")?)
                }
                other => bail!(
                    "unknown oracle op {other:?} (fb-coeff, fourier-int, closed-form, conv, partial-sum)"
                ),
            };
            print_value(cli.format, &op, value);
        }

        Command::EpsilonPlan {
            eps,
            mode,
            m,
            n,
            m_max,
            n_max,
            c_f,
            d_fg,
            beta_cutoff,
        } => {
            let budget = ErrorBudget {
                c_f,
                d_fg,
                beta_cutoff,
            };
            let plan_mode = match mode.as_str() {
                "single" => PlanMode::Single(HarmonicIndex::new(
                    m.context("--m required for single")?,
                    n.context("--n required for single")?,
                )?),
                "block" => PlanMode::Block {
                    m_max: m_max.context("--M required for block")?,
                    n_max: n_max.context("--N required for block")?,
                },
                "conv" => match (m_max, n_max) {
                    (Some(mm), Some(nn)) => PlanMode::ConvBlock {
                        m_max: mm,
                        n_max: nn,
                    },
                    _ => PlanMode::ConvSingle(HarmonicIndex::new(
                        m.context("--m (or --M/--N) required for conv")?,
                        n.context("--n (or --M/--N) required for conv")?,
                    )?),
                },
                other => bail!("unknown mode {other:?} (single, block, conv)"),
            };
            let plan = plan_order(eps, &budget, plan_mode)?;
            match cli.format {
                Format::Csv => println!("K,L,threshold\n{},{},{}", plan.order, plan.grid, plan.threshold),
                Format::Json => println!(
                    "{{\"K\":{},\"L\":{},\"threshold\":{}}}",
                    plan.order, plan.grid, plan.threshold
                ),
            }
        }
    }
    Ok(())
}

fn load_field(
    input: Option<PathBuf>,
    case: Option<&str>,
    grid: Option<usize>,
) -> Result<SampledField> {
    match (input, case) {
        (Some(path), _) => Ok(read_field(&path)?),
        (None, Some(name)) => {
            let c = analysis_case(name)?;
            let len = grid.context("--grid is required with --case")?;
            Ok(sample_scaled(c.f, c.a, len)?)
        }
        (None, None) => bail!("either --input or --case (with --grid) is required"),
    }
}

fn emit(out: Option<&std::path::Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            println!("wrote {}", path.display());
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn print_value(format: Format, op: &str, value: Complex64) {
    match format {
        Format::Csv => println!("op,re,im\n{op},{},{}", format_f64(value.re), format_f64(value.im)),
        Format::Json => println!(
            "{{\"op\":\"{op}\",\"re\":{},\"im\":{}}}",
            format_f64(value.re),
            format_f64(value.im)
        ),
    }
}
