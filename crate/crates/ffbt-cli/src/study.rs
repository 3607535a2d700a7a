//! Convergence studies: per-order error metrics against the quadrature
//! oracles, synthesized grids as field files, and built-in monotonicity
//! checks that drive the exit status.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ndarray::Array2;
use num_complex::Complex64;

use ffbt::cases::{analysis_case, convolution_case, ConvolutionCase};
use ffbt::io::{format_f64, write_field};
use ffbt::oracle::{
    direct_convolution_quadrature, lens_area, partial_sum_reference, QuadratureSpec,
};
use ffbt::sampling::{sample_scaled, SampledField};
use ffbt::transform::{ffbt_block, iffbt, Spectrum};
use ffbt::make_grid;

pub struct StudyArgs {
    pub case: String,
    pub k_list: Option<Vec<i64>>,
    pub m_max: Option<i32>,
    pub n_max: Option<usize>,
    pub a: Option<f64>,
    pub eval_grid: Option<usize>,
    pub out: PathBuf,
    pub fields_dir: Option<PathBuf>,
}

/// Evaluate a spectrum on the uniform `L' x L'` grid of its square
/// `Omega_a` and package the values as a field (radius metadata `a`).
pub fn synthesize_grid(spectrum: &Spectrum, eval_grid: usize) -> Result<SampledField> {
    let grid = make_grid(eval_grid)?;
    let a = spectrum.radius();
    let points: Vec<(f64, f64)> = (0..eval_grid)
        .flat_map(|i| (0..eval_grid).map(move |j| (a * grid.node(i), a * grid.node(j))))
        .collect();
    let values = iffbt(spectrum, &points)?;
    let table = Array2::from_shape_vec((eval_grid, eval_grid), values).expect("shape");
    Ok(SampledField::from_values(table, a)?)
}

fn validate_k_list(k_list: &[i64]) -> Result<()> {
    if k_list.is_empty() {
        bail!("the K list must not be empty");
    }
    if k_list.windows(2).any(|w| w[1] <= w[0]) {
        bail!("the K list must be strictly increasing, got {k_list:?}");
    }
    Ok(())
}

fn non_increasing(metric: &[f64]) -> bool {
    metric.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12))
}

/// Run a single-function convergence study. Returns whether the
/// monotonicity checks passed.
pub fn run_study(args: StudyArgs) -> Result<bool> {
    let case = analysis_case(&args.case)?;
    let m_max = args.m_max.unwrap_or(case.m_max);
    let n_max = args.n_max.unwrap_or(case.n_max);
    let a = args.a.unwrap_or(case.a);
    let eval_grid = args.eval_grid.unwrap_or(case.eval_grid);
    let k_list = args.k_list.unwrap_or_else(|| vec![case.order]);
    validate_k_list(&k_list)?;

    let fields_dir = args
        .fields_dir
        .unwrap_or_else(|| args.out.with_extension("fields"));
    fs::create_dir_all(&fields_dir)
        .with_context(|| format!("creating {}", fields_dir.display()))?;

    // K-independent oracle: the partial sum S_{M,N} of the rescaled f
    let q = QuadratureSpec::default();
    let f = case.f;
    let f_scaled = move |u: f64, v: f64| f(a * u, a * v);
    let reference = partial_sum_reference(f_scaled, m_max, n_max, &q)?;

    let unit = make_grid(eval_grid)?;
    let unit_points: Vec<(f64, f64)> = (0..eval_grid)
        .flat_map(|i| (0..eval_grid).map(move |j| (unit.node(i), unit.node(j))))
        .collect();
    let reference_values: Vec<Complex64> = unit_points
        .iter()
        .map(|&(x, y)| reference.eval(x, y))
        .collect();

    let delta_eval = 2.0 / eval_grid as f64;
    let mut csv = String::from("K,max_abs_err,mode_err\n");
    let mut assert_metric = Vec::new();
    for &order in &k_list {
        let field = sample_scaled(case.f, a, (2 * order + 1) as usize)?;
        let spectrum = ffbt_block(&field, m_max, n_max, order)?;
        let values = iffbt(
            &spectrum,
            &unit_points
                .iter()
                .map(|&(x, y)| (a * x, a * y))
                .collect::<Vec<_>>(),
        )?;
        let mut sup = 0.0f64;
        let mut l2_sq = 0.0f64;
        for (v, want) in values.iter().zip(&reference_values) {
            let d = (v - want).norm();
            sup = sup.max(d);
            l2_sq += d * d;
        }
        let l2 = (l2_sq * delta_eval * delta_eval).sqrt();
        let mode_err = spectrum
            .iter()
            .map(|(m, n, c)| (c - reference.coefficient(m, n)).norm())
            .fold(0.0f64, f64::max);
        csv.push_str(&format!(
            "{order},{},{}\n",
            format_f64(sup),
            format_f64(mode_err)
        ));
        assert_metric.push(if case.indicator { l2 } else { sup });

        let out_field = synthesize_grid(&spectrum, eval_grid)?;
        let path = fields_dir.join(format!("{}_K{order}.json", case.name));
        write_field(&out_field, &path)?;
        println!(
            "K={order}: sup_err={sup:.3e} mode_err={mode_err:.3e}{}",
            if case.indicator {
                format!(" l2_err={l2:.3e}")
            } else {
                String::new()
            }
        );
    }
    fs::write(&args.out, csv).with_context(|| format!("writing {}", args.out.display()))?;

    let passed = non_increasing(&assert_metric);
    println!(
        "study {}: {} (metric: {}); report {}, grids {}",
        case.name,
        if passed { "PASS" } else { "FAIL" },
        if case.indicator { "l2-grid" } else { "sup" },
        args.out.display(),
        fields_dir.display()
    );
    Ok(passed)
}

/// Sample the rescaled convolution `(f~ * g~)(y) = a^-2 (f*g)(a y)` on the
/// `L x L` unit grid: the lens closed form for centered-disk pairs, plain
/// quadrature otherwise.
fn sample_scaled_convolution(
    case: &ConvolutionCase,
    len: usize,
    q: &QuadratureSpec,
) -> Result<SampledField> {
    let a = case.a;
    let grid = make_grid(len)?;
    let inv_a2 = 1.0 / (a * a);
    let mut values = Array2::zeros((len, len));
    if let (Some(r), Some(s)) = (case.f_disk, case.g_disk) {
        for i in 0..len {
            for j in 0..len {
                let d = (a * grid.node(i)).hypot(a * grid.node(j));
                values[(i, j)] = Complex64::new(lens_area(r, s, d) * inv_a2, 0.0);
            }
        }
    } else {
        let nodes: Vec<(usize, usize)> = (0..len)
            .flat_map(|i| (0..len).map(move |j| (i, j)))
            .collect();
        let f = case.f;
        let g = case.g;
        let support = case.f_support;
        let samples: Vec<Complex64> = nodes
            .iter()
            .map(|&(i, j)| {
                direct_convolution_quadrature(
                    f,
                    support,
                    g,
                    (a * grid.node(i), a * grid.node(j)),
                    q,
                ) * inv_a2
            })
            .collect();
        for ((i, j), v) in nodes.into_iter().zip(samples) {
            values[(i, j)] = v;
        }
    }
    Ok(SampledField::from_values(values, a)?)
}

/// Unified-vs-sampled convolution gaps per mode over a K list. Returns
/// whether the max-gap sequence is non-increasing.
pub fn run_conv_study(
    name: &str,
    k_list: Option<Vec<i64>>,
    m_max: Option<i32>,
    n_max: Option<usize>,
    out: &Path,
) -> Result<bool> {
    let case = convolution_case(name)?;
    let m_max = m_max.unwrap_or(case.m_max);
    let n_max = n_max.unwrap_or(case.n_max);
    let k_list = k_list.unwrap_or_else(|| vec![case.order]);
    validate_k_list(&k_list)?;
    // reduced rule: the smooth factors need far fewer nodes than the disk
    // oracles, and the grid sweep multiplies the cost
    let q = QuadratureSpec::new(96, 192, 32)?;

    let mut csv = String::from("K,mode,m,n,gap\n");
    let mut max_gaps = Vec::new();
    for &order in &k_list {
        let len = (2 * order + 1) as usize;
        let field_f = sample_scaled(case.f, case.a, len)?;
        let field_g = sample_scaled(case.g, case.a, len)?;
        let unified = ffbt::convolution::ffbt_conv_block(&field_f, &field_g, m_max, n_max, order)?;
        let conv_field = sample_scaled_convolution(case, len, &q)?;
        let sampled = ffbt_block(&conv_field, m_max, n_max, order)?;
        let mut max_gap = 0.0f64;
        for (m, n, c) in unified.iter() {
            let gap = (c - sampled.get(m, n)).norm();
            max_gap = max_gap.max(gap);
            csv.push_str(&format!("{order},coeff,{m},{n},{}\n", format_f64(gap)));
        }
        max_gaps.push(max_gap);
        println!("K={order}: max coefficient gap {max_gap:.3e}");
    }
    fs::write(out, csv).with_context(|| format!("writing {}", out.display()))?;
    let passed = non_increasing(&max_gaps);
    println!(
        "conv-study {}: {}; report {}",
        case.name,
        if passed { "PASS" } else { "FAIL" },
        out.display()
    );
    Ok(passed)
}
