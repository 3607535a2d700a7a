//! Unified FFBT / iFFBT of convolutions of functions supported in the
//! half disk, computed from the two factors' DFTs without ever sampling
//! the convolution integral.

use ndarray::Array2;
use num_complex::Complex64;

use crate::coefficients::{build_folded, trace_product, KernelKind};
use crate::error::{Error, Result};
use crate::fourier::{finite_fourier_disk, FrequencyIndex};
use crate::oracle::{direct_convolution_quadrature, QuadratureSpec};
use crate::sampling::{sample, SampledField};
use crate::special::HarmonicIndex;
use crate::transform::{iffbt, KernelSet, Spectrum};

fn conv_grid_check(field_f: &SampledField, field_g: &SampledField, order: i64) -> Result<f64> {
    if order < 1 {
        return Err(Error::InvalidArgument(format!(
            "convolution order must satisfy K >= 1, got {order}"
        )));
    }
    let want = (2 * order + 1) as usize;
    if field_f.len() != want || field_g.len() != want {
        return Err(Error::GridMismatch(format!(
            "factor grids are {} and {} but K={order} needs L = {want}",
            field_f.len(),
            field_g.len()
        )));
    }
    Ok(field_f.grid().delta())
}

/// Warn when a factor carries visible mass outside the half disk; the
/// unified transforms presume supports in B_{1/2}. Indicators touching the
/// boundary are legitimate inputs, so this never errors.
fn warn_support(field: &SampledField, name: &str) {
    let g = field.grid();
    let limit = 0.5 + g.delta();
    for ((i, j), v) in field.values().indexed_iter() {
        if v.norm() > 1e-12 {
            let (x, y) = (g.node(i), g.node(j));
            if x.hypot(y) > limit {
                log::warn!(
                    "{name} has |value| > 1e-12 at ({x:.3},{y:.3}), outside B_1/2; \
                     unified convolution accuracy degrades"
                );
                return;
            }
        }
    }
}

/// The Hadamard product of the two factors' DFT matrices.
pub fn hadamard_dft(field_f: &SampledField, field_g: &SampledField) -> Array2<Complex64> {
    let mut prod = field_f.dft().clone();
    prod.zip_mut_with(field_g.dft(), |a, &b| *a *= b);
    prod
}

/// Unified convolution FFBT
/// `C^K_{m,n}[f,g] = sum_{|k|_inf <= K} c(k;m,n) f^(k;L) g^(k;L)`,
/// computed through the trace form `delta^4 tr( Qx(m,n) (F^ . G^) )`.
pub fn ffbt_conv(
    field_f: &SampledField,
    field_g: &SampledField,
    idx: HarmonicIndex,
    order: i64,
) -> Result<Complex64> {
    let delta = conv_grid_check(field_f, field_g, order)?;
    warn_support(field_f, "first factor");
    warn_support(field_g, "second factor");
    let q = build_folded(idx, order, KernelKind::Cross)?;
    let had = hadamard_dft(field_f, field_g);
    Ok(trace_product(&q, &had) * delta.powi(4))
}

/// Every unified coefficient for `|m| <= M`, `1 <= n <= N` against one
/// shared Hadamard product.
pub fn ffbt_conv_block(
    field_f: &SampledField,
    field_g: &SampledField,
    m_max: i32,
    n_max: usize,
    order: i64,
) -> Result<Spectrum> {
    let delta = conv_grid_check(field_f, field_g, order)?;
    if m_max < 0 || n_max < 1 {
        return Err(Error::InvalidArgument(
            "block convolution needs M >= 0 and N >= 1".into(),
        ));
    }
    warn_support(field_f, "first factor");
    warn_support(field_g, "second factor");
    let threshold = crate::coefficients::k_min_block(m_max, n_max)?;
    if order < threshold {
        log::warn!(
            "unified convolution at K={order} below K[{m_max},{n_max}]={threshold}; \
             convergence guarantees do not apply"
        );
    }
    let had = hadamard_dft(field_f, field_g);
    let d4 = delta.powi(4);
    let kernels = KernelSet::build(m_max, n_max, order, KernelKind::Cross)?;
    let mut spectrum = Spectrum::new(m_max, n_max, order, field_f.radius())?;
    let modes: Vec<(i32, usize)> = (-m_max..=m_max)
        .flat_map(|m| (1..=n_max).map(move |n| (m, n)))
        .collect();
    let values = crate::par::map(modes.clone(), |(m, n)| {
        trace_product(kernels.mat(m, n), &had) * d4
    });
    for ((m, n), v) in modes.into_iter().zip(values) {
        spectrum.set(m, n, v);
    }
    Ok(spectrum)
}

/// Unified inverse transform: per-point partial sums
/// `S^K_{M,N}[f,g](x,y) = sum_{m,n} C^K_{m,n}[f,g] Psi_{m,n}(x,y)`
/// through the two-stage path.
pub fn iffbt_conv(
    field_f: &SampledField,
    field_g: &SampledField,
    m_max: i32,
    n_max: usize,
    order: i64,
    points: &[(f64, f64)],
) -> Result<Vec<Complex64>> {
    let spectrum = ffbt_conv_block(field_f, field_g, m_max, n_max, order)?;
    iffbt(&spectrum, points)
}

/// Trace-form unified synthesis at one point:
/// `S^K_{M,N}[f,g](x,y) = delta^4 tr( Kx(x,y) (F^ . G^) )`.
pub fn iffbt_conv_trace(
    field_f: &SampledField,
    field_g: &SampledField,
    m_max: i32,
    n_max: usize,
    order: i64,
    point: (f64, f64),
) -> Result<Complex64> {
    let kernels = KernelSet::build(m_max, n_max, order, KernelKind::Cross)?;
    iffbt_conv_trace_with(&kernels, field_f, field_g, point)
}

/// Trace-form unified synthesis against a prebuilt cross kernel set.
pub fn iffbt_conv_trace_with(
    kernels: &KernelSet,
    field_f: &SampledField,
    field_g: &SampledField,
    point: (f64, f64),
) -> Result<Complex64> {
    if kernels.kind != KernelKind::Cross {
        return Err(Error::InvalidArgument(
            "unified synthesis needs cross kernels".into(),
        ));
    }
    let delta = conv_grid_check(field_f, field_g, kernels.order)?;
    if !point.0.is_finite() || !point.1.is_finite() {
        return Err(Error::InvalidArgument(
            "synthesis points must be finite".into(),
        ));
    }
    let had = hadamard_dft(field_f, field_g);
    let sk = crate::transform::synthesis_kernel(kernels, point);
    Ok(trace_product(&sk.kmat, &had) * delta.powi(4))
}

/// Result of a scaled convolution synthesis. `values[i]` holds
/// `S^{a,K}_{M,N}[f,g](x_i) = S^K_{M,N}[f~,g~](x_i / a)`, which
/// approximates `(f~ * g~)(x_i / a) = (f * g)(x_i) / a^2`; multiply by
/// `jacobian = a^2` to recover the physical convolution.
pub struct ScaledConvolution {
    pub values: Vec<Complex64>,
    pub a: f64,
    pub jacobian: f64,
}

/// Scaled-disk unified convolution: both factors (supported in `B_{a/2}`)
/// are rescaled onto the half disk and synthesized at `x/a`.
pub fn conv_scaled<F, G>(
    f: F,
    g: G,
    a: f64,
    m_max: i32,
    n_max: usize,
    order: i64,
    points: &[(f64, f64)],
) -> Result<ScaledConvolution>
where
    F: Fn(f64, f64) -> Complex64,
    G: Fn(f64, f64) -> Complex64,
{
    let len = (2 * order + 1) as usize;
    let field_f = crate::sampling::sample_scaled(f, a, len)?;
    let field_g = crate::sampling::sample_scaled(g, a, len)?;
    let mut spectrum = ffbt_conv_block(&field_f, &field_g, m_max, n_max, order)?;
    // the spectrum lives on the unit disk; record a so synthesis rescales
    spectrum.set_radius(a);
    let values = iffbt(&spectrum, points)?;
    Ok(ScaledConvolution {
        values,
        a,
        jacobian: a * a,
    })
}

/// `| (f*g)^(k;2K+1) - f^(k;2K+1) g^(k;2K+1) |`, the spectral
/// factorization defect of the finite transforms, for convergence studies.
///
/// The convolution samples on the left come from the quadrature oracle;
/// both factors are expected supported in `B_{1/2}` (the quadrature for
/// `f * g` integrates over that half disk).
pub fn fft_product_error<F, G>(
    f: F,
    g: G,
    k: FrequencyIndex,
    order: i64,
    q: &QuadratureSpec,
) -> Result<f64>
where
    F: Fn(f64, f64) -> Complex64 + Sync,
    G: Fn(f64, f64) -> Complex64 + Sync,
{
    if k.norm_sup() > order {
        return Err(Error::OutOfRegime(format!(
            "|k|_inf = {} exceeds K = {order}",
            k.norm_sup()
        )));
    }
    let len = (2 * order + 1) as usize;
    let field_f = sample(&f, len)?;
    let field_g = sample(&g, len)?;
    let right = finite_fourier_disk(&field_f, k) * finite_fourier_disk(&field_g, k);

    // sample f*g on the same grid by quadrature
    let grid = field_f.grid();
    let nodes: Vec<(usize, usize)> = (0..len)
        .flat_map(|i| (0..len).map(move |j| (i, j)))
        .collect();
    let samples = crate::par::map(nodes, |(i, j)| {
        direct_convolution_quadrature(&f, 0.5, &g, (grid.node(i), grid.node(j)), q)
    });
    let mut values = Array2::zeros((len, len));
    for (idx, v) in samples.into_iter().enumerate() {
        values[(idx / len, idx % len)] = v;
    }
    let conv_field = SampledField::from_values(values, 1.0)?;
    let left = finite_fourier_disk(&conv_field, k);
    Ok((left - right).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::FrequencyIndex;
    use ndarray::Array2 as A2;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn half_disk(x: f64, y: f64) -> Complex64 {
        if x * x + y * y <= 0.25 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    fn small_bump(rho: f64) -> impl Fn(f64, f64) -> Complex64 + Copy {
        move |x: f64, y: f64| {
            let t = (x * x + y * y) / (rho * rho);
            if t < 1.0 {
                Complex64::new((1.0 - 1.0 / (1.0 - t)).exp(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }
    }

    fn random_field(l: usize, seed: u64) -> SampledField {
        let mut rng = StdRng::seed_from_u64(seed);
        let vals = A2::from_shape_fn((l, l), |_| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        SampledField::from_values(vals, 1.0).unwrap()
    }

    /// Raw double sum of the unified transform definition.
    fn ffbt_conv_raw(
        ff: &SampledField,
        fg: &SampledField,
        idx: HarmonicIndex,
        order: i64,
    ) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k1 in -order..=order {
            for k2 in -order..=order {
                let k = FrequencyIndex::new(k1, k2);
                let c = crate::coefficients::coeff_c(k, idx).unwrap();
                acc += c * finite_fourier_disk(ff, k) * finite_fourier_disk(fg, k);
            }
        }
        acc
    }

    #[test]
    fn zero_factor_gives_zero() {
        let order = 3i64;
        let l = (2 * order + 1) as usize;
        let f = sample(half_disk, l).unwrap();
        let zero = sample(|_, _| Complex64::new(0.0, 0.0), l).unwrap();
        let c = ffbt_conv(&f, &zero, HarmonicIndex { m: 0, n: 1 }, order).unwrap();
        assert_eq!(c, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn raw_sum_equals_trace_path() {
        for seed in 0..8u64 {
            let order = 2 + (seed % 4) as i64; // K <= 5
            let l = (2 * order + 1) as usize;
            let ff = random_field(l, 2 * seed);
            let fg = random_field(l, 2 * seed + 1);
            for &(m, n) in &[(0i32, 1usize), (2, 1), (-1, 2)] {
                let idx = HarmonicIndex { m, n };
                let fast = ffbt_conv(&ff, &fg, idx, order).unwrap();
                let raw = ffbt_conv_raw(&ff, &fg, idx, order);
                assert!(
                    (fast - raw).norm() <= 1e-10 * raw.norm().max(1.0),
                    "conv trace vs raw, seed {seed}, mode ({m},{n})"
                );
            }
        }
    }

    #[test]
    fn factor_order_is_symmetric() {
        let order = 3i64;
        let l = (2 * order + 1) as usize;
        let ff = random_field(l, 11);
        let fg = random_field(l, 12);
        let idx = HarmonicIndex { m: 1, n: 1 };
        let ab = ffbt_conv(&ff, &fg, idx, order).unwrap();
        let ba = ffbt_conv(&fg, &ff, idx, order).unwrap();
        assert_eq!(ab, ba); // entrywise product commutes exactly
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let f7 = sample(half_disk, 7).unwrap();
        let f9 = sample(half_disk, 9).unwrap();
        assert!(matches!(
            ffbt_conv(&f7, &f9, HarmonicIndex { m: 0, n: 1 }, 3),
            Err(Error::GridMismatch(_))
        ));
        assert!(matches!(
            ffbt_conv(&f7, &f7, HarmonicIndex { m: 0, n: 1 }, 4),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn autocorrelation_of_half_disk_peaks_at_its_area() {
        // S^K_{M,N}[f,g](0,0) -> area(B_1/2) = pi/4
        let order = 15i64;
        let l = (2 * order + 1) as usize;
        let f = sample(half_disk, l).unwrap();
        let vals = iffbt_conv(&f, &f, 10, 10, order, &[(0.0, 0.0), (1.2, 0.3)]).unwrap();
        let target = PI / 4.0;
        assert!(
            (vals[0].re - target).abs() <= 0.05 * target,
            "S(0,0) = {} vs pi/4 = {target}",
            vals[0].re
        );
        assert!(vals[0].im.abs() <= 1e-10);
        // outside the unit disk the partial sum vanishes identically
        assert_eq!(vals[1], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn conv_trace_point_form_matches_two_stage() {
        let order = 3i64;
        let l = (2 * order + 1) as usize;
        let ff = random_field(l, 21);
        let fg = random_field(l, 22);
        for &pt in &[(0.2, 0.1), (-0.4, 0.33), (0.0, 0.0)] {
            let staged = iffbt_conv(&ff, &fg, 2, 2, order, &[pt]).unwrap()[0];
            let traced = iffbt_conv_trace(&ff, &fg, 2, 2, order, pt).unwrap();
            assert!(
                (staged - traced).norm() <= 1e-10 * staged.norm().max(1.0),
                "unified paths disagree at {pt:?}"
            );
        }
    }

    #[test]
    fn scaled_convolution_reduces_and_scales() {
        // a = 1 reduces to the plain unified transform
        let order = 4i64;
        let l = (2 * order + 1) as usize;
        let b = small_bump(0.4);
        let plain_f = sample(b, l).unwrap();
        let pts = [(0.15, -0.2), (0.0, 0.4)];
        let plain = iffbt_conv(&plain_f, &plain_f, 2, 2, order, &pts).unwrap();
        let scaled = conv_scaled(b, b, 1.0, 2, 2, order, &pts).unwrap();
        assert_eq!(scaled.jacobian, 1.0);
        for (p, s) in plain.iter().zip(&scaled.values) {
            assert_eq!(p, s);
        }
    }

    #[test]
    fn disk_pair_support_is_respected() {
        // f = chi_{B_1}, g = chi_{B_2}, a = 6: supp(f*g) lies in B_3, so the
        // synthesis is tiny beyond radius 3 (and exactly 0 beyond radius 6)
        let chi = |r: f64| {
            move |x: f64, y: f64| {
                if x * x + y * y <= r * r {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
        };
        let pts = [(3.4, 1.2), (0.0, 0.0), (6.4, 0.0)];
        let out = conv_scaled(chi(1.0), chi(2.0), 6.0, 8, 8, 12, &pts).unwrap();
        assert_eq!(out.jacobian, 36.0);
        // physical value at the origin: area of B_1 = pi
        let physical = out.values[1].re * out.jacobian;
        assert!(
            (physical - PI).abs() <= 0.15 * PI,
            "recovered (f*g)(0) = {physical}"
        );
        // beyond the support of f*g the (Gibbs-contaminated) sum stays small
        assert!(out.values[0].norm() * out.jacobian <= 0.15 * PI);
        // beyond B_a exactly zero
        assert_eq!(out.values[2], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn fft_product_error_examples() {
        let q = QuadratureSpec::new(64, 128, 8).unwrap();
        let zero = |_: f64, _: f64| Complex64::new(0.0, 0.0);
        let b = small_bump(0.4);
        let e = fft_product_error(zero, b, FrequencyIndex::new(1, 0), 4, &q).unwrap();
        assert!(e <= 1e-14);

        assert!(matches!(
            fft_product_error(b, b, FrequencyIndex::new(9, 0), 8, &q),
            Err(Error::OutOfRegime(_))
        ));

        // k = (0,0): |delta^2 sum(f*g) - delta^4 (sum f)(sum g)|
        let order = 4i64;
        let l = (2 * order + 1) as usize;
        let err = fft_product_error(b, b, FrequencyIndex::new(0, 0), order, &q).unwrap();
        let field = sample(b, l).unwrap();
        let d = field.grid().delta();
        let sum_f: Complex64 = field.values().iter().sum();
        let grid = field.grid();
        let mut sum_conv = Complex64::new(0.0, 0.0);
        for i in 0..l {
            for j in 0..l {
                sum_conv +=
                    direct_convolution_quadrature(b, 0.5, b, (grid.node(i), grid.node(j)), &q);
            }
        }
        let unfolded = (sum_conv * d * d - sum_f * sum_f * d.powi(4)).norm();
        assert!((err - unfolded).abs() <= 1e-12 * unfolded.max(1.0));
    }

    #[test]
    fn fft_product_error_decays_with_order() {
        let q = QuadratureSpec::new(48, 96, 8).unwrap();
        let b = small_bump(0.4);
        let k = FrequencyIndex::new(1, 0);
        let mut errs = Vec::new();
        for &order in &[4i64, 8, 16] {
            errs.push(fft_product_error(b, b, k, order, &q).unwrap());
        }
        assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
        let bounded: Vec<f64> = errs.iter().zip([4.0, 8.0, 16.0]).map(|(e, k)| e * k).collect();
        assert!(
            bounded.iter().cloned().fold(0.0f64, f64::max) <= 10.0 * bounded[0].max(1e-12),
            "K*err grows: {bounded:?}"
        );
    }
}
