//! Forward FFBT coefficients, block spectra, inverse synthesis (iFFBT),
//! trace-form synthesis kernels, scaled-disk variants and steerability
//! diagnostics.

use ndarray::Array2;
use num_complex::Complex64;

use crate::coefficients::{build_folded, k_min_block, trace_product, KernelKind};
use crate::error::{Error, Result};
use crate::sampling::{sample, SampledField};
use crate::special::{radial_mode, HarmonicIndex, RadialMode, INV_SQRT_PI};

/// Point batches above this size make the batch synthesis helper
/// materialize the four-index trace kernel; smaller batches go through the
/// two-stage path.
pub const TRACE_BATCH_CROSSOVER: usize = 64;

/// Block of FFBT coefficients `C^K_{m,n}` for `|m| <= M`, `1 <= n <= N`,
/// with the order `K` and disk radius `a` used to produce it.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    m_max: i32,
    n_max: usize,
    order: i64,
    a: f64,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(m_max: i32, n_max: usize, order: i64, a: f64) -> Result<Self> {
        if m_max < 0 || n_max < 1 {
            return Err(Error::InvalidArgument(
                "spectrum needs M >= 0 and N >= 1".into(),
            ));
        }
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "spectrum radius must be positive, got {a}"
            )));
        }
        let len = (2 * m_max as usize + 1) * n_max;
        Ok(Self {
            m_max,
            n_max,
            order,
            a,
            coeffs: vec![Complex64::new(0.0, 0.0); len],
        })
    }

    #[inline]
    pub fn m_max(&self) -> i32 {
        self.m_max
    }

    #[inline]
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    #[inline]
    pub fn order(&self) -> i64 {
        self.order
    }

    #[inline]
    pub fn radius(&self) -> f64 {
        self.a
    }

    pub(crate) fn set_radius(&mut self, a: f64) {
        self.a = a;
    }

    #[inline]
    fn slot(&self, m: i32, n: usize) -> usize {
        debug_assert!(m.abs() <= self.m_max && (1..=self.n_max).contains(&n));
        ((m + self.m_max) as usize) * self.n_max + (n - 1)
    }

    #[inline]
    pub fn get(&self, m: i32, n: usize) -> Complex64 {
        self.coeffs[self.slot(m, n)]
    }

    pub fn set(&mut self, m: i32, n: usize, value: Complex64) {
        let s = self.slot(m, n);
        self.coeffs[s] = value;
    }

    /// All `(m, n, C^K_{m,n})` triples, m-major.
    pub fn iter(&self) -> impl Iterator<Item = (i32, usize, Complex64)> + '_ {
        let n_max = self.n_max;
        let m_max = self.m_max;
        self.coeffs.iter().enumerate().map(move |(i, c)| {
            let m = (i / n_max) as i32 - m_max;
            let n = i % n_max + 1;
            (m, n, *c)
        })
    }
}

fn grid_check(field: &SampledField, order: i64) -> Result<f64> {
    if order < 1 {
        return Err(Error::InvalidArgument(format!(
            "transform order must satisfy K >= 1, got {order}"
        )));
    }
    let want = (2 * order + 1) as usize;
    if field.len() != want {
        return Err(Error::GridMismatch(format!(
            "field grid is {} but K={order} needs L = 2K+1 = {want}",
            field.len()
        )));
    }
    Ok(field.grid().delta())
}

/// Forward FFBT coefficient
/// `C^K_{m,n}(f) = sum_{|k|_inf <= K} c(k;m,n) f^(k;2K+1)`,
/// computed through the trace form `delta^2 tr(Q(m,n) F^)`.
pub fn ffbt(field: &SampledField, idx: HarmonicIndex, order: i64) -> Result<Complex64> {
    let delta = grid_check(field, order)?;
    let q = build_folded(idx, order, KernelKind::Plain)?;
    Ok(trace_product(&q, field.dft()) * (delta * delta))
}

/// Forward coefficient against a prebuilt folded `Q` matrix (for example
/// one loaded from the on-disk kernel cache).
pub fn ffbt_with_kernel(
    field: &SampledField,
    kernel: &Array2<Complex64>,
    order: i64,
) -> Result<Complex64> {
    let delta = grid_check(field, order)?;
    if kernel.dim() != (field.len(), field.len()) {
        return Err(Error::GridMismatch(format!(
            "kernel is {:?} but the field grid is {}",
            kernel.dim(),
            field.len()
        )));
    }
    Ok(trace_product(kernel, field.dft()) * (delta * delta))
}

/// The folded kernel matrices for every mode of a block, one `KernelKind`.
///
/// Kernels for `-m` are the entrywise conjugates of those for `m`
/// (`c(k;-m,n) = conj c(k;m,n)` and the fold signs are real), so only
/// `m >= 0` is built explicitly.
pub struct KernelSet {
    pub m_max: i32,
    pub n_max: usize,
    pub order: i64,
    pub kind: KernelKind,
    mats: Vec<Array2<Complex64>>, // (m + m_max) * n_max + (n-1)
}

impl KernelSet {
    pub fn build(m_max: i32, n_max: usize, order: i64, kind: KernelKind) -> Result<Self> {
        if m_max < 0 || n_max < 1 {
            return Err(Error::InvalidArgument(
                "kernel set needs M >= 0 and N >= 1".into(),
            ));
        }
        crate::special::ensure_zeros(m_max + 1, n_max)?;
        let nonneg: Vec<(i32, usize)> = (0..=m_max)
            .flat_map(|m| (1..=n_max).map(move |n| (m, n)))
            .collect();
        let built: Vec<Result<Array2<Complex64>>> = crate::par::map(nonneg, |(m, n)| {
            build_folded(HarmonicIndex { m, n }, order, kind)
        });
        let mut by_mode = vec![Array2::zeros((0, 0)); (2 * m_max as usize + 1) * n_max];
        let mut it = built.into_iter();
        for m in 0..=m_max {
            for n in 1..=n_max {
                let q = it.next().expect("mode count")?;
                if m > 0 {
                    let conj = q.mapv(|v| v.conj());
                    by_mode[((-m + m_max) as usize) * n_max + (n - 1)] = conj;
                }
                by_mode[((m + m_max) as usize) * n_max + (n - 1)] = q;
            }
        }
        Ok(Self {
            m_max,
            n_max,
            order,
            kind,
            mats: by_mode,
        })
    }

    #[inline]
    pub fn mat(&self, m: i32, n: usize) -> &Array2<Complex64> {
        &self.mats[((m + self.m_max) as usize) * self.n_max + (n - 1)]
    }
}

/// Block analysis: every `C^K_{m,n}` for `|m| <= M`, `1 <= n <= N`, against
/// one shared DFT of the field. Real fields compute only `m >= 0` and
/// reflect through `C^K_{-m,n} = (-1)^m conj C^K_{m,n}`.
///
/// Emits a warning (not an error) when `K < K[M,N]`: the sums are defined
/// for every K, only the error theorems need the threshold.
pub fn ffbt_block(
    field: &SampledField,
    m_max: i32,
    n_max: usize,
    order: i64,
) -> Result<Spectrum> {
    let delta = grid_check(field, order)?;
    if m_max < 0 || n_max < 1 {
        return Err(Error::InvalidArgument(
            "block analysis needs M >= 0 and N >= 1".into(),
        ));
    }
    let threshold = k_min_block(m_max, n_max)?;
    if order < threshold {
        log::warn!(
            "block analysis at K={order} below K[{m_max},{n_max}]={threshold}; \
             convergence guarantees do not apply"
        );
    }
    crate::special::ensure_zeros(m_max + 1, n_max)?;
    let d2 = delta * delta;
    let hat = field.dft();
    let mut spectrum = Spectrum::new(m_max, n_max, order, field.radius())?;

    let lower = if field.is_real() { 0 } else { -m_max };
    let modes: Vec<(i32, usize)> = (lower..=m_max)
        .flat_map(|m| (1..=n_max).map(move |n| (m, n)))
        .collect();
    let values: Vec<Result<Complex64>> = crate::par::map(modes.clone(), |(m, n)| {
        let q = build_folded(HarmonicIndex { m, n }, order, KernelKind::Plain)?;
        Ok(trace_product(&q, hat) * d2)
    });
    for ((m, n), value) in modes.into_iter().zip(values) {
        spectrum.set(m, n, value?);
    }
    if field.is_real() {
        for m in 1..=m_max {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            for n in 1..=n_max {
                let c = spectrum.get(m, n);
                spectrum.set(-m, n, sign * c.conj());
            }
        }
    }
    Ok(spectrum)
}

/// Radial data for every mode of a block, for fast `Psi` evaluation.
struct HarmonicTable {
    m_max: i32,
    n_max: usize,
    modes: Vec<RadialMode>, // m * n_max + (n-1), m >= 0
}

impl HarmonicTable {
    fn new(m_max: i32, n_max: usize) -> Self {
        let modes = (0..=m_max)
            .flat_map(|m| (1..=n_max).map(move |n| radial_mode(m, n)))
            .collect();
        Self {
            m_max,
            n_max,
            modes,
        }
    }

    /// `Psi_{m,n}(x,y)` for all `0 <= m <= M`, `1 <= n <= N`, as an
    /// `(M+1) x N` table; the caller reflects to negative m.
    fn psi_nonneg(&self, x: f64, y: f64) -> Array2<Complex64> {
        let mut out = Array2::zeros((self.m_max as usize + 1, self.n_max));
        let r = x.hypot(y);
        if r > 1.0 {
            return out;
        }
        let theta = y.atan2(x);
        for m in 0..=self.m_max {
            let phase = Complex64::from_polar(INV_SQRT_PI, m as f64 * theta);
            for n in 1..=self.n_max {
                let mode = self.modes[m as usize * self.n_max + (n - 1)];
                let radial = crate::special::jn(m, mode.z * r) * mode.inv_norm;
                out[(m as usize, n - 1)] = phase * radial;
            }
        }
        out
    }

    /// The full `(2M+1) x N` matrix `P(x,y)` with row `t` holding
    /// `Psi_{t-M, n}(x,y)` (0-based t).
    fn p_matrix(&self, x: f64, y: f64) -> Array2<Complex64> {
        let pos = self.psi_nonneg(x, y);
        let mm = self.m_max as usize;
        let mut p = Array2::zeros((2 * mm + 1, self.n_max));
        for m in 0..=mm {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            for n in 0..self.n_max {
                let v = pos[(m, n)];
                p[(mm + m, n)] = v;
                p[(mm - m, n)] = sign * v.conj();
            }
        }
        p
    }
}

/// Inverse FFBT: the partial sum
/// `S^K_{M,N}(f)(x,y) = sum_{m=-M}^{M} sum_{n=1}^{N} C^K_{m,n} Psi_{m,n}`
/// per point. Points with `|x|_2 > a` synthesize to exactly zero; inside,
/// the spectrum's radius rescales the evaluation point onto the unit disk.
pub fn iffbt(spectrum: &Spectrum, points: &[(f64, f64)]) -> Result<Vec<Complex64>> {
    for &(x, y) in points {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidArgument(
                "synthesis points must be finite".into(),
            ));
        }
    }
    let table = HarmonicTable::new(spectrum.m_max, spectrum.n_max);
    let inv_a = 1.0 / spectrum.radius();
    let values = crate::par::map(points.to_vec(), |(x, y)| {
        eval_partial_sum(spectrum, &table, x * inv_a, y * inv_a)
    });
    Ok(values)
}

fn eval_partial_sum(spectrum: &Spectrum, table: &HarmonicTable, x: f64, y: f64) -> Complex64 {
    if x.hypot(y) > 1.0 {
        return Complex64::new(0.0, 0.0);
    }
    let psi = table.psi_nonneg(x, y);
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 1..=spectrum.n_max {
        acc += spectrum.get(0, n) * psi[(0, n - 1)];
    }
    for m in 1..=spectrum.m_max {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        for n in 1..=spectrum.n_max {
            let v = psi[(m as usize, n - 1)];
            acc += spectrum.get(m, n) * v + spectrum.get(-m, n) * (sign * v.conj());
        }
    }
    acc
}

/// Per-point trace-form synthesis data: the harmonic matrix `P(x,y)` and
/// the contracted kernel `K(x,y)` with
/// `K(x,y)[s,l] = tr( H(l,s,:,:) P(x,y)^T ) = sum_{m,n} Q_{m,n}[s,l] Psi_{m,n}(x,y)`.
pub struct SynthesisKernel {
    pub point: (f64, f64),
    pub m_max: i32,
    pub n_max: usize,
    pub order: i64,
    pub p: Array2<Complex64>,
    pub kmat: Array2<Complex64>,
}

/// Build the per-point synthesis kernel from a mode kernel set.
pub fn synthesis_kernel(kernels: &KernelSet, point: (f64, f64)) -> SynthesisKernel {
    let table = HarmonicTable::new(kernels.m_max, kernels.n_max);
    let p = table.p_matrix(point.0, point.1);
    let l = (2 * kernels.order + 1) as usize;
    let mut kmat = Array2::<Complex64>::zeros((l, l));
    let mm = kernels.m_max;
    for m in -mm..=mm {
        for n in 1..=kernels.n_max {
            let weight = p[((m + mm) as usize, n - 1)];
            if weight == Complex64::new(0.0, 0.0) {
                continue;
            }
            let q = kernels.mat(m, n);
            kmat.zip_mut_with(q, |acc, &qv| *acc += weight * qv);
        }
    }
    SynthesisKernel {
        point,
        m_max: kernels.m_max,
        n_max: kernels.n_max,
        order: kernels.order,
        p,
        kmat,
    }
}

/// Trace-form synthesis at one point:
/// `S^K_{M,N}(f)(x,y) = delta^2 tr( K(x,y) F^ )`.
pub fn iffbt_trace(
    field: &SampledField,
    m_max: i32,
    n_max: usize,
    order: i64,
    point: (f64, f64),
) -> Result<Complex64> {
    let kernels = KernelSet::build(m_max, n_max, order, KernelKind::Plain)?;
    iffbt_trace_with(&kernels, field, point)
}

/// Trace-form synthesis against a prebuilt kernel set.
pub fn iffbt_trace_with(
    kernels: &KernelSet,
    field: &SampledField,
    point: (f64, f64),
) -> Result<Complex64> {
    if kernels.kind != KernelKind::Plain {
        return Err(Error::InvalidArgument(
            "single-field synthesis needs plain kernels".into(),
        ));
    }
    let delta = grid_check(field, kernels.order)?;
    if !point.0.is_finite() || !point.1.is_finite() {
        return Err(Error::InvalidArgument(
            "synthesis points must be finite".into(),
        ));
    }
    let sk = synthesis_kernel(kernels, point);
    Ok(trace_product(&sk.kmat, field.dft()) * (delta * delta))
}

/// Batch synthesis at many points. Batches above
/// [`TRACE_BATCH_CROSSOVER`] materialize the trace kernels once and apply
/// the trace form per point; smaller batches run the two-stage path
/// (block analysis, then the partial sum). Both routes agree to within
/// rounding.
pub fn synthesize_at(
    field: &SampledField,
    m_max: i32,
    n_max: usize,
    order: i64,
    points: &[(f64, f64)],
) -> Result<Vec<Complex64>> {
    if points.len() > TRACE_BATCH_CROSSOVER {
        let kernels = KernelSet::build(m_max, n_max, order, KernelKind::Plain)?;
        let delta = grid_check(field, order)?;
        let d2 = delta * delta;
        let hat = field.dft();
        let table = HarmonicTable::new(m_max, n_max);
        let l = (2 * order + 1) as usize;
        let values = crate::par::map(points.to_vec(), |(x, y)| {
            // contract K(x,y) against F^ without storing it
            let p = table.p_matrix(x, y);
            let mut acc = Complex64::new(0.0, 0.0);
            let mut kr = Array2::<Complex64>::zeros((l, l));
            for m in -m_max..=m_max {
                for n in 1..=n_max {
                    let w = p[((m + m_max) as usize, n - 1)];
                    if w != Complex64::new(0.0, 0.0) {
                        kr.zip_mut_with(kernels.mat(m, n), |a, &qv| *a += w * qv);
                    }
                }
            }
            acc += trace_product(&kr, hat);
            acc * d2
        });
        Ok(values)
    } else {
        let spectrum = ffbt_block(field, m_max, n_max, order)?;
        iffbt(&spectrum, points)
    }
}

/// Scaled-disk analysis: the spectrum of `f~(x) = f(a x)` with the radius
/// recorded, so synthesis evaluates `S^K(f~)(x/a)`.
pub fn analyze_scaled<F>(
    f: F,
    a: f64,
    m_max: i32,
    n_max: usize,
    order: i64,
) -> Result<Spectrum>
where
    F: Fn(f64, f64) -> Complex64,
{
    let len = (2 * order + 1) as usize;
    let field = crate::sampling::sample_scaled(f, a, len)?;
    ffbt_block(&field, m_max, n_max, order)
}

/// Steerability residual `|C^K_{m,n}(R_phi f) - e^{i m phi} C^K_{m,n}(f)|`.
///
/// The rotated function is resampled analytically (`R_phi f(x) = f(R_phi x)`),
/// not interpolated, so the residual measures only the transform.
pub fn steer_residual<F>(
    f: F,
    idx: HarmonicIndex,
    order: i64,
    phi: f64,
) -> Result<f64>
where
    F: Fn(f64, f64) -> Complex64,
{
    if !phi.is_finite() {
        return Err(Error::InvalidArgument("phi must be finite".into()));
    }
    let len = (2 * order + 1) as usize;
    let plain = sample(&f, len)?;
    let (c, s) = (phi.cos(), phi.sin());
    let rotated = sample(|x, y| f(c * x - s * y, s * x + c * y), len)?;

    let q = build_folded(idx, order, KernelKind::Plain)?;
    let delta = plain.grid().delta();
    let d2 = delta * delta;
    let c_plain = trace_product(&q, plain.dft()) * d2;
    let c_rot = trace_product(&q, rotated.dft()) * d2;
    Ok((c_rot - Complex64::from_polar(1.0, idx.m as f64 * phi) * c_plain).norm())
}
