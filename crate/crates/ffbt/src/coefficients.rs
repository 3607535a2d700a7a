//! The transform kernel `c(k;m,n)`, its symmetries and summability
//! diagnostics, the order thresholds `K_{m,n}` / `K[M,N]`, and the folded
//! kernel matrices `Q` and `Qx`.

use ndarray::Array2;
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fourier::FrequencyIndex;
use crate::special::{jn, zero, HarmonicIndex};

/// Relative guard for `|pi^2 |k|^2 - z^2|`; below it the kernel value is
/// numerically meaningless and the operation errors out.
const RESONANCE_GUARD: f64 = 1e-9;

/// Landau's uniform bound `|J_v(x)| <= B_LANDAU * x^{-1/3}` (all v >= 0,
/// x > 0), used for the summability tail estimate.
const B_LANDAU: f64 = 0.785_746_870_4;

/// `i^m` for any integer `m`.
#[inline]
fn i_pow(m: i32) -> Complex64 {
    match m.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// The kernel value `c(k;m,n)`:
///
/// `sqrt(pi) (-1)^n i^m z_{m,n} J_m(pi|k|_2) e^{-i m Phi(k)}
///  / (2 (pi^2 |k|_2^2 - z_{m,n}^2))`
///
/// for `m >= 0`, times `(-1)^m` for `m < 0`. `Phi(k) = atan2(k2, k1)`,
/// with `Phi((0,0)) := 0` fixed for reproducibility.
pub fn coeff_c(k: FrequencyIndex, idx: HarmonicIndex) -> Result<Complex64> {
    if idx.n < 1 {
        return Err(Error::InvalidArgument(format!(
            "coeff_c requires n >= 1, got n={}",
            idx.n
        )));
    }
    let z = zero(idx.m.unsigned_abs(), idx.n);
    let knorm = k.norm2();
    let denom = PI * PI * knorm * knorm - z * z;
    if denom.abs() < RESONANCE_GUARD * z * z {
        return Err(Error::NearResonance {
            k1: k.k1,
            k2: k.k2,
            m: idx.m,
            n: idx.n,
        });
    }
    // atan2(0,0) = 0 in IEEE, which realizes the Phi((0,0)) := 0 convention
    let phi = (k.k2 as f64).atan2(k.k1 as f64);
    let sign_n = if idx.n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let sign_m = if idx.m < 0 && idx.m.rem_euclid(2) == 1 {
        -1.0
    } else {
        1.0
    };
    let magnitude = PI.sqrt() * sign_n * sign_m * z * jn(idx.m, PI * knorm) / (2.0 * denom);
    Ok(i_pow(idx.m) * Complex64::from_polar(1.0, -(idx.m as f64) * phi) * magnitude)
}

/// `K_{m,n} = ceil(z_{|m|,n} / pi)`, the order threshold of the mode.
pub fn k_min(idx: HarmonicIndex) -> Result<i64> {
    if idx.n < 1 {
        return Err(Error::InvalidArgument(format!(
            "k_min requires n >= 1, got n={}",
            idx.n
        )));
    }
    Ok((zero(idx.m.unsigned_abs(), idx.n) / PI).ceil() as i64)
}

/// `K[M,N] = max { K_{m,n} : 0 <= m <= M, 1 <= n <= N }`.
pub fn k_min_block(m_max: i32, n_max: usize) -> Result<i64> {
    if m_max < 0 || n_max < 1 {
        return Err(Error::InvalidArgument(
            "k_min_block requires M >= 0 and N >= 1".into(),
        ));
    }
    // z_{m,n} increases in both m and n, so the maximum sits at (M, N)
    k_min(HarmonicIndex { m: m_max, n: n_max })
}

/// Tail constant `alpha_{m,n} = sqrt(pi) K^2 z / (pi^2 K^2 - z^2)` with
/// `K = K_{m,n}`; `|c(k;m,n)| <= alpha_{m,n}/K^2` for `|k|_inf > K >= K_{m,n}`.
pub fn alpha(idx: HarmonicIndex) -> Result<f64> {
    let z = zero(idx.m.unsigned_abs(), idx.n);
    let kmn = k_min(idx)? as f64;
    Ok(PI.sqrt() * kmn * kmn * z / (PI * PI * kmn * kmn - z * z))
}

/// Truncated kernel mass `sum_{|k|_inf <= cutoff} |c(k;m,n)|` together with
/// an analytic bound on the discarded tail.
///
/// The tail bound combines `|c(k)| <= alpha_{m,n} |J_m(pi|k|_2)| / (2|k|_2^2)`
/// with Landau's `|J_m(x)| <= 0.785747 x^{-1/3}` and the shell-count
/// majorant `sum_{|k|_inf > c} |k|_2^{-7/3} <= 24 c^{-1/3}`.
pub fn beta_partial(idx: HarmonicIndex, cutoff: i64) -> Result<(f64, f64)> {
    let threshold = k_min(idx)?;
    if cutoff < threshold {
        return Err(Error::InvalidArgument(format!(
            "beta_partial cutoff {cutoff} is below K_{{m,n}} = {threshold}"
        )));
    }
    let mut partial = 0.0;
    for k1 in -cutoff..=cutoff {
        for k2 in -cutoff..=cutoff {
            partial += coeff_c(FrequencyIndex::new(k1, k2), idx)?.norm();
        }
    }
    let tail = 12.0 * B_LANDAU * PI.powf(-1.0 / 3.0) * alpha(idx)? * (cutoff as f64).powf(-1.0 / 3.0);
    Ok((partial, tail))
}

/// `gamma_{m,n}` surrogate: `max(alpha, beta_partial + tail_bound)`.
pub fn gamma(idx: HarmonicIndex, cutoff: i64) -> Result<f64> {
    let a = alpha(idx)?;
    let (partial, tail) = beta_partial(idx, cutoff)?;
    Ok(a.max(partial + tail))
}

/// User-facing constants for the epsilon-driven order planning.
///
/// `c_f` (single-function analyses) and `d_fg` (convolution pairs) are
/// properties of the unknown inputs the library cannot estimate soundly;
/// callers supply them. `beta_cutoff` controls the gamma surrogate.
#[derive(Clone, Copy, Debug)]
pub struct ErrorBudget {
    pub c_f: Option<f64>,
    pub d_fg: Option<f64>,
    pub beta_cutoff: i64,
}

impl Default for ErrorBudget {
    fn default() -> Self {
        Self {
            c_f: None,
            d_fg: None,
            beta_cutoff: 64,
        }
    }
}

/// `D[M,N] = sum_{m=-M..M} sum_{n=1..N} gamma_{m,n} / |J_{m+1}(z_{m,n})|`
/// (the theorem-proof form, no extra 1/sqrt(2) prefactor).
pub fn d_block(m_max: i32, n_max: usize, beta_cutoff: i64) -> Result<f64> {
    if m_max < 0 || n_max < 1 {
        return Err(Error::InvalidArgument(
            "d_block requires M >= 0 and N >= 1".into(),
        ));
    }
    let mut total = 0.0;
    for m in 0..=m_max {
        // gamma and |J_{m+1}(z)| are even in m, so +-m contribute equally
        let weight = if m == 0 { 1.0 } else { 2.0 };
        for n in 1..=n_max {
            let idx = HarmonicIndex { m, n };
            let z = zero(m as u32, n);
            let cutoff = beta_cutoff.max(k_min(idx)?);
            total += weight * gamma(idx, cutoff)? / jn(m + 1, z).abs();
        }
    }
    Ok(total)
}

/// What an epsilon-driven order plan is for.
#[derive(Clone, Copy, Debug)]
pub enum PlanMode {
    /// One coefficient `C^K_{m,n}(f)`; needs `c_f`.
    Single(HarmonicIndex),
    /// A uniform block synthesis `S^K_{M,N}(f)`; needs `c_f`.
    Block { m_max: i32, n_max: usize },
    /// One unified convolution coefficient `C^K_{m,n}[f,g]`; needs `d_fg`.
    ConvSingle(HarmonicIndex),
    /// A unified convolution synthesis; needs `d_fg`.
    ConvBlock { m_max: i32, n_max: usize },
}

/// Recommended order and grid from an epsilon plan.
#[derive(Clone, Copy, Debug)]
pub struct OrderPlan {
    /// `K = ceil(max(constant / eps, threshold))`.
    pub order: i64,
    /// `L = 2K + 1`.
    pub grid: usize,
    /// The mode/block threshold (`K_{m,n}` or `K[M,N]`).
    pub threshold: i64,
    /// The numerator `2 c gamma` (single) or `2 c D[M,N]` (block).
    pub constant: f64,
}

/// Pick `K` so the matching error bound drops below `eps`:
/// `K = ceil(max(2 c_f gamma_{m,n}/eps, K_{m,n}))` for a single mode,
/// `K = ceil(max(2 c_f D[M,N]/eps, K[M,N]))` for a block, with `d_{f,g}`
/// in place of `c_f` for convolutions.
pub fn plan_order(eps: f64, budget: &ErrorBudget, mode: PlanMode) -> Result<OrderPlan> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "target accuracy must be positive, got {eps}"
        )));
    }
    let c_f = || {
        budget.c_f.ok_or_else(|| {
            Error::MissingConstant(
                "this plan needs c_f = max(96 |grad f|_inf / pi, |f|_A); \
                 supply it from known properties of f"
                    .into(),
            )
        })
    };
    let d_fg = || {
        budget.d_fg.ok_or_else(|| {
            Error::MissingConstant(
                "this plan needs d_{f,g} = max(kappa* c_{f,g}, 2 c_{f*g}); \
                 supply it from known properties of f and g"
                    .into(),
            )
        })
    };
    let (constant, threshold) = match mode {
        PlanMode::Single(idx) => {
            let g = gamma(idx, budget.beta_cutoff.max(k_min(idx)?))?;
            (2.0 * c_f()? * g, k_min(idx)?)
        }
        PlanMode::Block { m_max, n_max } => {
            let d = d_block(m_max, n_max, budget.beta_cutoff)?;
            (2.0 * c_f()? * d, k_min_block(m_max, n_max)?)
        }
        PlanMode::ConvSingle(idx) => {
            let g = gamma(idx, budget.beta_cutoff.max(k_min(idx)?))?;
            (2.0 * d_fg()? * g, k_min(idx)?)
        }
        PlanMode::ConvBlock { m_max, n_max } => {
            let d = d_block(m_max, n_max, budget.beta_cutoff)?;
            (2.0 * d_fg()? * d, k_min_block(m_max, n_max)?)
        }
    };
    let order = (constant / eps).max(threshold as f64).ceil() as i64;
    Ok(OrderPlan {
        order,
        grid: (2 * order + 1) as usize,
        threshold,
        constant,
    })
}

/// Which folded matrix a builder produces: `Plain` is the alternating-sign
/// `Q` of the single-field trace form, `Cross` the sign-free `Qx` of the
/// convolution (delta^4 Hadamard) path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    Plain,
    Cross,
}

/// Precomputed `c(k;m,n)` values folded into the `L x L` trace-form
/// matrices for one mode at order `K` (`L = 2K+1`).
///
/// Entry `q[(s, l)]` (0-based) equals `Q(m,n; l+1, s+1)` of the four-case
/// table, i.e. the matrices are stored so that
/// `C^K_{m,n}(f) = delta^2 tr(q . F^)` directly.
#[derive(Clone, Debug)]
pub struct CoefficientKernel {
    pub idx: HarmonicIndex,
    pub order: i64,
    pub q: Array2<Complex64>,
    pub q_cross: Array2<Complex64>,
}

/// Map a 0-based matrix index to its signed frequency: `0..=K` stay as
/// `0..=K`, `K+1..=2K` fold to `-K..=-1`.
#[inline]
pub(crate) fn index_to_freq(i: usize, order: i64) -> i64 {
    let i = i as i64;
    if i <= order {
        i
    } else {
        i - 2 * order - 1
    }
}

/// Build one folded matrix; the four sign cases of the `Q` table collapse
/// to `(-1)^{k1+k2}` under the index-to-frequency map, and `Qx` carries no
/// signs at all.
pub(crate) fn build_folded(
    idx: HarmonicIndex,
    order: i64,
    kind: KernelKind,
) -> Result<Array2<Complex64>> {
    if order < 1 {
        return Err(Error::InvalidArgument(format!(
            "kernel order must satisfy K >= 1, got {order}"
        )));
    }
    let l = (2 * order + 1) as usize;
    let mut q = Array2::zeros((l, l));
    for s in 0..l {
        let k2 = index_to_freq(s, order);
        for col in 0..l {
            let k1 = index_to_freq(col, order);
            let c = coeff_c(FrequencyIndex::new(k1, k2), idx)?;
            let v = match kind {
                KernelKind::Plain => {
                    if (k1 + k2).rem_euclid(2) == 0 {
                        c
                    } else {
                        -c
                    }
                }
                KernelKind::Cross => c,
            };
            q[(s, col)] = v;
        }
    }
    Ok(q)
}

/// Build both folded matrices (`Q` and `Qx`) for one mode.
pub fn build_kernel(idx: HarmonicIndex, order: i64) -> Result<CoefficientKernel> {
    Ok(CoefficientKernel {
        idx,
        order,
        q: build_folded(idx, order, KernelKind::Plain)?,
        q_cross: build_folded(idx, order, KernelKind::Cross)?,
    })
}

/// `sum_{s} sum_{l} a[(s,l)] b[(l,s)]` — the trace of the matrix product
/// without forming it.
pub(crate) fn trace_product(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Complex64 {
    debug_assert_eq!(a.dim(), b.dim());
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for s in 0..n {
        for l in 0..n {
            acc += a[(s, l)] * b[(l, s)];
        }
    }
    acc
}
