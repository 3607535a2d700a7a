//! Slow, trustworthy reference implementations of the continuous
//! quantities the fast paths approximate: Fourier-Bessel coefficients,
//! Fourier integrals, convolutions and partial sums, all by quadrature.
//!
//! These routines stay off the fast path and are allowed to be orders of
//! magnitude slower. Radial integrals use Gauss-Legendre (the integrand
//! carries the `r` weight and Bessel oscillation), angular integrals use
//! the uniform trapezoid rule, which is spectrally accurate for the
//! 2 pi-periodic integrands.

use ndarray::Array2;
use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use crate::coefficients::coeff_c;
use crate::error::{Error, Result};
use crate::fourier::FrequencyIndex;
use crate::special::{polar_harmonic, HarmonicIndex};

/// Node counts for the quadrature oracles.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureSpec {
    /// Gauss-Legendre nodes on `[0,1]` for radial integrals.
    pub radial_nodes: usize,
    /// Uniform trapezoid nodes on [0, 2 pi) for angular integrals.
    pub angular_nodes: usize,
    /// Gauss-Legendre nodes per axis for integrals over the square.
    pub cartesian_nodes: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            radial_nodes: 256,
            angular_nodes: 512,
            cartesian_nodes: 256,
        }
    }
}

impl QuadratureSpec {
    pub fn new(radial_nodes: usize, angular_nodes: usize, cartesian_nodes: usize) -> Result<Self> {
        if radial_nodes < 8 || angular_nodes < 8 || cartesian_nodes < 8 {
            return Err(Error::InvalidArgument(
                "quadrature node counts must be >= 8".into(),
            ));
        }
        Ok(Self {
            radial_nodes,
            angular_nodes,
            cartesian_nodes,
        })
    }

    /// The same spec with every node count doubled (self-consistency checks).
    pub fn doubled(&self) -> Self {
        Self {
            radial_nodes: 2 * self.radial_nodes,
            angular_nodes: 2 * self.angular_nodes,
            cartesian_nodes: 2 * self.cartesian_nodes,
        }
    }
}

// ---------------------------------------------------------------------------
// Gauss-Legendre rule
// ---------------------------------------------------------------------------

/// Nodes and weights of the n-point Gauss-Legendre rule on `[-1,1]`,
/// computed by Newton iteration on the Legendre polynomial and memoized.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    type Rule = (Vec<f64>, Vec<f64>);
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().unwrap().get(&n) {
        return rule.clone();
    }
    let rule = compute_gauss_legendre(n);
    cache.lock().unwrap().insert(n, rule.clone());
    rule
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-style initial guess for the i-th root (descending)
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n and P_n' by the three-term recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() <= 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss-Legendre rule mapped to [lo, hi].
pub(crate) fn gauss_legendre_on(n: usize, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let c = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    (
        x.iter().map(|t| mid + c * t).collect(),
        w.iter().map(|v| c * v).collect(),
    )
}

// ---------------------------------------------------------------------------
// Disk quadratures
// ---------------------------------------------------------------------------

/// Tensor polar quadrature of `int_0^{2pi} int_0^1 g(r, theta) r dr dtheta`.
fn polar_quadrature<G>(g: G, q: &QuadratureSpec) -> Complex64
where
    G: Fn(f64, f64) -> Complex64,
{
    let (rn, rw) = gauss_legendre_on(q.radial_nodes, 0.0, 1.0);
    let dtheta = 2.0 * PI / q.angular_nodes as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..q.angular_nodes {
        let theta = j as f64 * dtheta;
        let mut radial = Complex64::new(0.0, 0.0);
        for (r, w) in rn.iter().zip(&rw) {
            radial += g(*r, theta) * (w * r);
        }
        acc += radial;
    }
    acc * dtheta
}

/// Fourier-Bessel coefficient `C_{m,n}(f)` by tensor quadrature of
/// `int int f conj(Psi_{m,n}) r dr dtheta` over the unit disk.
pub fn fb_coefficient_quadrature<F>(f: F, idx: HarmonicIndex, q: &QuadratureSpec) -> Complex64
where
    F: Fn(f64, f64) -> Complex64,
{
    let mode = crate::special::radial_mode(idx.m, idx.n);
    let inv_sqrt_2pi = 1.0 / (2.0 * PI).sqrt();
    polar_quadrature(
        |r, theta| {
            let (x, y) = (r * theta.cos(), r * theta.sin());
            let radial = std::f64::consts::SQRT_2 * crate::special::jn(idx.m, mode.z * r) * mode.inv_norm;
            let conj_psi = Complex64::from_polar(inv_sqrt_2pi * radial, -(idx.m as f64) * theta);
            f(x, y) * conj_psi
        },
        q,
    )
}

/// Fourier integral `f^(k)` of a disk-supported function, in the polar form
/// `int_0^{2pi} int_0^1 f(r,theta) e^{-pi i r (k1 cos theta + k2 sin theta)} r dr dtheta`.
pub fn fourier_integral_quadrature<F>(f: F, k: FrequencyIndex, q: &QuadratureSpec) -> Complex64
where
    F: Fn(f64, f64) -> Complex64,
{
    polar_quadrature(
        |r, theta| {
            let (x, y) = (r * theta.cos(), r * theta.sin());
            let phase = -PI * r * (k.k1 as f64 * theta.cos() + k.k2 as f64 * theta.sin());
            f(x, y) * Complex64::from_polar(1.0, phase)
        },
        q,
    )
}

/// All Fourier integrals `f^(k)` for `|k|_inf <= cutoff` at once.
///
/// Same integral as [`fourier_integral_quadrature`] computed over the
/// square with a tensor Gauss-Legendre rule, exploiting that the phase
/// `e^{-pi i (k1 x + k2 y)}` separates: one pass contracts the x-axis
/// against every `k1`, a second pass the y-axis against every `k2`.
/// Entry `[(cutoff + k1, cutoff + k2)]` holds `f^(k1, k2)`.
pub fn fourier_integral_table<F>(f: F, cutoff: i64, q: &QuadratureSpec) -> Array2<Complex64>
where
    F: Fn(f64, f64) -> Complex64,
{
    let n = q.cartesian_nodes;
    let (xs, ws) = gauss_legendre_on(n, -1.0, 1.0);
    let side = (2 * cutoff + 1) as usize;

    // g[k1_idx][j] = sum_i w_i f(x_i, y_j) e^{-pi i k1 x_i}
    let mut g = Array2::<Complex64>::zeros((side, n));
    for (&x, &wx) in xs.iter().zip(&ws) {
        let row: Vec<Complex64> = (0..n).map(|j| f(x, xs[j]) * wx).collect();
        for (ki, gk) in g.rows_mut().into_iter().enumerate() {
            let k1 = ki as i64 - cutoff;
            let e = Complex64::from_polar(1.0, -PI * k1 as f64 * x);
            let gk = gk.into_slice().expect("row-major");
            for (j, v) in row.iter().enumerate() {
                gk[j] += v * e;
            }
        }
    }
    let mut out = Array2::<Complex64>::zeros((side, side));
    for ki in 0..side {
        for kj in 0..side {
            let k2 = kj as i64 - cutoff;
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, (&y, &wy)) in xs.iter().zip(&ws).enumerate() {
                acc += g[(ki, j)] * wy * Complex64::from_polar(1.0, -PI * k2 as f64 * y);
            }
            out[(ki, kj)] = acc;
        }
    }
    out
}

/// Truncation of the closed-form series
/// `C_{m,n}(f) = sum_k c(k;m,n) f^(k)` to `|k|_inf <= cutoff`, with the
/// Fourier integrals evaluated by quadrature. Bridges the coefficient
/// kernel against the direct disk quadrature.
pub fn truncated_closed_form<F>(
    f: F,
    idx: HarmonicIndex,
    cutoff: i64,
    q: &QuadratureSpec,
) -> Result<Complex64>
where
    F: Fn(f64, f64) -> Complex64,
{
    let threshold = crate::coefficients::k_min(idx)?;
    if cutoff < threshold {
        return Err(Error::InvalidArgument(format!(
            "cutoff {cutoff} below K_{{m,n}} = {threshold}"
        )));
    }
    let table = fourier_integral_table(f, cutoff, q);
    truncated_closed_form_from_table(&table, idx, cutoff)
}

/// Same contraction with a precomputed Fourier-integral table (lets one
/// table serve several modes).
pub fn truncated_closed_form_from_table(
    table: &Array2<Complex64>,
    idx: HarmonicIndex,
    cutoff: i64,
) -> Result<Complex64> {
    let side = (2 * cutoff + 1) as usize;
    if table.dim() != (side, side) {
        return Err(Error::InvalidArgument(format!(
            "table size {:?} does not match cutoff {cutoff}",
            table.dim()
        )));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for k1 in -cutoff..=cutoff {
        for k2 in -cutoff..=cutoff {
            let c = coeff_c(FrequencyIndex::new(k1, k2), idx)?;
            acc += c * table[((cutoff + k1) as usize, (cutoff + k2) as usize)];
        }
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Convolution oracle
// ---------------------------------------------------------------------------

/// One factor of a convolution as the oracle sees it: the function, the
/// radius of a disk containing its support, and an optional marker that the
/// factor is exactly the indicator of a centered disk.
pub struct ConvFactor<'a> {
    pub f: &'a dyn Fn(f64, f64) -> Complex64,
    pub support_radius: f64,
    pub disk_radius: Option<f64>,
}

impl<'a> ConvFactor<'a> {
    pub fn general(f: &'a dyn Fn(f64, f64) -> Complex64, support_radius: f64) -> Self {
        Self {
            f,
            support_radius,
            disk_radius: None,
        }
    }

    /// The indicator of the centered disk of radius `r`.
    pub fn disk(f: &'a dyn Fn(f64, f64) -> Complex64, r: f64) -> Self {
        Self {
            f,
            support_radius: r,
            disk_radius: Some(r),
        }
    }
}

/// Area of the intersection of two disks with radii `r`, `s` whose centers
/// are `d` apart (the lens closed form).
pub fn lens_area(r: f64, s: f64, d: f64) -> f64 {
    if d >= r + s {
        return 0.0;
    }
    if d <= (r - s).abs() {
        let t = r.min(s);
        return PI * t * t;
    }
    let c1 = (d * d + r * r - s * s) / (2.0 * d * r);
    let c2 = (d * d + s * s - r * r) / (2.0 * d * s);
    let tri = 0.5
        * ((-d + r + s) * (d + r - s) * (d - r + s) * (d + r + s))
            .max(0.0)
            .sqrt();
    r * r * c1.clamp(-1.0, 1.0).acos() + s * s * c2.clamp(-1.0, 1.0).acos() - tri
}

/// `(f * g)(x)` by 2D quadrature over the support of `f`, in polar form
/// (Gauss-Legendre radially, trapezoid angularly). `radial_nodes` /
/// `angular_nodes` of the quadrature spec control the rule.
pub fn direct_convolution_quadrature<F, G>(
    f: F,
    f_support: f64,
    g: G,
    x: (f64, f64),
    q: &QuadratureSpec,
) -> Complex64
where
    F: Fn(f64, f64) -> Complex64,
    G: Fn(f64, f64) -> Complex64,
{
    let (rn, rw) = gauss_legendre_on(q.radial_nodes, 0.0, f_support);
    let dtheta = 2.0 * PI / q.angular_nodes as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..q.angular_nodes {
        let theta = j as f64 * dtheta;
        let (ct, st) = (theta.cos(), theta.sin());
        let mut radial = Complex64::new(0.0, 0.0);
        for (r, w) in rn.iter().zip(&rw) {
            let (yx, yy) = (r * ct, r * st);
            radial += f(yx, yy) * g(x.0 - yx, x.1 - yy) * (w * r);
        }
        acc += radial;
    }
    acc * dtheta
}

/// `(f * g)(x)`; centered-disk indicator pairs take the analytic lens-area
/// closed form, everything else the quadrature path.
pub fn direct_convolution(
    f: &ConvFactor<'_>,
    g: &ConvFactor<'_>,
    x: (f64, f64),
    q: &QuadratureSpec,
) -> Complex64 {
    if let (Some(r), Some(s)) = (f.disk_radius, g.disk_radius) {
        let d = x.0.hypot(x.1);
        return Complex64::new(lens_area(r, s, d), 0.0);
    }
    direct_convolution_quadrature(f.f, f.support_radius, g.f, x, q)
}

// ---------------------------------------------------------------------------
// Partial-sum reference
// ---------------------------------------------------------------------------

/// Evaluator of the Fourier-Bessel partial sum `S_{M,N}(f)` with
/// coefficients obtained by quadrature.
pub struct PartialSumReference {
    m_max: i32,
    n_max: usize,
    coeffs: Vec<Complex64>, // (m + M) * N + (n-1)
}

impl PartialSumReference {
    pub fn coefficient(&self, m: i32, n: usize) -> Complex64 {
        self.coeffs[((m + self.m_max) as usize) * self.n_max + (n - 1)]
    }

    /// `S_{M,N}(f)(x,y)`; zero outside the closed unit disk.
    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in -self.m_max..=self.m_max {
            for n in 1..=self.n_max {
                let psi = polar_harmonic(HarmonicIndex { m, n }, x, y).expect("finite point");
                acc += self.coefficient(m, n) * psi;
            }
        }
        acc
    }
}

/// Build the `S_{M,N}(f)` evaluator from quadrature coefficients.
pub fn partial_sum_reference<F>(
    f: F,
    m_max: i32,
    n_max: usize,
    q: &QuadratureSpec,
) -> Result<PartialSumReference>
where
    F: Fn(f64, f64) -> Complex64 + Sync,
{
    if m_max < 0 || n_max < 1 {
        return Err(Error::InvalidArgument(
            "partial_sum_reference requires M >= 0 and N >= 1".into(),
        ));
    }
    let modes: Vec<(i32, usize)> = (-m_max..=m_max)
        .flat_map(|m| (1..=n_max).map(move |n| (m, n)))
        .collect();
    let coeffs = crate::par::map(modes, |(m, n)| {
        fb_coefficient_quadrature(&f, HarmonicIndex { m, n }, q)
    });
    Ok(PartialSumReference {
        m_max,
        n_max,
        coeffs,
    })
}
