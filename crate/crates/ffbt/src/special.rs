//! Bessel functions of the first kind of integer order, their positive
//! zeros, the normalized radial functions and the polar harmonics built
//! from them.
//!
//! Evaluation scheme for `J_m(x)` (m >= 0, x >= 0 after reflections):
//!
//! * ascending power series where its terms decay essentially from the
//!   start (small `x`, or `x` small relative to `m`),
//! * Miller backward recurrence normalized with
//!   `J_0 + 2*sum_k J_{2k} = 1` in the midrange and whenever `x <= m`,
//! * Hankel large-argument P/Q expansion for orders 0 and 1 at `x >= 30`,
//! * forward recurrence from `J_0, J_1` for `m >= 2` once `x > m`.
//!
//! Negative order and negative argument reduce through
//! `J_{-m} = (-1)^m J_m` and `J_m(-x) = (-1)^m J_m(x)`.

use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::{OnceLock, RwLock};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Address of one polar-harmonic mode `Psi_{m,n}`.
///
/// `m` is the angular order (any integer), `n >= 1` the radial index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HarmonicIndex {
    pub m: i32,
    pub n: usize,
}

impl HarmonicIndex {
    pub fn new(m: i32, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument(format!(
                "radial index must satisfy n >= 1, got n={n}"
            )));
        }
        Ok(Self { m, n })
    }
}

impl std::fmt::Display for HarmonicIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.m, self.n)
    }
}

/// `J_m(x)` with the argument checked.
pub fn bessel_j(m: i32, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "bessel_j requires a finite argument, got {x}"
        )));
    }
    Ok(jn(m, x))
}

/// Unchecked `J_m(x)`; callers guarantee a finite argument.
pub(crate) fn jn(m: i32, x: f64) -> f64 {
    debug_assert!(x.is_finite());
    let mut sign = 1.0;
    let mu = if m < 0 {
        if m % 2 != 0 {
            sign = -sign;
        }
        m.unsigned_abs()
    } else {
        m as u32
    };
    let xa = if x < 0.0 {
        if mu % 2 == 1 {
            sign = -sign;
        }
        -x
    } else {
        x
    };
    sign * jn_pos(mu, xa)
}

/// `J_m(x)` for m >= 0, x >= 0.
fn jn_pos(m: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    let mf = m as f64;
    // Terms of the ascending series decay quickly in this region; the
    // summation is cancellation-safe.
    let series_cutoff = if m <= 1 {
        8.0
    } else {
        1.8 * (mf + 1.0).sqrt()
    };
    if x <= series_cutoff {
        return series_jm(m, x);
    }
    if m <= 1 {
        if x >= 30.0 {
            hankel_j01(m, x)
        } else {
            miller_jn(m, x)
        }
    } else if x >= 30.0 && x > mf {
        forward_jn(m, x)
    } else {
        miller_jn(m, x)
    }
}

/// Ascending series `sum_j (-1)^j (x/2)^{m+2j} / (j! (m+j)!)`.
fn series_jm(m: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    // t0 = (x/2)^m / m!, built as a product so intermediates stay tame
    let mut term = 1.0;
    for i in 1..=m {
        term *= half / i as f64;
    }
    let mut sum = term;
    let w = -half * half;
    let mut j = 1u32;
    loop {
        term *= w / (j as f64 * (mf_add(m, j)));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) || j > 200 {
            break;
        }
        j += 1;
    }
    sum
}

#[inline]
fn mf_add(m: u32, j: u32) -> f64 {
    (m + j) as f64
}

/// Hankel large-argument expansion for orders 0 and 1, `x >= 30`.
fn hankel_j01(m: u32, x: f64) -> f64 {
    debug_assert!(m <= 1);
    let mu = 4.0 * (m * m) as f64;
    let chi = x - (2 * m + 1) as f64 * FRAC_PI_4;
    let mut p = 1.0;
    let mut q = 0.0;
    // u_j = a_j(m)/x^j with the sign of a_j included; P and Q pick up
    // u_{2k}, u_{2k+1} with an extra (-1)^k.
    let mut u = 1.0;
    let mut prev = f64::INFINITY;
    for j in 1u32..40 {
        let tj = 2.0 * j as f64 - 1.0;
        u *= (mu - tj * tj) / (8.0 * j as f64 * x);
        if u.abs() >= prev {
            break; // asymptotic tail started growing
        }
        prev = u.abs();
        let s = if (j / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if j % 2 == 0 {
            p += s * u;
        } else {
            q += s * u;
        }
        if u.abs() < 1e-18 {
            break;
        }
    }
    (2.0 / (PI * x)).sqrt() * (chi.cos() * p - chi.sin() * q)
}

/// Forward recurrence `J_{k+1} = (2k/x) J_k - J_{k-1}` from `J_0, J_1`;
/// stable while the order stays below `x`.
fn forward_jn(m: u32, x: f64) -> f64 {
    let mut a = hankel_j01(0, x);
    let mut b = hankel_j01(1, x);
    for k in 1..m {
        let next = b * (2.0 * k as f64 / x) - a;
        a = b;
        b = next;
    }
    b
}

/// Miller backward recurrence normalized with `J_0 + 2 sum J_{2k} = 1`.
fn miller_jn(m: u32, x: f64) -> f64 {
    // Margin of 64 orders gives > 2^64 of downward damping before the
    // oscillatory zone, enough to wash out the arbitrary seed.
    let mut start = m.max(x.ceil() as u32) + 64;
    if start % 2 == 1 {
        start += 1;
    }
    let mut jp = 0.0f64; // J_{k+1}, unnormalized
    let mut jc = 1e-154f64; // J_k
    let mut norm = 0.0f64;
    let mut out = 0.0f64;
    let mut k = start as i64;
    while k >= 0 {
        let jm = (2.0 * (k + 1) as f64 / x) * jc - jp; // J_k from J_{k+1}, J_{k+2}
        jp = jc;
        jc = jm;
        // jc now holds J_k
        if k % 2 == 0 {
            norm += if k == 0 { jc } else { 2.0 * jc };
        }
        if k as u32 == m {
            out = jc;
        }
        if jc.abs() > 1e250 {
            jc *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
            out *= 1e-250;
        }
        k -= 1;
    }
    out / norm
}

// ---------------------------------------------------------------------------
// Positive zeros z_{m,n}
// ---------------------------------------------------------------------------

static ZEROS: OnceLock<RwLock<Vec<Vec<f64>>>> = OnceLock::new();

fn zero_table() -> &'static RwLock<Vec<Vec<f64>>> {
    ZEROS.get_or_init(|| RwLock::new(Vec::new()))
}

/// `z_{m,n}`, the n-th positive zero of `J_m` (m >= 0, n >= 1), memoized.
///
/// Stored entries satisfy `|J_m(z_{m,n})| <= 1e-12` and are strictly
/// increasing in `n`; negative orders resolve through `z_{|m|,n}`.
pub fn bessel_zero(m: i32, n: usize) -> Result<f64> {
    if m < 0 {
        return Err(Error::InvalidArgument(format!(
            "bessel_zero requires m >= 0, got m={m}"
        )));
    }
    if n < 1 {
        return Err(Error::InvalidArgument(format!(
            "bessel_zero requires n >= 1, got n={n}"
        )));
    }
    Ok(zero(m as u32, n))
}

/// Memoized `z_{m,n}` lookup; computes and stores missing entries.
pub(crate) fn zero(m: u32, n: usize) -> f64 {
    {
        let table = zero_table().read().unwrap();
        if let Some(row) = table.get(m as usize) {
            if let Some(&z) = row.get(n - 1) {
                return z;
            }
        }
    }
    let mut table = zero_table().write().unwrap();
    if table.len() <= m as usize {
        table.resize_with(m as usize + 1, Vec::new);
    }
    let row = &mut table[m as usize];
    while row.len() < n {
        let prev = row.last().copied();
        let next = next_zero(m, prev, row.len() + 1);
        debug_assert!(jn(m as i32, next).abs() <= 1e-12);
        row.push(next);
    }
    row[n - 1]
}

/// Populate the zero table for all `0 <= m <= m_max`, `1 <= n <= n_max`.
pub fn ensure_zeros(m_max: i32, n_max: usize) -> Result<()> {
    if m_max < 0 || n_max < 1 {
        return Err(Error::InvalidArgument(
            "ensure_zeros requires m_max >= 0 and n_max >= 1".into(),
        ));
    }
    for m in 0..=m_max as u32 {
        zero(m, n_max);
    }
    Ok(())
}

/// Next zero of `J_m` above `prev` (`None` for the first one).
///
/// A sign-change bracket is located by scanning in pi/2 steps (consecutive
/// zeros of `J_m` are at least ~3.1 apart, so none can be skipped); the
/// McMahon guess `(n + m/2 - 1/4) pi - (mu-1)/(8 beta)` seeds Newton when it
/// falls inside the bracket, and every Newton step is safeguarded by
/// bisection on the bracket.
fn next_zero(m: u32, prev: Option<f64>, n: usize) -> f64 {
    let mf = m as f64;
    let mut lo = match prev {
        Some(z) => z + 1e-3,
        // J_m > 0 on (0, z_{m,1}) and z_{m,1} > m
        None => if m == 0 { 0.1 } else { mf },
    };
    let mut flo = jn(m as i32, lo);
    let step = 0.5 * PI;
    let mut hi = lo;
    let mut fhi = flo;
    for _ in 0..10_000 {
        hi = lo.max(hi) + step;
        fhi = jn(m as i32, hi);
        if flo.signum() != fhi.signum() {
            break;
        }
        lo = hi;
        flo = fhi;
    }
    assert!(
        flo.signum() != fhi.signum(),
        "no bracket found for z_{{{m},{n}}}"
    );

    // McMahon expansion as the Newton seed where it is usable
    let mu = 4.0 * mf * mf;
    let beta = (n as f64 + 0.5 * mf - 0.25) * PI;
    let guess = beta - (mu - 1.0) / (8.0 * beta);
    let mut x = if guess > lo && guess < hi {
        guess
    } else {
        0.5 * (lo + hi)
    };

    for _ in 0..100 {
        let f = jn(m as i32, x);
        if f.signum() == flo.signum() {
            lo = x;
        } else {
            hi = x;
        }
        let df = if m == 0 {
            -jn(1, x)
        } else {
            0.5 * (jn(m as i32 - 1, x) - jn(m as i32 + 1, x))
        };
        let newton = x - f / df;
        let next = if df != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let dx = (next - x).abs();
        x = next;
        if dx <= 1e-14 * x.max(1.0) {
            break;
        }
    }
    x
}

// ---------------------------------------------------------------------------
// Normalized radial functions and polar harmonics
// ---------------------------------------------------------------------------

/// Precomputed per-mode radial data: the zero and `1/|J_{m+1}(z)|`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct RadialMode {
    pub z: f64,
    pub inv_norm: f64,
}

pub(crate) fn radial_mode(m: i32, n: usize) -> RadialMode {
    let z = zero(m.unsigned_abs(), n);
    RadialMode {
        z,
        inv_norm: 1.0 / jn(m + 1, z).abs(),
    }
}

/// `J_{m,n}(r) = sqrt(2) J_m(z_{m,n} r) / |J_{m+1}(z_{m,n})|` on `[0,1]`.
pub fn normalized_radial(idx: HarmonicIndex, r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::Domain(format!(
            "normalized_radial expects r in [0,1], got {r}"
        )));
    }
    idx_check(idx)?;
    let mode = radial_mode(idx.m, idx.n);
    Ok(std::f64::consts::SQRT_2 * jn(idx.m, mode.z * r) * mode.inv_norm)
}

/// `Psi_{m,n}(x,y)`: `(2 pi)^{-1/2} e^{i m theta} J_{m,n}(r)` inside the
/// closed unit disk, exactly zero outside.
pub fn polar_harmonic(idx: HarmonicIndex, x: f64, y: f64) -> Result<Complex64> {
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::InvalidArgument(
            "polar_harmonic requires finite coordinates".into(),
        ));
    }
    idx_check(idx)?;
    let r = x.hypot(y);
    if r > 1.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let theta = y.atan2(x);
    let mode = radial_mode(idx.m, idx.n);
    // sqrt(2)/sqrt(2 pi) = 1/sqrt(pi)
    let radial = INV_SQRT_PI * jn(idx.m, mode.z * r) * mode.inv_norm;
    Ok(Complex64::from_polar(1.0, idx.m as f64 * theta) * radial)
}

/// `1/sqrt(pi)`.
pub(crate) const INV_SQRT_PI: f64 = 0.564_189_583_547_756_3;

fn idx_check(idx: HarmonicIndex) -> Result<()> {
    if idx.n < 1 {
        return Err(Error::InvalidArgument(format!(
            "radial index must satisfy n >= 1, got n={}",
            idx.n
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Independent reference: J_0 by its raw power series.
    fn series_j0(x: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        let w = -0.25 * x * x;
        for j in 1..200 {
            term *= w / ((j * j) as f64);
            sum += term;
            if term.abs() < 1e-20 {
                break;
            }
        }
        sum
    }

    /// Independent reference: trapezoid rule on
    /// `J_m(x) = (1/pi) int_0^pi cos(m t - x sin t) dt`
    /// (the integrand extends to a 2 pi-periodic entire function, so the
    /// rule converges super-algebraically once the node count clears x).
    fn integral_jm(m: i32, x: f64) -> f64 {
        let n = 400 + 2 * (x.abs().ceil() as usize) + 2 * m.unsigned_abs() as usize;
        let h = PI / n as f64;
        let mf = m as f64;
        // composite trapezoid on [0, pi]
        let mut s = 0.5 * ((0.0f64).cos() + (mf * PI).cos());
        for i in 1..n {
            let t = i as f64 * h;
            s += (mf * t - x * t.sin()).cos();
        }
        s * h / PI
    }

    #[test]
    fn bessel_j_trivial_values() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(3, 0.0).unwrap(), 0.0);
        // reflection J_{-m} = (-1)^m J_m, m even
        assert_eq!(bessel_j(-2, 1.5).unwrap(), bessel_j(2, 1.5).unwrap());
        assert_eq!(bessel_j(-3, 1.5).unwrap(), -bessel_j(3, 1.5).unwrap());
        assert!(bessel_j(0, f64::NAN).is_err());
        assert!(bessel_j(0, f64::INFINITY).is_err());
    }

    #[test]
    fn first_zero_of_j0_from_series_bisection() {
        // bisect the power series of J_0 on [2,3] to 1e-14
        let (mut lo, mut hi) = (2.0f64, 3.0f64);
        assert!(series_j0(lo) > 0.0 && series_j0(hi) < 0.0);
        while hi - lo > 1e-14 {
            let mid = 0.5 * (lo + hi);
            if series_j0(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let root = 0.5 * (lo + hi);
        assert_abs_diff_eq!(root, 2.404825557695773, epsilon = 1e-12);
        assert!(bessel_j(0, 2.404825557695773).unwrap().abs() <= 1e-12);
        assert_abs_diff_eq!(bessel_zero(0, 1).unwrap(), root, epsilon = 1e-12);
    }

    #[test]
    fn first_zero_of_j1() {
        assert_abs_diff_eq!(bessel_zero(1, 1).unwrap(), 3.831705970207512, epsilon = 1e-12);
    }

    #[test]
    fn zero_ordering_and_arguments() {
        assert!(bessel_zero(0, 2).unwrap() > bessel_zero(0, 1).unwrap());
        assert!(bessel_zero(-1, 1).is_err());
        assert!(bessel_zero(0, 0).is_err());
    }

    #[test]
    fn zero_residuals_and_interlacing() {
        // |J_m(z_{m,n})| <= 1e-12 and z_{m,n} < z_{m+1,n} < z_{m,n+1}
        for m in 0..=20i32 {
            for n in 1..=20usize {
                let z = bessel_zero(m, n).unwrap();
                assert!(
                    bessel_j(m, z).unwrap().abs() <= 1e-12,
                    "residual too large at ({m},{n})"
                );
                if m < 20 {
                    assert!(z < bessel_zero(m + 1, n).unwrap());
                }
                assert!(bessel_zero(m + 1, n).unwrap() < bessel_zero(m, n + 1).unwrap());
            }
        }
    }

    #[test]
    fn matches_integral_representation_across_regimes() {
        // abs error <= 1e-13 for |x| <= 200, |m| <= 64
        let orders = [0, 1, 2, 3, 5, 8, 13, 20, 33, 48, 64];
        let mut worst = 0.0f64;
        for &m in &orders {
            for i in 0..140 {
                // irregular spacing that crosses every dispatch boundary
                let x = 200.0 * ((i as f64 + 0.5) / 140.0).powf(1.3);
                let got = bessel_j(m, x).unwrap();
                let want = integral_jm(m, x);
                worst = worst.max((got - want).abs());
            }
        }
        assert!(worst <= 1e-13, "max |J_m - oracle| = {worst:.3e}");
    }

    #[test]
    fn negative_argument_and_order_consistency() {
        for &(m, x) in &[(2, 7.3), (5, 1.2), (7, 40.0), (0, 11.0)] {
            let j = bessel_j(m, x).unwrap();
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            assert_abs_diff_eq!(bessel_j(m, -x).unwrap(), sign * j, epsilon = 1e-15);
            assert_abs_diff_eq!(bessel_j(-m, x).unwrap(), sign * j, epsilon = 1e-15);
        }
    }

    #[test]
    fn normalized_radial_examples() {
        let idx = HarmonicIndex::new(0, 1).unwrap();
        assert_abs_diff_eq!(normalized_radial(idx, 1.0).unwrap(), 0.0, epsilon = 1e-12);
        let z01 = bessel_zero(0, 1).unwrap();
        let expect = std::f64::consts::SQRT_2 / bessel_j(1, z01).unwrap().abs();
        assert_abs_diff_eq!(normalized_radial(idx, 0.0).unwrap(), expect, epsilon = 1e-13);
        assert!(normalized_radial(idx, 1.5).is_err());
        assert!(normalized_radial(idx, -0.1).is_err());
    }

    #[test]
    fn polar_harmonic_examples() {
        let idx = HarmonicIndex::new(1, 2).unwrap();
        let v = polar_harmonic(idx, 1.5, 0.0).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));

        let idx01 = HarmonicIndex::new(0, 1).unwrap();
        let at0 = polar_harmonic(idx01, 0.0, 0.0).unwrap();
        let z01 = bessel_zero(0, 1).unwrap();
        let expect = (1.0 / (2.0 * PI).sqrt()) * std::f64::consts::SQRT_2
            / bessel_j(1, z01).unwrap().abs();
        assert_abs_diff_eq!(at0.re, expect, epsilon = 1e-13);
        assert_abs_diff_eq!(at0.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn conjugate_symmetry_of_harmonics() {
        // Psi_{-m,n} = (-1)^m conj(Psi_{m,n}) pointwise
        let pts = [(0.3, 0.4), (-0.7, 0.11), (0.05, -0.9), (0.62, 0.62)];
        for m in 0..=6i32 {
            for n in 1..=4usize {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                for &(x, y) in &pts {
                    let plus = polar_harmonic(HarmonicIndex { m, n }, x, y).unwrap();
                    let minus = polar_harmonic(HarmonicIndex { m: -m, n }, x, y).unwrap();
                    assert_abs_diff_eq!(minus.re, sign * plus.conj().re, epsilon = 1e-12);
                    assert_abs_diff_eq!(minus.im, sign * plus.conj().im, epsilon = 1e-12);
                }
            }
        }
    }
}
