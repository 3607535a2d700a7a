//! Unnormalized 2D DFT, finite Fourier transforms `f^(k;L)` on disks, and
//! the 1D/2D finite Fourier coefficients.

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::sampling::SampledField;

/// Integer frequency pair `k = (k1, k2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FrequencyIndex {
    pub k1: i64,
    pub k2: i64,
}

impl FrequencyIndex {
    pub fn new(k1: i64, k2: i64) -> Self {
        Self { k1, k2 }
    }

    #[inline]
    pub fn norm_sup(&self) -> i64 {
        self.k1.abs().max(self.k2.abs())
    }

    #[inline]
    pub fn norm2(&self) -> f64 {
        ((self.k1 * self.k1 + self.k2 * self.k2) as f64).sqrt()
    }
}

/// `tau_L`: any integer mapped into `[0, L-1]` by the nonnegative modulus,
/// so `tau_L(-1) = L-1`.
#[inline]
pub fn tau(k: i64, len: usize) -> usize {
    k.rem_euclid(len as i64) as usize
}

/// Unnormalized forward DFT
/// `A^(l,s) = sum_{k,j} A(k,j) w^{(k)(l)} w^{(j)(s)}`, `w = e^{-2 pi i /L}`
/// (0-based indices). Row index pairs with the first exponent.
pub fn dft2(a: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    if a.nrows() != a.ncols() {
        return Err(Error::InvalidArgument(format!(
            "dft2 needs a square table, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(dft2_unchecked(a))
}

pub(crate) fn dft2_unchecked(a: &Array2<Complex64>) -> Array2<Complex64> {
    let l = a.nrows();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(l);

    let mut work: Vec<Complex64> = a.iter().copied().collect(); // row-major
    for r in 0..l {
        fft.process(&mut work[r * l..(r + 1) * l]);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); l];
    for c in 0..l {
        for r in 0..l {
            col[r] = work[r * l + c];
        }
        fft.process(&mut col);
        for r in 0..l {
            work[r * l + c] = col[r];
        }
    }
    Array2::from_shape_vec((l, l), work).expect("shape preserved")
}

/// Finite Fourier transform of a sampled field at integer frequency `k`:
/// `delta^2 sum_{i,j} f(x_i,x_j) e^{-pi i (k1 x_i + k2 x_j)}`, computed
/// through the folding identity
/// `f^(k;L) = delta^2 (-1)^{k1+k2} F^(tau(k1), tau(k2))`
/// from the field's cached DFT.
pub fn finite_fourier_disk(field: &SampledField, k: FrequencyIndex) -> Complex64 {
    let l = field.len();
    let delta = field.grid().delta();
    let hat = field.dft();
    let sign = if (k.k1 + k.k2).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    delta * delta * sign * hat[(tau(k.k1, l), tau(k.k2, l))]
}

/// 1D finite Fourier coefficient
/// `u^[k;L] = (1/L) sum_i u(x_i) e^{-pi i k x_i}`.
pub fn finite_fourier_coeff_1d<F>(u: F, k: i64, len: usize) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let delta = 2.0 / len as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..len {
        let x = -1.0 + i as f64 * delta;
        acc += u(x) * Complex64::from_polar(1.0, -PI * k as f64 * x);
    }
    acc / len as f64
}

/// 2D finite Fourier coefficient
/// `U^[k;L] = (1/L^2) sum_{i,j} U(x_i,x_j) e^{-pi i (k1 x_i + k2 x_j)}`.
pub fn finite_fourier_coeff_2d<F>(u: F, k: FrequencyIndex, len: usize) -> Complex64
where
    F: Fn(f64, f64) -> Complex64,
{
    let delta = 2.0 / len as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..len {
        let x = -1.0 + i as f64 * delta;
        let ex = Complex64::from_polar(1.0, -PI * k.k1 as f64 * x);
        for j in 0..len {
            let y = -1.0 + j as f64 * delta;
            let ey = Complex64::from_polar(1.0, -PI * k.k2 as f64 * y);
            acc += u(x, y) * ex * ey;
        }
    }
    acc / (len * len) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::sample;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_table(l: usize, seed: u64) -> Array2<Complex64> {
        let mut rng = StdRng::seed_from_u64(seed);
        Array2::from_shape_fn((l, l), |_| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    /// Direct O(L^4) evaluation of the defining double sum.
    fn dft2_direct(a: &Array2<Complex64>) -> Array2<Complex64> {
        let l = a.nrows();
        Array2::from_shape_fn((l, l), |(p, q)| {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..l {
                for j in 0..l {
                    let ph = -2.0 * PI * ((i * p) as f64 + 0.0) / l as f64
                        - 2.0 * PI * (j * q) as f64 / l as f64;
                    acc += a[(i, j)] * Complex64::from_polar(1.0, ph);
                }
            }
            acc
        })
    }

    /// Direct evaluation of the finite Fourier transform definition,
    /// without the folding identity.
    fn finite_fourier_direct(field: &SampledField, k: FrequencyIndex) -> Complex64 {
        let g = field.grid();
        let d = g.delta();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..g.len() {
            for j in 0..g.len() {
                let ph = -PI * (k.k1 as f64 * g.node(i) + k.k2 as f64 * g.node(j));
                acc += field.values()[(i, j)] * Complex64::from_polar(1.0, ph);
            }
        }
        acc * d * d
    }

    #[test]
    fn dft_of_constants_and_delta() {
        let ones = Array2::from_elem((4, 4), Complex64::new(1.0, 0.0));
        let hat = dft2(&ones).unwrap();
        assert_abs_diff_eq!(hat[(0, 0)].re, 16.0, epsilon = 1e-12);
        for (idx, v) in hat.indexed_iter() {
            if idx != (0, 0) {
                assert_abs_diff_eq!(v.norm(), 0.0, epsilon = 1e-12);
            }
        }

        let mut delta = Array2::zeros((5, 5));
        delta[(0, 0)] = Complex64::new(1.0, 0.0);
        let hat = dft2(&delta).unwrap();
        for v in hat.iter() {
            assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-13);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-13);
        }

        assert!(dft2(&Array2::zeros((2, 3))).is_err());
    }

    #[test]
    fn dft_matches_direct_double_sum() {
        for &l in &[8usize, 16] {
            let a = random_table(l, 7 + l as u64);
            let fast = dft2(&a).unwrap();
            let slow = dft2_direct(&a);
            let scale = slow.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
            for (f, s) in fast.iter().zip(slow.iter()) {
                assert!((f - s).norm() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn folding_identity_equals_definition() {
        let field = sample(
            |x, y| Complex64::new((3.0 * x).sin() + y, x * y),
            9,
        )
        .unwrap();
        let k = FrequencyIndex::new(3, -2);
        let via_fold = finite_fourier_disk(&field, k);
        let direct = finite_fourier_direct(&field, k);
        assert!((via_fold - direct).norm() <= 1e-12 * direct.norm().max(1.0));

        // k = (0,0): delta^2 * sum of all samples
        let k0 = FrequencyIndex::new(0, 0);
        let sum: Complex64 = field.values().iter().sum();
        let d = field.grid().delta();
        assert!((finite_fourier_disk(&field, k0) - sum * d * d).norm() <= 1e-12);
    }

    #[test]
    fn real_field_conjugation() {
        let field = sample(|x, y| Complex64::new(x * x - y, 0.0), 7).unwrap();
        for &(k1, k2) in &[(1i64, 2i64), (0, 3), (-2, 2), (3, -3)] {
            let plus = finite_fourier_disk(&field, FrequencyIndex::new(k1, k2));
            let minus = finite_fourier_disk(&field, FrequencyIndex::new(-k1, -k2));
            assert!((plus.conj() - minus).norm() <= 1e-12);
        }
    }

    #[test]
    fn trig_exactness_lemma() {
        // u(x) = e^{pi i x}: coefficient 1 at k=1, 0 at k=0, on L=3
        let u = |x: f64| Complex64::from_polar(1.0, PI * x);
        let c1 = finite_fourier_coeff_1d(u, 1, 3);
        assert!((c1 - Complex64::new(1.0, 0.0)).norm() <= 1e-14);
        let c0 = finite_fourier_coeff_1d(u, 0, 3);
        assert!(c0.norm() <= 1e-14);
    }

    #[test]
    fn riemann_sum_error_bound_1d() {
        // u(x) = x^2 (periodic-compatible), k=0, L=101 = 2*50+1
        let u = |x: f64| Complex64::new(x * x, 0.0);
        let c = finite_fourier_coeff_1d(u, 0, 101);
        let bound = 12.0 * 2.0 / (PI * 50.0);
        assert!((c.re - 1.0 / 3.0).abs() <= bound);
        assert!(c.im.abs() <= 1e-14);
    }

    #[test]
    fn coeff_2d_examples() {
        let one = |_: f64, _: f64| Complex64::new(1.0, 0.0);
        let c = finite_fourier_coeff_2d(one, FrequencyIndex::new(0, 0), 6);
        assert!((c - Complex64::new(1.0, 0.0)).norm() <= 1e-14);

        let wave = |x: f64, y: f64| Complex64::from_polar(1.0, PI * (x + y));
        let c = finite_fourier_coeff_2d(wave, FrequencyIndex::new(1, 1), 5);
        assert!((c - Complex64::new(1.0, 0.0)).norm() <= 1e-13);
    }

    #[test]
    fn disk_transform_is_four_times_square_coefficient() {
        let f = |x: f64, y: f64| Complex64::new((PI * x).cos() * (PI * y).sin(), 0.5 * x);
        let l = 11;
        let field = sample(f, l).unwrap();
        for &(k1, k2) in &[(0i64, 0i64), (2, 1), (-3, 4)] {
            let k = FrequencyIndex::new(k1, k2);
            let disk = finite_fourier_disk(&field, k);
            let sq = finite_fourier_coeff_2d(f, k, l);
            assert!((disk - 4.0 * sq).norm() <= 1e-12);
        }
    }

    #[test]
    fn smooth_periodic_coeff_2d_against_quadrature() {
        // C^1 periodic U, k=(2,1), L = 2K+1 with K=32
        let u = |x: f64, y: f64| {
            Complex64::new((PI * x).cos() * (2.0 * PI * y).sin(), (PI * (x + y)).cos())
        };
        let k = FrequencyIndex::new(2, 1);
        let kk = 32usize;
        let fin = finite_fourier_coeff_2d(u, k, 2 * kk + 1);
        // 512^2 tensor trapezoid for the Fourier coefficient of a periodic U
        let n = 512usize;
        let h = 2.0 / n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let x = -1.0 + i as f64 * h;
            for j in 0..n {
                let y = -1.0 + j as f64 * h;
                acc += u(x, y)
                    * Complex64::from_polar(1.0, -PI * (k.k1 as f64 * x + k.k2 as f64 * y));
            }
        }
        let quad = acc * (h * h / 4.0);
        // |grad U| <= sqrt((pi + 2pi)^2 ...) — generous analytic bound
        let grad_sup = (PI * PI + 4.0 * PI * PI).sqrt() + 2.0f64.sqrt() * PI;
        let bound = 24.0 * grad_sup / (PI * kk as f64);
        assert!((fin - quad).norm() <= bound);
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, .. ProptestConfig::default() })]

        /// Trig polynomials of degree K are reproduced exactly (Lemma-level
        /// exactness, random coefficients, K <= 16).
        #[test]
        fn trig_polynomials_are_exact(seed in 0u64..1000, k_deg in 1usize..=16) {
            let mut rng = StdRng::seed_from_u64(seed);
            let coeffs: Vec<Complex64> = (0..2 * k_deg + 1)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let p = |x: f64| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (idx, c) in coeffs.iter().enumerate() {
                    let ell = idx as i64 - k_deg as i64;
                    acc += c * Complex64::from_polar(1.0, PI * ell as f64 * x);
                }
                acc
            };
            let l = 2 * k_deg + 1;
            for kk in -(k_deg as i64)..=(k_deg as i64) {
                let got = finite_fourier_coeff_1d(p, kk, l);
                let want = coeffs[(kk + k_deg as i64) as usize];
                prop_assert!((got - want).norm() <= 1e-12);
            }
        }

        /// Folding identity equals the direct definition on random fields.
        #[test]
        fn folding_matches_direct(seed in 0u64..1000, l in 1usize..=31, k1 in -40i64..40, k2 in -40i64..40) {
            let mut rng = StdRng::seed_from_u64(seed);
            let vals = Array2::from_shape_fn((l, l), |_| {
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let field = SampledField::from_values(vals, 1.0).unwrap();
            let k = FrequencyIndex::new(k1, k2);
            let a = finite_fourier_disk(&field, k);
            let b = finite_fourier_direct(&field, k);
            prop_assert!((a - b).norm() <= 1e-10 * b.norm().max(1.0));
        }

        /// conj(f^(w;L)) = (conj f)^(-w;L) for arbitrary complex fields.
        #[test]
        fn conjugation_symmetry(seed in 0u64..1000, l in 2usize..=16, k1 in -20i64..20, k2 in -20i64..20) {
            let mut rng = StdRng::seed_from_u64(seed);
            let vals = Array2::from_shape_fn((l, l), |_| {
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let conj_vals = vals.mapv(|v| v.conj());
            let field = SampledField::from_values(vals, 1.0).unwrap();
            let conj_field = SampledField::from_values(conj_vals, 1.0).unwrap();
            let lhs = finite_fourier_disk(&field, FrequencyIndex::new(k1, k2)).conj();
            let rhs = finite_fourier_disk(&conj_field, FrequencyIndex::new(-k1, -k2));
            prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
        }
    }
}
