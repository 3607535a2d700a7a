//! Finite Fourier-Bessel transforms (FFBT) on disks.
//!
//! A function supported in the closed unit disk is analyzed into the
//! orthonormal polar-harmonic basis `Psi_{m,n}` without any polar-grid
//! resampling: the coefficient
//!
//! `C^K_{m,n}(f) = sum_{|k|_inf <= K} c(k;m,n) f^(k; 2K+1)`
//!
//! combines a fixed kernel `c(k;m,n)` (Bessel values at integer
//! frequencies) with finite Fourier transforms of the Cartesian samples,
//! which come straight out of one FFT of the `L x L` sample matrix
//! (`L = 2K+1`). The inverse transform `S^K_{M,N}(f)` sums the partial
//! series back; both admit matrix trace forms with precomputable kernels,
//! and both extend to convolutions of disk-supported functions through the
//! product of the factors' transforms, never sampling the convolution
//! integral itself.
//!
//! Modules:
//!
//! * [`special`] — Bessel `J_m`, its positive zeros, polar harmonics.
//! * [`sampling`] — the uniform grid on `[-1,1]^2`, disk masks, sampled fields.
//! * [`fourier`] — the unnormalized 2D DFT and finite Fourier transforms.
//! * [`coefficients`] — the kernel `c(k;m,n)`, order thresholds, folded
//!   `Q`/`Qx` matrices, error budgets and epsilon planning.
//! * [`transform`] — forward/inverse transforms, trace forms, scaling,
//!   steerability diagnostics.
//! * [`convolution`] — the unified convolution transforms.
//! * [`oracle`] — slow quadrature references for everything above.
//! * [`cases`] — named generator functions for studies and demos.
//! * [`io`] — field/spectrum file formats and the kernel cache.

pub mod cases;
pub mod coefficients;
pub mod convolution;
pub mod error;
pub mod fourier;
pub mod io;
pub mod oracle;
mod par;
pub mod sampling;
pub mod special;
pub mod transform;

pub use coefficients::{
    beta_partial, build_kernel, coeff_c, k_min, k_min_block, plan_order, CoefficientKernel,
    ErrorBudget, KernelKind, OrderPlan, PlanMode,
};
pub use error::{Error, Result};
pub use fourier::{
    dft2, finite_fourier_coeff_1d, finite_fourier_coeff_2d, finite_fourier_disk, FrequencyIndex,
};
pub use oracle::QuadratureSpec;
pub use sampling::{disk_mask, make_grid, sample, sample_scaled, Grid, SampledField};
pub use special::{
    bessel_j, bessel_zero, ensure_zeros, normalized_radial, polar_harmonic, HarmonicIndex,
};
pub use transform::{
    analyze_scaled, ffbt, ffbt_block, ffbt_with_kernel, iffbt, iffbt_trace, steer_residual,
    KernelSet, Spectrum,
};
