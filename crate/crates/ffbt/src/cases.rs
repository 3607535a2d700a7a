//! Built-in test functions: the named generators behind the study,
//! steerability and demo workflows, with their default block sizes, orders,
//! disk radii and evaluation grids.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::{polar_harmonic, HarmonicIndex};

/// A named single-function case.
#[derive(Clone, Copy)]
pub struct AnalysisCase {
    pub name: &'static str,
    /// Disk radius `a`; the function is supported in (or concentrated on) `B_a`.
    pub a: f64,
    pub m_max: i32,
    pub n_max: usize,
    pub order: i64,
    pub eval_grid: usize,
    pub f: fn(f64, f64) -> Complex64,
    /// Indicator-type inputs get the L2-grid pass/fail metric (Gibbs
    /// oscillation rules out uniform convergence).
    pub indicator: bool,
}

/// A named convolution-pair case; factors are supported in `B_{a/2}`.
#[derive(Clone, Copy)]
pub struct ConvolutionCase {
    pub name: &'static str,
    pub a: f64,
    pub m_max: i32,
    pub n_max: usize,
    pub order: i64,
    pub eval_grid: usize,
    pub f: fn(f64, f64) -> Complex64,
    pub g: fn(f64, f64) -> Complex64,
    /// Radii when the factors are centered-disk indicators (enables the
    /// analytic lens-area reference).
    pub f_disk: Option<f64>,
    pub g_disk: Option<f64>,
    /// Support radius of each factor for quadrature references.
    pub f_support: f64,
    pub g_support: f64,
}

fn harmonic_sum(x: f64, y: f64) -> Complex64 {
    polar_harmonic(HarmonicIndex { m: 1, n: 2 }, x, y).expect("finite")
        + polar_harmonic(HarmonicIndex { m: 2, n: 1 }, x, y).expect("finite")
}

fn gaussian_pair(x: f64, y: f64) -> Complex64 {
    // A = diag(0.1, 0.05)^-1, B = diag(0.05, 0.1)^-1
    Complex64::new(
        (-(10.0 * x * x + 20.0 * y * y)).exp(),
        (-(20.0 * x * x + 10.0 * y * y)).exp(),
    )
}

fn exp_sin_disk(x: f64, y: f64) -> Complex64 {
    if x * x + y * y <= 1.0 {
        Complex64::new((-x * y).exp(), (x * y).sin())
    } else {
        Complex64::new(0.0, 0.0)
    }
}

fn rectangle_indicator(x: f64, y: f64) -> Complex64 {
    if x.abs() <= 0.25 && y.abs() <= 0.5 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// The ten polygon vertices of the non-symmetric body.
pub const POLYGON_VERTICES: [(f64, f64); 10] = [
    (0.0, 0.0),
    (0.0, 3.0),
    (-3.0, 3.0),
    (-3.0, 0.0),
    (-2.0, 0.0),
    (-2.0, -1.0),
    (-1.0, 1.0),
    (-1.0, -2.0),
    (2.0, -2.0),
    (2.0, 0.0),
];

/// Even-odd ray casting with boundary points counted inside.
pub fn point_in_polygon(vertices: &[(f64, f64)], x: f64, y: f64) -> bool {
    let n = vertices.len();
    let mut inside = false;
    for i in 0..n {
        let (x1, y1) = vertices[i];
        let (x2, y2) = vertices[(i + 1) % n];
        // boundary: collinear and within the segment's bounding box
        let cross = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1);
        if cross.abs() <= 1e-12
            && x >= x1.min(x2) - 1e-12
            && x <= x1.max(x2) + 1e-12
            && y >= y1.min(y2) - 1e-12
            && y <= y1.max(y2) + 1e-12
        {
            return true;
        }
        if (y1 > y) != (y2 > y) {
            let x_cross = x1 + (y - y1) * (x2 - x1) / (y2 - y1);
            if x < x_cross {
                inside = !inside;
            }
        }
    }
    inside
}

fn polygon_indicator(x: f64, y: f64) -> Complex64 {
    if point_in_polygon(&POLYGON_VERTICES, x, y) {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

fn astroid_indicator(x: f64, y: f64) -> Complex64 {
    // p = 2/3 ball: |x|^(2/3) + |y|^(2/3) <= 1
    if x.abs().powf(2.0 / 3.0) + y.abs().powf(2.0 / 3.0) <= 1.0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// Smooth compactly supported bump `exp(1 - 1/(1 - (r/rho)^2))` on
/// `r < rho`, zero outside. Sup norm 1, all derivatives vanish at the rim.
pub fn radial_bump(rho: f64) -> impl Fn(f64, f64) -> Complex64 + Copy {
    move |x: f64, y: f64| {
        let t = (x * x + y * y) / (rho * rho);
        if t < 1.0 {
            Complex64::new((1.0 - 1.0 / (1.0 - t)).exp(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }
}

fn smooth_bump(x: f64, y: f64) -> Complex64 {
    radial_bump(0.8)(x, y)
}

/// Angularly structured smooth bump, for steerability demos.
fn skewed_bump(x: f64, y: f64) -> Complex64 {
    let t = (x * x + y * y) / 0.64;
    if t < 1.0 {
        let b = (1.0 - 1.0 / (1.0 - t)).exp();
        Complex64::new(b * (1.0 + x + 0.5 * y * y), 0.0)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

fn disk_indicator(r: f64) -> impl Fn(f64, f64) -> Complex64 + Copy {
    move |x: f64, y: f64| {
        if x * x + y * y <= r * r {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }
}

fn half_disk_indicator(x: f64, y: f64) -> Complex64 {
    disk_indicator(0.5)(x, y)
}

fn unit_disk_indicator(x: f64, y: f64) -> Complex64 {
    disk_indicator(1.0)(x, y)
}

fn two_disk_indicator(x: f64, y: f64) -> Complex64 {
    disk_indicator(2.0)(x, y)
}

fn conv_bump(x: f64, y: f64) -> Complex64 {
    radial_bump(0.4)(x, y)
}

fn conv_bump_shifted(x: f64, y: f64) -> Complex64 {
    let t = ((x - 0.05) * (x - 0.05) + y * y) / (0.36 * 0.36);
    if t < 1.0 {
        Complex64::new((1.0 - 1.0 / (1.0 - t)).exp(), 0.0)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// The registry of single-function cases.
pub const ANALYSIS_CASES: &[AnalysisCase] = &[
    AnalysisCase {
        name: "harmonic-sum",
        a: 1.0,
        m_max: 2,
        n_max: 2,
        order: 3,
        eval_grid: 41,
        f: harmonic_sum,
        indicator: false,
    },
    AnalysisCase {
        name: "gaussian-pair",
        a: 1.0,
        m_max: 5,
        n_max: 5,
        order: 8,
        eval_grid: 51,
        f: gaussian_pair,
        indicator: false,
    },
    AnalysisCase {
        name: "exp-sin",
        a: 1.0,
        m_max: 5,
        n_max: 6,
        order: 9,
        eval_grid: 53,
        f: exp_sin_disk,
        indicator: false,
    },
    AnalysisCase {
        name: "rectangle",
        a: 1.0,
        m_max: 10,
        n_max: 10,
        order: 15,
        eval_grid: 65,
        f: rectangle_indicator,
        indicator: true,
    },
    AnalysisCase {
        name: "polygon",
        a: 6.0,
        m_max: 10,
        n_max: 10,
        order: 15,
        eval_grid: 81,
        f: polygon_indicator,
        indicator: true,
    },
    AnalysisCase {
        name: "astroid",
        a: 2.0,
        m_max: 15,
        n_max: 15,
        order: 22,
        eval_grid: 95,
        f: astroid_indicator,
        indicator: true,
    },
    AnalysisCase {
        name: "smooth-bump",
        a: 1.0,
        m_max: 2,
        n_max: 2,
        order: 8,
        eval_grid: 41,
        f: smooth_bump,
        indicator: false,
    },
    AnalysisCase {
        name: "skewed-bump",
        a: 1.0,
        m_max: 3,
        n_max: 2,
        order: 8,
        eval_grid: 41,
        f: skewed_bump,
        indicator: false,
    },
];

/// The registry of convolution-pair cases.
pub const CONVOLUTION_CASES: &[ConvolutionCase] = &[
    ConvolutionCase {
        name: "disk-half-pair",
        a: 1.0,
        m_max: 10,
        n_max: 10,
        order: 15,
        eval_grid: 41,
        f: half_disk_indicator,
        g: half_disk_indicator,
        f_disk: Some(0.5),
        g_disk: Some(0.5),
        f_support: 0.5,
        g_support: 0.5,
    },
    ConvolutionCase {
        name: "disk-unit-pair",
        a: 3.0,
        m_max: 10,
        n_max: 10,
        order: 15,
        eval_grid: 82,
        f: unit_disk_indicator,
        g: unit_disk_indicator,
        f_disk: Some(1.0),
        g_disk: Some(1.0),
        f_support: 1.0,
        g_support: 1.0,
    },
    ConvolutionCase {
        name: "disk-mixed-pair",
        a: 6.0,
        m_max: 10,
        n_max: 10,
        order: 15,
        eval_grid: 82,
        f: unit_disk_indicator,
        g: two_disk_indicator,
        f_disk: Some(1.0),
        g_disk: Some(2.0),
        f_support: 1.0,
        g_support: 2.0,
    },
    ConvolutionCase {
        name: "bump-pair",
        a: 1.0,
        m_max: 5,
        n_max: 5,
        order: 8,
        eval_grid: 41,
        f: conv_bump,
        g: conv_bump_shifted,
        f_disk: None,
        g_disk: None,
        f_support: 0.4,
        g_support: 0.41,
    },
];

pub fn analysis_case(name: &str) -> Result<&'static AnalysisCase> {
    ANALYSIS_CASES
        .iter()
        .find(|c| c.name == name)
        .ok_or_else(|| {
            Error::InvalidArgument(format!(
                "unknown case {name:?}; analysis cases: {}",
                case_names(ANALYSIS_CASES.iter().map(|c| c.name))
            ))
        })
}

pub fn convolution_case(name: &str) -> Result<&'static ConvolutionCase> {
    CONVOLUTION_CASES
        .iter()
        .find(|c| c.name == name)
        .ok_or_else(|| {
            Error::InvalidArgument(format!(
                "unknown case {name:?}; convolution cases: {}",
                case_names(CONVOLUTION_CASES.iter().map(|c| c.name))
            ))
        })
}

fn case_names(names: impl Iterator<Item = &'static str>) -> String {
    names.collect::<Vec<_>>().join(", ")
}
