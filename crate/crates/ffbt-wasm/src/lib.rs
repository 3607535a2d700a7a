//! Browser bindings: sample a named case, run the finite Fourier-Bessel
//! analysis/synthesis round trip, convolve disk indicators, and measure
//! steerability residuals — everything a static page needs to paint
//! heatmaps and convergence curves.
//!
//! The math lives in plain functions over [`ffbt`]; the `#[wasm_bindgen]`
//! exports only translate errors into `JsValue` (which exists solely on
//! wasm32, so native tests drive the plain layer).

use num_complex::Complex64;
use wasm_bindgen::prelude::*;

use ffbt::cases::{analysis_case, ANALYSIS_CASES};
use ffbt::convolution::ffbt_conv_block;
use ffbt::sampling::sample_scaled;
use ffbt::transform::{ffbt_block, iffbt};
use ffbt::{make_grid, steer_residual, HarmonicIndex};

/// A real-valued square grid plus its display range, ready for a canvas.
#[wasm_bindgen]
pub struct FieldGrid {
    values: Vec<f64>,
    len: usize,
    radius: f64,
    vmin: f64,
    vmax: f64,
}

#[allow(clippy::len_without_is_empty)]
#[wasm_bindgen]
impl FieldGrid {
    /// Row-major real parts, length `len * len`.
    #[wasm_bindgen(getter)]
    pub fn values(&self) -> Vec<f64> {
        self.values.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn len(&self) -> usize {
        self.len
    }

    /// Half-width of the square the grid covers (`Omega_a`).
    #[wasm_bindgen(getter)]
    pub fn radius(&self) -> f64 {
        self.radius
    }

    #[wasm_bindgen(getter)]
    pub fn vmin(&self) -> f64 {
        self.vmin
    }

    #[wasm_bindgen(getter)]
    pub fn vmax(&self) -> f64 {
        self.vmax
    }
}

fn grid_of(values: Vec<f64>, len: usize, radius: f64) -> FieldGrid {
    let (mut vmin, mut vmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in &values {
        vmin = vmin.min(v);
        vmax = vmax.max(v);
    }
    FieldGrid {
        values,
        len,
        radius,
        vmin,
        vmax,
    }
}

/// Names of the built-in analysis cases, comma separated.
#[wasm_bindgen]
pub fn case_names() -> String {
    ANALYSIS_CASES
        .iter()
        .map(|c| c.name)
        .collect::<Vec<_>>()
        .join(",")
}

fn case_defaults_impl(name: &str) -> ffbt::Result<Vec<f64>> {
    let c = analysis_case(name)?;
    Ok(vec![
        c.m_max as f64,
        c.n_max as f64,
        c.order as f64,
        c.eval_grid as f64,
        c.a,
    ])
}

fn sample_case_impl(name: &str, eval_grid: usize) -> ffbt::Result<FieldGrid> {
    let c = analysis_case(name)?;
    let field = sample_scaled(c.f, c.a, eval_grid)?;
    let values = field.values().iter().map(|v| v.re).collect();
    Ok(grid_of(values, eval_grid, c.a))
}

fn synthesize_case_impl(
    name: &str,
    m_max: i32,
    n_max: usize,
    order: i64,
    eval_grid: usize,
) -> ffbt::Result<FieldGrid> {
    let c = analysis_case(name)?;
    let field = sample_scaled(c.f, c.a, (2 * order + 1) as usize)?;
    let spectrum = ffbt_block(&field, m_max, n_max, order)?;
    let unit = make_grid(eval_grid)?;
    let points: Vec<(f64, f64)> = (0..eval_grid)
        .flat_map(|i| (0..eval_grid).map(move |j| (c.a * unit.node(i), c.a * unit.node(j))))
        .collect();
    let values = iffbt(&spectrum, &points)?;
    Ok(grid_of(
        values.iter().map(|v| v.re).collect(),
        eval_grid,
        c.a,
    ))
}

fn convolve_disks_impl(
    r1: f64,
    r2: f64,
    a: f64,
    m_max: i32,
    n_max: usize,
    order: i64,
    eval_grid: usize,
) -> ffbt::Result<FieldGrid> {
    if !(r1 > 0.0 && r2 > 0.0) {
        return Err(ffbt::Error::InvalidArgument(
            "disk radii must be positive".into(),
        ));
    }
    if r1 > a / 2.0 || r2 > a / 2.0 {
        return Err(ffbt::Error::InvalidArgument(
            "factors must be supported in B_{a/2}; raise a or shrink the disks".into(),
        ));
    }
    let disk = |r: f64| {
        move |x: f64, y: f64| {
            if x * x + y * y <= r * r {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let len = (2 * order + 1) as usize;
    let field_f = sample_scaled(disk(r1), a, len)?;
    let field_g = sample_scaled(disk(r2), a, len)?;
    let spectrum = ffbt_conv_block(&field_f, &field_g, m_max, n_max, order)?;
    let unit = make_grid(eval_grid)?;
    let points: Vec<(f64, f64)> = (0..eval_grid)
        .flat_map(|i| (0..eval_grid).map(move |j| (a * unit.node(i), a * unit.node(j))))
        .collect();
    let values = iffbt(&spectrum, &points)?;
    // report the physical convolution: (f*g)(x) = a^2 * S^{a,K}[f,g](x)
    Ok(grid_of(
        values.iter().map(|v| a * a * v.re).collect(),
        eval_grid,
        a,
    ))
}

fn steer_curve_impl(m: i32, n: usize, phi: f64, orders: &[i64]) -> ffbt::Result<Vec<f64>> {
    let c = analysis_case("skewed-bump")?;
    let idx = HarmonicIndex::new(m, n)?;
    let mut out = Vec::with_capacity(orders.len());
    for &order in orders {
        if order < 1 {
            return Err(ffbt::Error::InvalidArgument("orders must be >= 1".into()));
        }
        out.push(steer_residual(c.f, idx, order, phi)?);
    }
    Ok(out)
}

fn err_str(e: ffbt::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Default parameters of a case as `[M, N, K, eval_grid, a]`.
#[wasm_bindgen]
pub fn case_defaults(name: &str) -> Result<Vec<f64>, JsValue> {
    case_defaults_impl(name).map_err(err_str)
}

/// Real part of the case function itself on the evaluation grid
/// (the "original" panel).
#[wasm_bindgen]
pub fn sample_case(name: &str, eval_grid: usize) -> Result<FieldGrid, JsValue> {
    sample_case_impl(name, eval_grid).map_err(err_str)
}

/// Analysis + synthesis round trip of a named case: sample on the
/// definitional `2K+1` grid, take the coefficient block `|m| <= M`,
/// `n <= N`, and evaluate the partial sum on the display grid.
#[wasm_bindgen]
pub fn synthesize_case(
    name: &str,
    m_max: i32,
    n_max: usize,
    order: i64,
    eval_grid: usize,
) -> Result<FieldGrid, JsValue> {
    synthesize_case_impl(name, m_max, n_max, order, eval_grid).map_err(err_str)
}

/// Unified convolution of two centered disk indicators with radii `r1`,
/// `r2`, rescaled by `a` (both factors must fit the half disk `B_{a/2}`),
/// synthesized on the display grid over `Omega_a`. Values are the physical
/// convolution (the `a^2` Jacobian is already applied).
#[wasm_bindgen]
pub fn convolve_disks(
    r1: f64,
    r2: f64,
    a: f64,
    m_max: i32,
    n_max: usize,
    order: i64,
    eval_grid: usize,
) -> Result<FieldGrid, JsValue> {
    convolve_disks_impl(r1, r2, a, m_max, n_max, order, eval_grid).map_err(err_str)
}

/// Steerability residuals `|C^K_{m,n}(R_phi f) - e^{im phi} C^K_{m,n}(f)|`
/// of the skewed demo bump for each order in `orders`.
#[wasm_bindgen]
pub fn steer_curve(m: i32, n: usize, phi: f64, orders: Vec<i64>) -> Result<Vec<f64>, JsValue> {
    steer_curve_impl(m, n, phi, &orders).map_err(err_str)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bindings_work_natively() {
        assert!(case_names().contains("harmonic-sum"));
        let d = case_defaults_impl("harmonic-sum").unwrap();
        assert_eq!(d[2], 3.0);
        let grid = synthesize_case_impl("harmonic-sum", 2, 2, 3, 21).unwrap();
        assert_eq!(grid.len, 21);
        assert_eq!(grid.values.len(), 441);
        assert!(grid.vmax > grid.vmin);

        // an even grid puts a node at the origin: node(8) of 16 is 0
        let conv = convolve_disks_impl(0.5, 0.5, 1.0, 6, 6, 8, 16).unwrap();
        let center = conv.values[8 * 16 + 8];
        assert!((center - std::f64::consts::PI / 4.0).abs() < 0.1);

        let residuals = steer_curve_impl(2, 1, 1.0, &[4, 8]).unwrap();
        assert!(residuals[1] < residuals[0]);

        assert!(convolve_disks_impl(2.0, 0.5, 1.0, 2, 2, 3, 9).is_err());
        assert!(case_defaults_impl("nope").is_err());
        assert!(sample_case_impl("harmonic-sum", 9).unwrap().len == 9);
    }
}
