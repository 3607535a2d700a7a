//! The uniform Cartesian grid on `[-1,1]^2`, its disk mask, and sampled
//! fields of user functions.

use ndarray::Array2;
use num_complex::Complex64;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Uniform grid on `[-1,1]` with `L` nodes `x_i = -1 + i*delta`,
/// `delta = 2/L`, `0 <= i < L`. The left endpoint is a node, the right
/// endpoint never is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid {
    len: usize,
}

impl Grid {
    pub fn new(len: usize) -> Result<Self> {
        if len < 1 {
            return Err(Error::InvalidArgument("grid needs L >= 1".into()));
        }
        Ok(Self { len })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn delta(&self) -> f64 {
        2.0 / self.len as f64
    }

    /// Node coordinate, 0-based index.
    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i < self.len);
        -1.0 + i as f64 * self.delta()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |i| self.node(i))
    }
}

/// `make_grid(L)`: the uniform grid of `L` nodes on `[-1,1]`.
pub fn make_grid(len: usize) -> Result<Grid> {
    Grid::new(len)
}

/// Index pairs `(i,j)` (0-based) whose nodes lie in the closed unit disk,
/// `x_i^2 + x_j^2 <= 1`. Boundary nodes count as inside.
pub fn disk_mask(grid: &Grid) -> Vec<(usize, usize)> {
    let mut mask = Vec::new();
    for i in 0..grid.len() {
        let xi = grid.node(i);
        for j in 0..grid.len() {
            let xj = grid.node(j);
            if xi * xi + xj * xj <= 1.0 {
                mask.push((i, j));
            }
        }
    }
    mask
}

/// An `L x L` table of complex samples `values[(i,j)] = f(x_i, x_j)`
/// (row index = first coordinate) plus grid metadata.
///
/// Immutable after creation; the DFT of the sample matrix is computed once
/// on demand and shared.
#[derive(Debug)]
pub struct SampledField {
    grid: Grid,
    values: Array2<Complex64>,
    /// Disk radius metadata `a` for the scaled variants (default 1).
    a: f64,
    all_real: bool,
    dft: OnceLock<Array2<Complex64>>,
}

impl Clone for SampledField {
    fn clone(&self) -> Self {
        Self {
            grid: self.grid,
            values: self.values.clone(),
            a: self.a,
            all_real: self.all_real,
            dft: OnceLock::new(),
        }
    }
}

impl SampledField {
    /// Wrap an existing `L x L` table. Entries must all be finite.
    pub fn from_values(values: Array2<Complex64>, a: f64) -> Result<Self> {
        if values.nrows() != values.ncols() {
            return Err(Error::InvalidArgument(format!(
                "sample table must be square, got {}x{}",
                values.nrows(),
                values.ncols()
            )));
        }
        let grid = Grid::new(values.nrows())?;
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "domain half-width must be positive, got {a}"
            )));
        }
        for ((i, j), v) in values.indexed_iter() {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFiniteSample {
                    x: grid.node(i),
                    y: grid.node(j),
                });
            }
        }
        let all_real = values.iter().all(|v| v.im == 0.0);
        Ok(Self {
            grid,
            values,
            a,
            all_real,
            dft: OnceLock::new(),
        })
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.grid
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Disk radius metadata `a` (1 unless the field came from a scaled
    /// sampling `f(a x)`).
    #[inline]
    pub fn radius(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    /// True when every sample has zero imaginary part.
    #[inline]
    pub fn is_real(&self) -> bool {
        self.all_real
    }

    /// The (unnormalized) DFT of the sample matrix, computed once.
    pub fn dft(&self) -> &Array2<Complex64> {
        self.dft.get_or_init(|| crate::fourier::dft2_unchecked(&self.values))
    }
}

/// Sample `f` on the `L x L` grid of `[-1,1]^2`.
pub fn sample<F>(f: F, len: usize) -> Result<SampledField>
where
    F: Fn(f64, f64) -> Complex64,
{
    let grid = Grid::new(len)?;
    let mut values = Array2::zeros((len, len));
    for i in 0..len {
        let xi = grid.node(i);
        for j in 0..len {
            let xj = grid.node(j);
            let v = f(xi, xj);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFiniteSample { x: xi, y: xj });
            }
            values[(i, j)] = v;
        }
    }
    SampledField::from_values(values, 1.0)
}

/// Sample the rescaled function `f~(x) = f(a x)` on the unit grid, keeping
/// `a` as the field's disk radius metadata.
pub fn sample_scaled<F>(f: F, a: f64, len: usize) -> Result<SampledField>
where
    F: Fn(f64, f64) -> Complex64,
{
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "scale radius must be positive, got {a}"
        )));
    }
    let field = sample(|x, y| f(a * x, a * y), len)?;
    let mut field = field;
    field.a = a;
    Ok(field)
}
