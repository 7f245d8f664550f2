use serde::{Deserialize, Serialize};

use super::{EvalError, FuncExpr};
use crate::error::{Error, Result};
use crate::means::Interval;

pub const DEFAULT_SHAPE_TOL: f64 = 1e-9;
pub const DEFAULT_SHAPE_GRID: usize = 64;
const MIN_GRID: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeMode {
    Convex,
    Concave,
}

/// Outcome of the midpoint-chord test on a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeReport {
    pub mode: ShapeMode,
    pub grid_size: usize,
    /// Largest amount by which a midpoint sits on the wrong side of its
    /// chord, clamped below at zero.
    pub max_violation: f64,
    pub passed: bool,
}

/// Midpoint-chord test for `g` over every pair of a `grid`-point uniform
/// grid on `[a, b]`, using the default tolerance.
pub fn check_shape(
    g: &FuncExpr,
    iv: Interval,
    mode: ShapeMode,
    grid: usize,
) -> Result<ShapeReport> {
    check_shape_with(|x| g.eval(x), iv, mode, grid, DEFAULT_SHAPE_TOL)
}

/// Same test for an arbitrary pointwise function, e.g. `|f'(x)|^q`.
pub fn check_shape_with<G>(
    g: G,
    iv: Interval,
    mode: ShapeMode,
    grid: usize,
    tol: f64,
) -> Result<ShapeReport>
where
    G: Fn(f64) -> Result<f64, EvalError>,
{
    if grid < MIN_GRID {
        return Err(Error::param(format!(
            "shape grid must be at least {MIN_GRID}, got {grid}"
        )));
    }
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::param(format!(
            "shape tolerance must be non-negative, got {tol}"
        )));
    }
    let (a, b) = (iv.a(), iv.b());
    let step = (b - a) / (grid - 1) as f64;
    let xs: Vec<f64> = (0..grid)
        .map(|i| {
            if i == grid - 1 {
                b
            } else {
                a + step * i as f64
            }
        })
        .collect();
    let gs = xs.iter().map(|&x| g(x)).collect::<Result<Vec<_>, _>>()?;
    let sign = match mode {
        ShapeMode::Convex => 1.0,
        ShapeMode::Concave => -1.0,
    };
    let mut worst = 0.0f64;
    for i in 0..grid {
        for j in i + 1..grid {
            let mid = g(0.5 * (xs[i] + xs[j]))?;
            let chord = 0.5 * (gs[i] + gs[j]);
            worst = worst.max(sign * (mid - chord));
        }
    }
    Ok(ShapeReport {
        mode,
        grid_size: grid,
        max_violation: worst,
        passed: worst <= tol,
    })
}
