//! Adaptive Gauss-Kronrod (7/15) integration.
//!
//! Panels are bisected depth-first, left half first, until the difference
//! between the embedded Gauss and Kronrod estimates fits the panel's share
//! of the tolerance. Accepted panels are summed left to right, so results
//! are bit-reproducible.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{EvalError, FuncExpr};
use crate::means::Interval;

/// Kronrod abscissae on `[-1, 1]`, descending; odd indices are the Gauss
/// nodes and the last entry is the centre.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for `XGK[1]`, `XGK[3]`, `XGK[5]` and the centre.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const EVALS_PER_PANEL: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub max_evals: usize,
    /// Smallest panel, as a fraction of `hi - lo`.
    pub min_width_frac: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            rel_tol: 1e-10,
            max_evals: 200_000,
            min_width_frac: 1e-12,
        }
    }
}

impl QuadConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        QuadConfig {
            rel_tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1e-14..=1e-3).contains(&self.rel_tol) {
            return Err(Error::param(format!(
                "quadrature rel_tol must lie in [1e-14, 1e-3], got {}",
                self.rel_tol
            )));
        }
        if self.max_evals < EVALS_PER_PANEL {
            return Err(Error::param(format!(
                "quadrature eval cap too small: {}",
                self.max_evals
            )));
        }
        if !(self.min_width_frac > 0.0 && self.min_width_frac < 1.0) {
            return Err(Error::param(format!(
                "minimum panel fraction must lie in (0, 1), got {}",
                self.min_width_frac
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub err_estimate: f64,
    pub evals: usize,
    /// False when the eval cap or the minimum panel width stopped refinement
    /// before the tolerance was met; `value` is then the best available.
    pub converged: bool,
}

pub trait Integrand {
    fn eval(&self, x: f64) -> Result<f64, EvalError>;
}

impl Integrand for FuncExpr {
    fn eval(&self, x: f64) -> Result<f64, EvalError> {
        FuncExpr::eval(self, x)
    }
}

impl<F> Integrand for F
where
    F: Fn(f64) -> Result<f64, EvalError>,
{
    fn eval(&self, x: f64) -> Result<f64, EvalError> {
        self(x)
    }
}

/// `c0 + c1 * t`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Affine {
    pub c0: f64,
    pub c1: f64,
}

impl Affine {
    #[inline]
    pub fn at(&self, t: f64) -> f64 {
        self.c0 + self.c1 * t
    }
}

/// `t -> weight(t) * g(inner(t))` on `t ∈ [0, 1]`, where `inner` maps
/// `[0, 1]` into the interval on which `g` is known to be evaluable.
#[derive(Debug, Clone)]
pub struct WeightedIntegrand<'a> {
    weight: Affine,
    inner: Affine,
    g: &'a FuncExpr,
}

impl<'a> WeightedIntegrand<'a> {
    pub fn new(weight: Affine, inner: Affine, g: &'a FuncExpr, iv: Interval) -> Result<Self> {
        let (lo, hi) = (iv.a(), iv.b());
        let slop = 4.0 * f64::EPSILON * hi;
        for end in [inner.at(0.0), inner.at(1.0)] {
            if !(end >= lo - slop && end <= hi + slop) {
                return Err(Error::param(format!(
                    "inner map sends an endpoint of [0,1] to {end}, outside [{lo}, {hi}]"
                )));
            }
        }
        Ok(WeightedIntegrand { weight, inner, g })
    }

    /// `(tb + (1-t)a) g((1-t)/2 b + (1+t)/2 a)`
    pub fn lemma_lower(g: &'a FuncExpr, iv: Interval) -> Self {
        let (a, b) = (iv.a(), iv.b());
        WeightedIntegrand {
            weight: Affine { c0: a, c1: b - a },
            inner: Affine {
                c0: 0.5 * (a + b),
                c1: 0.5 * (a - b),
            },
            g,
        }
    }

    /// `(ta + (1-t)b) g((1-t)/2 a + (1+t)/2 b)`
    pub fn lemma_upper(g: &'a FuncExpr, iv: Interval) -> Self {
        let (a, b) = (iv.a(), iv.b());
        WeightedIntegrand {
            weight: Affine { c0: b, c1: a - b },
            inner: Affine {
                c0: 0.5 * (a + b),
                c1: 0.5 * (b - a),
            },
            g,
        }
    }

    pub fn weight(&self) -> Affine {
        self.weight
    }

    pub fn inner(&self) -> Affine {
        self.inner
    }
}

impl Integrand for WeightedIntegrand<'_> {
    fn eval(&self, t: f64) -> Result<f64, EvalError> {
        Ok(self.weight.at(t) * self.g.eval(self.inner.at(t))?)
    }
}

struct Panel {
    kronrod: f64,
    gauss: f64,
    abs: f64,
}

fn gauss_kronrod<I: Integrand + ?Sized>(g: &I, lo: f64, hi: f64) -> Result<Panel, EvalError> {
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = g.eval(centre)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs = (WGK[7] * fc).abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = g.eval(centre - dx)?;
        let f2 = g.eval(centre + dx)?;
        kronrod += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    Ok(Panel {
        kronrod: kronrod * half,
        gauss: gauss * half,
        abs: abs * half,
    })
}

/// Integrate `g` over `[lo, hi]` to relative tolerance `cfg.rel_tol`,
/// measured against `∫|g|`.
///
/// The error estimate is the sum of the per-panel `|K15 - G7|` differences,
/// floored at `50 eps ∫|g|` per panel to account for rounding.
pub fn integrate<I: Integrand + ?Sized>(
    g: &I,
    lo: f64,
    hi: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    cfg.validate()?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::param(format!(
            "integration bounds must satisfy lo < hi, got [{lo}, {hi}]"
        )));
    }
    let span = hi - lo;
    let min_width = cfg.min_width_frac * span;

    let whole = gauss_kronrod(g, lo, hi)?;
    let mut evals = EVALS_PER_PANEL;
    let abs_tol = cfg.rel_tol * whole.abs.max(whole.kronrod.abs());

    let mut value = 0.0;
    let mut err = 0.0;
    let mut converged = true;
    // (lo, hi, precomputed panel); popped depth-first, left half first.
    let mut stack = vec![(lo, hi, whole)];
    while let Some((l, h, p)) = stack.pop() {
        let diff = (p.kronrod - p.gauss).abs();
        let roundoff = 50.0 * f64::EPSILON * p.abs;
        let share = abs_tol * (h - l) / span;
        let done = diff <= share || diff <= roundoff;
        let narrow = h - l <= min_width;
        let capped = evals + 2 * EVALS_PER_PANEL > cfg.max_evals;
        if done || narrow || capped {
            if !done {
                converged = false;
            }
            value += p.kronrod;
            err += diff.max(roundoff);
            continue;
        }
        let m = 0.5 * (l + h);
        let left = gauss_kronrod(g, l, m)?;
        let right = gauss_kronrod(g, m, h)?;
        evals += 2 * EVALS_PER_PANEL;
        stack.push((m, h, right));
        stack.push((l, m, left));
    }

    Ok(QuadResult {
        value,
        err_estimate: err,
        evals,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> FuncExpr {
        FuncExpr::parse(s).unwrap()
    }

    fn q(s: &str, lo: f64, hi: f64) -> QuadResult {
        integrate(&f(s), lo, hi, &QuadConfig::default()).unwrap()
    }

    #[test]
    fn analytic_examples() {
        let r = q("x^2", 0.0, 1.0);
        assert!((r.value - 1.0 / 3.0).abs() < 1e-15);
        assert!(r.converged);
        let r = q("1/x", 1.0, 2.0);
        assert!((r.value - std::f64::consts::LN_2).abs() < 1e-14);
        let r = q("-ln(x)", 1.0, std::f64::consts::E);
        assert!((r.value + 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_arguments() {
        let g = f("x");
        assert!(integrate(&g, 1.0, 1.0, &QuadConfig::default()).is_err());
        assert!(integrate(&g, 2.0, 1.0, &QuadConfig::default()).is_err());
        assert!(integrate(&g, 0.0, 1.0, &QuadConfig::with_rel_tol(1e-15)).is_err());
        assert!(integrate(&g, 0.0, 1.0, &QuadConfig::with_rel_tol(1e-2)).is_err());
    }

    #[test]
    fn domain_errors_propagate() {
        assert!(matches!(
            integrate(&f("ln(x)"), -1.0, 1.0, &QuadConfig::default()),
            Err(Error::Eval(_))
        ));
    }

    #[test]
    fn eval_cap_flags_non_convergence() {
        let cfg = QuadConfig {
            rel_tol: 1e-14,
            max_evals: 45,
            min_width_frac: 1e-12,
        };
        let r = integrate(&f("sqrt(x)"), 0.0, 1.0, &cfg).unwrap();
        assert!(!r.converged);
        assert!(r.evals <= 45);
        assert!((r.value - 2.0 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn evaluation_count_respects_cap() {
        let r = q("sqrt(x)", 0.0, 1.0);
        assert!(r.evals <= QuadConfig::default().max_evals);
        assert!((r.value - 2.0 / 3.0).abs() <= 10.0 * r.err_estimate);
    }

    #[test]
    fn lemma_integrands_for_linear_f() {
        // f = x, f' = 1: each weight integrates to (a+b)/2.
        let one = f("1");
        let iv = Interval::new(1.0, 3.0).unwrap();
        for w in [
            WeightedIntegrand::lemma_lower(&one, iv),
            WeightedIntegrand::lemma_upper(&one, iv),
        ] {
            let r = integrate(&w, 0.0, 1.0, &QuadConfig::default()).unwrap();
            assert!((r.value - 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn weighted_integrand_checks_inner_map() {
        let one = f("1");
        let iv = Interval::new(1.0, 3.0).unwrap();
        let ok = WeightedIntegrand::new(
            Affine { c0: 1.0, c1: 0.0 },
            Affine { c0: 1.0, c1: 2.0 },
            &one,
            iv,
        );
        assert!(ok.is_ok());
        let bad = WeightedIntegrand::new(
            Affine { c0: 1.0, c1: 0.0 },
            Affine { c0: 0.5, c1: 2.0 },
            &one,
            iv,
        );
        assert!(bad.is_err());
        let lower = WeightedIntegrand::lemma_lower(&one, iv);
        assert!(WeightedIntegrand::new(lower.weight(), lower.inner(), &one, iv).is_ok());
    }

    #[test]
    fn results_are_bit_reproducible() {
        let a = q("exp(-x)*sqrt(x) + 1/x", 0.5, 9.0);
        let b = q("exp(-x)*sqrt(x) + 1/x", 0.5, 9.0);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.err_estimate.to_bits(), b.err_estimate.to_bits());
    }
}
