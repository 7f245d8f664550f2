//! Deviation functionals and the seven upper bounds.
//!
//! `D(f)` (the midpoint/endpoint deviation) is bounded by the three new
//! estimates `T1`, `T2(q)`, `T3(q)`. The trapezoid deviation
//! `(f(a)+f(b))/2 - mean(f)` is bounded by the classical `DA11`, `PP12(q)`,
//! `PP13` and `ADK14(q)`. Every bound carries the shape precondition it
//! relies on; a failed precondition marks the bound not applicable but the
//! value and comparison are still reported.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{
    check_shape_with, FuncExpr, ParseError, ShapeMode, ShapeReport, DEFAULT_SHAPE_GRID,
    DEFAULT_SHAPE_TOL,
};
use crate::means::{self, Interval};
use crate::quad::{integrate, QuadConfig, WeightedIntegrand};

/// Numerical settings shared by every check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub quad: QuadConfig,
    /// Absolute floor of the inequality slack.
    pub slack_floor: f64,
    pub shape_tol: f64,
    pub shape_grid: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            quad: QuadConfig::default(),
            slack_floor: 1e-9,
            shape_tol: DEFAULT_SHAPE_TOL,
            shape_grid: DEFAULT_SHAPE_GRID,
        }
    }
}

impl CheckConfig {
    pub fn validate(&self) -> Result<()> {
        self.quad.validate()?;
        if !(self.slack_floor >= 0.0 && self.slack_floor.is_finite()) {
            return Err(Error::param(format!(
                "slack floor must be finite and non-negative, got {}",
                self.slack_floor
            )));
        }
        if !(self.shape_tol >= 0.0 && self.shape_tol.is_finite()) {
            return Err(Error::param(format!(
                "shape tolerance must be finite and non-negative, got {}",
                self.shape_tol
            )));
        }
        if self.shape_grid < 8 {
            return Err(Error::param(format!(
                "shape grid must be at least 8, got {}",
                self.shape_grid
            )));
        }
        Ok(())
    }

    /// `max(slack_floor, 10 * err)`
    pub fn slack(&self, err: f64) -> f64 {
        self.slack_floor.max(10.0 * err)
    }
}

/// A value with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
}

/// A function together with its symbolic derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct Subject {
    f: FuncExpr,
    df: FuncExpr,
}

impl Subject {
    pub fn new(f: FuncExpr) -> Self {
        let df = f.derivative();
        Subject { f, df }
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        FuncExpr::parse(text).map(Subject::new)
    }

    pub fn f(&self) -> &FuncExpr {
        &self.f
    }

    pub fn df(&self) -> &FuncExpr {
        &self.df
    }

    /// `|f'(x)|^q`
    pub fn abs_df_pow(&self, x: f64, q: f64) -> Result<f64> {
        let d = self.df.eval(x)?.abs();
        Ok(if q == 1.0 { d } else { d.powf(q) })
    }

    /// Shape gate on `|f'|^q`.
    pub fn derivative_gate(
        &self,
        iv: Interval,
        q: f64,
        mode: ShapeMode,
        cfg: &CheckConfig,
    ) -> Result<ShapeReport> {
        check_shape_with(
            |x| {
                let d = self.df.eval(x)?.abs();
                Ok(if q == 1.0 { d } else { d.powf(q) })
            },
            iv,
            mode,
            cfg.shape_grid,
            cfg.shape_tol,
        )
    }

    /// Shape gate on `f` itself.
    pub fn function_gate(
        &self,
        iv: Interval,
        mode: ShapeMode,
        cfg: &CheckConfig,
    ) -> Result<ShapeReport> {
        check_shape_with(|x| self.f.eval(x), iv, mode, cfg.shape_grid, cfg.shape_tol)
    }
}

impl From<FuncExpr> for Subject {
    fn from(f: FuncExpr) -> Self {
        Subject::new(f)
    }
}

/// Exponents for the power-mean and Hölder forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub q: f64,
    /// Hölder conjugate `q / (q - 1)`; `None` for the power-mean form.
    pub p: Option<f64>,
}

impl BoundParams {
    /// Hölder form: `q > 1`, `1/p + 1/q = 1`.
    pub fn holder(q: f64) -> Result<Self> {
        if !(q.is_finite() && q > 1.0) {
            return Err(Error::param(format!(
                "Hölder exponent q must satisfy q > 1, got {q}"
            )));
        }
        Ok(BoundParams {
            q,
            p: Some(q / (q - 1.0)),
        })
    }

    /// Power-mean form: `q >= 1`.
    pub fn power_mean(q: f64) -> Result<Self> {
        check_q_at_least_one(q)?;
        Ok(BoundParams { q, p: None })
    }
}

fn check_q_at_least_one(q: f64) -> Result<()> {
    if !(q.is_finite() && q >= 1.0) {
        return Err(Error::param(format!(
            "exponent q must satisfy q >= 1, got {q}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Closed forms in terms of derivative magnitudes.

/// `((5a + 7b)/48) |f'(a)| + ((7a + 5b)/48) |f'(b)|`
pub fn theorem1_value(iv: Interval, da: f64, db: f64) -> f64 {
    let (a, b) = (iv.a(), iv.b());
    (5.0 * a + 7.0 * b) / 48.0 * da + (7.0 * a + 5.0 * b) / 48.0 * db
}

/// `4^{-1-1/q} L_p(a,b) [ (|f'(b)|^q + 3|f'(a)|^q)^{1/q} + (|f'(a)|^q + 3|f'(b)|^q)^{1/q} ]`
pub fn theorem2_value(iv: Interval, da: f64, db: f64, params: BoundParams) -> Result<f64> {
    let q = params.q;
    let p = params
        .p
        .ok_or_else(|| Error::param("T2 needs the Hölder form of BoundParams"))?;
    let lp = means::gen_log(iv, p, false)?;
    let (aq, bq) = (da.powf(q), db.powf(q));
    let bracket = (bq + 3.0 * aq).powf(1.0 / q) + (aq + 3.0 * bq).powf(1.0 / q);
    Ok(4f64.powf(-1.0 - 1.0 / q) * lp * bracket)
}

/// `A^{1-1/q} / (4 * 12^{1/q}) { [|f'(b)|^q (2a+b) + |f'(a)|^q (4a+5b)]^{1/q}
///  + [|f'(a)|^q (a+2b) + |f'(b)|^q (5a+4b)]^{1/q} }`
pub fn theorem3_value(iv: Interval, da: f64, db: f64, q: f64) -> f64 {
    let (a, b) = (iv.a(), iv.b());
    let (aq, bq) = (da.powf(q), db.powf(q));
    let first = bq * (2.0 * a + b) + aq * (4.0 * a + 5.0 * b);
    let second = aq * (a + 2.0 * b) + bq * (5.0 * a + 4.0 * b);
    let prefactor = means::arithmetic(iv).powf(1.0 - 1.0 / q) / (4.0 * 12f64.powf(1.0 / q));
    prefactor * (first.powf(1.0 / q) + second.powf(1.0 / q))
}

/// `(b-a)/8 (|f'(a)| + |f'(b)|)`
pub fn da11_value(iv: Interval, da: f64, db: f64) -> f64 {
    iv.width() / 8.0 * (da + db)
}

/// `(b-a)/4 ((|f'(a)|^q + |f'(b)|^q)/2)^{1/q}`
pub fn pp12_value(iv: Interval, da: f64, db: f64, q: f64) -> f64 {
    iv.width() / 4.0 * (0.5 * (da.powf(q) + db.powf(q))).powf(1.0 / q)
}

/// `(b-a)/4 |f'((a+b)/2)|`
pub fn pp13_value(iv: Interval, dmid: f64) -> f64 {
    iv.width() / 4.0 * dmid
}

/// `(b-a)/4 ((q-1)/(2q-1))^{1-1/q} (|f'((3a+b)/4)| + |f'((a+3b)/4)|)`;
/// the prefactor is 1 at `q = 1`.
pub fn adk14_value(iv: Interval, dlow: f64, dhigh: f64, q: f64) -> f64 {
    let factor = if q == 1.0 {
        1.0
    } else {
        ((q - 1.0) / (2.0 * q - 1.0)).powf(1.0 - 1.0 / q)
    };
    iv.width() / 4.0 * factor * (dlow + dhigh)
}

// ---------------------------------------------------------------------------
// Integral functionals.

/// `1/(b-a) ∫_a^b f`, failing when the quadrature does not converge.
pub fn integral_mean(f: &FuncExpr, iv: Interval, cfg: &CheckConfig) -> Result<Estimate> {
    let r = integrate(f, iv.a(), iv.b(), &cfg.quad)?;
    if !r.converged {
        return Err(Error::NotConverged {
            lo: iv.a(),
            hi: iv.b(),
            evals: r.evals,
            err_estimate: r.err_estimate,
        });
    }
    let w = iv.width();
    Ok(Estimate {
        value: r.value / w,
        err: r.err_estimate / w,
    })
}

const ROUNDOFF: f64 = 8.0 * f64::EPSILON;

fn deviation_from_mean(f: &FuncExpr, iv: Interval, mean: Estimate) -> Result<Estimate> {
    let (a, b) = (iv.a(), iv.b());
    let (fa, fb, fm) = (f.eval(a)?, f.eval(b)?, f.eval(iv.midpoint())?);
    let w2 = 2.0 * iv.width();
    let value = mean.value + (a * fb - b * fa) / w2 - 0.5 * fm;
    let scale = mean.value.abs() + ((a * fb).abs() + (b * fa).abs()) / w2 + 0.5 * fm.abs();
    Ok(Estimate {
        value,
        err: mean.err + ROUNDOFF * scale,
    })
}

fn trapezoid_from_mean(f: &FuncExpr, iv: Interval, mean: Estimate) -> Result<Estimate> {
    let (fa, fb) = (f.eval(iv.a())?, f.eval(iv.b())?);
    let avg = 0.5 * (fa + fb);
    Ok(Estimate {
        value: avg - mean.value,
        err: mean.err + ROUNDOFF * (avg.abs() + mean.value.abs()),
    })
}

/// `D(f) = 1/(b-a) ∫f + (a f(b) - b f(a))/(2(b-a)) - f((a+b)/2)/2`
pub fn deviation(s: &Subject, iv: Interval, cfg: &CheckConfig) -> Result<Estimate> {
    let mean = integral_mean(&s.f, iv, cfg)?;
    deviation_from_mean(&s.f, iv, mean)
}

/// `1/4 ∫_0^1 (tb + (1-t)a) f'((1-t)/2 b + (1+t)/2 a) dt
///  + 1/4 ∫_0^1 (ta + (1-t)b) f'((1-t)/2 a + (1+t)/2 b) dt`
pub fn lemma_rhs(s: &Subject, iv: Interval, cfg: &CheckConfig) -> Result<Estimate> {
    let mut value = 0.0;
    let mut err = 0.0;
    for w in [
        WeightedIntegrand::lemma_lower(&s.df, iv),
        WeightedIntegrand::lemma_upper(&s.df, iv),
    ] {
        let r = integrate(&w, 0.0, 1.0, &cfg.quad)?;
        if !r.converged {
            return Err(Error::NotConverged {
                lo: 0.0,
                hi: 1.0,
                evals: r.evals,
                err_estimate: r.err_estimate,
            });
        }
        value += r.value;
        err += r.err_estimate;
    }
    Ok(Estimate {
        value: 0.25 * value,
        err: 0.25 * err,
    })
}

/// `(f(a) + f(b))/2 - 1/(b-a) ∫f`
pub fn trapezoid_deviation(s: &Subject, iv: Interval, cfg: &CheckConfig) -> Result<Estimate> {
    let mean = integral_mean(&s.f, iv, cfg)?;
    trapezoid_from_mean(&s.f, iv, mean)
}

// ---------------------------------------------------------------------------
// Bounds with preconditions.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BoundKind {
    T1,
    T2,
    T3,
    DA11,
    PP12,
    PP13,
    ADK14,
}

impl BoundKind {
    pub fn label(self) -> &'static str {
        match self {
            BoundKind::T1 => "T1",
            BoundKind::T2 => "T2",
            BoundKind::T3 => "T3",
            BoundKind::DA11 => "DA11",
            BoundKind::PP12 => "PP12",
            BoundKind::PP13 => "PP13",
            BoundKind::ADK14 => "ADK14",
        }
    }

    /// True for the bounds on `|D(f)|`, false for the trapezoid bounds.
    pub fn bounds_deviation(self) -> bool {
        matches!(self, BoundKind::T1 | BoundKind::T2 | BoundKind::T3)
    }

    /// Shape `|f'|^q` must have for the bound to apply.
    pub fn required_shape(self) -> ShapeMode {
        match self {
            BoundKind::PP13 | BoundKind::ADK14 => ShapeMode::Concave,
            _ => ShapeMode::Convex,
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A bound value with the shape report of its precondition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub value: f64,
    pub precondition: ShapeReport,
}

fn endpoint_derivatives(s: &Subject, iv: Interval) -> Result<(f64, f64)> {
    Ok((s.df.eval(iv.a())?.abs(), s.df.eval(iv.b())?.abs()))
}

pub fn bound_theorem1(s: &Subject, iv: Interval, cfg: &CheckConfig) -> Result<BoundValue> {
    let (da, db) = endpoint_derivatives(s, iv)?;
    Ok(BoundValue {
        value: theorem1_value(iv, da, db),
        precondition: s.derivative_gate(iv, 1.0, ShapeMode::Convex, cfg)?,
    })
}

pub fn bound_theorem2(
    s: &Subject,
    iv: Interval,
    params: BoundParams,
    cfg: &CheckConfig,
) -> Result<BoundValue> {
    let params = BoundParams::holder(params.q)?;
    let (da, db) = endpoint_derivatives(s, iv)?;
    Ok(BoundValue {
        value: theorem2_value(iv, da, db, params)?,
        precondition: s.derivative_gate(iv, params.q, ShapeMode::Convex, cfg)?,
    })
}

pub fn bound_theorem3(
    s: &Subject,
    iv: Interval,
    params: BoundParams,
    cfg: &CheckConfig,
) -> Result<BoundValue> {
    check_q_at_least_one(params.q)?;
    let (da, db) = endpoint_derivatives(s, iv)?;
    Ok(BoundValue {
        value: theorem3_value(iv, da, db, params.q),
        precondition: s.derivative_gate(iv, params.q, ShapeMode::Convex, cfg)?,
    })
}

pub fn bound_da(s: &Subject, iv: Interval, cfg: &CheckConfig) -> Result<BoundValue> {
    let (da, db) = endpoint_derivatives(s, iv)?;
    Ok(BoundValue {
        value: da11_value(iv, da, db),
        precondition: s.derivative_gate(iv, 1.0, ShapeMode::Convex, cfg)?,
    })
}

pub fn bound_pp(s: &Subject, iv: Interval, q: f64, cfg: &CheckConfig) -> Result<BoundValue> {
    check_q_at_least_one(q)?;
    let (da, db) = endpoint_derivatives(s, iv)?;
    Ok(BoundValue {
        value: pp12_value(iv, da, db, q),
        precondition: s.derivative_gate(iv, q, ShapeMode::Convex, cfg)?,
    })
}

/// Midpoint form for concave `|f'|^q`; `q` only selects the gate.
pub fn bound_pp_concave(
    s: &Subject,
    iv: Interval,
    q: f64,
    cfg: &CheckConfig,
) -> Result<BoundValue> {
    check_q_at_least_one(q)?;
    let dmid = s.df.eval(iv.midpoint())?.abs();
    Ok(BoundValue {
        value: pp13_value(iv, dmid),
        precondition: s.derivative_gate(iv, q, ShapeMode::Concave, cfg)?,
    })
}

pub fn bound_adk(s: &Subject, iv: Interval, q: f64, cfg: &CheckConfig) -> Result<BoundValue> {
    check_q_at_least_one(q)?;
    let (a, b) = (iv.a(), iv.b());
    let dlow = s.df.eval((3.0 * a + b) / 4.0)?.abs();
    let dhigh = s.df.eval((a + 3.0 * b) / 4.0)?.abs();
    Ok(BoundValue {
        value: adk14_value(iv, dlow, dhigh, q),
        precondition: s.derivative_gate(iv, q, ShapeMode::Concave, cfg)?,
    })
}

// ---------------------------------------------------------------------------
// Hermite-Hadamard double inequality.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `f(A) <= mean <= (f(a)+f(b))/2`
    Convex,
    /// Reversed chain.
    Concave,
    /// Neither shape gate passed; nothing is asserted.
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HadamardReport {
    pub midpoint_value: f64,
    pub mean: Estimate,
    pub endpoint_average: f64,
    pub convex: ShapeReport,
    pub concave: ShapeReport,
    pub direction: Direction,
    pub slack: f64,
    /// `None` when the direction is undetermined.
    pub holds: Option<bool>,
}

fn hadamard_from_mean(
    s: &Subject,
    iv: Interval,
    mean: Estimate,
    cfg: &CheckConfig,
) -> Result<HadamardReport> {
    let mid = s.f.eval(iv.midpoint())?;
    let ends = 0.5 * (s.f.eval(iv.a())? + s.f.eval(iv.b())?);
    let convex = s.function_gate(iv, ShapeMode::Convex, cfg)?;
    let concave = s.function_gate(iv, ShapeMode::Concave, cfg)?;
    let slack = cfg.slack(mean.err + ROUNDOFF * (mid.abs() + ends.abs()));
    let m = mean.value;
    let (direction, holds) = if convex.passed {
        (
            Direction::Convex,
            Some(mid <= m + slack && m <= ends + slack),
        )
    } else if concave.passed {
        (
            Direction::Concave,
            Some(mid + slack >= m && m + slack >= ends),
        )
    } else {
        (Direction::Undetermined, None)
    };
    Ok(HadamardReport {
        midpoint_value: mid,
        mean,
        endpoint_average: ends,
        convex,
        concave,
        direction,
        slack,
        holds,
    })
}

/// `f((a+b)/2)`, the integral mean and `(f(a)+f(b))/2`, with the double
/// inequality checked in the direction given by the shape of `f`.
pub fn hadamard_check(s: &Subject, iv: Interval, cfg: &CheckConfig) -> Result<HadamardReport> {
    let mean = integral_mean(&s.f, iv, cfg)?;
    hadamard_from_mean(s, iv, mean, cfg)
}

// ---------------------------------------------------------------------------
// Reports.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub kind: BoundKind,
    pub q: Option<f64>,
    pub value: f64,
    /// `|D(f)|` for T1-T3, `|trapezoid deviation|` otherwise.
    pub lhs: f64,
    pub slack: f64,
    pub precondition: ShapeReport,
    pub holds: bool,
    /// `value - lhs`, reported as 0 when negative but within slack.
    pub margin: f64,
    pub verdict: Verdict,
}

impl BoundEntry {
    fn judge(
        kind: BoundKind,
        q: Option<f64>,
        bound: BoundValue,
        lhs: Estimate,
        cfg: &CheckConfig,
    ) -> Self {
        let lhs_abs = lhs.value.abs();
        let slack = cfg.slack(lhs.err);
        let holds = lhs_abs <= bound.value + slack;
        let mut margin = bound.value - lhs_abs;
        if holds && margin < 0.0 {
            margin = 0.0;
        }
        let verdict = match (bound.precondition.passed, holds) {
            (false, _) => Verdict::NotApplicable,
            (true, true) => Verdict::Holds,
            (true, false) => Verdict::Violated,
        };
        BoundEntry {
            kind,
            q,
            value: bound.value,
            lhs: lhs_abs,
            slack,
            precondition: bound.precondition,
            holds,
            margin,
            verdict,
        }
    }

    pub fn label(&self) -> String {
        match self.q {
            Some(q) => format!("{}(q={q})", self.kind),
            None => self.kind.to_string(),
        }
    }
}

/// Which bounds to evaluate.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BoundRequest {
    /// `T2(q)` for each `q > 1`, `T3(q)` for each `q`. Must be `>= 1`.
    pub qs: Vec<f64>,
    /// Add DA11, and PP12/PP13/ADK14 for `q = 1` and each requested `q`.
    pub classical: bool,
}

impl BoundRequest {
    pub fn validate(&self) -> Result<()> {
        self.qs.iter().try_for_each(|&q| check_q_at_least_one(q))
    }
}

fn dedup_qs(qs: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for q in qs {
        if !out.contains(&q) {
            out.push(q);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub residual: f64,
    pub slack: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub function: String,
    pub derivative: String,
    pub interval: Interval,
    pub deviation: Estimate,
    pub lemma_rhs: Estimate,
    pub lemma: LemmaCheck,
    pub trapezoid: Option<Estimate>,
    pub bounds: Vec<BoundEntry>,
    pub hadamard: HadamardReport,
}

impl BoundReport {
    pub fn violations(&self) -> impl Iterator<Item = &BoundEntry> {
        self.bounds
            .iter()
            .filter(|b| b.verdict == Verdict::Violated)
    }

    /// Any applicable check failed: a bound, the identity, or the
    /// Hadamard chain.
    pub fn has_violation(&self) -> bool {
        self.violations().next().is_some()
            || !self.lemma.holds
            || self.hadamard.holds == Some(false)
    }

    pub fn bound(&self, kind: BoundKind, q: Option<f64>) -> Option<&BoundEntry> {
        self.bounds.iter().find(|b| b.kind == kind && b.q == q)
    }
}

/// Evaluate the identity check, the requested bounds and the Hadamard chain.
pub fn bound_report(
    s: &Subject,
    iv: Interval,
    req: &BoundRequest,
    cfg: &CheckConfig,
) -> Result<BoundReport> {
    cfg.validate()?;
    req.validate()?;
    let mean = integral_mean(&s.f, iv, cfg)?;
    let dev = deviation_from_mean(&s.f, iv, mean)?;
    let rhs = lemma_rhs(s, iv, cfg)?;
    let lemma_slack = cfg.slack(dev.err + rhs.err);
    let residual = (dev.value - rhs.value).abs();
    let lemma = LemmaCheck {
        residual,
        slack: lemma_slack,
        holds: residual <= lemma_slack,
    };

    let mut bounds = Vec::new();
    bounds.push(BoundEntry::judge(
        BoundKind::T1,
        None,
        bound_theorem1(s, iv, cfg)?,
        dev,
        cfg,
    ));
    let qs = dedup_qs(req.qs.iter().copied());
    for &q in &qs {
        if q > 1.0 {
            let b = bound_theorem2(s, iv, BoundParams::holder(q)?, cfg)?;
            bounds.push(BoundEntry::judge(BoundKind::T2, Some(q), b, dev, cfg));
        }
        let b = bound_theorem3(s, iv, BoundParams::power_mean(q)?, cfg)?;
        bounds.push(BoundEntry::judge(BoundKind::T3, Some(q), b, dev, cfg));
    }

    let trapezoid = if req.classical {
        let trap = trapezoid_from_mean(&s.f, iv, mean)?;
        bounds.push(BoundEntry::judge(
            BoundKind::DA11,
            None,
            bound_da(s, iv, cfg)?,
            trap,
            cfg,
        ));
        for q in dedup_qs(std::iter::once(1.0).chain(qs.iter().copied())) {
            bounds.push(BoundEntry::judge(
                BoundKind::PP12,
                Some(q),
                bound_pp(s, iv, q, cfg)?,
                trap,
                cfg,
            ));
            bounds.push(BoundEntry::judge(
                BoundKind::PP13,
                Some(q),
                bound_pp_concave(s, iv, q, cfg)?,
                trap,
                cfg,
            ));
            bounds.push(BoundEntry::judge(
                BoundKind::ADK14,
                Some(q),
                bound_adk(s, iv, q, cfg)?,
                trap,
                cfg,
            ));
        }
        Some(trap)
    } else {
        None
    };

    Ok(BoundReport {
        function: s.f.to_string(),
        derivative: s.df.to_string(),
        interval: iv,
        deviation: dev,
        lemma_rhs: rhs,
        lemma,
        trapezoid,
        bounds,
        hadamard: hadamard_from_mean(s, iv, mean, cfg)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn subj(s: &str) -> Subject {
        Subject::parse(s).unwrap()
    }

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    fn cfg() -> CheckConfig {
        CheckConfig::default()
    }

    #[test]
    fn deviation_examples() {
        let c = cfg();
        let d = deviation(&subj("4.5"), iv(0.3, 2.0), &c).unwrap();
        assert!(d.value.abs() < 1e-14);
        let d = deviation(&subj("x"), iv(1.5, 4.0), &c).unwrap();
        assert!((d.value - 5.5 / 4.0).abs() < 1e-14);
        // ln 2 - 3/4 - 1/3 to 30 digits: -0.390186152773388023916101211875
        let d = deviation(&subj("1/x"), iv(1.0, 2.0), &c).unwrap();
        assert!((d.value + 0.390_186_152_773_388_02).abs() < 1e-13);
        assert!(d.err < 1e-9);
    }

    #[test]
    fn lemma_rhs_examples() {
        let c = cfg();
        assert!(lemma_rhs(&subj("7"), iv(1.0, 2.0), &c).unwrap().value.abs() < 1e-15);
        assert!((lemma_rhs(&subj("x"), iv(1.0, 3.0), &c).unwrap().value - 1.0).abs() < 1e-14);
        // Both sides for exp on (1,2): 3.40617595630885245882403851810
        let s = subj("exp(x)");
        let r = lemma_rhs(&s, iv(1.0, 2.0), &c).unwrap();
        let d = deviation(&s, iv(1.0, 2.0), &c).unwrap();
        assert!((r.value - 3.406_175_956_308_852_5).abs() < 1e-12);
        assert!((d.value - 3.406_175_956_308_852_5).abs() < 1e-12);
    }

    #[test]
    fn theorem_examples() {
        let c = cfg();
        let b = bound_theorem1(&subj("x"), iv(1.0, 3.0), &c).unwrap();
        assert!((b.value - 1.0).abs() < 1e-15);
        assert!(b.precondition.passed);
        assert_eq!(
            bound_theorem1(&subj("3"), iv(1.0, 3.0), &c).unwrap().value,
            0.0
        );
        let b = bound_theorem1(&subj("1/x"), iv(1.0, 2.0), &c).unwrap();
        assert!((b.value - 93.0 / 192.0).abs() < 1e-15);

        // sqrt(7/3)/2 = 0.763762615825973334431341198955
        let b = bound_theorem2(
            &subj("x"),
            iv(1.0, 2.0),
            BoundParams::holder(2.0).unwrap(),
            &c,
        )
        .unwrap();
        assert!((b.value - 0.763_762_615_825_973_3).abs() < 1e-15);
        // 0.54221889812634436418642409046
        let b = bound_theorem2(
            &subj("1/x"),
            iv(1.0, 2.0),
            BoundParams::holder(2.0).unwrap(),
            &c,
        )
        .unwrap();
        assert!((b.value - 0.542_218_898_126_344_4).abs() < 1e-15);
        let b = bound_theorem2(
            &subj("2"),
            iv(1.0, 2.0),
            BoundParams::holder(3.0).unwrap(),
            &c,
        )
        .unwrap();
        assert_eq!(b.value, 0.0);

        let pm = BoundParams::power_mean(1.0).unwrap();
        let b = bound_theorem3(&subj("x"), iv(0.5, 3.5), pm, &c).unwrap();
        assert!((b.value - 1.0).abs() < 1e-15);
        let b = bound_theorem3(&subj("1/x"), iv(1.0, 2.0), pm, &c).unwrap();
        assert!((b.value - 0.484_375).abs() < 1e-15);
        assert_eq!(
            bound_theorem3(&subj("2"), iv(1.0, 2.0), pm, &c)
                .unwrap()
                .value,
            0.0
        );
    }

    #[test]
    fn parameter_validation() {
        assert!(BoundParams::holder(1.0).is_err());
        assert!(BoundParams::holder(f64::NAN).is_err());
        assert_eq!(BoundParams::holder(3.0).unwrap().p, Some(1.5));
        assert!(BoundParams::power_mean(0.5).is_err());
        let c = cfg();
        let s = subj("x^2");
        let i = iv(1.0, 2.0);
        assert!(bound_theorem2(&s, i, BoundParams { q: 1.0, p: None }, &c).is_err());
        assert!(bound_theorem3(&s, i, BoundParams { q: 0.9, p: None }, &c).is_err());
        assert!(bound_pp(&s, i, 0.5, &c).is_err());
        assert!(bound_adk(&s, i, 0.5, &c).is_err());
        let req = BoundRequest {
            qs: vec![0.5],
            classical: false,
        };
        assert!(bound_report(&s, i, &req, &c).is_err());
    }

    #[test]
    fn trapezoid_and_classical_examples() {
        let c = cfg();
        assert!(
            trapezoid_deviation(&subj("x"), iv(1.0, 5.0), &c)
                .unwrap()
                .value
                .abs()
                < 1e-14
        );
        assert!(
            trapezoid_deviation(&subj("2"), iv(1.0, 5.0), &c)
                .unwrap()
                .value
                .abs()
                < 1e-14
        );
        let t = trapezoid_deviation(&subj("x^2"), iv(1.0, 2.0), &c).unwrap();
        assert!((t.value - 1.0 / 6.0).abs() < 1e-14);

        let b = bound_da(&subj("x^2"), iv(1.0, 2.0), &c).unwrap();
        assert_eq!(b.value, 0.75);
        assert!(b.precondition.passed);

        // (ln 1.5 + 1)/4 = 0.351366277027041095494503278866
        let s = subj("x*ln(x)");
        let b = bound_pp_concave(&s, iv(1.0, 2.0), 1.0, &c).unwrap();
        assert!((b.value - 0.351_366_277_027_041_1).abs() < 1e-15);
        assert!(b.precondition.passed);
        // 3/4 - ln 2 = 0.0568528194400546905827678785418
        let t = trapezoid_deviation(&s, iv(1.0, 2.0), &c).unwrap();
        assert!((t.value - 0.056_852_819_440_054_69).abs() < 1e-13);

        for q in [1.0, 1.5, 4.0] {
            let b = bound_pp(&subj("3*x - 1"), iv(0.5, 2.5), q, &c).unwrap();
            assert!((b.value - 1.5).abs() < 1e-14, "q={q}");
        }
    }

    #[test]
    fn adk_prefactor_at_q_one() {
        let i = iv(1.0, 3.0);
        assert_eq!(adk14_value(i, 1.0, 1.0, 1.0), 1.0);
        // q -> 1+ approaches the q = 1 value
        assert!((adk14_value(i, 1.0, 1.0, 1.0 + 1e-9) - 1.0).abs() < 1e-7);
        // q = 2: (1/3)^(1/2)
        assert!((adk14_value(i, 1.0, 1.0, 2.0) - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn hadamard_examples() {
        let c = cfg();
        let h = hadamard_check(&subj("x^2"), iv(1.0, 2.0), &c).unwrap();
        assert_eq!(h.midpoint_value, 2.25);
        assert!((h.mean.value - 7.0 / 3.0).abs() < 1e-14);
        assert_eq!(h.endpoint_average, 2.5);
        assert_eq!(h.direction, Direction::Convex);
        assert_eq!(h.holds, Some(true));

        let h = hadamard_check(&subj("x"), iv(1.0, 2.0), &c).unwrap();
        assert_eq!(h.midpoint_value, 1.5);
        assert!((h.mean.value - 1.5).abs() < 1e-15);
        assert_eq!(h.endpoint_average, 1.5);
        assert_eq!(h.holds, Some(true));

        let h = hadamard_check(&subj("1/x"), iv(1.0, 2.0), &c).unwrap();
        assert!((h.midpoint_value - 2.0 / 3.0).abs() < 1e-15);
        assert!((h.mean.value - std::f64::consts::LN_2).abs() < 1e-14);
        assert_eq!(h.endpoint_average, 0.75);

        let h = hadamard_check(&subj("ln(x)"), iv(1.0, 2.0), &c).unwrap();
        assert_eq!(h.direction, Direction::Concave);
        assert_eq!(h.holds, Some(true));
        assert!(h.midpoint_value > h.mean.value && h.mean.value > h.endpoint_average);

        let h = hadamard_check(&subj("x^3"), iv(0.5, 2.0), &c).unwrap();
        assert_eq!(h.direction, Direction::Convex);
    }

    #[test]
    fn report_for_reciprocal() {
        let c = cfg();
        let req = BoundRequest {
            qs: vec![1.0, 2.0],
            classical: true,
        };
        let r = bound_report(&subj("1/x"), iv(1.0, 2.0), &req, &c).unwrap();
        assert!(r.lemma.holds);
        assert!(!r.has_violation());
        let t1 = r.bound(BoundKind::T1, None).unwrap();
        assert_eq!(t1.verdict, Verdict::Holds);
        assert!((t1.margin - (0.484_375 - 0.390_186_152_773_388)).abs() < 1e-12);
        assert!(r.bound(BoundKind::T2, Some(1.0)).is_none());
        assert!(r.bound(BoundKind::T2, Some(2.0)).is_some());
        // |f'| = 1/x^2 is convex, not concave
        assert_eq!(
            r.bound(BoundKind::PP13, Some(1.0)).unwrap().verdict,
            Verdict::NotApplicable
        );
        assert_eq!(
            r.bound(BoundKind::DA11, None).unwrap().verdict,
            Verdict::Holds
        );
    }

    #[test]
    fn affine_functions_saturate_theorem_one() {
        let c = cfg();
        let req = BoundRequest {
            qs: vec![1.0],
            classical: false,
        };
        let r = bound_report(&subj("x"), iv(1.0, 3.0), &req, &c).unwrap();
        let t1 = r.bound(BoundKind::T1, None).unwrap();
        let t3 = r.bound(BoundKind::T3, Some(1.0)).unwrap();
        assert_eq!(t1.verdict, Verdict::Holds);
        assert_eq!(t3.verdict, Verdict::Holds);
        assert!(t1.margin.abs() < 1e-14 && t3.margin.abs() < 1e-14);
    }

    #[test]
    fn violated_is_distinct_from_not_applicable() {
        // A bound that is too small with its precondition met is a violation.
        let c = cfg();
        let dev = Estimate {
            value: 1.0,
            err: 0.0,
        };
        let pre = ShapeReport {
            mode: ShapeMode::Convex,
            grid_size: 64,
            max_violation: 0.0,
            passed: true,
        };
        let e = BoundEntry::judge(
            BoundKind::T1,
            None,
            BoundValue {
                value: 0.5,
                precondition: pre,
            },
            dev,
            &c,
        );
        assert_eq!(e.verdict, Verdict::Violated);
        assert!(!e.holds);
        assert_eq!(e.margin, -0.5);
        let pre = ShapeReport {
            passed: false,
            max_violation: 1.0,
            ..pre
        };
        let e = BoundEntry::judge(
            BoundKind::T1,
            None,
            BoundValue {
                value: 0.5,
                precondition: pre,
            },
            dev,
            &c,
        );
        assert_eq!(e.verdict, Verdict::NotApplicable);
    }
}
