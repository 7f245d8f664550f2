//! Special means of two positive numbers.
//!
//! All closed forms are evaluated in terms of `a` and the ratio `r = b/a`
//! with `ln_1p`/`expm1`, which keeps them accurate when `b` is close to `a`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadConfig};

/// A validated interval `0 < a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a.is_finite() && b.is_finite() && 0.0 < a && a < b {
            Ok(Interval { a, b })
        } else {
            Err(Error::InvalidInterval { a, b })
        }
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn b(&self) -> f64 {
        self.b
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    #[inline]
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    /// `(b - a) / a`, the ratio `b/a` minus one.
    #[inline]
    fn excess(&self) -> f64 {
        (self.b - self.a) / self.a
    }

    /// `ln(b/a)`
    #[inline]
    fn log_ratio(&self) -> f64 {
        self.excess().ln_1p()
    }

    pub fn scaled(&self, t: f64) -> Result<Self> {
        Interval::new(self.a * t, self.b * t)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            a: f64,
            b: f64,
        }
        let raw = Raw::deserialize(d)?;
        Interval::new(raw.a, raw.b).map_err(serde::de::Error::custom)
    }
}

/// Generalized logarithmic mean together with its exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenLog {
    pub p: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSet {
    pub arithmetic: f64,
    pub geometric: f64,
    pub harmonic: f64,
    pub logarithmic: f64,
    pub identric: f64,
    pub gen_log: Option<GenLog>,
}

pub fn arithmetic(iv: Interval) -> f64 {
    iv.midpoint()
}

pub fn geometric(iv: Interval) -> f64 {
    (iv.a * iv.b).sqrt()
}

pub fn harmonic(iv: Interval) -> f64 {
    2.0 * iv.a * iv.b / (iv.a + iv.b)
}

/// `(b - a) / (ln b - ln a)`
pub fn logarithmic(iv: Interval) -> f64 {
    (iv.b - iv.a) / iv.log_ratio()
}

/// `(1/e) (b^b / a^a)^(1/(b-a))`, evaluated as `a exp(r ln r / (r - 1) - 1)`.
pub fn identric(iv: Interval) -> f64 {
    let u = iv.excess();
    iv.a * ((1.0 + u) * iv.log_ratio() / u - 1.0).exp()
}

pub fn mean_set(iv: Interval) -> MeanSet {
    MeanSet {
        arithmetic: arithmetic(iv),
        geometric: geometric(iv),
        harmonic: harmonic(iv),
        logarithmic: logarithmic(iv),
        identric: identric(iv),
        gen_log: None,
    }
}

impl MeanSet {
    pub fn with_gen_log(iv: Interval, p: f64, extend: bool) -> Result<Self> {
        let mut m = mean_set(iv);
        m.gen_log = Some(GenLog {
            p,
            value: gen_log(iv, p, extend)?,
        });
        Ok(m)
    }
}

/// Distance from a singular exponent below which the series forms are used.
const NEAR_SINGULAR: f64 = 1e-6;

/// `expm1(y) / y`, continuous at zero.
fn expm1_ratio(y: f64) -> f64 {
    if y.abs() < 1e-5 {
        1.0 + y / 2.0 + y * y / 6.0 + y * y * y / 24.0
    } else {
        y.exp_m1() / y
    }
}

/// Generalized logarithmic mean
/// `L_p(a, b) = ((b^(p+1) - a^(p+1)) / ((p+1)(b-a)))^(1/p)`.
///
/// `p = 0` and `p = -1` are rejected unless `extend` is set, in which case
/// they map to the identric and logarithmic means, the continuous limits.
/// `p = 1` returns the arithmetic mean exactly.
pub fn gen_log(iv: Interval, p: f64, extend: bool) -> Result<f64> {
    if !p.is_finite() {
        return Err(Error::param(format!(
            "gen_log exponent must be finite, got {p}"
        )));
    }
    if (p == 0.0 || p == -1.0) && !extend {
        return Err(Error::param(format!(
            "gen_log exponent p = {p} is excluded; enable the limit extension to map it to {}",
            if p == 0.0 { "I(a,b)" } else { "L(a,b)" }
        )));
    }
    if p == 0.0 {
        return Ok(identric(iv));
    }
    if p == -1.0 {
        return Ok(logarithmic(iv));
    }
    if p == 1.0 {
        return Ok(arithmetic(iv));
    }
    if p.abs() < NEAR_SINGULAR {
        return gen_log_near_zero(iv, p);
    }
    Ok(gen_log_closed(iv, p))
}

fn gen_log_closed(iv: Interval, p: f64) -> f64 {
    // L_p = a * [ (r^(p+1) - 1) / ((p+1)(r-1)) ]^(1/p)
    //     = a * [ ln(r) * expm1_ratio((p+1) ln r) / (r - 1) ]^(1/p)
    // The p+1 -> 0 limit of the bracket is ln(r)/(r-1) = a/L, no special case.
    let lr = iv.log_ratio();
    let bracket = lr * expm1_ratio((p + 1.0) * lr) / iv.excess();
    iv.a * (bracket.ln() / p).exp()
}

/// Cumulant expansion around `p = 0`: with `Y = ln x`, `x` uniform on
/// `[a, b]`, `ln L_p = E[Y] + p Var(Y)/2 + p^2 k3(Y)/6 + O(p^3)`.
fn gen_log_near_zero(iv: Interval, p: f64) -> Result<f64> {
    let mean = identric(iv).ln();
    let cfg = QuadConfig::default();
    let central = |k: i32| -> Result<f64> {
        let g = move |x: f64| -> std::result::Result<f64, crate::expr::EvalError> {
            Ok((x.ln() - mean).powi(k))
        };
        Ok(integrate(&g, iv.a, iv.b, &cfg)?.value / iv.width())
    };
    let var = central(2)?;
    let k3 = central(3)?;
    Ok((mean + p * var / 2.0 + p * p * k3 / 6.0).exp())
}
