//! The nine special-means propositions.
//!
//! Each proposition instantiates one of the three deviation bounds with
//! `f = 1/x`, `f = x^n` or `f = -ln x`. Both sides are evaluated twice: once
//! from the closed form as printed, and once generically by running the
//! deviation functional and the bound in [`crate::hh`] on the instantiating
//! function. Disagreements are reported, never corrected.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::ShapeReport;
use crate::hh::{self, BoundKind, BoundParams, CheckConfig, Estimate, Subject};
use crate::means::{self, Interval};

/// Relative threshold for flagging a printed value as different.
pub const DISCREPANCY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropParams {
    pub k: u8,
    pub iv: Interval,
    pub n: Option<u32>,
    pub q: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Instance {
    Reciprocal,
    Power,
    NegLog,
}

impl Instance {
    fn for_k(k: u8) -> Instance {
        match k % 3 {
            1 => Instance::Reciprocal,
            2 => Instance::Power,
            _ => Instance::NegLog,
        }
    }

    fn function_text(self, n: Option<u32>) -> String {
        match self {
            Instance::Reciprocal => "1/x".into(),
            Instance::Power => format!("x^{}", n.unwrap_or(2)),
            Instance::NegLog => "-ln(x)".into(),
        }
    }
}

fn source_bound(k: u8) -> BoundKind {
    match k {
        1..=3 => BoundKind::T1,
        4..=6 => BoundKind::T2,
        _ => BoundKind::T3,
    }
}

impl PropParams {
    pub fn validate(&self) -> Result<()> {
        if !(1..=9).contains(&self.k) {
            return Err(Error::param(format!(
                "proposition index must be 1..=9, got {}",
                self.k
            )));
        }
        if Instance::for_k(self.k) == Instance::Power {
            match self.n {
                Some(n) if n >= 2 => {}
                Some(n) => {
                    return Err(Error::param(format!(
                        "proposition {} needs n >= 2, got {n}",
                        self.k
                    )))
                }
                None => return Err(Error::param(format!("proposition {} needs n", self.k))),
            }
        }
        match (source_bound(self.k), self.q) {
            (BoundKind::T1, _) => {}
            (_, None) => return Err(Error::param(format!("proposition {} needs q", self.k))),
            (BoundKind::T2, Some(q)) if !(q.is_finite() && q > 1.0) => {
                return Err(Error::param(format!(
                    "proposition {} needs q > 1, got {q}",
                    self.k
                )))
            }
            (_, Some(q)) if !(q.is_finite() && q >= 1.0) => {
                return Err(Error::param(format!(
                    "proposition {} needs q >= 1, got {q}",
                    self.k
                )))
            }
            _ => {}
        }
        Ok(())
    }
}

/// Printed and true values of the middle term for `f = x^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiddleTerm {
    /// `(n-1) G^2 L_{n-1}^{n-1} / 2`
    pub printed: f64,
    /// `(a f(b) - b f(a)) / (2(b-a)) = ab (b^{n-1} - a^{n-1}) / (2(b-a))`
    pub actual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropReport {
    pub k: u8,
    pub a: f64,
    pub b: f64,
    pub n: Option<u32>,
    pub q: Option<f64>,
    pub function: String,
    pub source: BoundKind,
    pub lhs_printed: f64,
    pub lhs_true: Estimate,
    pub rhs_printed: f64,
    pub rhs_generic: f64,
    pub middle_term: Option<MiddleTerm>,
    pub precondition: ShapeReport,
    pub lhs_discrepancy: bool,
    pub rhs_discrepancy: bool,
    pub holds_generic: bool,
}

fn differs(printed: f64, generic: f64) -> bool {
    (printed - generic).abs() > DISCREPANCY_TOL * (1.0 + generic.abs())
}

/// `|1/L - 1/H - 1/(2A)|`
fn lhs_reciprocal(iv: Interval) -> f64 {
    let m = means::mean_set(iv);
    (1.0 / m.logarithmic - 1.0 / m.harmonic - 1.0 / (2.0 * m.arithmetic)).abs()
}

/// `|L_n^n + (n-1) G^2 L_{n-1}^{n-1} / 2 - A^n / 2|` and its middle term.
fn lhs_power(iv: Interval, n: u32) -> Result<(f64, MiddleTerm)> {
    let nf = n as f64;
    let ln_n = means::gen_log(iv, nf, false)?.powi(n as i32);
    let ln_n1 = means::gen_log(iv, nf - 1.0, false)?.powi(n as i32 - 1);
    let g2 = means::geometric(iv).powi(2);
    let printed = (nf - 1.0) * g2 * ln_n1 / 2.0;
    let (a, b) = (iv.a(), iv.b());
    let actual = a * b * (b.powi(n as i32 - 1) - a.powi(n as i32 - 1)) / (2.0 * (b - a));
    let lhs = (ln_n + printed - means::arithmetic(iv).powi(n as i32) / 2.0).abs();
    Ok((lhs, MiddleTerm { printed, actual }))
}

/// `|-ln I + ln(a^b / b^a) / (2(b-a)) + ln(A) / 2|`
fn lhs_neglog(iv: Interval) -> f64 {
    let (a, b) = (iv.a(), iv.b());
    let log_ratio = b * a.ln() - a * b.ln();
    (-means::identric(iv).ln() + log_ratio / (2.0 * (b - a)) + means::arithmetic(iv).ln() / 2.0)
        .abs()
}

fn holder_prefactor(iv: Interval, q: f64) -> Result<f64> {
    let p = q / (q - 1.0);
    Ok(4f64.powf(-1.0 - 1.0 / q) * means::gen_log(iv, p, false)?)
}

fn power_mean_prefactor(iv: Interval, q: f64) -> f64 {
    means::arithmetic(iv).powf(1.0 - 1.0 / q) / (4.0 * 12f64.powf(1.0 / q))
}

/// Right-hand sides exactly as printed.
fn printed_rhs(k: u8, iv: Interval, n: Option<u32>, q: Option<f64>) -> Result<f64> {
    let (a, b) = (iv.a(), iv.b());
    let n = n.unwrap_or(2) as f64;
    let q = q.unwrap_or(1.0);
    let am = |x: f64, y: f64| (x + y) / 2.0;
    Ok(match k {
        1 => {
            (5.0 / 48.0 * a + 7.0 / 48.0 * b) / (a * a)
                + (7.0 / 48.0 * a + 5.0 / 48.0 * b) / (b * b)
        }
        2 => {
            5.0 * n / 24.0 * am(a.powf(n), b.powf(n))
                + 7.0 * n / 24.0 * am(b * a.powf(n - 1.0), a * b.powf(n - 1.0))
        }
        3 => 12.0 / 48.0 + 7.0 * b / (48.0 * a) + 5.0 * a / (48.0 * b),
        4 => {
            let (am2q, bm2q) = (a.powf(-2.0 * q), b.powf(-2.0 * q));
            holder_prefactor(iv, q)?
                * ((bm2q + 3.0 * am2q).powf(1.0 / q) + (am2q + 3.0 * bm2q).powf(1.0 / q))
        }
        5 => {
            let (an, bn) = (a.powf((n - 1.0) * q), b.powf((n - 1.0) * q));
            holder_prefactor(iv, q)?
                * ((n * bn + 3.0 * n * an).powf(1.0 / q) + (n * an + 3.0 * n * bn).powf(1.0 / q))
        }
        6 => {
            let (amq, bmq) = (a.powf(-q), b.powf(-q));
            holder_prefactor(iv, q)?
                * ((bmq + 3.0 * amq).powf(1.0 / q) + (amq + 3.0 * bmq).powf(1.0 / q))
        }
        7 => {
            let (am2q, bm2q) = (a.powf(-2.0 * q), b.powf(-2.0 * q));
            power_mean_prefactor(iv, q)
                * ((bm2q * (2.0 * a + b) + am2q * (4.0 * a + 5.0 * b)).powf(1.0 / q)
                    + (am2q * (a + 2.0 * b) + bm2q * (5.0 * a + 4.0 * b)).powf(1.0 / q))
        }
        8 => {
            let (da, db) = ((n * a.powf(n - 1.0)).powf(q), (n * b.powf(n - 1.0)).powf(q));
            power_mean_prefactor(iv, q)
                * ((db * (2.0 * a + b) + da * (4.0 * a + 5.0 * b)).powf(1.0 / q)
                    + (da * (a + 2.0 * b) + db * (5.0 * a + 4.0 * b)).powf(1.0 / q))
        }
        9 => {
            let (amq, bmq) = (a.powf(-q), b.powf(-q));
            power_mean_prefactor(iv, q)
                * ((bmq * (2.0 * a + b) + amq * (4.0 * a + 5.0 * b)).powf(1.0 / q)
                    + (amq * (a + 2.0 * b) + bmq * (5.0 * a + 4.0 * b)).powf(1.0 / q))
        }
        _ => {
            return Err(Error::param(format!(
                "proposition index must be 1..=9, got {k}"
            )))
        }
    })
}

/// Evaluate one proposition in printed and generic form.
pub fn proposition(params: &PropParams, cfg: &CheckConfig) -> Result<PropReport> {
    params.validate()?;
    let PropParams { k, iv, n, q } = *params;
    let instance = Instance::for_k(k);
    let n = if instance == Instance::Power { n } else { None };
    let source = source_bound(k);
    let q = if source == BoundKind::T1 { None } else { q };

    let subject = Subject::parse(&instance.function_text(n))?;
    let dev = hh::deviation(&subject, iv, cfg)?;
    let lhs_true = Estimate {
        value: dev.value.abs(),
        err: dev.err,
    };

    let (lhs_printed, middle_term) = match instance {
        Instance::Reciprocal => (lhs_reciprocal(iv), None),
        Instance::Power => {
            let (lhs, mid) = lhs_power(iv, n.unwrap_or(2))?;
            (lhs, Some(mid))
        }
        Instance::NegLog => (lhs_neglog(iv), None),
    };

    let generic = match source {
        BoundKind::T1 => hh::bound_theorem1(&subject, iv, cfg)?,
        BoundKind::T2 => {
            hh::bound_theorem2(&subject, iv, BoundParams::holder(q.unwrap_or(2.0))?, cfg)?
        }
        _ => hh::bound_theorem3(
            &subject,
            iv,
            BoundParams::power_mean(q.unwrap_or(1.0))?,
            cfg,
        )?,
    };
    let rhs_printed = printed_rhs(k, iv, n, q)?;

    Ok(PropReport {
        k,
        a: iv.a(),
        b: iv.b(),
        n,
        q,
        function: subject.f().to_string(),
        source,
        lhs_printed,
        lhs_true,
        rhs_printed,
        rhs_generic: generic.value,
        middle_term,
        precondition: generic.precondition,
        lhs_discrepancy: differs(lhs_printed, lhs_true.value),
        rhs_discrepancy: differs(rhs_printed, generic.value),
        holds_generic: lhs_true.value <= generic.value + cfg.slack(lhs_true.err),
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscrepancyTally {
    pub cells: usize,
    pub lhs_discrepancies: usize,
    pub rhs_discrepancies: usize,
    pub generic_failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropSweep {
    pub reports: Vec<PropReport>,
    /// Keyed by proposition index.
    pub tally: BTreeMap<u8, DiscrepancyTally>,
}

/// Every proposition over the Cartesian product of the parameter lists.
pub fn prop_sweep(
    ivs: &[Interval],
    ns: &[u32],
    qs: &[f64],
    cfg: &CheckConfig,
) -> Result<PropSweep> {
    prop_sweep_for(&[1, 2, 3, 4, 5, 6, 7, 8, 9], ivs, ns, qs, cfg)
}

/// Sweep restricted to the propositions in `ks`.
///
/// Cells are ordered by `k`, then interval, then `n`, then `q`. A `q` that
/// a proposition's source bound does not admit is skipped for that `k`, as
/// are propositions whose parameter list is empty.
pub fn prop_sweep_for(
    ks: &[u8],
    ivs: &[Interval],
    ns: &[u32],
    qs: &[f64],
    cfg: &CheckConfig,
) -> Result<PropSweep> {
    let mut cells = Vec::new();
    let mut ks = ks.to_vec();
    ks.sort_unstable();
    ks.dedup();
    for &k in &ks {
        if !(1..=9).contains(&k) {
            return Err(Error::param(format!(
                "proposition index must be 1..=9, got {k}"
            )));
        }
        let n_opts: Vec<Option<u32>> = if Instance::for_k(k) == Instance::Power {
            ns.iter().map(|&n| Some(n)).collect()
        } else {
            vec![None]
        };
        let q_opts: Vec<Option<f64>> = match source_bound(k) {
            BoundKind::T1 => vec![None],
            BoundKind::T2 => qs.iter().filter(|&&q| q > 1.0).map(|&q| Some(q)).collect(),
            _ => qs.iter().filter(|&&q| q >= 1.0).map(|&q| Some(q)).collect(),
        };
        for &iv in ivs {
            for &n in &n_opts {
                for &q in &q_opts {
                    cells.push(PropParams { k, iv, n, q });
                }
            }
        }
    }
    let reports = cells
        .iter()
        .map(|p| proposition(p, cfg))
        .collect::<Result<Vec<_>>>()?;
    let mut tally: BTreeMap<u8, DiscrepancyTally> = BTreeMap::new();
    for r in &reports {
        let t = tally.entry(r.k).or_default();
        t.cells += 1;
        t.lhs_discrepancies += r.lhs_discrepancy as usize;
        t.rhs_discrepancies += r.rhs_discrepancy as usize;
        t.generic_failures += !r.holds_generic as usize;
    }
    Ok(PropSweep { reports, tally })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Interval {
        Interval::new(1.0, 2.0).unwrap()
    }

    fn run(k: u8, n: Option<u32>, q: Option<f64>) -> PropReport {
        proposition(
            &PropParams {
                k,
                iv: unit(),
                n,
                q,
            },
            &CheckConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn reciprocal_theorem_one() {
        let r = run(1, None, None);
        // |ln 2 - 3/4 - 1/3|
        assert!((r.lhs_printed - 0.390_186_152_773_388).abs() < 1e-14);
        assert!((r.lhs_true.value - 0.390_186_152_773_388).abs() < 1e-12);
        assert!((r.rhs_printed - 93.0 / 192.0).abs() < 1e-15);
        assert!((r.rhs_generic - 93.0 / 192.0).abs() < 1e-15);
        assert!(!r.lhs_discrepancy && !r.rhs_discrepancy && r.holds_generic);
    }

    #[test]
    fn neglog_theorem_one_constant_is_off() {
        let r = run(3, None, None);
        // 0.530135397345781082554073745913
        assert!((r.lhs_true.value - 0.530_135_397_345_781_1).abs() < 1e-12);
        assert!(!r.lhs_discrepancy);
        assert!((r.rhs_printed - 0.593_75).abs() < 1e-15);
        assert!((r.rhs_generic - 27.5 / 48.0).abs() < 1e-15);
        assert!(r.rhs_discrepancy);
        assert!(r.holds_generic);
    }

    #[test]
    fn power_middle_term_is_off() {
        let r = run(2, Some(2), None);
        let mid = r.middle_term.unwrap();
        assert!((mid.printed - 1.5).abs() < 1e-14);
        assert!((mid.actual - 1.0).abs() < 1e-15);
        assert!(r.lhs_discrepancy);
        assert!(!r.rhs_discrepancy);
        // f = x^2 saturates T1: |f'| is affine and positive.
        assert!((r.lhs_true.value - 53.0 / 24.0).abs() < 1e-12);
        assert!((r.rhs_generic - 53.0 / 24.0).abs() < 1e-13);
        assert!(r.holds_generic);
    }

    #[test]
    fn power_holder_bracket_is_off() {
        let r = run(5, Some(2), Some(2.0));
        let pre = holder_prefactor(unit(), 2.0).unwrap();
        // printed: sqrt(2*4 + 6) + sqrt(2 + 3*2*4); generic: sqrt(16 + 12) + sqrt(4 + 48)
        let printed = pre * (14f64.sqrt() + 26f64.sqrt());
        let generic = pre * (28f64.sqrt() + 52f64.sqrt());
        assert!((r.rhs_printed - printed).abs() < 1e-14);
        assert!((r.rhs_generic - generic).abs() < 1e-14);
        assert!(r.rhs_discrepancy && r.lhs_discrepancy && r.holds_generic);
    }

    #[test]
    fn parameter_errors() {
        let cfg = CheckConfig::default();
        let bad = |k, n, q| {
            proposition(
                &PropParams {
                    k,
                    iv: unit(),
                    n,
                    q,
                },
                &cfg,
            )
            .is_err()
        };
        assert!(bad(0, None, None));
        assert!(bad(10, None, None));
        assert!(bad(2, None, None));
        assert!(bad(2, Some(1), None));
        assert!(bad(4, None, Some(1.0)));
        assert!(bad(4, None, None));
        assert!(bad(7, None, Some(0.5)));
        assert!(!bad(7, None, Some(1.0)));
    }

    #[test]
    fn sweep_ordering_and_filtering() {
        let cfg = CheckConfig::default();
        let s = prop_sweep(&[unit()], &[2], &[], &cfg).unwrap();
        let ks: Vec<u8> = s.reports.iter().map(|r| r.k).collect();
        assert_eq!(ks, vec![1, 2, 3]);

        let s = prop_sweep(&[unit()], &[2, 3], &[1.0, 2.0], &cfg).unwrap();
        let ks: Vec<u8> = s.reports.iter().map(|r| r.k).collect();
        assert_eq!(ks, vec![1, 2, 2, 3, 4, 5, 5, 6, 7, 7, 8, 8, 8, 8, 9, 9]);
        assert_eq!(s.tally[&8].cells, 4);
        assert!(s.tally.values().all(|t| t.generic_failures == 0));

        let s = prop_sweep_for(&[7], &[unit()], &[], &[1.0], &cfg).unwrap();
        assert_eq!(s.reports.len(), 1);
        assert!((s.reports[0].rhs_generic - 0.484_375).abs() < 1e-15);
        assert!(s.reports[0].holds_generic);
    }
}
