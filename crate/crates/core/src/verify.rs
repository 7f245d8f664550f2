//! Seeded corpus generation and the full inequality suite.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::expr::{FuncExpr, ShapeMode};
use crate::hh::{self, BoundRequest, CheckConfig, Direction, Subject, Verdict};
use crate::means::Interval;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub check: CheckConfig,
    /// Exponents for which `|f'|^q` shape gates are tagged on each case.
    pub gate_qs: Vec<f64>,
    /// Exponents run by the suite; `q = 1` is always added.
    pub q_list: Vec<f64>,
    /// Generation fails once rejections exceed this multiple of `count`.
    pub max_rejection_ratio: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            check: CheckConfig::default(),
            gate_qs: vec![1.0, 1.5, 2.0, 3.0, 5.0],
            q_list: vec![1.0, 1.5, 2.0, 3.0, 5.0],
            max_rejection_ratio: 20,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        self.check.validate()?;
        for &q in self.gate_qs.iter().chain(&self.q_list) {
            if !(q.is_finite() && q >= 1.0) {
                return Err(Error::param(format!(
                    "suite exponents must satisfy q >= 1, got {q}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateTag {
    pub q: f64,
    /// `|f'|^q` passed the convexity gate.
    pub convex: bool,
    /// `|f'|^q` passed the concavity gate.
    pub concave: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseTags {
    pub f_convex: bool,
    pub gates: Vec<GateTag>,
}

impl CaseTags {
    pub fn gate(&self, q: f64) -> Option<&GateTag> {
        self.gates.iter().find(|g| g.q == q)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusCase {
    pub f: FuncExpr,
    pub iv: Interval,
    pub tags: CaseTags,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub f: String,
    pub a: f64,
    pub b: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub seed: u64,
    pub range: (f64, f64),
    pub cases: Vec<CorpusCase>,
    pub rejections: Vec<Rejection>,
}

/// Shape-gate a candidate: `f` must be convex on `iv` and `|f'|^q` must be
/// convex or concave for at least one tagged `q`.
pub fn admit(
    f: FuncExpr,
    iv: Interval,
    cfg: &SuiteConfig,
) -> std::result::Result<CorpusCase, Rejection> {
    let reject = |f: &FuncExpr, reason: String| Rejection {
        f: f.to_string(),
        a: iv.a(),
        b: iv.b(),
        reason,
    };
    let subject = Subject::new(f.clone());
    let convex = subject
        .function_gate(iv, ShapeMode::Convex, &cfg.check)
        .map_err(|e| reject(&f, e.to_string()))?;
    if !convex.passed {
        return Err(reject(
            &f,
            format!(
                "f is not convex on the interval (violation {:e})",
                convex.max_violation
            ),
        ));
    }
    let mut gates = Vec::with_capacity(cfg.gate_qs.len());
    for &q in &cfg.gate_qs {
        let cv = subject
            .derivative_gate(iv, q, ShapeMode::Convex, &cfg.check)
            .map_err(|e| reject(&f, e.to_string()))?;
        let cc = subject
            .derivative_gate(iv, q, ShapeMode::Concave, &cfg.check)
            .map_err(|e| reject(&f, e.to_string()))?;
        gates.push(GateTag {
            q,
            convex: cv.passed,
            concave: cc.passed,
        });
    }
    if !gates.iter().any(|g| g.convex || g.concave) {
        return Err(reject(&f, "no |f'|^q shape gate passes".into()));
    }
    Ok(CorpusCase {
        f,
        iv,
        tags: CaseTags {
            f_convex: true,
            gates,
        },
    })
}

fn round_to(v: f64, digits: i32) -> f64 {
    let s = 10f64.powi(digits);
    (v * s).round() / s
}

fn draw_interval(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Interval {
    loop {
        let x = round_to(rng.gen_range(lo..hi), 4);
        let y = round_to(rng.gen_range(lo..hi), 4);
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        if let Ok(iv) = Interval::new(a, b) {
            if b - a >= 1e-3 * (hi - lo) {
                return iv;
            }
        }
    }
}

fn signed_term(out: &mut String, coef: f64, body: &str) {
    if coef == 0.0 {
        return;
    }
    let mag = coef.abs();
    if out.is_empty() {
        if coef < 0.0 {
            out.push('-');
        }
    } else {
        out.push_str(if coef < 0.0 { " - " } else { " + " });
    }
    if body.is_empty() {
        out.push_str(&mag.to_string());
    } else if mag == 1.0 {
        out.push_str(body);
    } else {
        out.push_str(&format!("{mag}*{body}"));
    }
}

/// A positive combination of one to three convex basis functions plus an
/// affine term.
fn draw_function(rng: &mut ChaCha8Rng) -> String {
    let mut text = String::new();
    let terms = rng.gen_range(1..=3);
    for _ in 0..terms {
        let w = round_to(rng.gen_range(0.1..2.0), 3);
        let body = match rng.gen_range(0..8) {
            0 => "x^2".to_string(),
            1 => "x^3".to_string(),
            2 => "x^4".to_string(),
            3 => "x^5".to_string(),
            4 => "1/x".to_string(),
            5 => "ln(x)".to_string(),
            6 => format!("exp({}*x)", round_to(rng.gen_range(0.2..=1.0), 2)),
            _ => "x*ln(x)".to_string(),
        };
        // -ln(x) enters with a negated weight.
        let w = if body == "ln(x)" { -w } else { w };
        signed_term(&mut text, w, &body);
    }
    let slope = round_to(rng.gen_range(-1.0..1.0), 3);
    let intercept = round_to(rng.gen_range(-1.0..1.0), 3);
    signed_term(&mut text, slope, "x");
    signed_term(&mut text, intercept, "");
    text
}

/// Draw `count` admitted cases from a seeded generator. Identical arguments
/// give identical corpora.
pub fn gen_corpus(seed: u64, count: usize, range: (f64, f64), cfg: &SuiteConfig) -> Result<Corpus> {
    cfg.validate()?;
    if count == 0 {
        return Err(Error::param("corpus count must be at least 1"));
    }
    let (lo, hi) = range;
    Interval::new(lo, hi).map_err(|_| {
        Error::param(format!(
            "corpus range must satisfy 0 < lo < hi, got ({lo}, {hi})"
        ))
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::with_capacity(count);
    let mut rejections = Vec::new();
    let cap = cfg.max_rejection_ratio.saturating_mul(count);
    while cases.len() < count {
        let text = draw_function(&mut rng);
        let iv = draw_interval(&mut rng, lo, hi);
        let f = FuncExpr::parse(&text)
            .map_err(|e| Error::param(format!("generated `{text}` failed to parse: {e}")))?;
        match admit(f, iv, cfg) {
            Ok(case) => cases.push(case),
            Err(r) => {
                rejections.push(r);
                if rejections.len() > cap {
                    return Err(Error::param(format!(
                        "corpus generation rejected {} candidates for {} accepted cases",
                        rejections.len(),
                        cases.len()
                    )));
                }
            }
        }
    }
    Ok(Corpus {
        seed,
        range,
        cases,
        rejections,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub case: usize,
    pub function: String,
    pub a: f64,
    pub b: f64,
    pub check: String,
    pub lhs: f64,
    pub bound: f64,
    pub margin: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skip {
    pub case: usize,
    pub function: String,
    pub a: f64,
    pub b: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckTally {
    pub checked: usize,
    pub not_applicable: usize,
    pub violations: usize,
    /// Smallest margin over applicable cases.
    pub min_margin: Option<f64>,
}

impl CheckTally {
    fn record(&mut self, applicable: bool, violated: bool, margin: f64) {
        if !applicable {
            self.not_applicable += 1;
            return;
        }
        self.checked += 1;
        self.violations += violated as usize;
        self.min_margin = Some(self.min_margin.map_or(margin, |m| m.min(margin)));
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub range: (f64, f64),
    pub cases: usize,
    pub rejections: usize,
    pub checks: usize,
    pub not_applicable: usize,
    pub violations: Vec<Violation>,
    pub skips: Vec<Skip>,
    pub tally: BTreeMap<String, CheckTally>,
    pub config_digest: String,
    pub passed: bool,
}

#[derive(Serialize)]
struct DigestInput<'a> {
    tool_version: &'a str,
    seed: u64,
    count: usize,
    range: (f64, f64),
    config: &'a SuiteConfig,
}

/// Hex SHA-256 of the compact JSON serialization of `value`.
pub fn digest_json<T: Serialize + ?Sized>(value: &T) -> String {
    let json = serde_json::to_vec(value).expect("config serializes");
    hex::encode(Sha256::digest(&json))
}

/// Digest of everything that determines a suite report.
pub fn config_digest(seed: u64, count: usize, range: (f64, f64), cfg: &SuiteConfig) -> String {
    digest_json(&DigestInput {
        tool_version: crate::TOOL_VERSION,
        seed,
        count,
        range,
        config: cfg,
    })
}

enum CaseOutcome {
    Checked(Vec<(String, bool, bool, f64, Option<Violation>)>),
    Skipped(Skip),
}

fn run_case(index: usize, case: &CorpusCase, req: &BoundRequest, cfg: &CheckConfig) -> CaseOutcome {
    let subject = Subject::new(case.f.clone());
    let report = match hh::bound_report(&subject, case.iv, req, cfg) {
        Ok(r) => r,
        Err(e) => {
            return CaseOutcome::Skipped(Skip {
                case: index,
                function: case.f.to_string(),
                a: case.iv.a(),
                b: case.iv.b(),
                reason: e.to_string(),
            })
        }
    };
    let violation = |check: String, lhs: f64, bound: f64, margin: f64, slack: f64| Violation {
        case: index,
        function: case.f.to_string(),
        a: case.iv.a(),
        b: case.iv.b(),
        check,
        lhs,
        bound,
        margin,
        slack,
    };
    let mut out = Vec::new();

    let lemma = report.lemma;
    let margin = lemma.slack - lemma.residual;
    out.push((
        "lemma".to_string(),
        true,
        !lemma.holds,
        margin,
        (!lemma.holds).then(|| violation("lemma".into(), lemma.residual, 0.0, margin, lemma.slack)),
    ));

    for b in &report.bounds {
        let label = b.label();
        let violated = b.verdict == Verdict::Violated;
        out.push((
            label.clone(),
            b.verdict != Verdict::NotApplicable,
            violated,
            b.margin,
            violated.then(|| violation(label, b.lhs, b.value, b.margin, b.slack)),
        ));
    }

    let h = report.hadamard;
    let applicable = h.direction != Direction::Undetermined;
    let violated = h.holds == Some(false);
    let (lo_gap, hi_gap) = match h.direction {
        Direction::Concave => (
            h.midpoint_value - h.mean.value,
            h.mean.value - h.endpoint_average,
        ),
        _ => (
            h.mean.value - h.midpoint_value,
            h.endpoint_average - h.mean.value,
        ),
    };
    let margin = lo_gap.min(hi_gap);
    out.push((
        "hadamard".to_string(),
        applicable,
        violated,
        margin,
        violated.then(|| {
            violation(
                "hadamard".into(),
                h.mean.value,
                h.endpoint_average,
                margin,
                h.slack,
            )
        }),
    ));
    CaseOutcome::Checked(out)
}

/// Run the identity check, all seven bounds (gated) and the Hadamard chain
/// on every case. Cases run in parallel; the report is assembled in corpus
/// order.
pub fn run_suite(corpus: &Corpus, cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    if corpus.cases.is_empty() {
        return Err(Error::param("corpus is empty"));
    }
    let mut qs = vec![1.0];
    for &q in &cfg.q_list {
        if !qs.contains(&q) {
            qs.push(q);
        }
    }
    let req = BoundRequest {
        qs,
        classical: true,
    };

    let outcomes: Vec<CaseOutcome> = corpus
        .cases
        .par_iter()
        .enumerate()
        .map(|(i, c)| run_case(i, c, &req, &cfg.check))
        .collect();

    let mut tally: BTreeMap<String, CheckTally> = BTreeMap::new();
    let mut violations = Vec::new();
    let mut skips = Vec::new();
    let (mut checks, mut not_applicable) = (0, 0);
    for outcome in outcomes {
        match outcome {
            CaseOutcome::Skipped(s) => skips.push(s),
            CaseOutcome::Checked(rows) => {
                for (label, applicable, violated, margin, v) in rows {
                    tally
                        .entry(label)
                        .or_default()
                        .record(applicable, violated, margin);
                    if applicable {
                        checks += 1;
                    } else {
                        not_applicable += 1;
                    }
                    violations.extend(v);
                }
            }
        }
    }
    Ok(SuiteReport {
        seed: corpus.seed,
        range: corpus.range,
        cases: corpus.cases.len(),
        rejections: corpus.rejections.len(),
        checks,
        not_applicable,
        passed: violations.is_empty(),
        violations,
        skips,
        tally,
        config_digest: config_digest(corpus.seed, corpus.cases.len(), corpus.range, cfg),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SuiteConfig {
        SuiteConfig::default()
    }

    #[test]
    fn generation_is_deterministic() {
        let a = gen_corpus(1, 1, (0.1, 10.0), &cfg()).unwrap();
        let b = gen_corpus(1, 1, (0.1, 10.0), &cfg()).unwrap();
        assert_eq!(a.cases.len(), 1);
        assert_eq!(a, b);
        let c = gen_corpus(2, 1, (0.1, 10.0), &cfg()).unwrap();
        assert_ne!(a.cases, c.cases);
    }

    #[test]
    fn generation_preconditions() {
        assert!(gen_corpus(1, 0, (0.1, 10.0), &cfg()).is_err());
        assert!(gen_corpus(1, 5, (0.0, 10.0), &cfg()).is_err());
        assert!(gen_corpus(1, 5, (3.0, 1.0), &cfg()).is_err());
    }

    #[test]
    fn generated_text_round_trips() {
        let corpus = gen_corpus(11, 30, (0.1, 10.0), &cfg()).unwrap();
        for c in &corpus.cases {
            assert!(c.tags.f_convex);
            assert_eq!(FuncExpr::parse(&c.f.to_string()).unwrap(), c.f);
            assert!(c.iv.a() >= 0.1 && c.iv.b() <= 10.0);
        }
    }

    #[test]
    fn concave_function_is_rejected() {
        let iv = Interval::new(1.0, 4.0).unwrap();
        let r = admit(FuncExpr::parse("sqrt(x)").unwrap(), iv, &cfg()).unwrap_err();
        assert!(r.reason.contains("not convex"));
        assert!(admit(FuncExpr::parse("x^2").unwrap(), iv, &cfg()).is_ok());
    }

    #[test]
    fn reference_functions_pass_the_suite() {
        let iv = Interval::new(1.0, 2.0).unwrap();
        let mut cases = Vec::new();
        for s in ["1/x", "x^2", "-ln(x)"] {
            cases.push(admit(FuncExpr::parse(s).unwrap(), iv, &cfg()).unwrap());
        }
        let corpus = Corpus {
            seed: 0,
            range: (1.0, 2.0),
            cases,
            rejections: vec![],
        };
        let sc = SuiteConfig {
            q_list: vec![2.0],
            ..cfg()
        };
        let r = run_suite(&corpus, &sc).unwrap();
        assert!(r.passed, "{:?}", r.violations);
        assert!(r.tally.contains_key("T2(q=2)"));
        assert!(r.tally.contains_key("T3(q=1)"));

        let sc = SuiteConfig {
            q_list: vec![],
            ..cfg()
        };
        let r = run_suite(&corpus, &sc).unwrap();
        assert!(r.passed);
        assert!(!r.tally.keys().any(|k| k.starts_with("T2")));
        for k in [
            "T1",
            "T3(q=1)",
            "DA11",
            "PP12(q=1)",
            "PP13(q=1)",
            "ADK14(q=1)",
            "lemma",
            "hadamard",
        ] {
            assert!(r.tally.contains_key(k), "missing {k}");
        }
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let corpus = Corpus {
            seed: 0,
            range: (1.0, 2.0),
            cases: vec![],
            rejections: vec![],
        };
        assert!(run_suite(&corpus, &cfg()).is_err());
    }

    #[test]
    fn digest_tracks_config() {
        let base = config_digest(1, 10, (0.1, 10.0), &cfg());
        assert_eq!(base, config_digest(1, 10, (0.1, 10.0), &cfg()));
        assert_ne!(base, config_digest(2, 10, (0.1, 10.0), &cfg()));
        let mut other = cfg();
        other.check.slack_floor = 1e-8;
        assert_ne!(base, config_digest(1, 10, (0.1, 10.0), &other));
        assert_eq!(base.len(), 64);
    }
}
