//! Subcommand drivers: compute, then render as text, JSON or CSV.

use std::fmt::Write as _;
use std::io::Write as _;

use serde_json::json;

use hhverify::hh::{bound_report, BoundRequest, Direction};
use hhverify::props::{prop_sweep_for, PropReport};
use hhverify::verify::{config_digest, gen_corpus, run_suite, SuiteConfig};
use hhverify::{CheckConfig, Interval, MeanSet, Subject, Verdict};

use crate::output::{envelope, fixed, sig17, to_json_string, Format};

/// Process exit status of a subcommand that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Violation,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl<E: std::fmt::Display> From<E> for ConfigError {
    fn from(e: E) -> Self {
        ConfigError(e.to_string())
    }
}

pub type CmdResult = Result<(String, Outcome), ConfigError>;

pub struct Render {
    pub format: Format,
    pub precision: usize,
}

fn csv_string(header: &[&str], rows: Vec<Vec<String>>) -> Result<String, ConfigError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    let bytes = w.into_inner().map_err(|e| ConfigError(e.to_string()))?;
    Ok(String::from_utf8(bytes)?)
}

fn opt_q(q: Option<f64>) -> String {
    q.map_or_else(String::new, sig17)
}

fn check_json(cfg: &CheckConfig) -> serde_json::Value {
    serde_json::to_value(cfg).expect("config serializes")
}

pub fn means(iv: Interval, p: Option<f64>, extend: bool, out: &Render) -> CmdResult {
    let set = match p {
        Some(p) => MeanSet::with_gen_log(iv, p, extend)?,
        None => hhverify::mean_set(iv),
    };
    let mut rows = vec![
        ("A", set.arithmetic),
        ("G", set.geometric),
        ("H", set.harmonic),
        ("L", set.logarithmic),
        ("I", set.identric),
    ];
    if let Some(g) = set.gen_log {
        rows.push(("Lp", g.value));
    }
    let text = match out.format {
        Format::Json => {
            let config =
                json!({"command": "means", "a": iv.a(), "b": iv.b(), "p": p, "extend": extend});
            to_json_string(&envelope(config, None, &set))
        }
        Format::Csv => {
            let mut header = vec![
                "a",
                "b",
                "arithmetic",
                "geometric",
                "harmonic",
                "logarithmic",
                "identric",
            ];
            let mut row = vec![sig17(iv.a()), sig17(iv.b())];
            row.extend(rows.iter().take(5).map(|(_, v)| sig17(*v)));
            if let Some(g) = set.gen_log {
                header.extend(["p", "gen_log"]);
                row.extend([sig17(g.p), sig17(g.value)]);
            }
            csv_string(&header, vec![row])?
        }
        Format::Text => {
            let mut s = String::new();
            for (name, v) in &rows {
                let label = match (*name, set.gen_log) {
                    ("Lp", Some(g)) => format!("L_p (p={})", g.p),
                    _ => name.to_string(),
                };
                writeln!(s, "{label:<12} = {}", fixed(*v, out.precision)).unwrap();
            }
            s
        }
    };
    Ok((text, Outcome::Ok))
}

pub fn bound(
    f: &str,
    iv: Interval,
    qs: Vec<f64>,
    classical: bool,
    cfg: &CheckConfig,
    out: &Render,
) -> CmdResult {
    let subject = Subject::parse(f)?;
    let req = BoundRequest { qs, classical };
    let report = bound_report(&subject, iv, &req, cfg)?;
    let violated =
        report.has_violation() || !report.lemma.holds || report.hadamard.holds == Some(false);
    let outcome = if violated {
        Outcome::Violation
    } else {
        Outcome::Ok
    };
    let p = out.precision;
    let text = match out.format {
        Format::Json => {
            let config = json!({
                "command": "bound",
                "f": report.function,
                "a": iv.a(),
                "b": iv.b(),
                "q": req.qs,
                "classical": classical,
                "check": check_json(cfg),
            });
            to_json_string(&envelope(config, None, &report))
        }
        Format::Csv => {
            let rows = report
                .bounds
                .iter()
                .map(|e| {
                    vec![
                        e.kind.label().to_string(),
                        opt_q(e.q),
                        sig17(e.value),
                        sig17(e.lhs),
                        sig17(e.slack),
                        sig17(e.margin),
                        e.precondition.passed.to_string(),
                        verdict_str(e.verdict).to_string(),
                    ]
                })
                .collect();
            csv_string(
                &[
                    "bound",
                    "q",
                    "value",
                    "lhs",
                    "slack",
                    "margin",
                    "precondition",
                    "verdict",
                ],
                rows,
            )?
        }
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "f(x)      = {}", report.function).unwrap();
            writeln!(s, "f'(x)     = {}", report.derivative).unwrap();
            writeln!(s, "interval  = [{}, {}]", iv.a(), iv.b()).unwrap();
            writeln!(
                s,
                "deviation = {}  (err {:.1e})",
                fixed(report.deviation.value, p),
                report.deviation.err
            )
            .unwrap();
            writeln!(
                s,
                "lemma rhs = {}  (err {:.1e})",
                fixed(report.lemma_rhs.value, p),
                report.lemma_rhs.err
            )
            .unwrap();
            writeln!(
                s,
                "lemma     : residual {:.3e} within slack {:.1e}: {}",
                report.lemma.residual,
                report.lemma.slack,
                if report.lemma.holds {
                    "identity holds"
                } else {
                    "IDENTITY FAILS"
                }
            )
            .unwrap();
            if let Some(t) = report.trapezoid {
                writeln!(s, "trapezoid = {}  (err {:.1e})", fixed(t.value, p), t.err).unwrap();
            }
            writeln!(s).unwrap();
            writeln!(
                s,
                "{:<14} {:>w$} {:>w$} {:>w$}  {:<13} verdict",
                "bound",
                "value",
                "lhs",
                "margin",
                "precondition",
                w = p + 4
            )
            .unwrap();
            for e in &report.bounds {
                writeln!(
                    s,
                    "{:<14} {:>w$} {:>w$} {:>w$}  {:<13} {}",
                    e.label(),
                    fixed(e.value, p),
                    fixed(e.lhs, p),
                    fixed(e.margin, p),
                    format!(
                        "{} {}",
                        shape_word(e.precondition.mode),
                        if e.precondition.passed { "ok" } else { "fails" }
                    ),
                    verdict_str(e.verdict),
                    w = p + 4
                )
                .unwrap();
            }
            let h = &report.hadamard;
            writeln!(s).unwrap();
            let (dir, chain) = match h.direction {
                Direction::Convex => ("f convex", "f(A) <= mean <= (f(a)+f(b))/2"),
                Direction::Concave => (
                    "f concave, inequality reversed",
                    "f(A) >= mean >= (f(a)+f(b))/2",
                ),
                Direction::Undetermined => ("f neither convex nor concave", "not asserted"),
            };
            writeln!(s, "hadamard  : {dir}; {chain}").unwrap();
            writeln!(
                s,
                "            f(A) = {}, mean = {}, endpoint average = {}: {}",
                fixed(h.midpoint_value, p),
                fixed(h.mean.value, p),
                fixed(h.endpoint_average, p),
                match h.holds {
                    Some(true) => "holds",
                    Some(false) => "VIOLATED",
                    None => "n/a",
                }
            )
            .unwrap();
            s
        }
    };
    Ok((text, outcome))
}

fn shape_word(mode: hhverify::ShapeMode) -> &'static str {
    match mode {
        hhverify::ShapeMode::Convex => "convex",
        hhverify::ShapeMode::Concave => "concave",
    }
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "holds",
        Verdict::Violated => "VIOLATED",
        Verdict::NotApplicable => "n/a",
    }
}

fn prop_flags(r: &PropReport) -> String {
    let mut flags = Vec::new();
    if r.lhs_discrepancy {
        flags.push("lhs");
    }
    if r.rhs_discrepancy {
        flags.push("rhs");
    }
    if flags.is_empty() {
        "-".into()
    } else {
        flags.join("+")
    }
}

pub struct PropsArgs {
    pub iv: Interval,
    pub ks: Vec<u8>,
    pub ns: Vec<u32>,
    pub qs: Vec<f64>,
}

pub fn props(args: PropsArgs, cfg: &CheckConfig, out: &Render) -> CmdResult {
    let sweep = prop_sweep_for(&args.ks, &[args.iv], &args.ns, &args.qs, cfg)?;
    let failed = sweep
        .reports
        .iter()
        .any(|r| r.precondition.passed && !r.holds_generic);
    let outcome = if failed {
        Outcome::Violation
    } else {
        Outcome::Ok
    };
    let p = out.precision;
    let text = match out.format {
        Format::Json => {
            let config = json!({
                "command": "props",
                "a": args.iv.a(),
                "b": args.iv.b(),
                "k": args.ks,
                "n": args.ns,
                "q": args.qs,
                "check": check_json(cfg),
            });
            to_json_string(&envelope(config, None, &sweep))
        }
        Format::Csv => {
            let rows = sweep
                .reports
                .iter()
                .map(|r| {
                    vec![
                        r.k.to_string(),
                        r.n.map_or_else(String::new, |n| n.to_string()),
                        opt_q(r.q),
                        r.function.clone(),
                        sig17(r.lhs_printed),
                        sig17(r.lhs_true.value),
                        sig17(r.rhs_printed),
                        sig17(r.rhs_generic),
                        r.middle_term.map_or_else(String::new, |m| sig17(m.printed)),
                        r.middle_term.map_or_else(String::new, |m| sig17(m.actual)),
                        r.lhs_discrepancy.to_string(),
                        r.rhs_discrepancy.to_string(),
                        r.precondition.passed.to_string(),
                        r.holds_generic.to_string(),
                    ]
                })
                .collect();
            csv_string(
                &[
                    "k",
                    "n",
                    "q",
                    "function",
                    "lhs_printed",
                    "lhs_true",
                    "rhs_printed",
                    "rhs_generic",
                    "middle_printed",
                    "middle_actual",
                    "lhs_discrepancy",
                    "rhs_discrepancy",
                    "precondition",
                    "holds_generic",
                ],
                rows,
            )?
        }
        Format::Text => {
            let mut s = String::new();
            let w = p + 4;
            writeln!(
                s,
                "{:>2} {:>2} {:>5} {:<7} {:>w$} {:>w$} {:>w$} {:>w$}  discrepancy",
                "k", "n", "q", "f", "lhs_printed", "lhs_true", "rhs_printed", "rhs_generic"
            )
            .unwrap();
            for r in &sweep.reports {
                writeln!(
                    s,
                    "{:>2} {:>2} {:>5} {:<7} {:>w$} {:>w$} {:>w$} {:>w$}  {}",
                    r.k,
                    r.n.map_or_else(|| "-".into(), |n| n.to_string()),
                    r.q.map_or_else(|| "-".into(), |q| q.to_string()),
                    r.function,
                    fixed(r.lhs_printed, p),
                    fixed(r.lhs_true.value, p),
                    fixed(r.rhs_printed, p),
                    fixed(r.rhs_generic, p),
                    prop_flags(r)
                )
                .unwrap();
            }
            let notes: Vec<&PropReport> =
                sweep.reports.iter().filter(|r| r.lhs_discrepancy).collect();
            for r in notes {
                if let Some(m) = r.middle_term {
                    writeln!(
                        s,
                        "k={}: printed middle term {} vs actual {}",
                        r.k,
                        fixed(m.printed, p),
                        fixed(m.actual, p)
                    )
                    .unwrap();
                }
            }
            s
        }
    };
    Ok((text, outcome))
}

pub struct VerifyArgs {
    pub seed: u64,
    pub count: usize,
    pub range: (f64, f64),
    pub q_list: Vec<f64>,
}

pub fn verify(args: VerifyArgs, cfg: &CheckConfig, out: &Render) -> CmdResult {
    let sc = SuiteConfig {
        check: *cfg,
        q_list: args.q_list.clone(),
        ..SuiteConfig::default()
    };
    let corpus = gen_corpus(args.seed, args.count, args.range, &sc)?;
    let report = run_suite(&corpus, &sc)?;
    let outcome = if report.passed {
        Outcome::Ok
    } else {
        Outcome::Violation
    };
    let text = match out.format {
        Format::Json => {
            let config = json!({
                "command": "verify",
                "seed": args.seed,
                "count": args.count,
                "range": [args.range.0, args.range.1],
                "suite": serde_json::to_value(&sc).expect("config serializes"),
            });
            let digest = config_digest(args.seed, args.count, args.range, &sc);
            to_json_string(&envelope(config, Some(digest), &report))
        }
        Format::Csv => {
            let rows = report
                .tally
                .iter()
                .map(|(name, t)| {
                    vec![
                        name.clone(),
                        t.checked.to_string(),
                        t.not_applicable.to_string(),
                        t.violations.to_string(),
                        t.min_margin.map_or_else(String::new, sig17),
                    ]
                })
                .collect();
            csv_string(
                &[
                    "check",
                    "checked",
                    "not_applicable",
                    "violations",
                    "min_margin",
                ],
                rows,
            )?
        }
        Format::Text => {
            let p = out.precision;
            let mut s = String::new();
            writeln!(
                s,
                "seed {}  cases {}  rejected {}  range [{}, {}]",
                report.seed, report.cases, report.rejections, args.range.0, args.range.1
            )
            .unwrap();
            writeln!(
                s,
                "checks {}  not applicable {}  violations {}  skipped {}",
                report.checks,
                report.not_applicable,
                report.violations.len(),
                report.skips.len()
            )
            .unwrap();
            writeln!(s, "config digest {}", report.config_digest).unwrap();
            writeln!(s).unwrap();
            writeln!(
                s,
                "{:<14} {:>8} {:>8} {:>10} {:>w$}",
                "check",
                "checked",
                "n/a",
                "violations",
                "min margin",
                w = p + 8
            )
            .unwrap();
            for (name, t) in &report.tally {
                writeln!(
                    s,
                    "{:<14} {:>8} {:>8} {:>10} {:>w$}",
                    name,
                    t.checked,
                    t.not_applicable,
                    t.violations,
                    t.min_margin.map_or_else(|| "-".into(), |m| fixed(m, p)),
                    w = p + 8
                )
                .unwrap();
            }
            for v in &report.violations {
                writeln!(
                    s,
                    "VIOLATION case {} {}: f = {} on [{}, {}], lhs {} bound {} margin {:.3e} slack {:.1e}",
                    v.case, v.check, v.function, v.a, v.b, sig17(v.lhs), sig17(v.bound), v.margin, v.slack
                )
                .unwrap();
            }
            for k in &report.skips {
                writeln!(
                    s,
                    "skipped case {}: f = {} on [{}, {}]: {}",
                    k.case, k.function, k.a, k.b, k.reason
                )
                .unwrap();
            }
            writeln!(s, "{}", if report.passed { "PASS" } else { "FAIL" }).unwrap();
            s
        }
    };
    Ok((text, outcome))
}

pub fn write_stdout(text: &str) {
    let mut out = std::io::stdout().lock();
    // a closed pipe is not an error worth reporting
    let _ = out.write_all(text.as_bytes());
    let _ = out.flush();
}
