use hhverify::{integrate, FuncExpr, QuadConfig};
use proptest::prelude::*;

type Antiderivative = fn(f64) -> f64;

/// Integrands on (0, inf) with closed-form antiderivatives.
const BATTERY: [(&str, Antiderivative); 12] = [
    ("1", |x| x),
    ("x", |x| x * x / 2.0),
    ("x^2", |x| x.powi(3) / 3.0),
    ("x^5", |x| x.powi(6) / 6.0),
    ("x^-2", |x| -1.0 / x),
    ("x^0.5", |x| x.powf(1.5) / 1.5),
    ("1/x", |x| x.ln()),
    ("ln(x)", |x| x * x.ln() - x),
    ("x*ln(x)", |x| x * x / 2.0 * x.ln() - x * x / 4.0),
    ("exp(x)", |x| x.exp()),
    ("exp(-0.5*x)", |x| -2.0 * (-0.5 * x).exp()),
    ("x*exp(x/3)", |x| 3.0 * (x - 3.0) * (x / 3.0).exp()),
];

fn interval() -> impl Strategy<Value = (f64, f64)> {
    (0.1f64..9.0, 0.01f64..1.0).prop_map(|(a, frac)| (a, a + frac * (10.0 - a)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_battery((lo, hi) in interval()) {
        let cfg = QuadConfig::default();
        for (text, anti) in BATTERY {
            let f = FuncExpr::parse(text).unwrap();
            let r = integrate(&f, lo, hi, &cfg).unwrap();
            let exact = anti(hi) - anti(lo);
            prop_assert!(r.converged);
            prop_assert!(r.evals <= cfg.max_evals);
            let floor = 16.0 * f64::EPSILON * (anti(hi).abs() + anti(lo).abs());
            prop_assert!(
                (r.value - exact).abs() <= 10.0 * r.err_estimate + floor,
                "{text} on ({lo}, {hi}): {} vs {exact}, err {}", r.value, r.err_estimate
            );
        }
    }

    #[test]
    fn linearity((lo, hi) in interval(), alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        let cfg = QuadConfig::default();
        let f = FuncExpr::parse("x^3 - ln(x)").unwrap();
        let g = FuncExpr::parse("exp(x/5)/x").unwrap();
        let combo = FuncExpr::parse(&format!("({alpha})*(x^3 - ln(x)) + ({beta})*(exp(x/5)/x)")).unwrap();
        let rf = integrate(&f, lo, hi, &cfg).unwrap();
        let rg = integrate(&g, lo, hi, &cfg).unwrap();
        let rc = integrate(&combo, lo, hi, &cfg).unwrap();
        let err = rc.err_estimate + alpha.abs() * rf.err_estimate + beta.abs() * rg.err_estimate;
        prop_assert!((rc.value - (alpha * rf.value + beta * rg.value)).abs() <= 10.0 * err);
    }

    #[test]
    fn additivity((lo, hi) in interval(), t in 0.01f64..0.99) {
        let cfg = QuadConfig::default();
        let f = FuncExpr::parse("sqrt(x)*exp(-x/4) + x^2").unwrap();
        let mid = lo + t * (hi - lo);
        let whole = integrate(&f, lo, hi, &cfg).unwrap();
        let left = integrate(&f, lo, mid, &cfg).unwrap();
        let right = integrate(&f, mid, hi, &cfg).unwrap();
        let err = whole.err_estimate + left.err_estimate + right.err_estimate;
        prop_assert!((whole.value - left.value - right.value).abs() <= 10.0 * err);
    }
}
