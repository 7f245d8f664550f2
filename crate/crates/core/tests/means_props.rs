use hhverify::means::{arithmetic, geometric, harmonic, identric, logarithmic};
use hhverify::{gen_log, Interval};
use proptest::prelude::*;

fn interval() -> impl Strategy<Value = Interval> {
    (0.01f64..100.0, 1e-3f64..100.0).prop_map(|(a, w)| Interval::new(a, a + w).unwrap())
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn mean_chain(iv in interval()) {
        let (h, g, l, i, a) = (harmonic(iv), geometric(iv), logarithmic(iv), identric(iv), arithmetic(iv));
        let s = 1e-12;
        prop_assert!(iv.a() < h * (1.0 + s));
        prop_assert!(h <= g * (1.0 + s));
        prop_assert!(g <= l * (1.0 + s));
        prop_assert!(l <= i * (1.0 + s));
        prop_assert!(i <= a * (1.0 + s));
        prop_assert!(a < iv.b());
    }

    #[test]
    fn means_are_homogeneous(iv in interval(), t in 0.1f64..10.0) {
        let scaled = iv.scaled(t).unwrap();
        for m in [arithmetic, geometric, harmonic, logarithmic, identric] {
            prop_assert!(rel(m(scaled), t * m(iv)) < 1e-12);
        }
        for p in [-2.5, 0.5, 2.0] {
            prop_assert!(rel(gen_log(scaled, p, false).unwrap(), t * gen_log(iv, p, false).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn gen_log_is_increasing_in_p(iv in interval(), p in -4.0f64..4.0, dp in 0.05f64..2.0) {
        let lo = gen_log(iv, p, true).unwrap();
        let hi = gen_log(iv, p + dp, true).unwrap();
        prop_assert!(lo <= hi * (1.0 + 1e-12), "L_{p} = {lo} > L_{} = {hi}", p + dp);
    }

    #[test]
    fn gen_log_limits(iv in interval()) {
        prop_assert!(rel(gen_log(iv, 1e-12, false).unwrap(), identric(iv)) < 1e-10);
        prop_assert!(rel(gen_log(iv, -1.0 + 1e-12, false).unwrap(), logarithmic(iv)) < 1e-10);
        prop_assert!(rel(gen_log(iv, -1.0 - 1e-12, false).unwrap(), logarithmic(iv)) < 1e-10);
        prop_assert_eq!(gen_log(iv, 1.0, false).unwrap(), arithmetic(iv));
        prop_assert_eq!(gen_log(iv, 0.0, true).unwrap(), identric(iv));
        prop_assert_eq!(gen_log(iv, -1.0, true).unwrap(), logarithmic(iv));
        prop_assert!(gen_log(iv, 0.0, false).is_err());
        prop_assert!(gen_log(iv, -1.0, false).is_err());
    }
}
