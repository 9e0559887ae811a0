use maxmart::martingales::{martingale_drift_test, DriftKind};
use maxmart::paths::SimConfig;
use maxmart::piecewise::{ExpDensity, Indicator, MaxFn, Monomial};

fn main() {
    let config = SimConfig::new(1e-4, 1.0, 100_000, 4909, 0.05).unwrap();
    let fs: Vec<(&str, Box<dyn MaxFn>)> = vec![
        ("indicator_at_1", Box::new(Indicator::at_or_above(1.0))),
        ("two_u", Box::new(Monomial::new(2.0, 1.0))),
        ("exp_decay", Box::new(ExpDensity)),
    ];
    for (name, f) in &fs {
        let r = martingale_drift_test(DriftKind::MaxMartingale, f.as_ref(), &config, 0.5, 1.0).unwrap();
        println!("{name}: drift {:.5} +- {:.5} ({:.2} sigma) pass={}", r.drift.estimate, r.drift.stderr, r.drift.estimate / r.drift.stderr, r.pass);
    }
    let g = Indicator::above(1.0);
    let r = martingale_drift_test(DriftKind::LocalTimeMartingale, &g, &config, 0.5, 1.0).unwrap();
    println!("g_localtime: drift {:.5} +- {:.5} ({:.2} sigma) pass={}", r.drift.estimate, r.drift.stderr, r.drift.estimate / r.drift.stderr, r.pass);
}
