use maxmart::bounds::rogers_condition_check;
use maxmart::embeddings::{azema_yor_rule, StoppingRule};
use maxmart::paths::{run_stopped, SimConfig};
use maxmart::AtomicMeasure;

fn main() {
    let mu = AtomicMeasure::uniform(-1.0, 1.0, 1000).unwrap();
    let rule = azema_yor_rule(&mu).unwrap();
    let config = SimConfig::new(1e-4, 20.0, 200_000, 5111, 0.05).unwrap();
    let outcomes = run_stopped(&config, &rule).unwrap();
    let shift = maxmart::paths::max_continuity_correction(config.dt);
    let pairs: Vec<(f64, f64)> = outcomes.iter().filter(|o| o.stopped)
        .map(|o| (o.sup + shift, o.sup + shift - o.value)).collect();
    let report = rogers_condition_check(&pairs, 50, 0.01);
    println!("max rel disc: {:.4}", report.max_rel_discrepancy);
    for r in &report.rows {
        if r.rel_discrepancy > 0.05 || r.z_lo > 0.9 || r.z_lo < 0.06 {
            println!("bin [{:.3},{:.3}] share {:.4} lhs {:.6} rhs {:.6} rel {:.4}",
                r.z_lo, r.z_hi, r.measure_share, r.lhs_tail_integral, r.rhs_weighted_mass, r.rel_discrepancy);
        }
    }
    let _ = StoppingRule::Never;
}
