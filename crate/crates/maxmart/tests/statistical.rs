//! Seeded Monte-Carlo checks of the per-operation statistical contracts:
//! marginal laws of the simulated paths, local-time estimator calibration,
//! stopping-rule equivalences, and the uniform-integrability diagnostics.

use maxmart::embeddings::{
    azema_yor_rule, run_embedding, ui_diagnostic, vallois_rule, EmbeddedValue, StoppingRule,
};
use maxmart::paths::{
    first_hitting, joint_density, local_time, run_stopped, simulate, stop, PathGrid, SimConfig,
};
use maxmart::stats::{ks_two_sample_critical, normal_cdf, MeanAcc};
use maxmart::AtomicMeasure;

fn cfg(dt: f64, horizon: f64, n: u64, seed: u64, eps: f64) -> SimConfig {
    SimConfig::new(dt, horizon, n, seed, eps).unwrap()
}

#[test]
fn terminal_value_is_standard_normal_in_mean() {
    // E B_1 = 0 within 3/sqrt(n), Var B_1 = 1
    let c = cfg(1e-3, 1.0, 100_000, 101, 0.2);
    let outs = run_stopped(&c, &StoppingRule::Never).unwrap();
    let mut acc = MeanAcc::default();
    let mut acc2 = MeanAcc::default();
    for o in &outs {
        acc.push(o.value);
        acc2.push(o.value * o.value);
    }
    let m = acc.report(c.seed);
    assert!(
        m.estimate.abs() <= 3.0 / (c.n_paths as f64).sqrt(),
        "mean B_1 = {}",
        m.estimate
    );
    let v = acc2.mean();
    assert!((v - 1.0).abs() < 0.02, "Var B_1 = {v}");
}

#[test]
fn exit_time_local_time_calibration() {
    // E L at the exit of [-1,1] is exactly 1; the band estimator must land
    // within 3% at the operating point dt=1e-4, eps=0.05
    let c = cfg(1e-4, 50.0, 20_000, 202, 0.05);
    let outs = run_stopped(&c, &StoppingRule::first_exit(-1.0, 1.0)).unwrap();
    assert!(outs.iter().all(|o| o.stopped));
    let mut acc = MeanAcc::default();
    for o in &outs {
        acc.push(o.ell);
    }
    let m = acc.mean();
    assert!((m - 1.0).abs() < 0.03, "mean terminal ell = {m}");
    // mean exit time is 1 (+ overshoot at the grid scale)
    let mut t = MeanAcc::default();
    for o in &outs {
        t.push(o.t);
    }
    assert!((t.mean() - 1.0).abs() < 0.02, "mean exit time = {}", t.mean());
}

#[test]
fn local_time_halved_band_agrees() {
    // paired per-path comparison: halving the band moves the exit-time
    // estimate by less than the combined bias allowance
    let c = cfg(2.5e-5, 25.0, 500, 203, 0.05);
    let rule = StoppingRule::first_exit(-1.0, 1.0);
    let mut diff = MeanAcc::default();
    for i in 0..c.n_paths {
        let p = simulate(&c, i).unwrap();
        let o = stop(&p, &rule);
        if !o.stopped {
            continue;
        }
        let ell_half = local_time(&p, 0.025);
        diff.push(o.ell - ell_half[o.step as usize]);
    }
    let d = diff.mean();
    assert!(d.abs() < 0.02, "mean(ell_0.05 - ell_0.025) = {d}");
}

#[test]
fn hitting_probability_reflection_principle() {
    // P(hit 1 before t=1) = 2(1 - Phi(1)) = 0.3173 within 0.01
    let c = cfg(1e-4, 1.0, 100_000, 204, 0.05);
    let hit = run_stopped(&c, &StoppingRule::HittingLevel { level: 1.0 })
        .unwrap()
        .iter()
        .filter(|o| o.stopped)
        .count();
    let p = hit as f64 / c.n_paths as f64;
    let want = 2.0 * (1.0 - normal_cdf(1.0));
    assert!((p - want).abs() < 0.01, "p = {p}, want {want}");
}

#[test]
fn levy_identity_sup_matches_abs_value() {
    // sup_{s<=1} B_s and |B_1| share a law; two-sample KS below the 1%
    // critical value (same paths supply both marginals)
    let c = cfg(2.5e-5, 1.0, 40_000, 205, 0.025);
    let outs = run_stopped(&c, &StoppingRule::Never).unwrap();
    let sups: Vec<f64> = outs.iter().map(|o| o.sup).collect();
    let abs: Vec<f64> = outs.iter().map(|o| o.value.abs()).collect();
    let d = maxmart::stats::ks_two_sample(&sups, &abs);
    let crit = ks_two_sample_critical(0.01, sups.len() as u64, abs.len() as u64);
    assert!(d < crit, "KS = {d}, 1% critical = {crit}");
}

#[test]
fn azema_yor_two_point_is_first_exit() {
    // the barycentre rule of a symmetric two-point law fires exactly when
    // the exit rule does, path by path
    let mu = AtomicMeasure::two_point(-1.0, 0.5, 1.0, 0.5).unwrap();
    let ay = azema_yor_rule(&mu).unwrap();
    let exit = StoppingRule::first_exit(-1.0, 1.0);
    let c = cfg(1e-3, 20.0, 200, 206, 0.2);
    for i in 0..c.n_paths {
        let p = simulate(&c, i).unwrap();
        let a = stop(&p, &ay);
        let b = stop(&p, &exit);
        assert_eq!(a.step, b.step, "path {i}");
        assert_eq!(a.stopped, b.stopped, "path {i}");
    }
}

#[test]
fn azema_yor_dirac_fires_immediately() {
    let mu = AtomicMeasure::dirac(0.0);
    let rule = azema_yor_rule(&mu).unwrap();
    let c = cfg(1e-3, 1.0, 4, 207, 0.2);
    for out in run_stopped(&c, &rule).unwrap() {
        assert!(out.stopped);
        assert_eq!(out.step, 0);
        assert_eq!(out.value, 0.0);
    }
}

#[test]
fn vallois_dirac_is_abs_hitting() {
    // phi = 1 everywhere: the rule is the first visit of |B| to 1
    let m = AtomicMeasure::dirac(1.0);
    let rule = vallois_rule(&m).unwrap();
    let c = cfg(1e-3, 50.0, 500, 208, 0.2);
    for i in 0..c.n_paths {
        let p = simulate(&c, i).unwrap();
        let o = stop(&p, &rule);
        assert!(o.stopped);
        assert!(o.value.abs() >= 1.0);
        // no earlier grid point reached 1 in absolute value
        assert!(p
            .values
            .iter()
            .take(o.step as usize)
            .all(|v| v.abs() < 1.0));
    }
}

#[test]
fn vallois_near_zero_support_fires_fast() {
    // an atom just above zero makes psi jump at once: the rule fires as
    // soon as |B| clears the tiny threshold
    let m = AtomicMeasure::dirac(1e-3);
    let rule = vallois_rule(&m).unwrap();
    let c = cfg(1e-3, 10.0, 100, 209, 0.2);
    for out in run_stopped(&c, &rule).unwrap() {
        assert!(out.stopped);
        assert!(out.step <= 5, "fired at step {}", out.step);
    }
}

#[test]
fn fixed_time_embedding_matches_gaussian() {
    // B_1 ~ N(0,1): KS against the 1000-atom quantization below 0.01
    let target = AtomicMeasure::standard_normal(1000).unwrap();
    let rule = StoppingRule::FixedTime { t: 1.0 };
    let c = cfg(1e-2, 1.0, 100_000, 210, 0.5);
    let (report, _) = run_embedding(&rule, &target, EmbeddedValue::Signed, &c).unwrap();
    assert!(report.ks_to_target <= 0.01, "KS = {}", report.ks_to_target);
    assert!(!report.unstopped_flag);
    assert!(report.mean.abs() < 0.015);
}

#[test]
fn mixed_rule_splits_levels_by_weight() {
    let rule = StoppingRule::mixed_abs_hitting(vec![(1.0, 0.5), (2.0, 0.5)]);
    let c = cfg(1e-3, 300.0, 20_000, 211, 0.2);
    let outs = run_stopped(&c, &rule).unwrap();
    let stopped: Vec<_> = outs.iter().filter(|o| o.stopped).collect();
    assert!(stopped.len() as f64 >= 0.999 * outs.len() as f64);
    let at_one = stopped.iter().filter(|o| o.value.abs() < 1.5).count() as f64
        / stopped.len() as f64;
    assert!((at_one - 0.5).abs() < 0.02, "P(level 1) = {at_one}");
    // E L = E |B_T| = 1.5 for the mixture
    let mean_ell: f64 =
        stopped.iter().map(|o| o.ell).sum::<f64>() / stopped.len() as f64;
    assert!((mean_ell - 1.5).abs() < 0.05, "E L = {mean_ell}");
}

#[test]
fn ui_diagnostic_bounded_rules_stay_flat() {
    let c = cfg(1e-3, 8.0, 4_000, 212, 0.2);
    let k_grid = [1.0, 2.0, 4.0, 8.0];
    // exit of [-1,1]: |B| never exceeds 1 by more than an overshoot
    let d = ui_diagnostic(
        &StoppingRule::first_exit(-1.0, 1.0),
        &c,
        &[1.0, 2.0, 4.0, 8.0],
        &k_grid,
    )
    .unwrap();
    // bounded by 1 plus the grid overshoot
    assert!(d.mean_abs.iter().all(|&m| m <= 1.03), "{:?}", d.mean_abs);
    assert!(!d.heavy_tail_flag);
    // bounded-support barycentre rule: tail mass beyond support + 1 dies
    let mu = AtomicMeasure::uniform(-1.0, 1.0, 100).unwrap();
    let d = ui_diagnostic(&azema_yor_rule(&mu).unwrap(), &c, &[1.0, 4.0, 8.0], &k_grid).unwrap();
    assert!(!d.heavy_tail_flag);
    let last = d.tail_mass.last().unwrap();
    assert!(last[3] < 1e-6, "mass beyond 8 = {}", last[3]);
}

#[test]
fn ui_diagnostic_flags_heavy_tail_target() {
    // m with first moment far beyond its truncation keeps |B_{T and t}|
    // heavy: mass parks at large levels while the rule waits for them
    let m = AtomicMeasure::new(vec![
        (1.0, 0.55),
        (4.0, 0.25),
        (16.0, 0.12),
        (64.0, 0.08),
    ])
    .unwrap();
    let c = cfg(1e-3, 8.0, 4_000, 213, 0.2);
    let d = ui_diagnostic(
        &vallois_rule(&m).unwrap(),
        &c,
        &[1.0, 4.0, 8.0],
        &[1.0, 2.0, 4.0, 8.0],
    )
    .unwrap();
    assert!(d.heavy_tail_flag, "diagnostic: {d:?}");
}

#[test]
fn joint_density_matches_simulated_histogram_coarse() {
    // a light version of the density cross-check (the acceptance suite runs
    // the full-resolution one): 10 x 10 bins, 50k paths
    let c = cfg(1e-3, 1.0, 50_000, 214, 0.2);
    let outs = run_stopped(&c, &StoppingRule::Never).unwrap();
    let (nx, ny) = (10usize, 10usize);
    let (x_lo, x_hi, y_hi) = (-3.0, 3.0, 3.0);
    let mut hist = vec![0.0f64; nx * ny];
    let mut kept = 0.0;
    for o in &outs {
        if o.value < x_lo || o.value >= x_hi || o.sup >= y_hi {
            continue;
        }
        kept += 1.0;
        let ix = ((o.value - x_lo) / (x_hi - x_lo) * nx as f64) as usize;
        let iy = (o.sup / y_hi * ny as f64) as usize;
        hist[iy * nx + ix] += 1.0;
    }
    let n = outs.len() as f64;
    let hx = (x_hi - x_lo) / nx as f64;
    let hy = y_hi / ny as f64;
    // per-bin mass by sub-sampling: the density is discontinuous along
    // y = max(x, 0), so one midpoint per bin is not enough
    let sub = 16;
    let mut grid_mass = 0.0;
    let mut tv = 0.0;
    for iy in 0..ny {
        for ix in 0..nx {
            let mut p = 0.0;
            for sy in 0..sub {
                for sx in 0..sub {
                    let x = x_lo + (ix as f64 + (sx as f64 + 0.5) / sub as f64) * hx;
                    let y = (iy as f64 + (sy as f64 + 0.5) / sub as f64) * hy;
                    p += joint_density(1.0, x, y).unwrap();
                }
            }
            p *= hx * hy / (sub * sub) as f64;
            grid_mass += p;
            tv += (hist[iy * nx + ix] / n - p).abs();
        }
    }
    // off-grid mass on both sides
    tv += ((n - kept) / n - (1.0 - grid_mass)).abs();
    tv *= 0.5;
    assert!(tv < 0.03, "coarse TV = {tv}");
}

#[test]
fn path_grid_from_values_and_hitting() {
    let p = PathGrid::from_values(1.0, vec![0.0, 0.5, 1.0], 5.0);
    assert_eq!(first_hitting(&p, 0.9), Some(2));
    let o = stop(&p, &StoppingRule::HittingLevel { level: 0.9 });
    assert!(o.stopped);
    assert_eq!(o.step, 2);
    let o = stop(&p, &StoppingRule::FixedTime { t: 0.0 });
    assert_eq!(o.step, 0);
    assert_eq!(o.value, 0.0);
}
