//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with its measured wall time next to the stated budget (budgets are
//! reported, not asserted, to keep the suite robust on slow machines).
//!
//! Every criterion's experiment is a deterministic, seeded function
//! returning a serializable report; the determinism criterion re-runs each
//! experiment on a thread pool of a different size and compares the
//! serialized bytes.
//!
//! Run with `cargo test --test acceptance -- --test-threads=1 --nocapture`
//! for clean per-criterion timing.

use std::sync::OnceLock;
use std::time::Instant;

use serde_json::json;

use maxmart::bounds::{
    blackwell_dubins_bound, expectation_bounds_check, hitting_laplace_check,
    local_time_bound_check, rogers_condition_check, sup_law_from_phi,
};
use maxmart::embeddings::{
    azema_yor_rule, run_embedding, vallois_rule, EmbeddedValue, StoppingRule,
};
use maxmart::martingales::{
    balayage_discrepancy, doob_lp_check, doob_maximal_check, enumerate_srw,
    martingale_drift_test, sfn_supermartingale_worst_gap, DiscretePathPair, DriftKind,
};
use maxmart::paths::{joint_density, run_stopped, SimConfig};
use maxmart::penalization::{convergence_experiment, Event, PenalizationSpec};
use maxmart::piecewise::{ExpDensity, Indicator, MaxFn, Monomial, PiecewiseFn};
use maxmart::stats::{ks_critical_value, ks_statistic, normal_cdf, MeanAcc};
use maxmart::AtomicMeasure;

struct CriterionResult {
    passed: bool,
    json: String,
    summary: String,
    elapsed_s: f64,
}

const N_CRITERIA: usize = 11;

fn runner(index: usize) -> fn() -> CriterionResult {
    [
        criterion_01_experiment,
        criterion_02_experiment,
        criterion_03_experiment,
        criterion_04_experiment,
        criterion_05_experiment,
        criterion_06_experiment,
        criterion_07_experiment,
        criterion_08_experiment,
        criterion_09_experiment,
        criterion_10_experiment,
        criterion_11_experiment,
    ][index]
}

const BUDGET_S: [f64; N_CRITERIA] = [
    60.0, 120.0, 180.0, 120.0, 180.0, 60.0, 120.0, 60.0, 120.0, 300.0, 180.0,
];

fn cache() -> &'static [OnceLock<CriterionResult>; N_CRITERIA] {
    static CACHE: [OnceLock<CriterionResult>; N_CRITERIA] =
        [const { OnceLock::new() }; N_CRITERIA];
    &CACHE
}

fn cached(index: usize) -> &'static CriterionResult {
    cache()[index].get_or_init(|| {
        let t0 = Instant::now();
        let mut r = runner(index)();
        r.elapsed_s = t0.elapsed().as_secs_f64();
        r
    })
}

fn check(index: usize) {
    let r = cached(index);
    println!(
        "[criterion {:>2}] {}  ({:.1}s measured, {:.0}s budget)  {}",
        index + 1,
        if r.passed { "PASS" } else { "FAIL" },
        r.elapsed_s,
        BUDGET_S[index],
        r.summary
    );
    assert!(r.passed, "criterion {}: {}", index + 1, r.summary);
}

// ---------------------------------------------------------------- criteria

/// Exhaustive discrete suite: balayage identity on every walk of length
/// <= 12 under the standard companion processes, the S^f supermartingale
/// inequality for indicators and monomials, and Doob's maximal and L^p
/// inequalities, all by enumeration.
fn criterion_01_experiment() -> CriterionResult {
    let mut worst_balayage = 0.0f64;
    // companions: phi = f(Xbar) with Y = Xbar - X on the walk and on its
    // absolute value, plus the zero-count companion on the walk itself
    let fs: Vec<Box<dyn MaxFn>> = vec![
        Box::new(Indicator::at_or_above(1.0)),
        Box::new(Indicator::at_or_above(2.0)),
        Box::new(Indicator::at_or_above(3.0)),
        Box::new(Indicator::at_or_above(4.0)),
        Box::new(Indicator::at_or_above(5.0)),
        Box::new(Monomial::new(1.0, 1.0)),
        Box::new(Monomial::new(1.0, 2.0)),
    ];
    for n in 1..=12u32 {
        for path in enumerate_srw(n).unwrap() {
            let signed: Vec<f64> = path.iter().map(|&v| v as f64).collect();
            let abs: Vec<f64> = path.iter().map(|&v| v.abs() as f64).collect();
            for x in [&signed, &abs] {
                let mut xbar = f64::NEG_INFINITY;
                let xbars: Vec<f64> = x
                    .iter()
                    .map(|&v| {
                        xbar = xbar.max(v);
                        xbar
                    })
                    .collect();
                let y: Vec<f64> = x.iter().zip(&xbars).map(|(v, m)| m - v).collect();
                for f in &fs {
                    let phi: Vec<f64> = xbars.iter().map(|&m| f.eval(m)).collect();
                    let pair = DiscretePathPair::new(y.clone(), phi).unwrap();
                    worst_balayage = worst_balayage.max(balayage_discrepancy(&pair));
                }
            }
            // zero-count companion on the signed walk
            let mut zeros = 0.0;
            let phi: Vec<f64> = signed
                .iter()
                .map(|&v| {
                    if v == 0.0 {
                        zeros += 1.0;
                    }
                    zeros
                })
                .collect();
            let pair = DiscretePathPair::new(signed.clone(), phi).unwrap();
            worst_balayage = worst_balayage.max(balayage_discrepancy(&pair));
        }
    }
    let mut worst_super = f64::NEG_INFINITY;
    for f in &fs {
        worst_super =
            worst_super.max(sfn_supermartingale_worst_gap(13, f.as_ref()).unwrap());
    }
    let mut doob_max = Vec::new();
    let mut doob_ok = true;
    for n in 1..=12u32 {
        for lambda in [0.5, 1.0, 2.0, 3.0] {
            let r = doob_maximal_check(n, lambda).unwrap();
            doob_ok &= r.holds;
            doob_max.push(r);
        }
    }
    let mut doob_lp = Vec::new();
    for p in [1.1, 2.0, 3.0] {
        let r = doob_lp_check(12, p).unwrap();
        doob_ok &= r.holds && r.intermediate_holds;
        doob_lp.push(r);
    }
    let passed = worst_balayage <= 1e-12 && worst_super <= 1e-12 && doob_ok;
    CriterionResult {
        passed,
        summary: format!(
            "balayage worst {worst_balayage:.2e}, supermartingale worst gap {worst_super:.2e}, Doob exact: {doob_ok}"
        ),
        json: json!({
            "worst_balayage": worst_balayage,
            "worst_supermartingale_gap": worst_super,
            "doob_maximal": doob_max,
            "doob_lp": doob_lp,
        })
        .to_string(),
        elapsed_s: 0.0,
    }
}

/// Two-point barycentre embedding: exit sides split evenly and the supremum
/// tail follows 1/(1+lambda).
fn criterion_02_experiment() -> CriterionResult {
    let mu = AtomicMeasure::two_point(-1.0, 0.5, 1.0, 0.5).unwrap();
    let rule = azema_yor_rule(&mu).unwrap();
    let config = SimConfig::new(1e-4, 50.0, 100_000, 4202, 0.05).unwrap();
    let (report, outcomes) =
        run_embedding(&rule, &mu, EmbeddedValue::Signed, &config).unwrap();
    let stopped: Vec<_> = outcomes.iter().filter(|o| o.stopped).collect();
    let n = stopped.len() as f64;
    let p_pos = stopped.iter().filter(|o| o.value > 0.0).count() as f64 / n;
    let side_ok = (p_pos - 0.5).abs() <= 0.005;
    let phi = PiecewiseFn::constant(-1.0);
    let mut tails = Vec::new();
    let mut tails_ok = true;
    for lambda in [0.25, 0.5, 0.75] {
        let oracle = sup_law_from_phi(&phi, lambda).unwrap();
        assert!((oracle - 1.0 / (1.0 + lambda)).abs() < 1e-7);
        let emp = stopped.iter().filter(|o| o.sup >= lambda).count() as f64 / n;
        tails_ok &= (emp - oracle).abs() <= 0.01;
        tails.push(json!({"lambda": lambda, "empirical": emp, "oracle": oracle}));
    }
    let passed = side_ok && tails_ok && !report.unstopped_flag;
    CriterionResult {
        passed,
        summary: format!(
            "P(B_T>0) = {p_pos:.4}, sup tails vs 1/(1+l) ok: {tails_ok}, unstopped {:.2e}",
            report.unstopped_fraction
        ),
        json: json!({"p_positive": p_pos, "tails": tails, "report": report}).to_string(),
        elapsed_s: 0.0,
    }
}

/// Uniform-target barycentre embedding: stopped law, supremum law, and the
/// three-way consistency between Monte Carlo, the tail-domination bound and
/// the closed-form supremum law.
fn criterion_03_experiment() -> CriterionResult {
    let n_atoms = 1000;
    let mu = AtomicMeasure::uniform(-1.0, 1.0, n_atoms).unwrap();
    let rule = azema_yor_rule(&mu).unwrap();
    let config = SimConfig::new(1e-4, 20.0, 100_000, 4303, 0.05).unwrap();
    let (report, outcomes) =
        run_embedding(&rule, &mu, EmbeddedValue::Signed, &config).unwrap();
    let ks_ok = report.ks_to_target <= 0.015;
    let stopped: Vec<_> = outcomes.iter().filter(|o| o.stopped).collect();
    let n = stopped.len() as f64;
    let phi = PiecewiseFn::linear(-1.0, 2.0);
    let mut rows = Vec::new();
    let mut law_ok = true;
    let mut triangle_ok = true;
    for lambda in [0.25, 0.5, 0.75] {
        let mc = stopped.iter().filter(|o| o.sup >= lambda).count() as f64 / n;
        let bound = blackwell_dubins_bound(&mu, lambda).unwrap();
        let law = sup_law_from_phi(&phi, lambda).unwrap();
        law_ok &= (mc - (1.0 - lambda)).abs() <= 0.015;
        triangle_ok &= (mc - bound).abs() <= 0.02
            && (mc - law).abs() <= 0.02
            && (bound - law).abs() <= 0.02;
        rows.push(json!({"lambda": lambda, "mc": mc, "bound": bound, "closed_form": law}));
    }
    let passed = ks_ok && law_ok && triangle_ok && !report.unstopped_flag;
    CriterionResult {
        passed,
        summary: format!(
            "KS(B_T law, target) = {:.4}, sup law vs 1-l ok: {law_ok}, triangle ok: {triangle_ok}",
            report.ks_to_target
        ),
        json: json!({"report": report, "triangle": rows}).to_string(),
        elapsed_s: 0.0,
    }
}

/// Local-time embedding of a unit point mass: the stopped local time has the
/// unit exponential law. The mean lands within 3%; the KS sub-check is
/// implemented exactly as stated and fails for a structural reason: any
/// band estimator satisfies ell >= epsilon on these paths, so its KS
/// distance to Exp(1) is at least 1 - e^{-eps} = 0.0488, far above the
/// 1%-level critical value 1.6276/sqrt(n) = 0.0051. The gap is measurement
/// physics (local time is not observable to that resolution from a dt=1e-4
/// skeleton), not an implementation defect.
fn criterion_04_experiment() -> CriterionResult {
    let m = AtomicMeasure::dirac(1.0);
    let rule = vallois_rule(&m).unwrap();
    let config = SimConfig::new(1e-4, 50.0, 100_000, 4404, 0.05).unwrap();
    let outcomes = run_stopped(&config, &rule).unwrap();
    let ells: Vec<f64> = outcomes
        .iter()
        .filter(|o| o.stopped)
        .map(|o| o.ell)
        .collect();
    let mean = ells.iter().sum::<f64>() / ells.len() as f64;
    let mean_ok = (mean - 1.0).abs() <= 0.03;
    let ks = ks_statistic(&ells, |x| 1.0 - (-x).exp());
    let crit = ks_critical_value(0.01, ells.len() as u64);
    let ks_ok = ks <= crit;
    CriterionResult {
        passed: mean_ok && ks_ok,
        summary: format!(
            "mean L = {mean:.4} (within 3%: {mean_ok}); KS = {ks:.4} vs 1%-level critical {crit:.4} (structural floor 1-e^-eps = {:.4})",
            1.0 - (-0.05f64).exp()
        ),
        json: json!({"mean": mean, "ks": ks, "critical": crit, "n": ells.len()}).to_string(),
        elapsed_s: 0.0,
    }
}

/// Local-time excess bound: a coin-randomized two-level embedding against
/// the local-time rule for the same absolute-value law.
fn criterion_05_experiment() -> CriterionResult {
    let m = AtomicMeasure::two_point(1.0, 0.5, 2.0, 0.5).unwrap();
    let alt = StoppingRule::mixed_abs_hitting(vec![(1.0, 0.5), (2.0, 0.5)]);
    let config = SimConfig::new(3.6e-5, 125.0, 40_000, 4505, 0.03).unwrap();
    let p_grid: Vec<f64> = (0..=9).map(|i| i as f64 / 10.0).collect();
    let report = local_time_bound_check(&m, &alt, &p_grid, &config).unwrap();
    let means_ok = report.mean_alt.within_sigma_of(1.5, 3.0)
        && report.mean_reference.within_sigma_of(1.5, 3.0);
    let passed = report.all_hold && means_ok;
    CriterionResult {
        passed,
        summary: format!(
            "bound holds at all p: {}; E L alt = {:.4}+-{:.4}, reference = {:.4}+-{:.4} (target 1.5)",
            report.all_hold,
            report.mean_alt.estimate,
            report.mean_alt.stderr,
            report.mean_reference.estimate,
            report.mean_reference.stderr
        ),
        json: serde_json::to_string(&report).unwrap(),
        elapsed_s: 0.0,
    }
}

/// Expectation bounds at a fixed unit horizon, plus the quadratic identity
/// they rest on.
fn criterion_06_experiment() -> CriterionResult {
    let rule = StoppingRule::FixedTime { t: 1.0 };
    let config = SimConfig::new(2.5e-5, 1.0, 100_000, 4606, 0.025).unwrap();
    let report = expectation_bounds_check(&rule, &config).unwrap();
    let half_normal = (2.0 / std::f64::consts::PI).sqrt();
    let sup_value_ok = (report.sup.0.estimate - half_normal).abs() <= 0.01;
    let range_value_ok = (report.range.0.estimate - 2.0 * half_normal).abs() <= 0.015;
    let passed = report.all_hold && sup_value_ok && range_value_ok;
    CriterionResult {
        passed,
        summary: format!(
            "E sup = {:.4} (<= 1), E sup|B| = {:.4} (<= {:.4}), E range = {:.4} (<= {:.4}), quad drift {:.2e} +- {:.1e}",
            report.sup.0.estimate,
            report.sup_abs.0.estimate,
            report.sup_abs.1,
            report.range.0.estimate,
            report.range.1,
            report.quadratic_identity.estimate,
            report.quadratic_identity.stderr
        ),
        json: serde_json::to_string(&report).unwrap(),
        elapsed_s: 0.0,
    }
}

/// Joint law of (B_1, max_1) against the closed-form density: binned total
/// variation and quadrature normalization.
fn criterion_07_experiment() -> CriterionResult {
    let config = SimConfig::new(1e-3, 1.0, 1_000_000, 4707, 0.2).unwrap();
    let outcomes = run_stopped(&config, &StoppingRule::Never).unwrap();
    let (nx, ny) = (40usize, 40usize);
    let (x_lo, x_hi, y_hi) = (-4.0f64, 4.0f64, 4.0f64);
    let hx = (x_hi - x_lo) / nx as f64;
    let hy = y_hi / ny as f64;
    let mut hist = vec![0.0f64; nx * ny];
    let mut kept = 0.0f64;
    for o in &outcomes {
        if o.value < x_lo || o.value >= x_hi || o.sup >= y_hi {
            continue;
        }
        kept += 1.0;
        let ix = ((o.value - x_lo) / hx) as usize;
        let iy = (o.sup / hy) as usize;
        hist[iy * nx + ix] += 1.0;
    }
    let n = outcomes.len() as f64;
    let sub = 8;
    let mut tv = 0.0;
    let mut grid_mass = 0.0;
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
    tv += ((n - kept) / n - (1.0 - grid_mass)).abs();
    tv *= 0.5;
    let tv_ok = tv <= 0.05;
    // quadrature normalization over a fine Simpson grid
    let norm = simpson_normalization();
    let norm_ok = (norm - 1.0).abs() <= 1e-3;
    CriterionResult {
        passed: tv_ok && norm_ok,
        summary: format!("binned TV = {tv:.4} (<= 0.05), quadrature normalization = {norm:.6}"),
        json: json!({"tv": tv, "normalization": norm}).to_string(),
        elapsed_s: 0.0,
    }
}

fn simpson_normalization() -> f64 {
    let (nx, ny) = (1600usize, 800usize);
    let (x_lo, x_hi, y_hi) = (-8.0, 8.0, 8.0);
    let hx = (x_hi - x_lo) / nx as f64;
    let hy = y_hi / ny as f64;
    let mut total = 0.0;
    for ix in 0..=nx {
        let x = x_lo + ix as f64 * hx;
        let wx = if ix == 0 || ix == nx {
            1.0
        } else if ix % 2 == 1 {
            4.0
        } else {
            2.0
        };
        for iy in 0..=ny {
            let y = iy as f64 * hy;
            let wy = if iy == 0 || iy == ny {
                1.0
            } else if iy % 2 == 1 {
                4.0
            } else {
                2.0
            };
            total += wx * wy * joint_density(1.0, x, y).unwrap();
        }
    }
    total * hx * hy / 9.0
}

/// Hitting-time Laplace transform: E exp(-T_1/2) = e^{-1}.
fn criterion_08_experiment() -> CriterionResult {
    let f = Monomial::new(1.0, 0.0);
    let config = SimConfig::new(5e-5, 30.0, 20_000, 4808, 0.05).unwrap();
    let report = hitting_laplace_check(&f, 1.0, &config).unwrap();
    CriterionResult {
        passed: report.pass,
        summary: format!(
            "E e^(-T_1/2) = {:.4} +- {:.4} vs e^-1 = {:.4} (unstopped {:.1}%)",
            report.estimate.estimate,
            report.estimate.stderr,
            report.closed_form,
            100.0 * report.unstopped_fraction
        ),
        json: serde_json::to_string(&report).unwrap(),
        elapsed_s: 0.0,
    }
}

/// Martingale drift suite: three max-martingales and one local-time
/// martingale show no drift between t = 0.5 and t = 1.
fn criterion_09_experiment() -> CriterionResult {
    let config = SimConfig::new(5e-5, 1.0, 100_000, 4909, 0.05).unwrap();
    let fs: Vec<(&str, Box<dyn MaxFn>)> = vec![
        ("indicator_at_1", Box::new(Indicator::at_or_above(1.0))),
        ("two_u", Box::new(Monomial::new(2.0, 1.0))),
        ("exp_decay", Box::new(ExpDensity)),
    ];
    let mut all = true;
    let mut rows = Vec::new();
    for (name, f) in &fs {
        let r =
            martingale_drift_test(DriftKind::MaxMartingale, f.as_ref(), &config, 0.5, 1.0)
                .unwrap();
        all &= r.pass;
        rows.push(json!({"f": name, "report": r}));
    }
    let g = Indicator::above(1.0);
    let r = martingale_drift_test(DriftKind::LocalTimeMartingale, &g, &config, 0.5, 1.0)
        .unwrap();
    all &= r.pass;
    rows.push(json!({"f": "indicator_above_1_on_L", "report": r}));
    CriterionResult {
        passed: all,
        summary: format!("all four drifts within 3 sigma: {all}"),
        json: json!({ "drifts": rows }).to_string(),
        elapsed_s: 0.0,
    }
}

/// Penalization by the exponential density of the maximum: closed-form
/// denominator at t = 1 and weak convergence of the conditioned probability
/// along t = 4, 16, 64.
fn criterion_10_experiment() -> CriterionResult {
    let f = ExpDensity;
    let event = Event::EndpointBelow { a: 0.0 };
    // denominator E[f(max_1)] against the closed form, on a fine grid
    let den_cfg = SimConfig::new(1e-5, 1.0, 30_000, 5010, 0.025).unwrap();
    let outs = run_stopped(&den_cfg, &StoppingRule::Never).unwrap();
    let mut acc = MeanAcc::default();
    for o in &outs {
        acc.push((-o.sup).exp());
    }
    let den = acc.report(den_cfg.seed);
    let den_closed = 2.0 * (0.5f64).exp() * normal_cdf(-1.0);
    let den_ok = den.within_sigma_of(den_closed, 3.0);
    // convergence experiment with common random numbers across horizons
    let conv_cfg = SimConfig::new(5e-4, 64.0, 30_000, 5011, 0.2).unwrap();
    let spec = PenalizationSpec::new(&f, event, 1.0, vec![4.0, 16.0, 64.0]).unwrap();
    let conv = convergence_experiment(&spec, &conv_cfg).unwrap();
    // independent quadrature pin of the limit (loose: absorbs grid bias)
    let limit_ok = (conv.limit.estimate - 0.762448).abs() < 0.02;
    let passed = den_ok && conv.final_gap_within_3_sigma && limit_ok;
    CriterionResult {
        passed,
        summary: format!(
            "denominator {:.4}+-{:.4} vs closed form {:.4}; final gap {:.4}+-{:.4} (within 3sigma: {}); limit {:.4}",
            den.estimate,
            den.stderr,
            den_closed,
            conv.rows.last().unwrap().gap.estimate,
            conv.rows.last().unwrap().gap.stderr,
            conv.final_gap_within_3_sigma,
            conv.limit.estimate
        ),
        json: json!({"denominator": den, "closed_form": den_closed, "convergence": conv})
            .to_string(),
        elapsed_s: 0.0,
    }
}

/// Joint-law balance condition on the uniform-target embedding. At 50 bins
/// the bin width is comparable to the sqrt(dt) understatement of grid
/// maxima, so the maxima enter through the continuity correction.
fn criterion_11_experiment() -> CriterionResult {
    let mu = AtomicMeasure::uniform(-1.0, 1.0, 1000).unwrap();
    let rule = azema_yor_rule(&mu).unwrap();
    let config = SimConfig::new(1e-4, 20.0, 1_000_000, 5111, 0.05).unwrap();
    let outcomes = run_stopped(&config, &rule).unwrap();
    let shift = maxmart::paths::max_continuity_correction(config.dt);
    let pairs: Vec<(f64, f64)> = outcomes
        .iter()
        .filter(|o| o.stopped)
        .map(|o| (o.sup + shift, o.sup + shift - o.value))
        .collect();
    let report = rogers_condition_check(&pairs, 50, 0.01);
    let passed = report.max_rel_discrepancy <= 0.1;
    CriterionResult {
        passed,
        summary: format!(
            "max relative discrepancy {:.4} over bins with >= 1% mass",
            report.max_rel_discrepancy
        ),
        json: serde_json::to_string(&report).unwrap(),
        elapsed_s: 0.0,
    }
}

// ------------------------------------------------------------------- tests

#[test]
fn criterion_01_exhaustive_discrete_suite() {
    check(0);
}

#[test]
fn criterion_02_two_point_embedding() {
    check(1);
}

#[test]
fn criterion_03_uniform_embedding_triangle() {
    check(2);
}

#[test]
fn criterion_04_local_time_law_of_unit_embedding() {
    check(3);
}

#[test]
fn criterion_05_local_time_excess_bound() {
    check(4);
}

#[test]
fn criterion_06_expectation_bounds() {
    check(5);
}

#[test]
fn criterion_07_joint_density() {
    check(6);
}

#[test]
fn criterion_08_laplace_identity() {
    check(7);
}

#[test]
fn criterion_09_martingale_drift_suite() {
    check(8);
}

#[test]
fn criterion_10_penalization() {
    check(9);
}

#[test]
fn criterion_11_rogers_condition() {
    check(10);
}

#[test]
fn criterion_12_determinism_across_thread_counts() {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap();
    for i in 0..N_CRITERIA {
        let first = &cached(i).json;
        let rerun = pool.install(|| runner(i)().json);
        assert_eq!(
            first.as_bytes(),
            rerun.as_bytes(),
            "criterion {} is not byte-identical across thread counts",
            i + 1
        );
        println!(
            "[criterion 12] criterion {:>2} byte-identical on a 4-thread pool",
            i + 1
        );
    }
}
