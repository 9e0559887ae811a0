//! Closed-form laws and bounds for the supremum and the local time of a
//! stopped Brownian motion with fixed terminal law, and the Monte-Carlo
//! verifiers that hold the implementation to them: the exponential supremum
//! law, the tail-domination bound through the barycentre function, the
//! sqrt(E T) expectation bounds, the excess-wealth bound on the local time,
//! the joint-law balance condition, and the hitting-time Laplace identity.

use serde::{Deserialize, Serialize};

use crate::embeddings::{vallois_rule, StoppingRule};
use crate::error::{BoundError, MeasureError, SimError};
use crate::measures::AtomicMeasure;
use crate::paths::{run_stopped, stream_stopped, SimConfig, StopOutcome};
use crate::piecewise::{MaxFn, PiecewiseFn};
use crate::stats::{MeanAcc, StatReport};

/// Grid-versus-bound comparison: one row per evaluation point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub points: Vec<f64>,
    pub bound: Vec<f64>,
    pub empirical: Vec<f64>,
    pub stderr: Vec<f64>,
    /// empirical > bound + 3 stderr.
    pub violation: Vec<bool>,
    pub n_paths: u64,
    pub seed: u64,
}

impl BoundReport {
    pub fn any_violation(&self) -> bool {
        self.violation.iter().any(|&v| v)
    }
}

/// Partial-integral threshold beyond which the supremum-law integral is
/// declared divergent (e^{-50} is zero at statistical scale).
pub const SUP_LAW_DIVERGENCE_CAP: f64 = 50.0;

/// P(max >= y) = exp(-int_0^y ds/(s - phi(s))) for the conditional-mean
/// profile phi(s) = E[B_T | max = s]. Adaptive trapezoid refinement to
/// relative tolerance 1e-8 per piece; a partial integral beyond
/// [`SUP_LAW_DIVERGENCE_CAP`] short-circuits to 0. phi(s) >= s strictly
/// inside (0, y) is a domain error; at the endpoints it reads as the
/// boundary of the support and yields the divergent (zero-tail) regime.
pub fn sup_law_from_phi(phi: &PiecewiseFn, y: f64) -> Result<f64, BoundError> {
    assert!(y >= 0.0);
    if y == 0.0 {
        return Ok(1.0);
    }
    // Cells split at the knots make the denominator d(s) = s - phi(s)
    // linear per cell, so each cell is classified exactly by its endpoint
    // signs: positive throughout (integrate), hitting zero from above
    // (the integral diverges there, scanning left to right, and the tail
    // is zero), or invalid (phi crossed the diagonal before any
    // divergence accumulated).
    let mut cuts: Vec<f64> = vec![0.0];
    for &k in phi.knots() {
        if k > 0.0 && k < y {
            cuts.push(k);
        }
    }
    cuts.push(y);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let da = a - phi.eval(a);
        let db = b - phi.eval(b);
        if da < 0.0 {
            // phi above the diagonal at the cell start (for a = 0: on a
            // right neighborhood of 0) before any divergence accumulated
            return Err(BoundError::PhiAboveDiagonal { s: a, phi: phi.eval(a) });
        }
        if da == 0.0 {
            if db > 0.0 {
                // integrable singularity at the left edge: 1/(m(s-a))
                // integrates to +oo, so the tail vanishes
                return Ok(0.0);
            }
            return Err(BoundError::PhiAboveDiagonal { s: b, phi: phi.eval(b) });
        }
        // da > 0
        if db <= 0.0 {
            // d hits zero inside (a, b]: divergence reached
            return Ok(0.0);
        }
        // clean cell: d linear and positive at both ends
        match adaptive_trapezoid(
            &|s: f64| 1.0 / (s - phi.eval(s)),
            a,
            b,
            SUP_LAW_DIVERGENCE_CAP - total,
        ) {
            Integral::Value(v) => {
                total += v;
                if total > SUP_LAW_DIVERGENCE_CAP {
                    return Ok(0.0);
                }
            }
            Integral::Divergent => return Ok(0.0),
        }
    }
    Ok((-total).exp())
}

enum Integral {
    Value(f64),
    Divergent,
}

/// Recursive trapezoid refinement with relative tolerance 1e-8; reports
/// divergence once the accumulated value passes `budget`.
fn adaptive_trapezoid(f: &dyn Fn(f64) -> f64, a: f64, b: f64, budget: f64) -> Integral {
    const REL_TOL: f64 = 1e-8;
    const MAX_DEPTH: u32 = 48;
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        depth: u32,
        budget: f64,
    ) -> Integral {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            return Integral::Value(whole);
        }
        let fm = f(m);
        let left = 0.25 * (b - a) * (fa + fm);
        let right = 0.25 * (b - a) * (fm + fb);
        let refined = left + right;
        if refined > budget {
            return Integral::Divergent;
        }
        if (refined - whole).abs() <= REL_TOL * refined.abs() || depth >= MAX_DEPTH {
            return Integral::Value(refined);
        }
        let l = match rec(f, a, fa, m, fm, left, depth + 1, budget) {
            Integral::Value(v) => v,
            Integral::Divergent => return Integral::Divergent,
        };
        let r = match rec(f, m, fm, b, fb, right, depth + 1, budget - l) {
            Integral::Value(v) => v,
            Integral::Divergent => return Integral::Divergent,
        };
        Integral::Value(l + r)
    }
    let fa = f(a);
    let fb = f(b);
    let whole = 0.5 * (b - a) * (fa + fb);
    if whole > budget {
        return Integral::Divergent;
    }
    rec(f, a, fa, b, fb, whole, 0, budget)
}

/// Tail-domination bound: P(max_T >= lambda) <= tail of mu at the
/// right-continuous inverse barycentre of lambda, for every uniformly
/// integrable embedding of the centered law mu.
pub fn blackwell_dubins_bound(mu: &AtomicMeasure, lambda: f64) -> Result<f64, MeasureError> {
    assert!(lambda >= 0.0);
    let x = mu.barycentre_right_inverse(lambda)?;
    Ok(mu.tail(x))
}

/// Empirical supremum tails of a rule embedding `mu`, checked against the
/// tail-domination bound at each lambda.
pub fn verify_sup_bound(
    rule: &StoppingRule,
    mu: &AtomicMeasure,
    lambda_grid: &[f64],
    config: &SimConfig,
) -> Result<BoundReport, SimError> {
    let outcomes = run_stopped(config, rule)?;
    let stopped: Vec<&StopOutcome> = outcomes.iter().filter(|o| o.stopped).collect();
    let n = stopped.len().max(1) as f64;
    let mut points = Vec::new();
    let mut bound = Vec::new();
    let mut empirical = Vec::new();
    let mut stderr = Vec::new();
    let mut violation = Vec::new();
    for &lam in lambda_grid {
        let b = blackwell_dubins_bound(mu, lam).expect("mu validated by the rule builder");
        let hits = stopped.iter().filter(|o| o.sup >= lam).count() as f64;
        let p = hits / n;
        let se = (p * (1.0 - p) / n).sqrt();
        points.push(lam);
        bound.push(b);
        empirical.push(p);
        stderr.push(se);
        violation.push(p > b + 3.0 * se);
    }
    Ok(BoundReport {
        points,
        bound,
        empirical,
        stderr,
        violation,
        n_paths: outcomes.len() as u64,
        seed: config.seed,
    })
}

/// The three expectation bounds at a bounded stopping rule, plus the
/// quadratic identity E(max - B_T)^2 = E B_T^2 they hinge on.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpectationBoundsReport {
    /// E max B vs sqrt(E T).
    pub sup: (StatReport, f64),
    /// E max |B| vs sqrt(2 E T).
    pub sup_abs: (StatReport, f64),
    /// E (max - min) vs sqrt(3 E T).
    pub range: (StatReport, f64),
    /// Paired E[(max - B_T)^2 - B_T^2]; zero within noise.
    pub quadratic_identity: StatReport,
    pub all_hold: bool,
}

/// Exact E T for the rules admitted by `expectation_bounds_check`.
fn exact_expected_time(rule: &StoppingRule) -> Result<f64, BoundError> {
    match rule {
        StoppingRule::FixedTime { t } => Ok(*t),
        StoppingRule::FirstExit { lower, upper } => Ok(-lower * upper),
        other => Err(BoundError::UnboundedRule {
            rule: other.kind_name().to_string(),
        }),
    }
}

pub fn expectation_bounds_check(
    rule: &StoppingRule,
    config: &SimConfig,
) -> Result<ExpectationBoundsReport, BoundError> {
    let e_t = exact_expected_time(rule)?;
    let outcomes = run_stopped(config, rule).map_err(|e| BoundError::UnboundedRule {
        rule: format!("simulation failed: {e}"),
    })?;
    let mut stats = (
        MeanAcc::default(),
        MeanAcc::default(),
        MeanAcc::default(),
        MeanAcc::default(),
    );
    for o in &outcomes {
        stats.0.push(o.sup);
        stats.1.push(o.sup.max(-o.inf));
        stats.2.push(o.sup - o.inf);
        let d = o.sup - o.value;
        stats.3.push(d * d - o.value * o.value);
    }
    let sup = stats.0.report(config.seed);
    let sup_abs = stats.1.report(config.seed);
    let range = stats.2.report(config.seed);
    let quad = stats.3.report(config.seed);
    let b1 = e_t.sqrt();
    let b2 = (2.0 * e_t).sqrt();
    let b3 = (3.0 * e_t).sqrt();
    let all_hold = sup.estimate <= b1 + 3.0 * sup.stderr
        && sup_abs.estimate <= b2 + 3.0 * sup_abs.stderr
        && range.estimate <= b3 + 3.0 * range.stderr
        && quad.within_sigma_of_zero(3.0);
    Ok(ExpectationBoundsReport {
        sup: (sup, b1),
        sup_abs: (sup_abs, b2),
        range: (range, b3),
        quadratic_identity: quad,
        all_hold,
    })
}

/// One probability level of the local-time bound comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalTimeBoundRow {
    pub p: f64,
    /// p* = tail of m at its own tail-inverse of p; equals p off atoms.
    pub p_star: f64,
    pub threshold_alt: f64,
    pub threshold_reference: f64,
    pub lhs: f64,
    pub lhs_stderr: f64,
    pub rhs: f64,
    pub rhs_stderr: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalTimeBoundReport {
    pub rows: Vec<LocalTimeBoundRow>,
    pub mean_alt: StatReport,
    pub mean_reference: StatReport,
    /// First moment of m = common expected local time of both embeddings.
    pub target_mean: f64,
    pub all_hold: bool,
}

/// Empirical left-continuous tail-inverse over a sample: the ceil(p n)-th
/// largest value; p = 0 maps to the threshold 0 (measures on the half-line),
/// making that row the equality-of-means check.
fn empirical_tail_inverse(sorted: &[f64], p: f64) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    let n = sorted.len();
    let k = ((p * n as f64).ceil() as usize).clamp(1, n);
    sorted[n - k]
}

/// Compare E (L - z_p)^+ between an alternative embedding of |B_T| ~ m and
/// the local-time rule for m, with thresholds at matching empirical
/// quantiles (p* on the reference side absorbs the atoms of m).
pub fn local_time_bound_check(
    m: &AtomicMeasure,
    alt_rule: &StoppingRule,
    p_grid: &[f64],
    config: &SimConfig,
) -> Result<LocalTimeBoundReport, SimError> {
    let reference_rule = vallois_rule(m).expect("target m validated upstream");
    let alt = run_stopped(config, alt_rule)?;
    let reference = run_stopped(config, &reference_rule)?;
    let collect = |outs: &[StopOutcome]| -> Vec<f64> {
        let mut v: Vec<f64> = outs
            .iter()
            .filter(|o| o.stopped)
            .map(|o| o.ell)
            .collect();
        v.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        v
    };
    let ell_alt = collect(&alt);
    let ell_ref = collect(&reference);
    let excess_stats = |xs: &[f64], z: f64| -> (f64, f64) {
        let mut acc = MeanAcc::default();
        for &x in xs {
            acc.push((x - z).max(0.0));
        }
        let r = acc.report(config.seed);
        (r.estimate, r.stderr)
    };
    let mut rows = Vec::with_capacity(p_grid.len());
    let mut all_hold = true;
    for &p in p_grid {
        let p_star = if p == 0.0 {
            0.0
        } else {
            m.tail(m.tail_inverse(p, crate::measures::TailInverseKind::LeftContinuous))
        };
        let z_alt = empirical_tail_inverse(&ell_alt, p);
        let z_ref = empirical_tail_inverse(&ell_ref, p_star);
        let (lhs, lhs_se) = excess_stats(&ell_alt, z_alt);
        let (rhs, rhs_se) = excess_stats(&ell_ref, z_ref);
        let holds = lhs <= rhs + 3.0 * (lhs_se * lhs_se + rhs_se * rhs_se).sqrt();
        all_hold &= holds;
        rows.push(LocalTimeBoundRow {
            p,
            p_star,
            threshold_alt: z_alt,
            threshold_reference: z_ref,
            lhs,
            lhs_stderr: lhs_se,
            rhs,
            rhs_stderr: rhs_se,
            holds,
        });
    }
    let mean_alt = StatReport::from_samples(&ell_alt, config.seed);
    let mean_reference = StatReport::from_samples(&ell_ref, config.seed);
    Ok(LocalTimeBoundReport {
        rows,
        mean_alt,
        mean_reference,
        target_mean: m.atoms().iter().map(|a| a.w * a.x).sum(),
        all_hold,
    })
}

/// Binned check of the joint-law balance condition: the integral of the
/// first-marginal tail over a bin equals the mass of (max - B) carried by
/// the bin.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RogersRow {
    pub z_lo: f64,
    pub z_hi: f64,
    /// Fraction of paths stopping in this bin.
    pub path_mass: f64,
    /// This bin's share of the total compared measure (the tail integral).
    pub measure_share: f64,
    pub lhs_tail_integral: f64,
    pub rhs_weighted_mass: f64,
    pub rel_discrepancy: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RogersReport {
    pub rows: Vec<RogersRow>,
    /// Max relative discrepancy over bins whose measure share reaches
    /// `mass_floor`. The share floor keeps the comparison where the measure
    /// lives; near the support edge both sides vanish and a ratio of two
    /// vanishing quantities says nothing.
    pub max_rel_discrepancy: f64,
    pub mass_floor: f64,
}

/// `pairs` are stopped (max, max - B) samples; bins are equal-width over
/// [0, z_max] with z_max the largest max observed. Feed maxima through
/// [`crate::paths::max_continuity_correction`] when the bin width is
/// comparable to sqrt(dt).
pub fn rogers_condition_check(
    pairs: &[(f64, f64)],
    n_bins: usize,
    mass_floor: f64,
) -> RogersReport {
    assert!(!pairs.is_empty() && n_bins >= 1);
    let n = pairs.len() as f64;
    let z_max = pairs
        .iter()
        .map(|p| p.0)
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    // nudge so the top sample lands inside the last bin
    let z_max = z_max * (1.0 + 1e-9);
    let width = z_max / n_bins as f64;
    let mut mass = vec![0.0f64; n_bins];
    let mut rhs = vec![0.0f64; n_bins];
    let mut lhs = vec![0.0f64; n_bins];
    for &(sup, gap) in pairs {
        let j = ((sup / width) as usize).min(n_bins - 1);
        mass[j] += 1.0;
        rhs[j] += gap;
        // exact integral of the empirical tail: this sample contributes its
        // overlap with every bin below its max
        let full_bins = (sup / width) as usize;
        for l in lhs.iter_mut().take(full_bins.min(n_bins)) {
            *l += width;
        }
        if full_bins < n_bins {
            lhs[full_bins] += sup - full_bins as f64 * width;
        }
    }
    let lhs_total: f64 = lhs.iter().sum::<f64>().max(f64::MIN_POSITIVE);
    let mut rows = Vec::with_capacity(n_bins);
    let mut worst = 0.0f64;
    for j in 0..n_bins {
        let lhs_j = lhs[j] / n;
        let rhs_j = rhs[j] / n;
        let share = lhs[j] / lhs_total;
        let rel = if lhs_j.max(rhs_j) > 0.0 {
            (lhs_j - rhs_j).abs() / lhs_j.max(rhs_j)
        } else {
            0.0
        };
        if share >= mass_floor {
            worst = worst.max(rel);
        }
        rows.push(RogersRow {
            z_lo: j as f64 * width,
            z_hi: (j + 1) as f64 * width,
            path_mass: mass[j] / n,
            measure_share: share,
            lhs_tail_integral: lhs_j,
            rhs_weighted_mass: rhs_j,
            rel_discrepancy: rel,
        });
    }
    RogersReport {
        rows,
        max_rel_discrepancy: worst,
        mass_floor,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LaplaceReport {
    pub x: f64,
    pub estimate: StatReport,
    pub closed_form: f64,
    pub pass: bool,
    pub unstopped_fraction: f64,
}

/// Verify E[exp(-1/2 int_0^{T_x} f^2(max B_s) ds)] = exp(-int_0^x f) for
/// nonnegative f. The integrand freezes once the maximum passes the support
/// of f, so horizon truncation only loses the exponentially negligible
/// still-active paths.
pub fn hitting_laplace_check(
    f: &dyn MaxFn,
    x: f64,
    config: &SimConfig,
) -> Result<LaplaceReport, SimError> {
    assert!(x > 0.0);
    let rule = StoppingRule::HittingLevel { level: x };
    let closed_form = (-f.primitive(x)).exp();
    let (acc, unstopped) = crate::parallel::fold_paths(
        config.n_paths,
        (MeanAcc::default(), 0u64),
        |mut acc, i| {
            let mut integral = 0.0f64;
            let mut prev_sup = 0.0f64;
            let out = stream_stopped(config, &rule, i, |s| {
                if s.step > 0 {
                    let fv = f.eval(prev_sup);
                    integral += fv * fv * config.dt;
                }
                prev_sup = s.sup;
            });
            acc.0.push((-0.5 * integral).exp());
            if !out.stopped {
                acc.1 += 1;
            }
            acc
        },
        |mut a, b| {
            a.0.merge(&b.0);
            a.1 += b.1;
            a
        },
    );
    let estimate = acc.report(config.seed);
    Ok(LaplaceReport {
        x,
        pass: estimate.within_sigma_of(closed_form, 3.0),
        estimate,
        closed_form,
        unstopped_fraction: unstopped as f64 / config.n_paths as f64,
    })
}
