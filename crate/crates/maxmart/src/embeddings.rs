//! Stopping rules that embed a prescribed law into Brownian motion: the
//! barycentre rule (stop when the running maximum catches the barycentre of
//! the value) for the law of B_T, and the dual rule (stop when |B| reaches
//! the inverse dual Hardy-Littlewood function of the local time) for the law
//! of |B_T|. Plus the plumbing to run them over simulated paths and compare
//! stopped laws against targets.

use serde::{Deserialize, Serialize};

use crate::error::MeasureError;
use crate::measures::{AtomicMeasure, Barycentre, DualHardyLittlewood};
use crate::paths::{run_stopped, rule_aux_uniform, PathState, SimConfig, StopOutcome};
use crate::stats::MeanAcc;

/// A rule deciding, from the current (t, B, sup, local time) and an optional
/// per-path randomization, whether the path stops now.
#[derive(Debug, Clone)]
pub enum StoppingRule {
    /// Stop when sup_t >= Psi(B_t); embeds a centered law into B_T.
    AzemaYor(Barycentre),
    /// Stop when |B_t| >= phi(L_t); embeds a law on (0,oo) into |B_T|.
    ValloisObloj(DualHardyLittlewood),
    /// Stop at the first exit of (lower, upper), lower < 0 < upper.
    FirstExit { lower: f64, upper: f64 },
    /// Stop at the first visit to `level` (>= level for positive levels,
    /// <= for negative; level 0 stops immediately).
    HittingLevel { level: f64 },
    /// Stop at fixed time t.
    FixedTime { t: f64 },
    /// An independent draw picks one of the |B|-levels by weight, then stop
    /// at the first time |B| reaches it.
    MixedAbsHitting { levels: Vec<(f64, f64)> },
    /// Never stop (horizon sampling).
    Never,
}

impl StoppingRule {
    pub fn first_exit(lower: f64, upper: f64) -> Self {
        assert!(lower < 0.0 && upper > 0.0, "need lower < 0 < upper");
        StoppingRule::FirstExit { lower, upper }
    }

    /// Fair or weighted mixture of absolute hitting levels; weights must be
    /// positive and sum to one.
    pub fn mixed_abs_hitting(levels: Vec<(f64, f64)>) -> Self {
        assert!(!levels.is_empty());
        let total: f64 = levels.iter().map(|l| l.1).sum();
        assert!((total - 1.0).abs() < 1e-12, "weights must sum to one");
        assert!(levels.iter().all(|l| l.0 > 0.0 && l.1 > 0.0));
        StoppingRule::MixedAbsHitting { levels }
    }

    /// Whether evaluation consumes a per-path auxiliary uniform.
    pub fn needs_aux(&self) -> bool {
        matches!(self, StoppingRule::MixedAbsHitting { .. })
    }

    /// Per-path firing predicate. `aux` is the path's auxiliary uniform
    /// (see [`rule_aux_uniform`]), constant along the path.
    #[inline]
    pub fn fires(&self, state: &PathState, aux: f64) -> bool {
        match self {
            StoppingRule::AzemaYor(psi) => state.sup >= psi.eval(state.value),
            StoppingRule::ValloisObloj(dhl) => {
                state.value.abs() >= dhl.right_inverse(state.ell)
            }
            StoppingRule::FirstExit { lower, upper } => {
                state.value <= *lower || state.value >= *upper
            }
            StoppingRule::HittingLevel { level } => {
                if *level >= 0.0 {
                    state.value >= *level
                } else {
                    state.value <= *level
                }
            }
            StoppingRule::FixedTime { t } => state.t >= t - 1e-9,
            StoppingRule::MixedAbsHitting { levels } => {
                state.value.abs() >= pick_level(levels, aux)
            }
            StoppingRule::Never => false,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            StoppingRule::AzemaYor(_) => "azema-yor",
            StoppingRule::ValloisObloj(_) => "vallois-obloj",
            StoppingRule::FirstExit { .. } => "first-exit",
            StoppingRule::HittingLevel { .. } => "hitting-level",
            StoppingRule::FixedTime { .. } => "fixed-time",
            StoppingRule::MixedAbsHitting { .. } => "mixed-abs-hitting",
            StoppingRule::Never => "never",
        }
    }
}

fn pick_level(levels: &[(f64, f64)], u: f64) -> f64 {
    let mut acc = 0.0;
    for &(level, w) in levels {
        acc += w;
        if u < acc {
            return level;
        }
    }
    levels[levels.len() - 1].0
}

/// The barycentre stopping rule of a centered target law.
pub fn azema_yor_rule(mu: &AtomicMeasure) -> Result<StoppingRule, MeasureError> {
    Ok(StoppingRule::AzemaYor(mu.barycentre_fn()?))
}

/// The local-time stopping rule of a target law for |B_T| on (0, oo).
pub fn vallois_rule(m: &AtomicMeasure) -> Result<StoppingRule, MeasureError> {
    Ok(StoppingRule::ValloisObloj(m.dual_hl_fn()?))
}

/// Which stopped functional the embedding targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EmbeddedValue {
    /// B_T against a centered target.
    Signed,
    /// |B_T| against a target on (0, oo).
    Abs,
}

/// Summary of one embedding run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub rule: String,
    pub which: EmbeddedValue,
    pub n_paths: u64,
    pub n_stopped: u64,
    pub unstopped_fraction: f64,
    /// Raised when more than 1% of paths outlived the horizon.
    pub unstopped_flag: bool,
    /// KS distance between the stopped empirical law and the target.
    /// Meaningful for continuous-type (many-atom) targets; against coarse
    /// atomic targets the grid overshoot parks mass just past each atom and
    /// KS saturates, so judge those through `w1_to_target`.
    pub ks_to_target: f64,
    /// Wasserstein-1 distance (integrated CDF gap) to the target; robust to
    /// the O(sqrt(dt)) overshoot for atomic targets.
    pub w1_to_target: f64,
    pub mean: f64,
    pub stderr: f64,
    pub seed: u64,
    /// Stopped laws, quantile-collapsed for the report.
    pub law_value: AtomicMeasure,
    pub law_sup: AtomicMeasure,
    pub law_ell: AtomicMeasure,
}

/// Atom cap for the empirical laws stored in reports.
pub const REPORT_LAW_ATOMS: usize = 2000;

/// Run an embedding: simulate, stop, and compare the stopped law with the
/// target. Unstopped paths are excluded from the laws but reported.
pub fn run_embedding(
    rule: &StoppingRule,
    target: &AtomicMeasure,
    which: EmbeddedValue,
    config: &SimConfig,
) -> Result<(EmbeddingReport, Vec<StopOutcome>), crate::error::SimError> {
    let outcomes = run_stopped(config, rule)?;
    let stopped: Vec<&StopOutcome> = outcomes.iter().filter(|o| o.stopped).collect();
    let n_stopped = stopped.len() as u64;
    let unstopped_fraction = 1.0 - n_stopped as f64 / outcomes.len() as f64;
    let pick = |o: &StopOutcome| match which {
        EmbeddedValue::Signed => o.value,
        EmbeddedValue::Abs => o.value.abs(),
    };
    let values: Vec<f64> = stopped.iter().map(|o| pick(o)).collect();
    let sups: Vec<f64> = stopped.iter().map(|o| o.sup).collect();
    let ells: Vec<f64> = stopped.iter().map(|o| o.ell).collect();
    let mut acc = MeanAcc::default();
    for &v in &values {
        acc.push(v);
    }
    let stat = acc.report(config.seed);
    let report = EmbeddingReport {
        rule: rule.kind_name().to_string(),
        which,
        n_paths: outcomes.len() as u64,
        n_stopped,
        unstopped_fraction,
        unstopped_flag: unstopped_fraction > 0.01,
        ks_to_target: ks_vs_atomic(&values, target),
        w1_to_target: wasserstein1_vs_atomic(&values, target),
        mean: stat.estimate,
        stderr: stat.stderr,
        seed: config.seed,
        law_value: AtomicMeasure::from_samples(&values, REPORT_LAW_ATOMS)
            .expect("stopped sample is nonempty"),
        law_sup: AtomicMeasure::from_samples(&sups, REPORT_LAW_ATOMS)
            .expect("stopped sample is nonempty"),
        law_ell: AtomicMeasure::from_samples(&ells, REPORT_LAW_ATOMS)
            .expect("stopped sample is nonempty"),
    };
    Ok((report, outcomes))
}

/// Default horizon for an embedding: 50 times the target's second moment
/// (stopping times of uniformly integrable embeddings have mean equal to the
/// second moment, with polynomial tails).
pub fn default_horizon(target: &AtomicMeasure) -> f64 {
    50.0 * target.second_moment().max(1e-3)
}

/// Exact sup-distance between the empirical CDF of `samples` and the CDF of
/// an atomic target; both are step functions, so the distance is attained at
/// a jump of either.
pub fn ks_vs_atomic(samples: &[f64], target: &AtomicMeasure) -> f64 {
    assert!(!samples.is_empty());
    let mut xs = samples.to_vec();
    xs.sort_unstable_by(|a, b| a.partial_cmp(b).expect("NaN sample"));
    let n = xs.len() as f64;
    let atoms = target.atoms();
    let mut cum = Vec::with_capacity(atoms.len());
    let mut acc = 0.0;
    for a in atoms {
        acc += a.w;
        cum.push(acc);
    }
    let mut worst = 0.0f64;
    // at and just before each target atom
    for (j, a) in atoms.iter().enumerate() {
        let before = if j == 0 { 0.0 } else { cum[j - 1] };
        let at = cum[j];
        let emp_before = xs.partition_point(|&x| x < a.x) as f64 / n;
        let emp_at = xs.partition_point(|&x| x <= a.x) as f64 / n;
        worst = worst.max((emp_before - before).abs());
        worst = worst.max((emp_at - at).abs());
    }
    // at and just before each sample point
    for (i, &x) in xs.iter().enumerate() {
        let j = atoms.partition_point(|a| a.x <= x);
        let tgt = if j == 0 { 0.0 } else { cum[j - 1] };
        let jb = atoms.partition_point(|a| a.x < x);
        let tgt_before = if jb == 0 { 0.0 } else { cum[jb - 1] };
        worst = worst.max(((i + 1) as f64 / n - tgt).abs());
        worst = worst.max((i as f64 / n - tgt_before).abs());
    }
    worst
}

/// Wasserstein-1 distance between the empirical law of `samples` and an
/// atomic target: the integral of |F_emp - F_target| over the line, swept
/// exactly across the breakpoints of both step functions.
pub fn wasserstein1_vs_atomic(samples: &[f64], target: &AtomicMeasure) -> f64 {
    assert!(!samples.is_empty());
    let mut xs = samples.to_vec();
    xs.sort_unstable_by(|a, b| a.partial_cmp(b).expect("NaN sample"));
    let n = xs.len() as f64;
    let atoms = target.atoms();
    let mut total = 0.0f64;
    let mut prev_x = f64::NAN;
    let mut f_emp = 0.0f64;
    let mut f_tgt = 0.0f64;
    let (mut i, mut j) = (0usize, 0usize);
    while i < xs.len() || j < atoms.len() {
        let next = match (xs.get(i), atoms.get(j)) {
            (Some(&a), Some(at)) => a.min(at.x),
            (Some(&a), None) => a,
            (None, Some(at)) => at.x,
            (None, None) => break,
        };
        if prev_x.is_finite() && next > prev_x {
            total += (next - prev_x) * (f_emp - f_tgt).abs();
        }
        while i < xs.len() && xs[i] <= next {
            f_emp += 1.0 / n;
            i += 1;
        }
        while j < atoms.len() && atoms[j].x <= next {
            f_tgt += atoms[j].w;
            j += 1;
        }
        prev_x = next;
    }
    total
}

/// Uniform-integrability diagnostic: E|B_{T and t}| and the tail masses
/// E[|B| 1_{|B|>K}] at a grid of checkpoints. Reported, not asserted. A
/// uniformly integrable embedding has E|B_{T and t}| plateau at E|B_T| with
/// vanishing top-K tail mass; the heavy-tail flag fires when the mean is
/// still climbing between the last two checkpoints or the top-K tail mass
/// refuses to vanish.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UiDiagnostic {
    pub checkpoints: Vec<f64>,
    pub k_grid: Vec<f64>,
    /// E|B_{T and t}| per checkpoint.
    pub mean_abs: Vec<f64>,
    /// tail_mass[i][j] = E[|B_{T and t_i}| 1_{|B| > K_j}].
    pub tail_mass: Vec<Vec<f64>>,
    pub heavy_tail_flag: bool,
}

pub fn ui_diagnostic(
    rule: &StoppingRule,
    config: &SimConfig,
    checkpoints: &[f64],
    k_grid: &[f64],
) -> Result<UiDiagnostic, crate::error::SimError> {
    config.validate()?;
    assert!(!checkpoints.is_empty() && !k_grid.is_empty());
    let mut ordered: Vec<f64> = checkpoints.to_vec();
    ordered.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let steps_at: Vec<u64> = ordered
        .iter()
        .map(|&t| (t / config.dt).round() as u64)
        .collect();
    let k = ordered.len();
    let kg = k_grid.len();
    let zero = vec![0.0f64; k * (kg + 1)];
    let sums = crate::parallel::fold_paths(
        config.n_paths,
        zero,
        |mut acc, i| {
            // B_{T and t}: freeze the value at the stop, keep sampling times
            let mut frozen: Option<f64> = None;
            let mut next = 0usize;
            let aux = rule_aux_uniform(config, rule, i);
            crate::paths::stream_stopped(config, &StoppingRule::Never, i, |s| {
                if frozen.is_none() && rule.fires(s, aux) {
                    frozen = Some(s.value);
                }
                while next < steps_at.len() && s.step == steps_at[next] {
                    let v = frozen.unwrap_or(s.value).abs();
                    acc[next * (kg + 1)] += v;
                    for (j, &kk) in k_grid.iter().enumerate() {
                        if v > kk {
                            acc[next * (kg + 1) + 1 + j] += v;
                        }
                    }
                    next += 1;
                }
            });
            acc
        },
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        },
    );
    let nf = config.n_paths as f64;
    let mean_abs: Vec<f64> = (0..k).map(|i| sums[i * (kg + 1)] / nf).collect();
    let tail_mass: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..kg).map(|j| sums[i * (kg + 1) + 1 + j] / nf).collect())
        .collect();
    let last_mean = mean_abs[k - 1].max(1e-300);
    let still_growing =
        k >= 2 && mean_abs[k - 1] > mean_abs[k - 2] * 1.05 + 3.0 / nf.sqrt();
    let tail_stuck = tail_mass[k - 1][kg - 1] > 0.02 * last_mean;
    Ok(UiDiagnostic {
        checkpoints: ordered,
        k_grid: k_grid.to_vec(),
        mean_abs,
        tail_mass,
        heavy_tail_flag: still_growing || tail_stuck,
    })
}
