//! Reweighting the Wiener measure by a density of the running maximum and
//! watching the reweighted probabilities converge, as the horizon grows, to
//! the limit measure whose density on F_s is the mean-one martingale
//! 1 - F(max_s) + f(max_s)(max_s - X_s).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::paths::{sample_at_times, SimConfig};
use crate::piecewise::MaxFn;
use crate::stats::StatReport;

#[derive(Debug, Error)]
pub enum PenalizationError {
    #[error("f must integrate to 1 over [0, oo); got {integral}")]
    NotADensity { integral: f64 },
    #[error("horizons must be increasing and larger than s = {s}")]
    BadSchedule { s: f64 },
    #[error("weight denominator {estimate} is within 3 stderr ({stderr}) of zero")]
    DenominatorVanishes { estimate: f64, stderr: f64 },
    #[error(transparent)]
    Sim(#[from] crate::error::SimError),
}

/// The event Gamma in F_s whose reweighted probability is tracked.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Event {
    /// { X_s <= a }.
    EndpointBelow { a: f64 },
    /// { max_{u<=s} X_u <= a }.
    SupBelow { a: f64 },
}

impl Event {
    fn holds(&self, value_s: f64, sup_s: f64) -> bool {
        match self {
            Event::EndpointBelow { a } => value_s <= *a,
            Event::SupBelow { a } => sup_s <= *a,
        }
    }
}

/// Point where the density normalization is checked; far enough out that
/// every admitted density has negligible mass beyond it.
const DENSITY_CHECK_AT: f64 = 100.0;
const DENSITY_TOL: f64 = 1e-9;

/// One penalization experiment: a density f of the running maximum, an event
/// in F_s, and the horizon schedule.
pub struct PenalizationSpec<'a> {
    pub f: &'a dyn MaxFn,
    pub event: Event,
    pub s: f64,
    pub t_list: Vec<f64>,
}

impl<'a> PenalizationSpec<'a> {
    pub fn new(
        f: &'a dyn MaxFn,
        event: Event,
        s: f64,
        t_list: Vec<f64>,
    ) -> Result<Self, PenalizationError> {
        let integral = f.primitive(DENSITY_CHECK_AT);
        if (integral - 1.0).abs() > DENSITY_TOL {
            return Err(PenalizationError::NotADensity { integral });
        }
        if s <= 0.0 || t_list.is_empty() || t_list[0] <= s {
            return Err(PenalizationError::BadSchedule { s });
        }
        if t_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PenalizationError::BadSchedule { s });
        }
        Ok(PenalizationSpec { f, event, s, t_list })
    }

    /// Density of the limit measure on F_s, evaluated pathwise:
    /// 1 - F(max_s) + f(max_s)(max_s - X_s).
    pub fn limit_density(&self, value_s: f64, sup_s: f64) -> f64 {
        1.0 - self.f.primitive(sup_s) + self.f.eval(sup_s) * (sup_s - value_s)
    }
}

/// Moment sums behind one (numerator, denominator, limit) triple, kept so
/// ratio and gap standard errors come out of one pass.
#[derive(Debug, Clone, Copy, Default)]
struct RatioAcc {
    n: u64,
    sum_g: f64,   // 1_Gamma f(max_t)
    sum_w: f64,   // f(max_t)
    sum_l: f64,   // 1_Gamma S^f_s
    sum_gg: f64,
    sum_ww: f64,
    sum_ll: f64,
    sum_gw: f64,
    sum_gl: f64,
    sum_wl: f64,
}

impl RatioAcc {
    fn push(&mut self, g: f64, w: f64, l: f64) {
        self.n += 1;
        self.sum_g += g;
        self.sum_w += w;
        self.sum_l += l;
        self.sum_gg += g * g;
        self.sum_ww += w * w;
        self.sum_ll += l * l;
        self.sum_gw += g * w;
        self.sum_gl += g * l;
        self.sum_wl += w * l;
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    /// Ratio estimate with delta-method standard error.
    fn ratio(&self, seed: u64) -> Result<StatReport, PenalizationError> {
        let n = self.nf();
        let mw = self.sum_w / n;
        let mg = self.sum_g / n;
        let var_w = (self.sum_ww / n - mw * mw).max(0.0);
        let se_w = (var_w / n).sqrt();
        if mw.abs() <= 3.0 * se_w {
            return Err(PenalizationError::DenominatorVanishes {
                estimate: mw,
                stderr: se_w,
            });
        }
        let r = mg / mw;
        let var_g = (self.sum_gg / n - mg * mg).max(0.0);
        let cov_gw = self.sum_gw / n - mg * mw;
        // Var(g/w) ~ (var_g - 2 r cov + r^2 var_w) / (n mw^2)
        let var_r = ((var_g - 2.0 * r * cov_gw + r * r * var_w) / (n * mw * mw)).max(0.0);
        Ok(StatReport {
            estimate: r,
            stderr: var_r.sqrt(),
            n: self.n,
            seed,
        })
    }

    /// Limit-side mean E[1_Gamma S^f_s].
    fn limit(&self, seed: u64) -> StatReport {
        StatReport::from_sums(self.sum_l, self.sum_ll, self.n, seed)
    }

    /// gap = ratio - limit with the influence-function standard error,
    /// honoring the common random numbers shared by both sides.
    fn gap(&self, seed: u64) -> Result<StatReport, PenalizationError> {
        let r = self.ratio(seed)?;
        let l = self.limit(seed);
        let n = self.nf();
        let mw = self.sum_w / n;
        let mg = self.sum_g / n;
        let ml = self.sum_l / n;
        let rr = r.estimate;
        // influence of path i: (g_i - rr w_i)/mw - (l_i - ml)
        let var_num = (self.sum_gg - 2.0 * rr * self.sum_gw + rr * rr * self.sum_ww) / n
            - (mg - rr * mw) * (mg - rr * mw);
        let var_l = (self.sum_ll / n - ml * ml).max(0.0);
        let cov = (self.sum_gl - rr * self.sum_wl) / n - (mg - rr * mw) * ml;
        let var_gap = (var_num / (mw * mw) + var_l - 2.0 * cov / mw).max(0.0);
        Ok(StatReport {
            estimate: r.estimate - l.estimate,
            stderr: (var_gap / n).sqrt(),
            n: self.n,
            seed,
        })
    }
}

fn accumulate(
    spec: &PenalizationSpec<'_>,
    ts: &[f64],
    config: &SimConfig,
) -> Result<Vec<RatioAcc>, PenalizationError> {
    // one simulation serves every horizon: common random numbers make the
    // gaps comparable across t
    let mut times = vec![spec.s];
    times.extend_from_slice(ts);
    let rows = sample_at_times(config, &times)?;
    let zero = vec![RatioAcc::default(); ts.len()];
    let mut accs = zero;
    for row in &rows {
        let at_s = &row[0];
        let ind = if spec.event.holds(at_s.value, at_s.sup) {
            1.0
        } else {
            0.0
        };
        let l = ind * spec.limit_density(at_s.value, at_s.sup);
        for (j, at_t) in row.iter().skip(1).enumerate() {
            let w = spec.f.eval(at_t.sup);
            accs[j].push(ind * w, w, l);
        }
    }
    Ok(accs)
}

/// W^f_t(Gamma) = E[1_Gamma f(max_t)] / E[f(max_t)], with delta-method
/// standard error.
pub fn penalized_probability(
    spec: &PenalizationSpec<'_>,
    t: f64,
    config: &SimConfig,
) -> Result<StatReport, PenalizationError> {
    if t <= spec.s {
        return Err(PenalizationError::BadSchedule { s: spec.s });
    }
    let accs = accumulate(spec, &[t], config)?;
    accs[0].ratio(config.seed)
}

/// W^f_infinity(Gamma) = E[1_Gamma (1 - F(max_s) + f(max_s)(max_s - X_s))].
pub fn limit_probability(
    spec: &PenalizationSpec<'_>,
    config: &SimConfig,
) -> Result<StatReport, PenalizationError> {
    let accs = accumulate(spec, &[spec.t_list[0]], config)?;
    Ok(accs[0].limit(config.seed))
}

/// One horizon row of the convergence table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub t: f64,
    pub penalized: StatReport,
    pub gap: StatReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub limit: StatReport,
    /// |gap| at the largest horizon within 3 combined stderr of zero.
    pub final_gap_within_3_sigma: bool,
    /// |gap| nonincreasing along the schedule up to 2 sigma noise.
    pub gaps_nonincreasing_within_noise: bool,
}

/// Run the whole schedule with common random numbers and report the gap per
/// horizon.
pub fn convergence_experiment(
    spec: &PenalizationSpec<'_>,
    config: &SimConfig,
) -> Result<ConvergenceReport, PenalizationError> {
    let accs = accumulate(spec, &spec.t_list, config)?;
    let limit = accs[0].limit(config.seed);
    let mut rows = Vec::with_capacity(accs.len());
    for (j, acc) in accs.iter().enumerate() {
        rows.push(ConvergenceRow {
            t: spec.t_list[j],
            penalized: acc.ratio(config.seed)?,
            gap: acc.gap(config.seed)?,
        });
    }
    let last = rows.last().expect("schedule is nonempty");
    let final_ok = last.gap.within_sigma_of_zero(3.0);
    let mut monotone = true;
    for w in rows.windows(2) {
        let noise = 2.0 * (w[0].gap.stderr.powi(2) + w[1].gap.stderr.powi(2)).sqrt();
        if w[1].gap.estimate.abs() > w[0].gap.estimate.abs() + noise {
            monotone = false;
        }
    }
    Ok(ConvergenceReport {
        rows,
        limit,
        final_gap_within_3_sigma: final_ok,
        gaps_nonincreasing_within_noise: monotone,
    })
}
