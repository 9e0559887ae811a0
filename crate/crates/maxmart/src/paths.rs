//! Seeded Brownian paths on a uniform grid, with the running supremum and a
//! local-time-at-zero estimate carried along, plus the exact joint law of
//! (B_t, max B_t) used as a validation oracle.
//!
//! Simulation is streaming by default: the Monte-Carlo drivers fold
//! (value, sup, local time) through the grid without materializing paths,
//! so million-path runs stay in constant memory per worker. `simulate`
//! materializes a full [`PathGrid`] when a whole trajectory is needed.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::embeddings::StoppingRule;
use crate::error::SimError;
use crate::rng::{aux_stream, path_stream};

/// Hard cap on grid steps per path.
pub const MAX_STEPS: u64 = 100_000_000;

/// Asmussen-Glynn-Pitman constant -zeta(1/2)/sqrt(2 pi): the expected gap
/// between the maximum of a Brownian path and the maximum of its grid
/// skeleton is `AGP_BETA * sqrt(dt)` to leading order.
pub const AGP_BETA: f64 = 0.582597157938;

/// Leading-order continuity correction for grid maxima; add to a measured
/// running maximum where a tolerance cannot absorb the O(sqrt(dt)) shift.
pub fn max_continuity_correction(dt: f64) -> f64 {
    AGP_BETA * dt.sqrt()
}

/// Factor by which the local-time band must dominate the step scale; below
/// this the within-step bridge factorization breaks down.
pub const EPS_OVER_SQRT_DT_MIN: f64 = 5.0;

/// Configuration of one Monte-Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Grid step, model time.
    pub dt: f64,
    /// Total simulated horizon per path.
    pub horizon: f64,
    pub n_paths: u64,
    pub seed: u64,
    /// Band width of the local-time estimator.
    pub local_time_epsilon: f64,
}

impl SimConfig {
    pub fn new(
        dt: f64,
        horizon: f64,
        n_paths: u64,
        seed: u64,
        local_time_epsilon: f64,
    ) -> Result<Self, SimError> {
        let cfg = SimConfig {
            dt,
            horizon,
            n_paths,
            seed,
            local_time_epsilon,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(SimError::BadDt { dt: self.dt });
        }
        if !(self.horizon >= 0.0) || !self.horizon.is_finite() {
            return Err(SimError::BadHorizon {
                horizon: self.horizon,
            });
        }
        let steps = self.steps();
        if steps > MAX_STEPS {
            return Err(SimError::TooManySteps {
                steps,
                cap: MAX_STEPS,
            });
        }
        let min_eps = EPS_OVER_SQRT_DT_MIN * self.dt.sqrt();
        if self.local_time_epsilon < min_eps {
            return Err(SimError::EpsilonTooSmall {
                epsilon: self.local_time_epsilon,
                min: min_eps,
            });
        }
        Ok(())
    }

    /// Number of increments on the grid.
    pub fn steps(&self) -> u64 {
        (self.horizon / self.dt).round() as u64
    }
}

/// One simulated trajectory with its derived running statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct PathGrid {
    pub dt: f64,
    /// B at grid points, starting at 0.
    pub values: Vec<f64>,
    /// Running maxima of `values`.
    pub sup: Vec<f64>,
    /// Running local-time-at-0 estimate.
    pub ell: Vec<f64>,
}

impl PathGrid {
    /// Wrap an explicit value sequence (tests, synthetic paths); derives
    /// sup and ell with the given band width.
    pub fn from_values(dt: f64, values: Vec<f64>, epsilon: f64) -> Self {
        assert!(!values.is_empty() && values[0] == 0.0, "paths start at 0");
        let mut sup = Vec::with_capacity(values.len());
        let mut ell = Vec::with_capacity(values.len());
        let mut running = f64::NEG_INFINITY;
        let mut tracker = LocalTimeTracker::new(epsilon, dt);
        for (k, &v) in values.iter().enumerate() {
            running = running.max(v);
            sup.push(running);
            if k > 0 {
                tracker.step(values[k - 1], v);
            }
            ell.push(tracker.ell());
        }
        PathGrid { dt, values, sup, ell }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn t(&self, step: usize) -> f64 {
        step as f64 * self.dt
    }
}

/// Streaming path state at one grid step.
#[derive(Debug, Clone, Copy)]
pub struct PathState {
    pub step: u64,
    pub t: f64,
    pub value: f64,
    pub sup: f64,
    pub inf: f64,
    pub ell: f64,
}

/// Where and how a path was stopped.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StopOutcome {
    /// False when the horizon arrived first; the fields then hold the
    /// horizon state.
    pub stopped: bool,
    pub step: u64,
    pub t: f64,
    pub value: f64,
    pub sup: f64,
    pub inf: f64,
    pub ell: f64,
}

/// Expected number of completed 0 -> epsilon band upcrossings of |B|, given
/// the grid skeleton.
///
/// The state is the probability that the path has visited 0 since it last
/// touched the band +-epsilon. Per step the Brownian bridge between grid
/// points crosses the band with probability
/// `e^{-2(eps-x)(eps-y)/dt} + e^{-2(eps+x)(eps+y)/dt}` and zero with
/// probability `e^{-2xy/dt}`; those exact crossing weights replace the raw
/// indicator counter and remove its O(sqrt(dt)/eps) threshold bias. epsilon
/// times the expected upcrossing count is an unbiased estimate of E L at
/// every stopping time (the compensated crossing process is a martingale).
/// Requires eps >= 5 sqrt(dt) so that within-step double events (zero and
/// band in one step) carry probability below e^{-50}.
#[derive(Debug, Clone, Copy)]
pub struct LocalTimeTracker {
    epsilon: f64,
    inv_dt: f64,
    /// P(last boundary visited was 0), i.e. armed to count the next band hit.
    ready: f64,
    count: f64,
}

impl LocalTimeTracker {
    pub fn new(epsilon: f64, dt: f64) -> Self {
        assert!(epsilon > 0.0 && dt > 0.0);
        LocalTimeTracker {
            epsilon,
            inv_dt: 1.0 / dt,
            ready: 1.0,
            count: 0.0,
        }
    }

    /// Advance across one grid step from value `x` to value `y`.
    #[inline]
    pub fn step(&mut self, x: f64, y: f64) {
        let e = self.epsilon;
        // band crossing probability
        let p_band = if x.abs() >= e || y.abs() >= e {
            1.0
        } else {
            let up = -2.0 * (e - x) * (e - y) * self.inv_dt;
            let dn = -2.0 * (e + x) * (e + y) * self.inv_dt;
            // exponents are <= 0 here; skip the exp when negligible
            let mut p = 0.0;
            if up > -36.0 {
                p += up.exp();
            }
            if dn > -36.0 {
                p += dn.exp();
            }
            p.min(1.0)
        };
        // zero visit probability
        let p_zero = if x == 0.0 || y == 0.0 || (x < 0.0) != (y < 0.0) {
            1.0
        } else {
            let z = -2.0 * x * y * self.inv_dt;
            if z > -36.0 {
                z.exp()
            } else {
                0.0
            }
        };
        let r = self.ready;
        if p_band > 0.0 {
            self.count += r * p_band;
        }
        self.ready = r * (1.0 - p_band) + (1.0 - r) * p_zero;
    }

    /// Local-time estimate so far: epsilon times the expected crossing count.
    #[inline]
    pub fn ell(&self) -> f64 {
        self.epsilon * self.count
    }
}

/// Exact conditional expectation of the local time at 0 accumulated across
/// grid steps, given the skeleton: each step contributes the mean local
/// time of the Brownian bridge between its endpoints,
/// sqrt(2 pi dt) Phi_c((|x|+|y|)/sqrt(dt)) e^{(y-x)^2/(2 dt)}, evaluated in
/// the overflow-free scaled form. Unbiased for E L at any grid stopping
/// time with the smallest variance any skeleton functional can have; the
/// statistical martingale tests measure L through this, while the band
/// counter remains the rule-driving estimator.
#[derive(Debug, Clone, Copy)]
pub struct ExpectedLocalTime {
    sqrt_dt: f64,
    scale: f64,
    inv_dt: f64,
    acc: f64,
}

impl ExpectedLocalTime {
    pub fn new(dt: f64) -> Self {
        ExpectedLocalTime {
            sqrt_dt: dt.sqrt(),
            scale: (2.0 * std::f64::consts::PI * dt).sqrt(),
            inv_dt: 1.0 / dt,
            acc: 0.0,
        }
    }

    #[inline]
    pub fn step(&mut self, x: f64, y: f64) {
        let u = x.abs() + y.abs();
        let w = u / self.sqrt_dt;
        if w > 8.0 {
            return;
        }
        // (|x|+|y|)^2 - (y-x)^2 = 4|xy| when the signs agree, 0 otherwise
        let cross = x * y;
        let decay = if cross > 0.0 {
            (-2.0 * cross * self.inv_dt).exp()
        } else {
            1.0
        };
        self.acc += self.scale
            * 0.5
            * crate::stats::erfcx(w * std::f64::consts::FRAC_1_SQRT_2)
            * decay;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.acc
    }
}

/// Local-time estimates along an existing path, one value per grid point.
/// `epsilon` may differ from the band the path was built with.
pub fn local_time(path: &PathGrid, epsilon: f64) -> Vec<f64> {
    let mut tracker = LocalTimeTracker::new(epsilon, path.dt);
    let mut out = Vec::with_capacity(path.values.len());
    out.push(0.0);
    for w in path.values.windows(2) {
        tracker.step(w[0], w[1]);
        out.push(tracker.ell());
    }
    out
}

/// Smallest grid step at which the path reaches `level` (>= for positive
/// levels, <= for negative), if any. Level 0 is hit at step 0.
pub fn first_hitting(path: &PathGrid, level: f64) -> Option<usize> {
    if level == 0.0 {
        return Some(0);
    }
    if level > 0.0 {
        path.values.iter().position(|&v| v >= level)
    } else {
        path.values.iter().position(|&v| v <= level)
    }
}

/// Joint density of (B_t, max_{s<=t} B_s) at (x, y):
/// sqrt(2/(pi t^3)) (2y - x) exp(-(2y-x)^2/(2t)) on y >= max(x, 0).
pub fn joint_density(t: f64, x: f64, y: f64) -> Result<f64, SimError> {
    if !(t > 0.0) {
        return Err(SimError::BadTime { t });
    }
    if y < x.max(0.0) {
        return Ok(0.0);
    }
    let z = 2.0 * y - x;
    Ok((2.0 / (std::f64::consts::PI * t * t * t)).sqrt() * z * (-z * z / (2.0 * t)).exp())
}

/// Materialize one full path. Deterministic in (seed, path_index).
pub fn simulate(config: &SimConfig, path_index: u64) -> Result<PathGrid, SimError> {
    config.validate()?;
    if path_index >= config.n_paths {
        return Err(SimError::PathIndex {
            index: path_index,
            n_paths: config.n_paths,
        });
    }
    let steps = config.steps() as usize;
    let mut rng = path_stream(config.seed, path_index);
    let sq = config.dt.sqrt();
    let mut values = Vec::with_capacity(steps + 1);
    let mut x = 0.0;
    values.push(x);
    for _ in 0..steps {
        let z: f64 = rng.sample(StandardNormal);
        x += sq * z;
        values.push(x);
    }
    Ok(PathGrid::from_values(
        config.dt,
        values,
        config.local_time_epsilon,
    ))
}

/// First grid step at which `rule` fires on a materialized path.
pub fn stop(path: &PathGrid, rule: &StoppingRule) -> StopOutcome {
    // A materialized path carries no attached stream, and deriving a coin
    // from the path values would bias it; randomized rules go through the
    // streaming driver.
    assert!(
        !rule.needs_aux(),
        "randomized rules need the streaming driver (run_stopped)"
    );
    let mut inf = 0.0f64;
    for k in 0..path.len() {
        inf = inf.min(path.values[k]);
        let state = PathState {
            step: k as u64,
            t: path.t(k),
            value: path.values[k],
            sup: path.sup[k],
            inf,
            ell: path.ell[k],
        };
        if rule.fires(&state, 0.5) {
            return StopOutcome {
                stopped: true,
                step: state.step,
                t: state.t,
                value: state.value,
                sup: state.sup,
                inf: state.inf,
                ell: state.ell,
            };
        }
    }
    let last = path.len() - 1;
    StopOutcome {
        stopped: false,
        step: last as u64,
        t: path.t(last),
        value: path.values[last],
        sup: path.sup[last],
        inf: path.values.iter().copied().fold(0.0, f64::min),
        ell: path.ell[last],
    }
}

/// The per-path auxiliary uniform a randomized rule consumes; drawn once per
/// path from the dedicated stream so it never perturbs the increments.
pub fn rule_aux_uniform(config: &SimConfig, rule: &StoppingRule, path_index: u64) -> f64 {
    if rule.needs_aux() {
        aux_stream(config.seed, path_index).random()
    } else {
        0.5
    }
}

/// Stream one path until the rule fires or the horizon arrives; no
/// materialization. Observer `on_step` sees every post-increment state
/// (used by the drift and penalization samplers).
pub fn stream_stopped<F: FnMut(&PathState)>(
    config: &SimConfig,
    rule: &StoppingRule,
    path_index: u64,
    mut on_step: F,
) -> StopOutcome {
    let steps = config.steps();
    let mut rng = path_stream(config.seed, path_index);
    let aux = rule_aux_uniform(config, rule, path_index);
    let sq = config.dt.sqrt();
    let mut tracker = LocalTimeTracker::new(config.local_time_epsilon, config.dt);
    let mut state = PathState {
        step: 0,
        t: 0.0,
        value: 0.0,
        sup: 0.0,
        inf: 0.0,
        ell: 0.0,
    };
    on_step(&state);
    if rule.fires(&state, aux) {
        return outcome(true, &state);
    }
    for k in 1..=steps {
        let z: f64 = rng.sample(StandardNormal);
        let prev = state.value;
        state.value += sq * z;
        state.sup = state.sup.max(state.value);
        state.inf = state.inf.min(state.value);
        tracker.step(prev, state.value);
        state.ell = tracker.ell();
        state.step = k;
        state.t = k as f64 * config.dt;
        on_step(&state);
        if rule.fires(&state, aux) {
            return outcome(true, &state);
        }
    }
    outcome(false, &state)
}

fn outcome(stopped: bool, s: &PathState) -> StopOutcome {
    StopOutcome {
        stopped,
        step: s.step,
        t: s.t,
        value: s.value,
        sup: s.sup,
        inf: s.inf,
        ell: s.ell,
    }
}

/// Run every path of the config against the rule, in parallel, returning
/// outcomes in path order (deterministic for any worker count).
pub fn run_stopped(config: &SimConfig, rule: &StoppingRule) -> Result<Vec<StopOutcome>, SimError> {
    config.validate()?;
    Ok(crate::parallel::map_paths(config.n_paths, |i| {
        stream_stopped(config, rule, i, |_| {})
    }))
}

/// Path state recorded at a checkpoint by [`sample_at_times`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Snapshot {
    pub value: f64,
    pub sup: f64,
    /// Band-counting local-time estimate (the rule-driving one).
    pub ell: f64,
    /// Bridge-expected local time (the measurement-grade one).
    pub ell_bridge: f64,
}

/// Snapshot every path at fixed times (no stopping), in parallel. Returns
/// one row per path with a [`Snapshot`] at each requested time (sorted).
pub fn sample_at_times(
    config: &SimConfig,
    times: &[f64],
) -> Result<Vec<Vec<Snapshot>>, SimError> {
    config.validate()?;
    let mut steps_at: Vec<u64> = times
        .iter()
        .map(|&t| (t / config.dt).round() as u64)
        .collect();
    steps_at.sort_unstable();
    let rule = StoppingRule::Never;
    Ok(crate::parallel::map_paths(config.n_paths, move |i| {
        let mut row = Vec::with_capacity(steps_at.len());
        let mut next = 0usize;
        let mut bridge = ExpectedLocalTime::new(config.dt);
        let mut prev = 0.0f64;
        stream_stopped(config, &rule, i, |s| {
            if s.step > 0 {
                bridge.step(prev, s.value);
            }
            prev = s.value;
            while next < steps_at.len() && s.step == steps_at[next] {
                row.push(Snapshot {
                    value: s.value,
                    sup: s.sup,
                    ell: s.ell,
                    ell_bridge: bridge.value(),
                });
                next += 1;
            }
        });
        row
    }))
}

/// CSV dump `path,step,t,B,sup,ell` of up to `cap` paths.
pub fn dump_paths_csv<W: std::io::Write>(
    config: &SimConfig,
    cap: u64,
    mut out: W,
) -> Result<(), SimError> {
    config.validate()?;
    let n = config.n_paths.min(cap);
    writeln!(out, "path,step,t,B,sup,ell")?;
    for i in 0..n {
        let path = simulate(config, i)?;
        for k in 0..path.len() {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                i,
                k,
                path.t(k),
                path.values[k],
                path.sup[k],
                path.ell[k]
            )?;
        }
    }
    Ok(())
}
