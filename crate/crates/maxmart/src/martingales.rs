//! Martingales built from the running maximum and the local time, the
//! discrete balayage identity behind them, and exhaustive verification of
//! the consequences (Doob's maximal and L^p inequalities) on enumerated
//! random-walk paths.

use serde::{Deserialize, Serialize};

use crate::error::MartingaleError;
use crate::parallel::fold_paths;
use crate::paths::{sample_at_times, SimConfig};
use crate::piecewise::MaxFn;
use crate::stats::{MeanAcc, StatReport};

/// H(x, y) = F(y) - f(y)(y - x) + C, the harmonic function of the pair
/// (value, running max). Defined on the reachable region y >= max(x, 0).
pub fn max_mart(f: &dyn MaxFn, x: f64, y: f64, c: f64) -> Result<f64, MartingaleError> {
    if y < x.max(0.0) {
        return Err(MartingaleError::OutsideReachableRegion { x, y });
    }
    Ok(f.primitive(y) - f.eval(y) * (y - x) + c)
}

/// H(|x|, l) = G(l) - g(l)|x| + C, the local-time counterpart.
pub fn local_time_mart(
    g: &dyn MaxFn,
    abs_x: f64,
    l: f64,
    c: f64,
) -> Result<f64, MartingaleError> {
    if abs_x < 0.0 || l < 0.0 {
        return Err(MartingaleError::NegativeInput { x: abs_x, l });
    }
    Ok(g.primitive(l) - g.eval(l) * abs_x + c)
}

/// A discrete path Y with a companion process phi that is constant on the
/// excursions of Y away from zero: phi_n = phi_{n-1} whenever Y_n != 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePathPair {
    y: Vec<f64>,
    phi: Vec<f64>,
}

impl DiscretePathPair {
    pub fn new(y: Vec<f64>, phi: Vec<f64>) -> Result<Self, MartingaleError> {
        if y.is_empty() || y.len() != phi.len() || y[0] != 0.0 {
            return Err(MartingaleError::BadPathPair);
        }
        for n in 1..y.len() {
            if y[n] != 0.0 && phi[n] != phi[n - 1] {
                return Err(MartingaleError::ExcursionConstancy { index: n });
            }
        }
        Ok(DiscretePathPair { y, phi })
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }
}

/// Worst deviation over n of |phi_n Y_n - sum_{k<=n} phi_{k-1}(Y_k - Y_{k-1})|.
/// The identity is pathwise-exact, so anything beyond rounding noise means
/// the pair was built wrong.
pub fn balayage_discrepancy(pair: &DiscretePathPair) -> f64 {
    let (y, phi) = (&pair.y, &pair.phi);
    let mut running = 0.0;
    let mut worst = 0.0f64;
    for n in 1..y.len() {
        running += phi[n - 1] * (y[n] - y[n - 1]);
        worst = worst.max((phi[n] * y[n] - running).abs());
    }
    worst
}

/// The process S^f_n = f(Xbar_n)(Xbar_n - X_n) - F(Xbar_n) together with the
/// worst gap against its summation-by-parts decomposition.
#[derive(Debug, Clone)]
pub struct SfnOutput {
    pub values: Vec<f64>,
    /// max_n |direct - decomposed|; an algebraic identity, so this is
    /// rounding noise only.
    pub decomposition_gap: f64,
}

/// Evaluate S^f along a path (X_0 = 0), verifying on the way that f is
/// nonnegative and nondecreasing across the realized maximum ladder.
pub fn sfn_process(x: &[f64], f: &dyn MaxFn) -> Result<SfnOutput, MartingaleError> {
    if x.is_empty() || x[0] != 0.0 {
        return Err(MartingaleError::BadPathPair);
    }
    let mut xbar = 0.0f64;
    let mut prev_f = f.eval(0.0);
    if prev_f < 0.0 {
        return Err(MartingaleError::NotMonotoneDensity);
    }
    let mut values = Vec::with_capacity(x.len());
    let mut decomposed = 0.0;
    let mut gap = 0.0f64;
    values.push(-f.primitive(0.0));
    for n in 1..x.len() {
        let prev_xbar = xbar;
        xbar = xbar.max(x[n]);
        let f_here = f.eval(xbar);
        if f_here < prev_f - 1e-12 || f_here < 0.0 {
            return Err(MartingaleError::NotMonotoneDensity);
        }
        prev_f = f_here;
        let direct = f_here * (xbar - x[n]) - f.primitive(xbar);
        // summation by parts: f(Xbar_{k-1})(Xbar_k - Xbar_{k-1}) minus the
        // integral of f over the same stretch, minus f(Xbar_{k-1}) dX_k
        let f_prev = f.eval(prev_xbar);
        decomposed += f_prev * (xbar - prev_xbar) - (f.primitive(xbar) - f.primitive(prev_xbar))
            - f_prev * (x[n] - x[n - 1]);
        gap = gap.max((direct - decomposed).abs());
        values.push(direct);
    }
    Ok(SfnOutput {
        values,
        decomposition_gap: gap,
    })
}

/// Exhaustive enumeration cap: 2^20 paths.
pub const SRW_ENUM_CAP: u32 = 20;

/// All 2^n simple-random-walk sign sequences of length n, yielded as value
/// paths (prefix sums starting at 0), each carrying weight 2^{-n}.
pub fn enumerate_srw(n: u32) -> Result<SrwEnumeration, MartingaleError> {
    if n > SRW_ENUM_CAP {
        return Err(MartingaleError::EnumerationTooLarge {
            n,
            cap: SRW_ENUM_CAP,
        });
    }
    Ok(SrwEnumeration {
        n,
        next: 0,
        end: 1u64 << n,
    })
}

pub struct SrwEnumeration {
    n: u32,
    next: u64,
    end: u64,
}

impl SrwEnumeration {
    pub fn path_weight(&self) -> f64 {
        1.0 / self.end as f64
    }
}

impl Iterator for SrwEnumeration {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        if self.next >= self.end {
            return None;
        }
        let bits = self.next;
        self.next += 1;
        let mut path = Vec::with_capacity(self.n as usize + 1);
        let mut s = 0i64;
        path.push(0);
        for k in 0..self.n {
            s += if bits >> k & 1 == 1 { 1 } else { -1 };
            path.push(s);
        }
        Some(path)
    }
}

/// Doob's maximal inequality, checked exactly over |SRW| paths of length n:
/// lambda P(Xbar_n >= lambda) <= E[X_n 1_{Xbar_n >= lambda}].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DoobMaximalReport {
    pub n: u32,
    pub lambda: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn doob_maximal_check(n: u32, lambda: f64) -> Result<DoobMaximalReport, MartingaleError> {
    let paths = enumerate_srw(n)?;
    let total = 1u64 << n;
    let mut count_hit = 0u64;
    let mut sum_xn = 0i64;
    for path in paths {
        let xbar = path.iter().map(|v| v.abs()).max().unwrap();
        if xbar as f64 >= lambda {
            count_hit += 1;
            sum_xn += path[path.len() - 1].abs();
        }
    }
    // integer sums scaled by the dyadic weight stay exact in f64 for n <= 20
    let lhs = lambda * count_hit as f64 / total as f64;
    let rhs = sum_xn as f64 / total as f64;
    Ok(DoobMaximalReport {
        n,
        lambda,
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-12,
    })
}

/// Doob's L^p inequality over |SRW|: E Xbar^p <= (p/(p-1))^p E X_n^p, plus
/// the intermediate (p-1) E Xbar^p <= p E[Xbar^{p-1} X_n].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DoobLpReport {
    pub n: u32,
    pub p: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// lhs / rhs.
    pub ratio: f64,
    pub holds: bool,
    pub intermediate_holds: bool,
}

pub fn doob_lp_check(n: u32, p: f64) -> Result<DoobLpReport, MartingaleError> {
    assert!(p > 1.0, "L^p inequality needs p > 1");
    let paths = enumerate_srw(n)?;
    let total = (1u64 << n) as f64;
    let mut e_xbar_p = 0.0;
    let mut e_xn_p = 0.0;
    let mut e_cross = 0.0;
    for path in paths {
        let xbar = path.iter().map(|v| v.abs()).max().unwrap() as f64;
        let xn = path[path.len() - 1].unsigned_abs() as f64;
        e_xbar_p += xbar.powf(p);
        e_xn_p += xn.powf(p);
        e_cross += xbar.powf(p - 1.0) * xn;
    }
    e_xbar_p /= total;
    e_xn_p /= total;
    e_cross /= total;
    let rhs = (p / (p - 1.0)).powf(p) * e_xn_p;
    Ok(DoobLpReport {
        n,
        p,
        lhs: e_xbar_p,
        rhs,
        ratio: e_xbar_p / rhs,
        holds: e_xbar_p <= rhs + 1e-12,
        intermediate_holds: (p - 1.0) * e_xbar_p <= p * e_cross + 1e-12,
    })
}

/// Worst violation of the supermartingale inequality
/// E[S^f_{n+1} | prefix] <= S^f_n over every |SRW| prefix of length < n_max.
/// Exact enumeration; positive return values beyond rounding noise disprove
/// the property.
pub fn sfn_supermartingale_worst_gap(
    n_max: u32,
    f: &dyn MaxFn,
) -> Result<f64, MartingaleError> {
    if n_max > SRW_ENUM_CAP {
        return Err(MartingaleError::EnumerationTooLarge {
            n: n_max,
            cap: SRW_ENUM_CAP,
        });
    }
    // DFS over signed prefixes carrying (signed value, max of |value|)
    fn sfn(f: &dyn MaxFn, x: f64, xbar: f64) -> f64 {
        f.eval(xbar) * (xbar - x) - f.primitive(xbar)
    }
    fn walk(f: &dyn MaxFn, s: i64, xbar: i64, depth: u32, worst: &mut f64) {
        let here = sfn(f, s.abs() as f64, xbar as f64);
        let mut cond = 0.0;
        for d in [-1i64, 1] {
            let s2 = s + d;
            let xbar2 = xbar.max(s2.abs());
            cond += 0.5 * sfn(f, s2.abs() as f64, xbar2 as f64);
        }
        *worst = (*worst).max(cond - here);
        if depth > 0 {
            for d in [-1i64, 1] {
                let s2 = s + d;
                walk(f, s2, xbar.max(s2.abs()), depth - 1, worst);
            }
        }
    }
    let mut worst = f64::NEG_INFINITY;
    walk(f, 0, 0, n_max - 1, &mut worst);
    Ok(worst)
}

/// Which martingale family a drift test exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DriftKind {
    /// H(B_t, sup B_t) from `max_mart`.
    MaxMartingale,
    /// H(|B_t|, L_t) from `local_time_mart`.
    LocalTimeMartingale,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DriftReport {
    pub kind: DriftKind,
    pub t1: f64,
    pub t2: f64,
    /// Paired per-path estimate of E H(t2) - E H(t1).
    pub drift: StatReport,
    /// |drift| <= 3 stderr.
    pub pass: bool,
}

/// Statistical martingale check: the paired drift of E[H] between two times
/// must vanish within three standard errors. Local time enters through the
/// bridge-expected estimator, whose conditional variance is small enough
/// not to smear kinks of the primitive into a spurious drift.
pub fn martingale_drift_test(
    kind: DriftKind,
    f: &dyn MaxFn,
    config: &SimConfig,
    t1: f64,
    t2: f64,
) -> Result<DriftReport, crate::error::SimError> {
    assert!(0.0 <= t1 && t1 < t2 && t2 <= config.horizon);
    let rows = sample_at_times(config, &[t1, t2])?;
    let mut acc = MeanAcc::default();
    for row in &rows {
        let h = |s: &crate::paths::Snapshot| -> f64 {
            match kind {
                DriftKind::MaxMartingale => {
                    f.primitive(s.sup) - f.eval(s.sup) * (s.sup - s.value)
                }
                DriftKind::LocalTimeMartingale => {
                    f.primitive(s.ell_bridge) - f.eval(s.ell_bridge) * s.value.abs()
                }
            }
        };
        acc.push(h(&row[1]) - h(&row[0]));
    }
    let drift = acc.report(config.seed);
    Ok(DriftReport {
        kind,
        t1,
        t2,
        pass: drift.within_sigma_of_zero(3.0),
        drift,
    })
}

/// Drift of f(L_t) B_t, the middle balayage example; a martingale because L
/// only moves on the zero set of B.
pub fn local_time_weighted_value_drift(
    f: &dyn MaxFn,
    config: &SimConfig,
    t1: f64,
    t2: f64,
) -> Result<StatReport, crate::error::SimError> {
    assert!(0.0 <= t1 && t1 < t2 && t2 <= config.horizon);
    let rows = sample_at_times(config, &[t1, t2])?;
    let mut acc = MeanAcc::default();
    for row in &rows {
        let g = |s: &crate::paths::Snapshot| f.eval(s.ell_bridge) * s.value;
        acc.push(g(&row[1]) - g(&row[0]));
    }
    Ok(acc.report(config.seed))
}

/// Random admissible (Y, phi) pairs for stress-testing the balayage
/// identity: Y is a scaled random walk forced to revisit zero, phi refreshes
/// only at zeros.
pub fn random_admissible_pair(len: usize, seed: u64) -> DiscretePathPair {
    use rand::Rng;
    let mut rng = crate::rng::path_stream(seed, 0xba1a);
    let mut y = Vec::with_capacity(len);
    let mut phi = Vec::with_capacity(len);
    let mut cur_phi = rng.random_range(-1.0..1.0);
    y.push(0.0);
    phi.push(cur_phi);
    let mut v: f64 = 0.0;
    for _ in 1..len {
        // jump, with a healthy chance of landing exactly on zero
        v = if rng.random_bool(0.3) {
            0.0
        } else {
            v + rng.random_range(-1.0..1.0)
        };
        if v == 0.0 {
            cur_phi = rng.random_range(-1.0..1.0);
        }
        y.push(v);
        phi.push(cur_phi);
    }
    DiscretePathPair::new(y, phi).expect("constructed to satisfy the constancy constraint")
}

/// Exhaustive balayage sweep over random pairs; returns the worst
/// discrepancy seen.
pub fn balayage_sweep(n_pairs: u64, len: usize, seed: u64) -> f64 {
    fold_paths(
        n_pairs,
        0.0f64,
        |worst, i| worst.max(balayage_discrepancy(&random_admissible_pair(len, seed ^ i))),
        f64::max,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::piecewise::{Indicator, Monomial, PiecewiseFn};

    #[test]
    fn max_mart_examples() {
        let one = Monomial::new(1.0, 0.0);
        // f = 1 gives H = x, the value itself
        for &(x, y) in &[(0.3, 0.9), (-2.0, 0.0), (1.0, 1.0)] {
            assert!((max_mart(&one, x, y, 0.0).unwrap() - x).abs() < 1e-15);
        }
        // constant shifts pass through
        assert!((max_mart(&one, 0.3, 0.9, 2.5).unwrap() - 2.8).abs() < 1e-15);
        // f = 2u gives 2xy - y^2
        let two_u = Monomial::new(2.0, 1.0);
        let (x, y) = (0.4, 1.3);
        let h = max_mart(&two_u, x, y, 0.0).unwrap();
        assert!((h - (2.0 * x * y - y * y)).abs() < 1e-12);
        // indicator below its threshold vanishes
        let ind = Indicator::at_or_above(2.0);
        assert_eq!(max_mart(&ind, 0.5, 1.0, 0.0).unwrap(), 0.0);
        // outside the reachable region is an error
        assert!(max_mart(&one, 2.0, 1.0, 0.0).is_err());
        assert!(max_mart(&one, -1.0, -0.5, 0.0).is_err());
    }

    #[test]
    fn local_time_mart_examples() {
        let one = Monomial::new(1.0, 0.0);
        // g = 1 gives l - |x|
        assert!((local_time_mart(&one, 0.7, 1.9, 0.0).unwrap() - 1.2).abs() < 1e-15);
        let g = Indicator::above(1.0);
        // below the threshold everything vanishes (open indicator: also at it)
        assert_eq!(local_time_mart(&g, 0.5, 1.0, 0.0).unwrap(), 0.0);
        assert_eq!(local_time_mart(&g, 0.5, 0.3, 0.0).unwrap(), 0.0);
        // above it: (l - z) - |x|
        let v = local_time_mart(&g, 0.5, 2.0, 0.0).unwrap();
        assert!((v - (1.0 - 0.5)).abs() < 1e-15);
        assert!(local_time_mart(&one, -0.1, 0.0, 0.0).is_err());
    }

    #[test]
    fn balayage_identity_trivial_cases() {
        // Y identically zero, phi arbitrary
        let pair =
            DiscretePathPair::new(vec![0.0; 5], vec![3.0, -1.0, 2.0, 0.5, 9.0]).unwrap();
        assert_eq!(balayage_discrepancy(&pair), 0.0);
        // constant phi telescopes
        let pair = DiscretePathPair::new(
            vec![0.0, 1.0, 2.0, 1.0, 0.0],
            vec![0.7, 0.7, 0.7, 0.7, 0.7],
        )
        .unwrap();
        assert!(balayage_discrepancy(&pair) < 1e-15);
    }

    #[test]
    fn balayage_identity_random_pairs() {
        let worst = balayage_sweep(10_000, 20, 99);
        assert!(worst <= 1e-12, "worst balayage discrepancy {worst}");
    }

    #[test]
    fn balayage_rejects_bad_pairs() {
        // phi changes while Y is away from zero
        let err = DiscretePathPair::new(vec![0.0, 1.0, 2.0], vec![1.0, 1.0, 5.0]);
        assert!(matches!(
            err,
            Err(MartingaleError::ExcursionConstancy { index: 2 })
        ));
        assert!(matches!(
            DiscretePathPair::new(vec![1.0, 0.0], vec![0.0, 0.0]),
            Err(MartingaleError::BadPathPair)
        ));
    }

    #[test]
    fn sfn_examples() {
        // X = 0: S^f = -F(0) = 0 throughout
        let f = Monomial::new(1.0, 1.0);
        let out = sfn_process(&[0.0, 0.0, 0.0], &f).unwrap();
        assert!(out.values.iter().all(|&v| v == 0.0));
        // X = [0,1,2] with f = 1: S^f = -Xbar
        let one = Monomial::new(1.0, 0.0);
        let out = sfn_process(&[0.0, 1.0, 2.0], &one).unwrap();
        assert_eq!(out.values, vec![0.0, -1.0, -2.0]);
        // X = [0,1,0] with f(u) = u: S^f_2 = 1*(1-0) - 1/2 = 1/2
        let out = sfn_process(&[0.0, 1.0, 0.0], &f).unwrap();
        assert!((out.values[2] - 0.5).abs() < 1e-15);
        assert!(out.decomposition_gap < 1e-12);
        // decreasing f rejected
        let bad = PiecewiseFn::new(vec![0.0, 1.0], vec![(2.0, 0.0), (1.0, 0.0)]).unwrap();
        assert!(sfn_process(&[0.0, 1.0, 2.0], &bad).is_err());
    }

    #[test]
    fn sfn_decomposition_on_random_paths() {
        use rand::Rng;
        let mut rng = crate::rng::path_stream(5, 0);
        for f in [Monomial::new(1.0, 1.0), Monomial::new(1.0, 2.0)] {
            for _ in 0..200 {
                let mut x = vec![0.0f64];
                for _ in 0..30 {
                    let step: f64 = rng.random_range(-1.0..1.0);
                    x.push(x.last().unwrap() + step);
                }
                let out = sfn_process(&x, &f).unwrap();
                assert!(out.decomposition_gap <= 1e-12, "gap {}", out.decomposition_gap);
            }
        }
    }

    #[test]
    fn enumeration_basics() {
        let paths: Vec<_> = enumerate_srw(1).unwrap().collect();
        assert_eq!(paths, vec![vec![0, -1], vec![0, 1]]);
        assert_eq!(enumerate_srw(2).unwrap().count(), 4);
        let e = enumerate_srw(10).unwrap();
        let w = e.path_weight();
        let total: f64 = e.map(|_| w).sum();
        assert_eq!(total, 1.0);
        assert!(enumerate_srw(21).is_err());
    }

    #[test]
    fn doob_maximal_examples() {
        // n = 2, lambda = 1: all four |SRW| paths reach 1, E X_2 = 1
        let r = doob_maximal_check(2, 1.0).unwrap();
        assert_eq!(r.lhs, 1.0);
        assert_eq!(r.rhs, 1.0);
        assert!(r.holds);
        // lambda = 0 is trivial
        let r = doob_maximal_check(7, 0.0).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.holds);
        let r = doob_maximal_check(12, 3.0).unwrap();
        assert!(r.holds);
        assert!(r.lhs > 0.0 && r.lhs < r.rhs);
    }

    #[test]
    fn doob_lp_examples() {
        let r = doob_lp_check(1, 2.0).unwrap();
        assert_eq!(r.lhs, 1.0);
        assert_eq!(r.rhs, 4.0);
        assert!(r.holds && r.intermediate_holds);
        for p in [1.1, 2.0, 3.0] {
            let r = doob_lp_check(12, p).unwrap();
            assert!(r.holds && r.intermediate_holds, "p = {p}: {r:?}");
            assert!(r.ratio < 1.0);
        }
    }

    #[test]
    fn supermartingale_exhaustive_small() {
        let fs: Vec<Box<dyn MaxFn>> = vec![
            Box::new(Indicator::at_or_above(2.0)),
            Box::new(Monomial::new(1.0, 1.0)),
            Box::new(Monomial::new(1.0, 2.0)),
        ];
        for f in &fs {
            let worst = sfn_supermartingale_worst_gap(8, f.as_ref()).unwrap();
            assert!(worst <= 1e-12, "supermartingale violated by {worst}");
        }
    }
}
