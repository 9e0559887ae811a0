//! Finite-atom probability measures on the line, their tail functions and
//! generalized inverses, the barycentre (Hardy-Littlewood) transform, its
//! dual for measures on the half-line, and the excess-wealth comparator.
//!
//! One representation serves everything: a sorted list of atoms. Continuous
//! measures enter through quantile quantization, after which every transform
//! is a finite sum.

use std::io::Write;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::MeasureError;
use crate::stats::normal_inv_cdf;

/// Weight-sum slack accepted by the constructor.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;
/// Centering slack required of barycentre inputs; quantization makes exact
/// zero unattainable.
pub const CENTERING_TOL: f64 = 1e-9;

/// A single atom: a location carrying strictly positive mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub x: f64,
    pub w: f64,
}

/// A probability measure with finitely many atoms.
///
/// Invariants, enforced at construction: locations strictly increasing and
/// finite, weights strictly positive, weights summing to one within
/// [`WEIGHT_SUM_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
    // suffix sums over atoms i..: total weight and weighted location,
    // precomputed because tails and barycentres are evaluated per path step
    suffix_w: Vec<f64>,
    suffix_wx: Vec<f64>,
}

/// Which generalized inverse of the tail function to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailInverseKind {
    /// sup { x : tail(x) >= p }, left-continuous in p.
    LeftContinuous,
    /// inf { x : tail(x) < p }.
    RightContinuous,
}

impl AtomicMeasure {
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self, MeasureError> {
        if pairs.is_empty() {
            return Err(MeasureError::Empty);
        }
        let mut sum = 0.0;
        for (i, &(x, w)) in pairs.iter().enumerate() {
            if !x.is_finite() || !w.is_finite() {
                return Err(MeasureError::NonFinite);
            }
            if w <= 0.0 {
                return Err(MeasureError::NonPositiveWeight { x, w });
            }
            if i > 0 && pairs[i - 1].0 >= x {
                return Err(MeasureError::UnorderedLocations {
                    a: pairs[i - 1].0,
                    b: x,
                });
            }
            sum += w;
        }
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(MeasureError::WeightSum { sum });
        }
        let atoms: Vec<Atom> = pairs.into_iter().map(|(x, w)| Atom { x, w }).collect();
        Ok(Self::from_atoms(atoms))
    }

    fn from_atoms(atoms: Vec<Atom>) -> Self {
        let n = atoms.len();
        let mut suffix_w = vec![0.0; n + 1];
        let mut suffix_wx = vec![0.0; n + 1];
        for i in (0..n).rev() {
            suffix_w[i] = suffix_w[i + 1] + atoms[i].w;
            suffix_wx[i] = suffix_wx[i + 1] + atoms[i].w * atoms[i].x;
        }
        AtomicMeasure {
            atoms,
            suffix_w,
            suffix_wx,
        }
    }

    /// Point mass at `x`.
    pub fn dirac(x: f64) -> Self {
        Self::new(vec![(x, 1.0)]).expect("dirac is always valid")
    }

    /// Two atoms with the given weights (must sum to one).
    pub fn two_point(x1: f64, w1: f64, x2: f64, w2: f64) -> Result<Self, MeasureError> {
        Self::new(vec![(x1, w1), (x2, w2)])
    }

    /// Uniform law on [a, b], quantized to `n` equal-weight atoms at the
    /// quantile midpoints.
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self, MeasureError> {
        if !(a < b) || n == 0 {
            return Err(MeasureError::Empty);
        }
        let w = 1.0 / n as f64;
        let pairs = (0..n)
            .map(|i| (a + (b - a) * (i as f64 + 0.5) / n as f64, w))
            .collect();
        Self::new(pairs)
    }

    /// Standard Gaussian quantized to `n` equal-weight atoms at quantile
    /// midpoints.
    pub fn standard_normal(n: usize) -> Result<Self, MeasureError> {
        if n == 0 {
            return Err(MeasureError::Empty);
        }
        let w = 1.0 / n as f64;
        let pairs = (0..n)
            .map(|i| (normal_inv_cdf((i as f64 + 0.5) / n as f64), w))
            .collect();
        Self::new(pairs)
    }

    /// Empirical measure of a sample, collapsed to at most `max_atoms`
    /// equal-count groups. Each atom sits at its group mean, so the overall
    /// mean is preserved exactly; duplicates are merged.
    pub fn from_samples(samples: &[f64], max_atoms: usize) -> Result<Self, MeasureError> {
        if samples.is_empty() || max_atoms == 0 {
            return Err(MeasureError::Empty);
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(MeasureError::NonFinite);
        }
        let mut xs = samples.to_vec();
        xs.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        let n = xs.len();
        let groups = max_atoms.min(n);
        let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(groups);
        for g in 0..groups {
            let lo = g * n / groups;
            let hi = (g + 1) * n / groups;
            let cnt = hi - lo;
            let mean = xs[lo..hi].iter().sum::<f64>() / cnt as f64;
            let w = cnt as f64 / n as f64;
            match pairs.last_mut() {
                Some(last) if last.0 >= mean => {
                    // merge ties (or near-ties produced by constant stretches)
                    last.0 = (last.0 * last.1 + mean * w) / (last.1 + w);
                    last.1 += w;
                }
                _ => pairs.push((mean, w)),
            }
        }
        // guard against residual rounding in the weight total
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        for p in &mut pairs {
            p.1 /= total;
        }
        Self::new(pairs)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn min_location(&self) -> f64 {
        self.atoms[0].x
    }

    pub fn max_location(&self) -> f64 {
        self.atoms[self.atoms.len() - 1].x
    }

    /// Tail function mu([x, oo)). Atoms at `x` are included, so this is
    /// left-continuous in x.
    pub fn tail(&self, x: f64) -> f64 {
        let i = self.atoms.partition_point(|a| a.x < x);
        self.suffix_w[i]
    }

    /// First moment.
    pub fn mean(&self) -> f64 {
        self.suffix_wx[0]
    }

    /// Second moment.
    pub fn second_moment(&self) -> f64 {
        self.atoms.iter().map(|a| a.w * a.x * a.x).sum()
    }

    /// E (X - z)^+, the upper-tail integral above a threshold.
    pub fn mean_excess(&self, z: f64) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.w * (a.x - z).max(0.0))
            .sum()
    }

    /// Generalized inverse of the tail at level `p` in [0, 1].
    ///
    /// Both kinds coincide for step tails at interior levels; they are kept
    /// separate because callers quote one or the other convention. At the
    /// boundaries: p = 0 maps to +oo (the tail never drops below zero) and
    /// p = 1 maps to the smallest atom.
    pub fn tail_inverse(&self, p: f64, kind: TailInverseKind) -> f64 {
        assert!((0.0..=1.0).contains(&p), "p must lie in [0,1]");
        if p == 0.0 {
            return f64::INFINITY;
        }
        match kind {
            TailInverseKind::LeftContinuous => {
                // largest atom with tail >= p; tails decrease along atoms
                let i = self.largest_index_with_tail_at_least(p);
                self.atoms[i].x
            }
            TailInverseKind::RightContinuous => {
                // inf { x : tail(x) < p }: the tail drops below p just after
                // the same atom
                let i = self.largest_index_with_tail_at_least(p);
                self.atoms[i].x
            }
        }
    }

    fn largest_index_with_tail_at_least(&self, p: f64) -> usize {
        // suffix_w[i] = tail at atom i, strictly decreasing in i;
        // suffix_w[0] = 1 >= p always for p <= 1
        let mut lo = 0usize;
        let mut hi = self.atoms.len() - 1;
        while lo < hi {
            let mid = (lo + hi + 1) / 2;
            if self.suffix_w[mid] >= p {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        lo
    }

    /// Left-continuous quantile of the distribution function,
    /// inf { x : F(x) >= p }. For p = 0 returns the smallest atom.
    pub fn quantile(&self, p: f64) -> f64 {
        assert!((0.0..=1.0).contains(&p), "p must lie in [0,1]");
        let mut acc = 0.0;
        for a in &self.atoms {
            acc += a.w;
            if acc >= p - 1e-15 {
                return a.x;
            }
        }
        self.max_location()
    }

    /// The barycentre (Hardy-Littlewood maximal) function of a centered
    /// measure, as a reusable table. Errors if the measure is not centered
    /// within [`CENTERING_TOL`].
    pub fn barycentre_fn(&self) -> Result<Barycentre, MeasureError> {
        let m = self.mean();
        if m.abs() > CENTERING_TOL {
            return Err(MeasureError::NotCentered { mean: m });
        }
        Ok(Barycentre { mu: self.clone() })
    }

    /// Barycentre evaluated at a point; see [`Barycentre::eval`].
    pub fn barycentre(&self, x: f64) -> Result<f64, MeasureError> {
        Ok(self.barycentre_fn()?.eval(x))
    }

    /// Right-continuous inverse of the barycentre function,
    /// inf { x : Psi(x) > lambda }.
    pub fn barycentre_right_inverse(&self, lambda: f64) -> Result<f64, MeasureError> {
        Ok(self.barycentre_fn()?.right_inverse(lambda))
    }

    /// The dual Hardy-Littlewood function of a measure on (0, oo), as a
    /// reusable table. Errors if any atom location is <= 0.
    pub fn dual_hl_fn(&self) -> Result<DualHardyLittlewood, MeasureError> {
        DualHardyLittlewood::new(self)
    }

    /// Dual Hardy-Littlewood function evaluated at a point.
    pub fn dual_hl(&self, x: f64) -> Result<f64, MeasureError> {
        Ok(self.dual_hl_fn()?.eval(x))
    }

    /// Right inverse of the dual Hardy-Littlewood function,
    /// inf { x >= 0 : psi(x) > y }.
    pub fn dual_hl_right_inverse(&self, y: f64) -> Result<f64, MeasureError> {
        Ok(self.dual_hl_fn()?.right_inverse(y))
    }

    /// Excess-wealth (right-spread) comparison: self precedes `other` when
    /// E (X - q_X(p))^+ <= E (Y - q_Y(p))^+ at every probability level in
    /// `p_grid`, with q the left-continuous quantile. Returns the verdict and
    /// the signed margins rhs - lhs (>= -tol means the level holds).
    pub fn excess_wealth_leq(&self, other: &AtomicMeasure, p_grid: &[f64]) -> ExcessWealthReport {
        const TOL: f64 = 1e-12;
        let mut margins = Vec::with_capacity(p_grid.len());
        let mut holds = true;
        for &p in p_grid {
            let lhs = self.mean_excess(self.quantile(p));
            let rhs = other.mean_excess(other.quantile(p));
            let margin = rhs - lhs;
            if margin < -TOL {
                holds = false;
            }
            margins.push(margin);
        }
        ExcessWealthReport { holds, margins }
    }

    /// Serialize as a JSON array of [location, weight] pairs.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("measure serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self, MeasureError> {
        serde_json::from_str(s).map_err(|e| MeasureError::Json(e.to_string()))
    }

    /// CSV export with an `x,w` header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,w")?;
        for a in &self.atoms {
            writeln!(out, "{},{}", a.x, a.w)?;
        }
        Ok(())
    }
}

impl Serialize for AtomicMeasure {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.atoms.iter().map(|a| [a.x, a.w]).collect();
        pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AtomicMeasure {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(deserializer)?;
        AtomicMeasure::new(pairs.into_iter().map(|[x, w]| (x, w)).collect())
            .map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Verdict of an excess-wealth comparison over a probability grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExcessWealthReport {
    pub holds: bool,
    /// rhs - lhs per grid level; nonnegative margins mean the order holds.
    pub margins: Vec<f64>,
}

/// The barycentre function Psi of a centered measure:
///
/// Psi(x) = E[X | X >= x] where the conditioning event has mass in (0, 1),
/// with Psi(x) = 0 where the tail is 1 and Psi(x) = x where the tail is 0.
/// For an atomic measure Psi is a nondecreasing step function, constant on
/// each interval between consecutive atoms, equal to the identity above the
/// support.
#[derive(Debug, Clone)]
pub struct Barycentre {
    mu: AtomicMeasure,
}

impl Barycentre {
    pub fn eval(&self, x: f64) -> f64 {
        let atoms = self.mu.atoms();
        if x <= atoms[0].x {
            return 0.0;
        }
        if x > atoms[atoms.len() - 1].x {
            return x;
        }
        let i = atoms.partition_point(|a| a.x < x);
        // x <= max location, so i < len and the suffix mass is positive
        self.mu.suffix_wx[i] / self.mu.suffix_w[i]
    }

    /// inf { x : Psi(x) > lambda }, the right-continuous inverse. The
    /// infimum is attained at an atom location, or equals lambda itself in
    /// the identity regime above the support.
    pub fn right_inverse(&self, lambda: f64) -> f64 {
        assert!(lambda >= 0.0, "barycentre inverse is defined on [0, oo)");
        let atoms = self.mu.atoms();
        let n = atoms.len();
        // Psi on (atoms[i-1].x, atoms[i].x] is the mean of the suffix from
        // atom i, nondecreasing in i; the first interval whose value exceeds
        // lambda starts at its left endpoint.
        for i in 1..n {
            let val = self.mu.suffix_wx[i] / self.mu.suffix_w[i];
            if val > lambda {
                return atoms[i - 1].x;
            }
        }
        // No interval exceeds lambda, so the crossing happens in the
        // identity regime Psi(x) = x above the support.
        atoms[n - 1].x.max(lambda)
    }
}

/// The dual Hardy-Littlewood function psi of a measure m on (0, oo) and its
/// right inverse phi, driving the local-time embedding.
///
/// psi integrates y against d(-ln tail)(y): for continuous m this is the
/// familiar integral of y/tail(y) dm(y); across an atom the tail drops by a
/// jump and the exact increment is y * ln(tail_before / tail_after). The
/// logarithmic form is what makes the stopped law come out right when m has
/// atoms (the plain sum under-weights atoms and the embedded law drifts off
/// target). psi is 0 below the support and +oo from the top atom upward.
#[derive(Debug, Clone)]
pub struct DualHardyLittlewood {
    /// Atom locations of m.
    locations: Vec<f64>,
    /// psi evaluated at each atom location (cumulative; last one is +oo).
    psi_at: Vec<f64>,
}

impl DualHardyLittlewood {
    fn new(m: &AtomicMeasure) -> Result<Self, MeasureError> {
        if m.min_location() <= 0.0 {
            return Err(MeasureError::MassAtOrBelowZero {
                x: m.min_location(),
            });
        }
        let n = m.len();
        let atoms = m.atoms();
        let mut psi_at = Vec::with_capacity(n);
        let mut acc = 0.0;
        for i in 0..n {
            let tail_before = m.suffix_w[i];
            let tail_after = m.suffix_w[i + 1];
            if tail_after <= 0.0 {
                acc = f64::INFINITY;
            } else {
                acc += atoms[i].x * (tail_before / tail_after).ln();
            }
            psi_at.push(acc);
        }
        Ok(DualHardyLittlewood {
            locations: atoms.iter().map(|a| a.x).collect(),
            psi_at,
        })
    }

    /// psi(x); right-continuous step function, +oo at and above the top atom.
    pub fn eval(&self, x: f64) -> f64 {
        let i = self.locations.partition_point(|&y| y <= x);
        if i == 0 {
            0.0
        } else {
            self.psi_at[i - 1]
        }
    }

    /// phi(y) = inf { x >= 0 : psi(x) > y }, the right inverse. Takes values
    /// among the atom locations; the top atom absorbs all large y because
    /// psi jumps to +oo there.
    pub fn right_inverse(&self, y: f64) -> f64 {
        assert!(y >= 0.0, "phi is defined on [0, oo)");
        let i = self.psi_at.partition_point(|&v| v <= y);
        // psi_at[last] = +oo > y always, so i < len
        self.locations[i]
    }

    /// Tail of the local-time law of the embedding,
    /// P(L >= z) = exp(-int_0^z ds/phi(s)), integrated exactly across the
    /// piecewise-constant phases of phi.
    pub fn law_tail(&self, z: f64) -> f64 {
        assert!(z >= 0.0);
        let mut integral = 0.0;
        let mut prev_threshold = 0.0;
        for (i, &level) in self.locations.iter().enumerate() {
            let threshold = self.psi_at[i].min(z);
            if threshold > prev_threshold {
                integral += (threshold - prev_threshold) / level;
            }
            if self.psi_at[i] >= z {
                return (-integral).exp();
            }
            prev_threshold = self.psi_at[i];
        }
        // unreachable: the top atom's psi is +oo
        (-integral).exp()
    }

    /// Expected local time of the embedding: integral of the stopped-law
    /// tail exp(-int_0^x ds/phi(s)), in closed form per phase.
    pub fn expected_local_time(&self) -> f64 {
        let mut total = 0.0;
        let mut survival = 1.0;
        let mut prev_threshold = 0.0;
        for (i, &level) in self.locations.iter().enumerate() {
            let threshold = self.psi_at[i];
            if threshold.is_infinite() {
                // final phase: Exp(level) forever
                total += survival * level;
                return total;
            }
            let span = threshold - prev_threshold;
            let s = (-span / level).exp();
            total += survival * level * (1.0 - s);
            survival *= s;
            prev_threshold = threshold;
        }
        total
    }
}
