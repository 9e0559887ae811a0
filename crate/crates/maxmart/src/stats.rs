//! Statistical plumbing: mean/stderr reports, Kolmogorov-Smirnov distances,
//! and the handful of normal-distribution special functions the experiments
//! need.

use serde::{Deserialize, Serialize};

/// Estimate with its Monte-Carlo uncertainty. The unit of all experiment
/// output: every statistical number the library reports carries its sample
/// count, standard error and the seed that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub estimate: f64,
    /// Sample standard deviation divided by sqrt(n).
    pub stderr: f64,
    pub n: u64,
    pub seed: u64,
}

impl StatReport {
    pub fn from_sums(sum: f64, sum_sq: f64, n: u64, seed: u64) -> Self {
        assert!(n > 0, "empty sample");
        let nf = n as f64;
        let mean = sum / nf;
        let var = ((sum_sq - sum * sum / nf) / (nf - 1.0).max(1.0)).max(0.0);
        StatReport {
            estimate: mean,
            stderr: (var / nf).sqrt(),
            n,
            seed,
        }
    }

    pub fn from_samples(samples: &[f64], seed: u64) -> Self {
        let sum: f64 = samples.iter().sum();
        let sum_sq: f64 = samples.iter().map(|x| x * x).sum();
        Self::from_sums(sum, sum_sq, samples.len() as u64, seed)
    }

    /// |estimate| <= k * stderr, the usual drift/zero-mean acceptance.
    pub fn within_sigma_of_zero(&self, k: f64) -> bool {
        self.estimate.abs() <= k * self.stderr
    }

    /// |estimate - target| <= k * stderr.
    pub fn within_sigma_of(&self, target: f64, k: f64) -> bool {
        (self.estimate - target).abs() <= k * self.stderr
    }
}

/// Running (sum, sum of squares, count) accumulator with an associative,
/// commutative merge, so chunked parallel reductions stay deterministic.
#[derive(Debug, Clone, Copy, Default)]
pub struct MeanAcc {
    pub sum: f64,
    pub sum_sq: f64,
    pub n: u64,
}

impl MeanAcc {
    pub fn push(&mut self, x: f64) {
        self.sum += x;
        self.sum_sq += x * x;
        self.n += 1;
    }

    pub fn merge(&mut self, other: &MeanAcc) {
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self.n += other.n;
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.n as f64
    }

    pub fn report(&self, seed: u64) -> StatReport {
        StatReport::from_sums(self.sum, self.sum_sq, self.n, seed)
    }
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal CDF. Relative accuracy ~1e-7 everywhere, including far
/// tails, which the closed-form penalization denominators need.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Complementary error function, Chebyshev fit with fractional error below
/// 1.2e-7 for all x.
pub fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let ans = erfc_scaled_poly(z) * (-z * z).exp();
    if x >= 0.0 {
        ans
    } else {
        2.0 - ans
    }
}

/// Scaled complementary error function e^{x^2} erfc(x) for x >= 0; keeps
/// full relative accuracy where erfc underflows against a growing Gaussian
/// factor (bridge local-time weights need the product directly).
pub fn erfcx(x: f64) -> f64 {
    assert!(x >= 0.0);
    erfc_scaled_poly(x)
}

fn erfc_scaled_poly(z: f64) -> f64 {
    let t = 1.0 / (1.0 + 0.5 * z);
    t * (-1.26551223
        + t * (1.00002368
            + t * (0.37409196
                + t * (0.09678418
                    + t * (-0.18628806
                        + t * (0.27886807
                            + t * (-1.13520398
                                + t * (1.48851587
                                    + t * (-0.82215223 + t * 0.17087277)))))))))
    .exp()
}

/// Inverse standard normal CDF (Acklam's rational approximation plus one
/// Newton step). Used for quantile quantization of the Gaussian.
pub fn normal_inv_cdf(p: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return f64::NAN;
    }
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    const A: [f64; 6] = [
        -3.969683028665376e1,
        2.209460984245205e2,
        -2.759285104469687e2,
        1.383577518672690e2,
        -3.066479806614716e1,
        2.506628277459239,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e1,
        1.615858368580409e2,
        -1.556989798598866e2,
        6.680131188771972e1,
        -1.328068155288572e1,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-3,
        -3.223964580411365e-1,
        -2.400758277161838,
        -2.549732539343734,
        4.374664141464968,
        2.938163982698783,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-3,
        3.224671290700398e-1,
        2.445134137142996,
        3.754408661907416,
    ];
    const P_LOW: f64 = 0.02425;
    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let err = normal_cdf(x) - p;
    x - err / normal_pdf(x)
}

/// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
/// `samples` need not be sorted.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    assert!(!samples.is_empty());
    let mut xs = samples.to_vec();
    xs.sort_unstable_by(|a, b| a.partial_cmp(b).expect("NaN sample"));
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(((i as f64 + 1.0) / n - f).abs());
        d = d.max((f - i as f64 / n).abs());
    }
    d
}

/// Asymptotic critical value of the one-sample KS test: reject at level
/// `alpha` when D_n exceeds this. Uses the exact inversion of the leading
/// term of the Kolmogorov distribution, accurate to four digits for
/// alpha <= 0.10 (1.6276/sqrt(n) at the 1% level).
pub fn ks_critical_value(alpha: f64, n: u64) -> f64 {
    assert!(alpha > 0.0 && alpha < 1.0 && n > 0);
    (-0.5 * (alpha / 2.0).ln()).sqrt() / (n as f64).sqrt()
}

/// Two-sample KS statistic. Both samples are copied and sorted.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty());
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_unstable_by(|u, v| u.partial_cmp(v).expect("NaN sample"));
    ys.sort_unstable_by(|u, v| u.partial_cmp(v).expect("NaN sample"));
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < n && j < m {
        let t = xs[i].min(ys[j]);
        while i < n && xs[i] <= t {
            i += 1;
        }
        while j < m && ys[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    d
}

/// Critical value for the two-sample test at level `alpha`.
pub fn ks_two_sample_critical(alpha: f64, n: u64, m: u64) -> f64 {
    let scale = ((n + m) as f64 / (n as f64 * m as f64)).sqrt();
    (-0.5 * (alpha / 2.0).ln()).sqrt() * scale
}
