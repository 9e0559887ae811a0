//! Functions of the running maximum (or local time) together with their
//! exact primitives.
//!
//! Every martingale of the form F(max) - f(max)(max - value) needs the pair
//! (f, F) with F an exact antiderivative; numerical quadrature inside the
//! martingale would turn an identity into an approximation. The [`MaxFn`]
//! trait captures the pair, and the implementations cover the families the
//! experiments use: piecewise constant/linear functions, indicator steps,
//! monomials, and the exponential density.

use serde::{Deserialize, Serialize};

use crate::error::MartingaleError;

/// A locally integrable function on [0, oo) with its exact running integral
/// from zero.
pub trait MaxFn: Sync {
    /// f(x) for x >= 0.
    fn eval(&self, x: f64) -> f64;
    /// F(y) = int_0^y f(s) ds, exactly.
    fn primitive(&self, y: f64) -> f64;
}

/// Piecewise constant-or-linear function on [0, oo).
///
/// Piece `i` lives on [knots[i], knots[i+1]) (the last piece extends to
/// infinity) and evaluates to `a_i + b_i (x - knots[i])`. The primitive is
/// accumulated exactly at the knots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseFn {
    knots: Vec<f64>,
    /// (value at left knot, slope) per piece.
    pieces: Vec<(f64, f64)>,
    /// F(knots[i]), running exact integral.
    primitive_at: Vec<f64>,
}

impl PiecewiseFn {
    /// Build from knots (strictly increasing, first knot 0) and one
    /// (value, slope) pair per knot.
    pub fn new(knots: Vec<f64>, pieces: Vec<(f64, f64)>) -> Result<Self, MartingaleError> {
        if knots.is_empty() || pieces.len() != knots.len() {
            return Err(MartingaleError::EmptyPieces);
        }
        if knots[0] != 0.0 {
            return Err(MartingaleError::UnorderedBreakpoints);
        }
        for i in 1..knots.len() {
            if !(knots[i - 1] < knots[i]) {
                return Err(MartingaleError::UnorderedBreakpoints);
            }
        }
        if knots.iter().any(|k| !k.is_finite())
            || pieces.iter().any(|p| !p.0.is_finite() || !p.1.is_finite())
        {
            return Err(MartingaleError::NonFinite);
        }
        let mut primitive_at = Vec::with_capacity(knots.len());
        let mut acc = 0.0;
        primitive_at.push(0.0);
        for i in 1..knots.len() {
            let h = knots[i] - knots[i - 1];
            let (a, b) = pieces[i - 1];
            acc += a * h + 0.5 * b * h * h;
            primitive_at.push(acc);
        }
        Ok(PiecewiseFn {
            knots,
            pieces,
            primitive_at,
        })
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![0.0], vec![(c, 0.0)]).expect("constant is valid")
    }

    /// f(x) = a + b x on all of [0, oo).
    pub fn linear(a: f64, b: f64) -> Self {
        Self::new(vec![0.0], vec![(a, b)]).expect("linear is valid")
    }

    /// Indicator of [threshold, oo) for threshold > 0.
    pub fn indicator_above(threshold: f64) -> Self {
        assert!(threshold > 0.0);
        Self::new(vec![0.0, threshold], vec![(0.0, 0.0), (1.0, 0.0)])
            .expect("indicator is valid")
    }

    /// Indicator of [0, upper), scaled by `height`.
    pub fn boxcar(upper: f64, height: f64) -> Self {
        assert!(upper > 0.0);
        Self::new(vec![0.0, upper], vec![(height, 0.0), (0.0, 0.0)]).expect("boxcar is valid")
    }

    /// Piecewise-linear interpolant of `f` on [0, hi] over `n` equal pieces,
    /// clamped to a constant beyond `hi`. The primitive is exact for the
    /// interpolant itself.
    pub fn interpolate<F: Fn(f64) -> f64>(f: F, hi: f64, n: usize) -> Self {
        assert!(hi > 0.0 && n >= 1);
        let mut knots = Vec::with_capacity(n + 1);
        let mut pieces = Vec::with_capacity(n + 1);
        let h = hi / n as f64;
        for i in 0..n {
            let x0 = i as f64 * h;
            let (y0, y1) = (f(x0), f(x0 + h));
            knots.push(x0);
            pieces.push((y0, (y1 - y0) / h));
        }
        knots.push(hi);
        pieces.push((f(hi), 0.0));
        Self::new(knots, pieces).expect("interpolant is valid")
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    fn piece_index(&self, x: f64) -> usize {
        debug_assert!(x >= 0.0);
        self.knots.partition_point(|&k| k <= x).saturating_sub(1)
    }

    /// True when every piece is nonnegative and the function never
    /// decreases, including across knots.
    pub fn is_nondecreasing_nonnegative(&self, up_to: f64) -> bool {
        let mut prev_end = f64::NEG_INFINITY;
        for (i, &(a, b)) in self.pieces.iter().enumerate() {
            if self.knots[i] > up_to {
                break;
            }
            if b < 0.0 || a < 0.0 || a < prev_end - 1e-12 {
                return false;
            }
            let end = if i + 1 < self.knots.len() {
                a + b * (self.knots[i + 1] - self.knots[i])
            } else {
                a
            };
            prev_end = end;
        }
        true
    }
}

impl MaxFn for PiecewiseFn {
    fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return self.pieces[0].0;
        }
        let i = self.piece_index(x);
        let (a, b) = self.pieces[i];
        a + b * (x - self.knots[i])
    }

    fn primitive(&self, y: f64) -> f64 {
        assert!(y >= 0.0, "primitive is defined on [0, oo)");
        let i = self.piece_index(y);
        let (a, b) = self.pieces[i];
        let d = y - self.knots[i];
        self.primitive_at[i] + a * d + 0.5 * b * d * d
    }
}

/// Indicator step 1 above a threshold, closed or open at the threshold.
/// The two variants share the primitive (y - threshold)^+ but differ at the
/// single point where the paper's discrete identities evaluate them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Indicator {
    pub threshold: f64,
    pub closed: bool,
}

impl Indicator {
    /// 1_{[threshold, oo)}.
    pub fn at_or_above(threshold: f64) -> Self {
        Indicator {
            threshold,
            closed: true,
        }
    }

    /// 1_{(threshold, oo)}.
    pub fn above(threshold: f64) -> Self {
        Indicator {
            threshold,
            closed: false,
        }
    }
}

impl MaxFn for Indicator {
    fn eval(&self, x: f64) -> f64 {
        let hit = if self.closed {
            x >= self.threshold
        } else {
            x > self.threshold
        };
        if hit {
            1.0
        } else {
            0.0
        }
    }

    fn primitive(&self, y: f64) -> f64 {
        (y - self.threshold).max(0.0)
    }
}

/// c x^p with exact primitive c y^{p+1}/(p+1); p > -1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coeff: f64,
    pub power: f64,
}

impl Monomial {
    pub fn new(coeff: f64, power: f64) -> Self {
        assert!(power > -1.0, "monomial must be locally integrable at 0");
        Monomial { coeff, power }
    }
}

impl MaxFn for Monomial {
    fn eval(&self, x: f64) -> f64 {
        if self.power == 0.0 {
            self.coeff
        } else if self.power == 1.0 {
            self.coeff * x
        } else if self.power == 2.0 {
            self.coeff * x * x
        } else {
            self.coeff * x.powf(self.power)
        }
    }

    fn primitive(&self, y: f64) -> f64 {
        let q = self.power + 1.0;
        if q == 1.0 {
            self.coeff * y
        } else if q == 2.0 {
            self.coeff * 0.5 * y * y
        } else if q == 3.0 {
            self.coeff * y * y * y / 3.0
        } else {
            self.coeff * y.powf(q) / q
        }
    }
}

/// The exponential density e^{-x} on [0, oo), with primitive 1 - e^{-y}.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ExpDensity;

impl MaxFn for ExpDensity {
    fn eval(&self, x: f64) -> f64 {
        (-x).exp()
    }

    fn primitive(&self, y: f64) -> f64 {
        -(-y).exp_m1()
    }
}
