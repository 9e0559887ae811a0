//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("measure needs at least one atom")]
    Empty,
    #[error("locations and weights must be finite")]
    NonFinite,
    #[error("weight {w} at {x} is not strictly positive")]
    NonPositiveWeight { x: f64, w: f64 },
    #[error("atom locations must be strictly increasing ({a} then {b})")]
    UnorderedLocations { a: f64, b: f64 },
    #[error("weights sum to {sum}, not 1")]
    WeightSum { sum: f64 },
    #[error("measure has mean {mean}, but a centered measure is required")]
    NotCentered { mean: f64 },
    #[error("measure on (0, oo) required, found mass at {x}")]
    MassAtOrBelowZero { x: f64 },
    #[error("bad measure JSON: {0}")]
    Json(String),
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("time step must be positive, got {dt}")]
    BadDt { dt: f64 },
    #[error("horizon must be nonnegative, got {horizon}")]
    BadHorizon { horizon: f64 },
    #[error("{steps} grid steps exceed the cap of {cap}")]
    TooManySteps { steps: u64, cap: u64 },
    #[error("local-time epsilon {epsilon} must be at least 5*sqrt(dt) = {min}")]
    EpsilonTooSmall { epsilon: f64, min: f64 },
    #[error("path index {index} is out of range (n_paths = {n_paths})")]
    PathIndex { index: u64, n_paths: u64 },
    #[error("joint density needs t > 0, got {t}")]
    BadTime { t: f64 },
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum MartingaleError {
    #[error("piecewise function needs strictly increasing breakpoints")]
    UnorderedBreakpoints,
    #[error("piecewise function needs at least one piece")]
    EmptyPieces,
    #[error("breakpoints and values must be finite")]
    NonFinite,
    #[error("max-martingale is only defined on y >= max(x, 0); got x={x}, y={y}")]
    OutsideReachableRegion { x: f64, y: f64 },
    #[error("local-time martingale needs |x| >= 0 and l >= 0; got x={x}, l={l}")]
    NegativeInput { x: f64, l: f64 },
    #[error("this operation needs a nondecreasing, nonnegative f")]
    NotMonotoneDensity,
    #[error("exhaustive enumeration is capped at n = {cap}, got {n}")]
    EnumerationTooLarge { n: u32, cap: u32 },
    #[error("path pair violates phi constancy off zeros at step {index}")]
    ExcursionConstancy { index: usize },
    #[error("path pair must start at Y_0 = 0 and have matching lengths")]
    BadPathPair,
}

#[derive(Debug, Error)]
pub enum BoundError {
    #[error("sup-law integrand needs phi(s) < s on (0, y]; found phi({s}) = {phi}")]
    PhiAboveDiagonal { s: f64, phi: f64 },
    #[error("expectation bounds need an almost-surely bounded stopping rule; {rule} is not")]
    UnboundedRule { rule: String },
}
