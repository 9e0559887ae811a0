//! Martingales of the running maximum of a continuous local martingale, and
//! what they buy: Skorokhod embeddings via the barycentre and dual
//! Hardy-Littlewood functions, closed-form laws and bounds for the supremum
//! and the local time of stopped Brownian motion, a discrete balayage
//! identity with Doob's inequalities as corollaries, and penalization of the
//! Wiener measure by a function of the maximum.
//!
//! Every identity ships with its verification: exact enumeration where the
//! state space is finite, closed forms where the law is explicit, and
//! seeded, thread-count-independent Monte-Carlo everywhere else.

pub mod bounds;
pub mod embeddings;
pub mod error;
pub mod martingales;
pub mod measures;
pub mod parallel;
pub mod paths;
pub mod penalization;
pub mod piecewise;
pub mod rng;
pub mod stats;

mod book;

pub use error::{BoundError, MartingaleError, MeasureError, SimError};
pub use measures::{Atom, AtomicMeasure, TailInverseKind};
pub use paths::{PathGrid, SimConfig, StopOutcome};
pub use piecewise::{ExpDensity, Indicator, MaxFn, Monomial, PiecewiseFn};
pub use stats::StatReport;
