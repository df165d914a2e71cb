//! Calibration of detector scores into log-likelihood-ratios.
//!
//! The toolkit is built around a three-parameter family of binary proper
//! scoring rules. The shape pair (alpha, beta) picks a rule — boosting,
//! logarithmic, Brier, asymmetric, or anything in between via quadrature
//! — and the prior log odds tau weights the two class-conditional cost
//! averages. Together they determine a normalized weighting over
//! decision thresholds, which is what an affine calibration trained on
//! that objective actually optimizes for.
//!
//! Modules:
//! - [`psr`]: the rule family, closed forms and the quadrature oracle.
//! - [`weighting`]: threshold weightings, their normalizer, grid export.
//! - [`objective`]: expected cost over a trial set, gradients, the
//!   threshold-integral form, and exact impulse mixtures.
//! - [`calibration`]: affine score-to-LLR models trained with BFGS.
//! - [`pav`]: pool-adjacent-violators reference calibration.
//! - [`metrics`]: miss/false-alarm counts, Bayes error, the
//!   two-threshold low-false-alarm cost, and the logarithmic cost in
//!   bits.
//! - [`synth`]: a two-Gaussian oracle generator for end-to-end checks.
//! - [`io`]: versioned text formats for trials, models, and grids.

// Negated float comparisons like `!(x > 0.0)` are deliberate throughout:
// unlike `x <= 0.0` they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bfgs;
pub mod calibration;
pub mod error;
pub mod io;
pub mod math;
pub mod metrics;
pub mod objective;
pub mod pav;
pub mod psr;
pub mod synth;
pub mod weighting;

pub use calibration::{train, AffineModel, TrainConfig, TrainReport};
pub use error::{Error, Result};
pub use metrics::MetricsReport;
pub use objective::{expected_cost, ObjectiveParams, TrialSet};
pub use pav::{make_calibrator, pav_fit, pav_llrs, LabeledScores, PavCalibrator};
pub use psr::{rule_cost, ClosedFormRule, Hypothesis, RuleParams};
pub use synth::{synth_generate, SynthConfig};
pub use weighting::{omega_grid, WeightGrid, WeightParams};
