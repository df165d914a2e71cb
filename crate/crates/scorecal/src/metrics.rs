//! Detection metrics over calibrated LLR sets: miss/false-alarm rates,
//! normalized Bayes error at a threshold, the two-threshold
//! low-false-alarm cost, and the logarithmic cost in bits.

use crate::math::sigmoid;
use crate::objective::{expected_cost, impulse_expected_cost, ObjectiveParams, TrialSet};
use crate::psr::RuleParams;
use crate::weighting::ImpulseWeighting;

/// The two low-false-alarm LLR operating thresholds. They correspond to
/// effective target priors of roughly 1e-2 and 1e-3.
pub const PRIMARY_THRESHOLD_LOW: f64 = 4.59;
pub const PRIMARY_THRESHOLD_HIGH: f64 = 6.91;

/// Empirical miss and false-alarm fractions at one threshold.
/// A trial exactly at the threshold is rejected: a miss if it was a
/// target, not a false alarm otherwise (the same tie rule the impulse
/// objective uses).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRates {
    pub p_miss: f64,
    pub p_fa: f64,
    pub threshold: f64,
}

/// Count miss and false-alarm fractions at LLR threshold `theta`.
pub fn error_rates(llrs: &TrialSet, theta: f64) -> ErrorRates {
    let misses = llrs.tar().iter().filter(|&&l| l <= theta).count();
    let fas = llrs.non().iter().filter(|&&l| l > theta).count();
    ErrorRates {
        p_miss: misses as f64 / llrs.n_tar() as f64,
        p_fa: fas as f64 / llrs.n_non() as f64,
        threshold: theta,
    }
}

/// Normalized Bayes error at threshold `theta`:
/// `p_miss + e^theta * p_fa`.
///
/// This is the single-impulse expected cost with the impulse costs
/// `C_miss = 1+e^{-theta}`, `C_fa = 1+e^{theta}` folded through the
/// implied prior `sigma(theta)`.
pub fn bayes_error(llrs: &TrialSet, theta: f64) -> f64 {
    let rates = error_rates(llrs, theta);
    rates.p_miss + theta.exp() * rates.p_fa
}

/// The two-impulse weighting behind [`c_primary`]: mass `sigma(theta)/2`
/// at each operating threshold.
pub fn primary_weighting() -> ImpulseWeighting {
    ImpulseWeighting::new(
        vec![PRIMARY_THRESHOLD_LOW, PRIMARY_THRESHOLD_HIGH],
        vec![
            0.5 * sigmoid(PRIMARY_THRESHOLD_LOW),
            0.5 * sigmoid(PRIMARY_THRESHOLD_HIGH),
        ],
    )
    .expect("constants are valid")
}

/// Mean normalized Bayes error over the two low-false-alarm thresholds.
///
/// Identical to the impulse expected cost under [`primary_weighting`];
/// the impulse weights `sigma(theta_i)/2` are within ~1% of exactly 1/2,
/// see [`c_primary_equal_weights`] for that variant.
pub fn c_primary(llrs: &TrialSet) -> f64 {
    0.5 * (bayes_error(llrs, PRIMARY_THRESHOLD_LOW) + bayes_error(llrs, PRIMARY_THRESHOLD_HIGH))
}

/// Variant of [`c_primary`] with impulse weights of exactly 1/2, i.e.
/// without the `sigma(theta_i)` factors:
/// `(1/2) sum_i (1+e^{-theta_i}) p_miss + (1+e^{theta_i}) p_fa`.
pub fn c_primary_equal_weights(llrs: &TrialSet) -> f64 {
    let imp = ImpulseWeighting::new(
        vec![PRIMARY_THRESHOLD_LOW, PRIMARY_THRESHOLD_HIGH],
        vec![0.5, 0.5],
    )
    .expect("constants are valid");
    impulse_expected_cost(&imp, llrs)
}

/// Logarithmic-rule cost at even prior, in bits. 1.0 for a system whose
/// LLRs are all zero; approaches 0 with perfect separation.
pub fn c_llr(llrs: &TrialSet) -> f64 {
    let params = ObjectiveParams::new(
        RuleParams::new(1.0, 1.0).expect("valid constants"),
        0.0,
    )
    .expect("valid constants");
    expected_cost(&params, llrs).expect("closed-form path cannot fail") / std::f64::consts::LN_2
}

/// Everything the `eval` command reports.
#[derive(Debug, Clone)]
pub struct MetricsReport {
    pub n_tar: usize,
    pub n_non: usize,
    pub rates_low: ErrorRates,
    pub rates_high: ErrorRates,
    pub c_primary: f64,
    pub c_primary_equal_weights: f64,
    pub c_llr: f64,
}

impl MetricsReport {
    pub fn compute(llrs: &TrialSet) -> Self {
        MetricsReport {
            n_tar: llrs.n_tar(),
            n_non: llrs.n_non(),
            rates_low: error_rates(llrs, PRIMARY_THRESHOLD_LOW),
            rates_high: error_rates(llrs, PRIMARY_THRESHOLD_HIGH),
            c_primary: c_primary(llrs),
            c_primary_equal_weights: c_primary_equal_weights(llrs),
            c_llr: c_llr(llrs),
        }
    }

    /// Human-readable report.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "trials             : {} target, {} non-target\n",
            self.n_tar, self.n_non
        ));
        for r in [&self.rates_low, &self.rates_high] {
            out.push_str(&format!(
                "p_miss @ {:<5.2}     : {:.6}\np_fa   @ {:<5.2}     : {:.6}\n",
                r.threshold, r.p_miss, r.threshold, r.p_fa
            ));
        }
        out.push_str(&format!("c_primary          : {:.6}\n", self.c_primary));
        out.push_str(&format!(
            "c_primary (eq. wts): {:.6}\n",
            self.c_primary_equal_weights
        ));
        out.push_str(&format!("c_llr [bits]       : {:.6}\n", self.c_llr));
        out
    }

    /// Machine-readable `metric,value` CSV.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("metric,value\n");
        out.push_str(&format!("n_tar,{}\n", self.n_tar));
        out.push_str(&format!("n_non,{}\n", self.n_non));
        out.push_str(&format!("p_miss_low,{:.12e}\n", self.rates_low.p_miss));
        out.push_str(&format!("p_fa_low,{:.12e}\n", self.rates_low.p_fa));
        out.push_str(&format!("p_miss_high,{:.12e}\n", self.rates_high.p_miss));
        out.push_str(&format!("p_fa_high,{:.12e}\n", self.rates_high.p_fa));
        out.push_str(&format!("c_primary,{:.12e}\n", self.c_primary));
        out.push_str(&format!(
            "c_primary_equal_weights,{:.12e}\n",
            self.c_primary_equal_weights
        ));
        out.push_str(&format!("c_llr,{:.12e}\n", self.c_llr));
        out
    }
}
