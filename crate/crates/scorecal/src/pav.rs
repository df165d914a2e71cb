//! Pool-adjacent-violators calibration: the nonparametric monotone
//! score-to-LLR map that is simultaneously optimal for every binary
//! proper scoring rule at every prior, plus an interpolating calibrator
//! for unseen scores.
//!
//! Tied scores are pre-pooled into a single block before the isotonic
//! pass, so the result does not depend on the order tied trials arrived
//! in. Block posteriors are kept as exact target/non-target counts and
//! only turned into floats on demand; the per-block LLR
//! `ln(k_t N / (k_n T))` then cancels the prior exactly.

use crate::error::{Error, Result};
use crate::psr::Hypothesis;

/// Scores with their ground-truth labels, in caller order.
#[derive(Debug, Clone)]
pub struct LabeledScores {
    scores: Vec<f64>,
    labels: Vec<Hypothesis>,
}

impl LabeledScores {
    pub fn new(scores: Vec<f64>, labels: Vec<Hypothesis>) -> Result<Self> {
        if scores.len() != labels.len() {
            return Err(Error::domain(format!(
                "scores ({}) and labels ({}) must have equal length",
                scores.len(),
                labels.len()
            )));
        }
        if scores.is_empty() {
            return Err(Error::domain("need at least one labeled score"));
        }
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::domain("scores must be finite"));
        }
        Ok(LabeledScores { scores, labels })
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn labels(&self) -> &[Hypothesis] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    fn class_counts(&self) -> (usize, usize) {
        let t = self.labels.iter().filter(|l| matches!(l, Hypothesis::Target)).count();
        (t, self.labels.len() - t)
    }
}

/// One monotone block of the PAV solution: the score range it covers,
/// its label counts, and its (prior-weighted) posterior.
#[derive(Debug, Clone, Copy)]
pub struct PavBlock {
    pub score_lo: f64,
    pub score_hi: f64,
    pub tar_count: usize,
    pub non_count: usize,
    pub posterior: f64,
}

/// The fitted monotone assignment.
#[derive(Debug, Clone)]
pub struct PavSolution {
    blocks: Vec<PavBlock>,
    /// Original trial index -> block index.
    block_of_trial: Vec<usize>,
    pi: f64,
    n_tar: usize,
    n_non: usize,
}

impl PavSolution {
    pub fn blocks(&self) -> &[PavBlock] {
        &self.blocks
    }

    pub fn pi(&self) -> f64 {
        self.pi
    }

    /// Per-trial posteriors in the original input order.
    pub fn posteriors(&self) -> Vec<f64> {
        self.block_of_trial.iter().map(|&b| self.blocks[b].posterior).collect()
    }
}

/// Default clamp for the infinite LLRs of single-class end blocks; far
/// beyond any plausible operating threshold.
pub const DEFAULT_LLR_MAX: f64 = 100.0;

fn class_weights(pi: f64, n_tar: usize, n_non: usize) -> (f64, f64) {
    let w_t = if n_tar > 0 { pi / n_tar as f64 } else { 0.0 };
    let w_n = if n_non > 0 { (1.0 - pi) / n_non as f64 } else { 0.0 };
    (w_t, w_n)
}

fn block_posterior(w_t: f64, w_n: f64, tar: usize, non: usize) -> f64 {
    let a = w_t * tar as f64;
    let b = w_n * non as f64;
    a / (a + b)
}

/// Weighted isotonic fit of target indicators against score order, with
/// per-trial weights `pi/T` (targets) and `(1-pi)/N` (non-targets).
///
/// Single-class data fits fine (all posteriors 0 or 1); only the LLR
/// conversion needs both classes.
pub fn pav_fit(data: &LabeledScores, pi: f64) -> Result<PavSolution> {
    if !(pi > 0.0 && pi < 1.0) {
        return Err(Error::domain(format!("prior must be strictly inside (0,1), got {pi}")));
    }
    let n = data.len();
    let (n_tar, n_non) = data.class_counts();
    let (w_t, w_n) = class_weights(pi, n_tar, n_non);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| data.scores[a].partial_cmp(&data.scores[b]).expect("finite scores"));

    // Pre-pool tied scores: one group per distinct score value, holding
    // the range of `order` it covers.
    struct Group {
        score: f64,
        tar: usize,
        non: usize,
        start: usize,
        end: usize,
    }
    let mut groups: Vec<Group> = Vec::new();
    let mut i = 0;
    while i < n {
        let score = data.scores[order[i]];
        let start = i;
        let mut tar = 0;
        let mut non = 0;
        while i < n && data.scores[order[i]] == score {
            match data.labels[order[i]] {
                Hypothesis::Target => tar += 1,
                Hypothesis::NonTarget => non += 1,
            }
            i += 1;
        }
        groups.push(Group { score, tar, non, start, end: i });
    }

    // Stack-based PAV over the groups: merge while the previous block's
    // posterior strictly exceeds the new one.
    struct Stacked {
        first_group: usize,
        last_group: usize,
        tar: usize,
        non: usize,
    }
    let mut stack: Vec<Stacked> = Vec::with_capacity(groups.len());
    for (gi, g) in groups.iter().enumerate() {
        let mut block = Stacked { first_group: gi, last_group: gi, tar: g.tar, non: g.non };
        while let Some(prev) = stack.last() {
            let prev_post = block_posterior(w_t, w_n, prev.tar, prev.non);
            let cur_post = block_posterior(w_t, w_n, block.tar, block.non);
            if prev_post > cur_post {
                let prev = stack.pop().expect("nonempty");
                block.first_group = prev.first_group;
                block.tar += prev.tar;
                block.non += prev.non;
            } else {
                break;
            }
        }
        stack.push(block);
    }

    let mut blocks = Vec::with_capacity(stack.len());
    let mut block_of_trial = vec![0usize; n];
    for (bi, b) in stack.iter().enumerate() {
        blocks.push(PavBlock {
            score_lo: groups[b.first_group].score,
            score_hi: groups[b.last_group].score,
            tar_count: b.tar,
            non_count: b.non,
            posterior: block_posterior(w_t, w_n, b.tar, b.non),
        });
        for g in &groups[b.first_group..=b.last_group] {
            for &orig in &order[g.start..g.end] {
                block_of_trial[orig] = bi;
            }
        }
    }

    Ok(PavSolution { blocks, block_of_trial, pi, n_tar, n_non })
}

/// LLR of one block from its counts: `ln(k_t N / (k_n T))`, clamped to
/// `[-llr_max, llr_max]`. Exactly prior-free.
fn block_llr(block: &PavBlock, n_tar: usize, n_non: usize, llr_max: f64) -> f64 {
    if block.tar_count == 0 {
        -llr_max
    } else if block.non_count == 0 {
        llr_max
    } else {
        let raw = ((block.tar_count as f64 * n_non as f64)
            / (block.non_count as f64 * n_tar as f64))
            .ln();
        raw.clamp(-llr_max, llr_max)
    }
}

/// Per-trial optimal LLRs in the original input order.
///
/// Equivalent to `logit(posterior) - logit(pi)` but computed from the
/// block counts, so the prior used for the fit cancels exactly. End
/// blocks containing a single class are clamped to `+/-llr_max`.
pub fn pav_llrs(solution: &PavSolution, llr_max: f64) -> Result<Vec<f64>> {
    if !(llr_max > 0.0 && llr_max.is_finite()) {
        return Err(Error::domain(format!("llr_max must be positive and finite, got {llr_max}")));
    }
    if solution.n_tar == 0 || solution.n_non == 0 {
        return Err(Error::domain(
            "LLR conversion needs both classes present in the fitted data",
        ));
    }
    let block_llrs: Vec<f64> = solution
        .blocks
        .iter()
        .map(|b| block_llr(b, solution.n_tar, solution.n_non, llr_max))
        .collect();
    Ok(solution.block_of_trial.iter().map(|&b| block_llrs[b]).collect())
}

/// A monotone piecewise-linear score-to-LLR map built from a PAV fit.
///
/// Inside a block every score maps to the block LLR; between blocks the
/// map ramps linearly; outside the training range it clamps to the end
/// blocks. Querying any training score therefore reproduces that
/// trial's PAV LLR exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct PavCalibrator {
    /// (score, llr) knots, strictly increasing in score, non-decreasing
    /// in llr.
    knots: Vec<(f64, f64)>,
    llr_max: f64,
}

impl PavCalibrator {
    /// Rebuild a calibrator from persisted knots, re-checking the
    /// monotonicity invariants.
    pub fn from_knots(knots: Vec<(f64, f64)>, llr_max: f64) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::domain("calibrator needs at least one knot"));
        }
        if !(llr_max > 0.0 && llr_max.is_finite()) {
            return Err(Error::domain(format!("llr_max must be positive and finite, got {llr_max}")));
        }
        if knots.iter().any(|&(s, l)| !s.is_finite() || !l.is_finite()) {
            return Err(Error::domain("calibrator knots must be finite"));
        }
        if !knots.windows(2).all(|w| w[0].0 < w[1].0) {
            return Err(Error::domain("knot scores must be strictly increasing"));
        }
        if !knots.windows(2).all(|w| w[0].1 <= w[1].1) {
            return Err(Error::domain("knot LLRs must be non-decreasing"));
        }
        Ok(PavCalibrator { knots, llr_max })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn llr_max(&self) -> f64 {
        self.llr_max
    }

    /// Calibrate one score.
    pub fn map_score(&self, s: f64) -> f64 {
        let k = &self.knots;
        if s <= k[0].0 {
            return k[0].1;
        }
        if s >= k[k.len() - 1].0 {
            return k[k.len() - 1].1;
        }
        // First knot with score > s; the segment [j-1, j] brackets s.
        let j = k.partition_point(|&(ks, _)| ks <= s);
        let (s0, l0) = k[j - 1];
        let (s1, l1) = k[j];
        if l0 == l1 {
            l0
        } else {
            l0 + (l1 - l0) * (s - s0) / (s1 - s0)
        }
    }

    /// Calibrate a batch, preserving order.
    pub fn apply(&self, scores: &[f64]) -> Vec<f64> {
        scores.iter().map(|&s| self.map_score(s)).collect()
    }
}

/// Fit PAV on labeled data and wrap it as an interpolating calibrator.
/// Both classes must be present.
pub fn make_calibrator(data: &LabeledScores, pi: f64, llr_max: f64) -> Result<PavCalibrator> {
    let solution = pav_fit(data, pi)?;
    if solution.n_tar == 0 || solution.n_non == 0 {
        return Err(Error::domain(
            "calibrator construction needs both classes present in the fitted data",
        ));
    }
    if !(llr_max > 0.0 && llr_max.is_finite()) {
        return Err(Error::domain(format!("llr_max must be positive and finite, got {llr_max}")));
    }
    let mut knots = Vec::with_capacity(2 * solution.blocks.len());
    for b in &solution.blocks {
        let llr = block_llr(b, solution.n_tar, solution.n_non, llr_max);
        knots.push((b.score_lo, llr));
        if b.score_hi > b.score_lo {
            knots.push((b.score_hi, llr));
        }
    }
    PavCalibrator::from_knots(knots, llr_max)
}
