//! Synthetic two-Gaussian detection scores with known ground truth.
//!
//! Target LLRs are drawn from `N(+mu, 2mu)` and non-target LLRs from
//! `N(-mu, 2mu)`. With that variance choice the log density ratio of a
//! draw equals the draw itself, so the generated values are exactly
//! calibrated LLRs. Emitted scores are miscalibrated through the inverse
//! affine warp `s = (llr - offset) / scale`, making the warp parameters
//! the recoverable ground truth.
//!
//! Generation is deterministic for a fixed seed: ChaCha12 keyed with the
//! seed, all target draws first, then all non-target draws.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

use crate::calibration::AffineModel;
use crate::error::{Error, Result};
use crate::io::{Label, TrialRecord};
use crate::objective::TrialSet;

/// Generator settings. `mu` is the class-mean separation parameter;
/// `(warp_scale, warp_offset)` is the affine model that re-calibrates
/// the emitted scores.
#[derive(Debug, Clone, Copy)]
pub struct SynthConfig {
    pub mu: f64,
    pub n_tar: usize,
    pub n_non: usize,
    pub warp_scale: f64,
    pub warp_offset: f64,
    pub seed: u64,
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::domain(format!("mu must be positive, got {}", self.mu)));
        }
        if self.n_tar == 0 || self.n_non == 0 {
            return Err(Error::domain("need at least one trial per class"));
        }
        if self.warp_scale == 0.0 || !self.warp_scale.is_finite() {
            return Err(Error::domain(format!(
                "warp scale must be nonzero and finite, got {}",
                self.warp_scale
            )));
        }
        if !self.warp_offset.is_finite() {
            return Err(Error::domain(format!(
                "warp offset must be finite, got {}",
                self.warp_offset
            )));
        }
        Ok(())
    }
}

/// Generated trials plus the ground truth that produced them.
#[derive(Debug, Clone)]
pub struct SynthData {
    /// Score records (warped), targets first.
    pub records: Vec<TrialRecord>,
    /// The affine model mapping emitted scores back to oracle LLRs.
    pub truth: AffineModel,
    /// The oracle LLRs themselves, in record order per class.
    pub oracle_llrs: TrialSet,
}

/// Draw a labeled score set per the config.
pub fn synth_generate(config: &SynthConfig) -> Result<SynthData> {
    config.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let std = (2.0 * config.mu).sqrt();
    let tar_dist = Normal::new(config.mu, std).expect("validated");
    let non_dist = Normal::new(-config.mu, std).expect("validated");

    let tar: Vec<f64> = (0..config.n_tar).map(|_| tar_dist.sample(&mut rng)).collect();
    let non: Vec<f64> = (0..config.n_non).map(|_| non_dist.sample(&mut rng)).collect();

    let warp = |llr: f64| (llr - config.warp_offset) / config.warp_scale;
    let mut records = Vec::with_capacity(config.n_tar + config.n_non);
    for (i, &llr) in tar.iter().enumerate() {
        records.push(TrialRecord {
            trial_id: format!("t{:06}", i + 1),
            score: warp(llr),
            label: Label::Target,
        });
    }
    for (i, &llr) in non.iter().enumerate() {
        records.push(TrialRecord {
            trial_id: format!("n{:06}", i + 1),
            score: warp(llr),
            label: Label::NonTarget,
        });
    }

    Ok(SynthData {
        records,
        truth: AffineModel::new(config.warp_scale, config.warp_offset)?,
        oracle_llrs: TrialSet::new(tar, non)?,
    })
}
