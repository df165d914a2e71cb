//! Command-line interface: synth, train, apply, eval, pav, weights.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use scorecal::calibration::{self, train, TrainConfig};
use scorecal::error::{Error, Result};
use scorecal::io::{
    read_calibrator, read_trials, to_trial_set, write_affine_model, write_pav_calibrator,
    write_trials, write_weight_grid, TrialRecord,
};
use scorecal::math::logit;
use scorecal::metrics::MetricsReport;
use scorecal::objective::ObjectiveParams;
use scorecal::pav::{make_calibrator, LabeledScores, DEFAULT_LLR_MAX};
use scorecal::psr::RuleParams;
use scorecal::synth::{synth_generate, SynthConfig};
use scorecal::weighting::{omega_grid, WeightParams, GRID_POINTS, GRID_T_MAX, GRID_T_MIN};

#[derive(Parser)]
#[command(
    name = "scorecal",
    version,
    about = "Score calibration with proper scoring rules: train and apply affine or PAV \
             score-to-LLR maps, evaluate detection costs, export threshold weightings"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic labeled scores with known ground truth
    #[command(allow_negative_numbers = true)]
    Synth {
        /// Class-mean separation; LLR classes are N(+mu, 2mu) and N(-mu, 2mu)
        #[arg(long, default_value_t = 2.0)]
        mu: f64,
        #[arg(long, default_value_t = 1000)]
        n_tar: usize,
        #[arg(long, default_value_t = 1000)]
        n_non: usize,
        /// Scale of the affine model that re-calibrates the emitted scores
        #[arg(long, default_value_t = 1.0)]
        warp_scale: f64,
        /// Offset of that model
        #[arg(long, default_value_t = 0.0)]
        warp_offset: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output trials file
        #[arg(long)]
        out: PathBuf,
        /// Optionally persist the ground-truth model here
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Train an affine score-to-LLR calibration on labeled trials
    #[command(allow_negative_numbers = true)]
    Train {
        #[arg(long)]
        trials: PathBuf,
        /// Left-tail shape of the scoring rule
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Right-tail shape of the scoring rule
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Prior log odds (defaults to 0 unless --ptar is given)
        #[arg(long, conflicts_with = "ptar")]
        tau: Option<f64>,
        /// Target prior; converted to tau = logit(ptar)
        #[arg(long)]
        ptar: Option<f64>,
        /// Output model file
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = calibration::DEFAULT_GRAD_TOL)]
        grad_tol: f64,
        #[arg(long, default_value_t = calibration::DEFAULT_MAX_ITERS)]
        max_iters: usize,
    },
    /// Map a score file through a trained model (affine or PAV)
    Apply {
        #[arg(long)]
        trials: PathBuf,
        /// Model file from `train` or `pav`
        #[arg(long)]
        model: PathBuf,
        /// Output LLR trials file
        #[arg(long)]
        out: PathBuf,
    },
    /// Report detection metrics over labeled LLR trials
    Eval {
        #[arg(long)]
        trials: PathBuf,
        /// Emit machine-readable `metric,value` CSV instead of text
        #[arg(long)]
        csv: bool,
    },
    /// Fit a PAV calibrator on labeled trials and persist its knot table
    Pav {
        #[arg(long)]
        trials: PathBuf,
        /// Prior used for the isotonic weights (the LLRs are prior-free)
        #[arg(long, default_value_t = 0.5)]
        ptar: f64,
        /// Clamp for the infinite LLRs of single-class end blocks
        #[arg(long, default_value_t = DEFAULT_LLR_MAX)]
        llr_max: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Export a threshold-weighting grid as CSV
    #[command(allow_negative_numbers = true)]
    Weights {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, conflicts_with = "ptar")]
        tau: Option<f64>,
        #[arg(long)]
        ptar: Option<f64>,
        #[arg(long, default_value_t = GRID_T_MIN)]
        t_min: f64,
        #[arg(long, default_value_t = GRID_T_MAX)]
        t_max: f64,
        #[arg(long, default_value_t = GRID_POINTS)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn resolve_tau(tau: Option<f64>, ptar: Option<f64>) -> Result<f64> {
    match (tau, ptar) {
        (Some(t), None) => Ok(t),
        (None, Some(p)) => {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::Domain(format!(
                    "--ptar must be strictly inside (0,1), got {p}"
                )));
            }
            Ok(logit(p))
        }
        (None, None) => Ok(0.0),
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    }
}

impl Cli {
    pub fn run(self) -> Result<()> {
        match self.command {
            Command::Synth { mu, n_tar, n_non, warp_scale, warp_offset, seed, out, truth } => {
                let config =
                    SynthConfig { mu, n_tar, n_non, warp_scale, warp_offset, seed };
                let data = synth_generate(&config)?;
                write_trials(&out, &data.records)?;
                println!("wrote {} trials to {}", data.records.len(), out.display());
                if let Some(truth_path) = truth {
                    // Nominal objective metadata; the payload is (A, B).
                    let params = ObjectiveParams::new(RuleParams::new(1.0, 1.0)?, 0.0)?;
                    write_affine_model(&truth_path, &data.truth, &params)?;
                    println!("wrote ground-truth model to {}", truth_path.display());
                } else {
                    println!(
                        "ground truth: A = {}, B = {}",
                        data.truth.scale, data.truth.offset
                    );
                }
                Ok(())
            }
            Command::Train { trials, alpha, beta, tau, ptar, out, grad_tol, max_iters } => {
                let tau = resolve_tau(tau, ptar)?;
                let params = ObjectiveParams::new(RuleParams::new(alpha, beta)?, tau)?;
                let records = read_trials(&trials)?;
                let scores = to_trial_set(&records)?;
                let config = TrainConfig { objective: params, init: None, grad_tol, max_iters };
                let report = train(&scores, &config)?;
                write_affine_model(&out, &report.model, &params)?;
                println!("model written to {}", out.display());
                println!("scale (A)      : {:.9}", report.model.scale);
                println!("offset (B)     : {:.9}", report.model.offset);
                println!("objective      : {:.9}", report.final_objective);
                println!("iterations     : {}", report.iterations);
                println!("converged      : {}", report.converged);
                println!("gradient norm  : {:.3e}", report.gradient_norm);
                Ok(())
            }
            Command::Apply { trials, model, out } => {
                let calibrator = read_calibrator(&model)?;
                let records = read_trials(&trials)?;
                let scores: Vec<f64> = records.iter().map(|r| r.score).collect();
                let llrs = calibrator.map_scores(&scores);
                let mapped: Vec<TrialRecord> = records
                    .into_iter()
                    .zip(llrs)
                    .map(|(r, llr)| TrialRecord { score: llr, ..r })
                    .collect();
                write_trials(&out, &mapped)?;
                println!("wrote {} calibrated trials to {}", mapped.len(), out.display());
                Ok(())
            }
            Command::Eval { trials, csv } => {
                let records = read_trials(&trials)?;
                let llrs = to_trial_set(&records)?;
                let report = MetricsReport::compute(&llrs);
                if csv {
                    print!("{}", report.render_csv());
                } else {
                    print!("{}", report.render_text());
                }
                Ok(())
            }
            Command::Pav { trials, ptar, llr_max, out } => {
                let records = read_trials(&trials)?;
                let mut scores = Vec::new();
                let mut labels = Vec::new();
                for r in &records {
                    if let Some(h) = r.label.hypothesis() {
                        scores.push(r.score);
                        labels.push(h);
                    }
                }
                let data = LabeledScores::new(scores, labels)?;
                let cal = make_calibrator(&data, ptar, llr_max)?;
                write_pav_calibrator(&out, &cal)?;
                println!(
                    "wrote PAV calibrator with {} knots to {}",
                    cal.knots().len(),
                    out.display()
                );
                Ok(())
            }
            Command::Weights { alpha, beta, tau, ptar, t_min, t_max, points, out } => {
                let tau = resolve_tau(tau, ptar)?;
                let params = WeightParams::new(alpha, beta, tau)?;
                let grid = omega_grid(&params, t_min, t_max, points)?;
                write_weight_grid(&out, &grid)?;
                println!("wrote {}-point weighting grid to {}", grid.len(), out.display());
                Ok(())
            }
        }
    }
}
