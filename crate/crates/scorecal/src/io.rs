//! Text file formats: trial lists, calibration models, PAV knot tables,
//! and sampled weighting grids.
//!
//! Every format is line-oriented, comma- or `key = value`-structured,
//! and starts with a version tag comment. Floats are written with 18
//! significant digits so that read-write round trips are bit-exact.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::Path;

use crate::calibration::AffineModel;
use crate::error::{Error, Result};
use crate::objective::{ObjectiveParams, TrialSet};
use crate::pav::PavCalibrator;
use crate::psr::{Hypothesis, RuleParams};
use crate::weighting::WeightGrid;

pub const TRIALS_VERSION_TAG: &str = "# scorecal-trials-v1";
pub const MODEL_VERSION_TAG: &str = "# scorecal-model-v1";
pub const PAV_VERSION_TAG: &str = "# scorecal-pav-v1";
pub const WEIGHTS_VERSION_TAG: &str = "# scorecal-weights-v1";

const TRIALS_HEADER: &str = "trial_id,score,label";

/// Format a float with enough digits to round-trip exactly.
pub(crate) fn fmt_float(x: f64) -> String {
    format!("{x:.17e}")
}

/// Trial label as stored in score files. `Unknown` marks apply-only
/// trials without ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Target,
    NonTarget,
    Unknown,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Target => "tar",
            Label::NonTarget => "non",
            Label::Unknown => "unk",
        }
    }

    pub fn parse(s: &str) -> Option<Label> {
        match s {
            "tar" => Some(Label::Target),
            "non" => Some(Label::NonTarget),
            "unk" => Some(Label::Unknown),
            _ => None,
        }
    }

    pub fn hypothesis(self) -> Option<Hypothesis> {
        match self {
            Label::Target => Some(Hypothesis::Target),
            Label::NonTarget => Some(Hypothesis::NonTarget),
            Label::Unknown => None,
        }
    }
}

impl From<Hypothesis> for Label {
    fn from(h: Hypothesis) -> Label {
        match h {
            Hypothesis::Target => Label::Target,
            Hypothesis::NonTarget => Label::NonTarget,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One line of a trial file.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial_id: String,
    pub score: f64,
    pub label: Label,
}

/// Write trial records with the version tag and column header.
pub fn write_trials(path: &Path, records: &[TrialRecord]) -> Result<()> {
    let mut out = String::with_capacity(records.len() * 32 + 64);
    out.push_str(TRIALS_VERSION_TAG);
    out.push('\n');
    out.push_str(TRIALS_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.trial_id);
        out.push(',');
        out.push_str(&fmt_float(r.score));
        out.push(',');
        out.push_str(r.label.as_str());
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Read trial records. Comment lines and the column header are skipped;
/// parse errors name the 1-based line they occurred on, and duplicate
/// trial ids are rejected.
pub fn read_trials(path: &Path) -> Result<Vec<TrialRecord>> {
    let text = fs::read_to_string(path)?;
    let mut records = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() || line.starts_with('#') || line == TRIALS_HEADER {
            continue;
        }
        let mut fields = line.split(',');
        let (id, score_s, label_s) = match (fields.next(), fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), Some(c), None) => (a, b, c),
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected 3 comma-separated fields, got {line:?}"),
                })
            }
        };
        if id.is_empty() {
            return Err(Error::Parse { line: line_no, message: "empty trial_id".into() });
        }
        let score: f64 = score_s.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("invalid score {score_s:?}"),
        })?;
        if !score.is_finite() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("score must be finite, got {score_s:?}"),
            });
        }
        let label = Label::parse(label_s).ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("invalid label {label_s:?} (expected tar, non or unk)"),
        })?;
        if !seen.insert(id.to_string()) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("duplicate trial_id {id:?}"),
            });
        }
        records.push(TrialRecord { trial_id: id.to_string(), score, label });
    }
    Ok(records)
}

/// Split labeled records into a target/non-target trial set. `unk`
/// records are skipped; both labeled classes must be present.
pub fn to_trial_set(records: &[TrialRecord]) -> Result<TrialSet> {
    let mut tar = Vec::new();
    let mut non = Vec::new();
    for r in records {
        match r.label {
            Label::Target => tar.push(r.score),
            Label::NonTarget => non.push(r.score),
            Label::Unknown => {}
        }
    }
    TrialSet::new(tar, non)
}

/// Persist an affine calibration model together with the objective
/// parameters it was trained under.
pub fn write_affine_model(path: &Path, model: &AffineModel, params: &ObjectiveParams) -> Result<()> {
    let text = format!(
        "{MODEL_VERSION_TAG}\nA = {}\nB = {}\nalpha = {}\nbeta = {}\ntau = {}\n",
        fmt_float(model.scale),
        fmt_float(model.offset),
        fmt_float(params.rule().alpha()),
        fmt_float(params.rule().beta()),
        fmt_float(params.tau()),
    );
    fs::write(path, text)?;
    Ok(())
}

fn parse_kv_lines(text: &str) -> Result<Vec<(usize, String, f64)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("expected `key = value`, got {line:?}"),
        })?;
        let v: f64 = value.trim().parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("invalid number {:?}", value.trim()),
        })?;
        out.push((line_no, key.trim().to_string(), v));
    }
    Ok(out)
}

fn expect_tag(text: &str, tag: &str, what: &str) -> Result<()> {
    match text.lines().next() {
        Some(first) if first.trim_end_matches('\r') == tag => Ok(()),
        other => Err(Error::Parse {
            line: 1,
            message: format!("not a {what} file: expected {tag:?}, found {other:?}"),
        }),
    }
}

/// Read an affine model file written by [`write_affine_model`].
pub fn read_affine_model(path: &Path) -> Result<(AffineModel, ObjectiveParams)> {
    let text = fs::read_to_string(path)?;
    expect_tag(&text, MODEL_VERSION_TAG, "model")?;
    let mut scale = None;
    let mut offset = None;
    let mut alpha = None;
    let mut beta = None;
    let mut tau = None;
    for (line, key, v) in parse_kv_lines(&text)? {
        match key.as_str() {
            "A" => scale = Some(v),
            "B" => offset = Some(v),
            "alpha" => alpha = Some(v),
            "beta" => beta = Some(v),
            "tau" => tau = Some(v),
            _ => {
                return Err(Error::Parse { line, message: format!("unknown field {key:?}") });
            }
        }
    }
    let missing = |name: &str| Error::Parse { line: 1, message: format!("missing field {name:?}") };
    let model = AffineModel::new(scale.ok_or_else(|| missing("A"))?, offset.ok_or_else(|| missing("B"))?)?;
    let rule = RuleParams::new(alpha.ok_or_else(|| missing("alpha"))?, beta.ok_or_else(|| missing("beta"))?)?;
    let params = ObjectiveParams::new(rule, tau.ok_or_else(|| missing("tau"))?)?;
    Ok((model, params))
}

/// Persist a PAV calibrator as its knot table.
pub fn write_pav_calibrator(path: &Path, cal: &PavCalibrator) -> Result<()> {
    let mut out = String::new();
    out.push_str(PAV_VERSION_TAG);
    out.push('\n');
    out.push_str(&format!("llr_max = {}\n", fmt_float(cal.llr_max())));
    out.push_str("score,llr\n");
    for &(s, l) in cal.knots() {
        out.push_str(&format!("{},{}\n", fmt_float(s), fmt_float(l)));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Read a PAV calibrator knot table.
pub fn read_pav_calibrator(path: &Path) -> Result<PavCalibrator> {
    let text = fs::read_to_string(path)?;
    expect_tag(&text, PAV_VERSION_TAG, "PAV calibrator")?;
    let mut llr_max = None;
    let mut knots = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() || line.starts_with('#') || line == "score,llr" {
            continue;
        }
        if let Some((key, value)) = line.split_once('=') {
            if key.trim() == "llr_max" {
                llr_max = Some(value.trim().parse::<f64>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("invalid llr_max {:?}", value.trim()),
                })?);
                continue;
            }
            return Err(Error::Parse { line: line_no, message: format!("unknown field {line:?}") });
        }
        let (s, l) = line.split_once(',').ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("expected `score,llr`, got {line:?}"),
        })?;
        let s: f64 = s.trim().parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("invalid score {s:?}"),
        })?;
        let l: f64 = l.trim().parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("invalid llr {l:?}"),
        })?;
        knots.push((s, l));
    }
    let llr_max = llr_max.ok_or(Error::Parse { line: 1, message: "missing llr_max".into() })?;
    PavCalibrator::from_knots(knots, llr_max)
}

/// The two calibrator kinds `apply` accepts, detected by version tag.
pub enum CalibratorFile {
    Affine(AffineModel, ObjectiveParams),
    Pav(PavCalibrator),
}

impl CalibratorFile {
    pub fn map_scores(&self, scores: &[f64]) -> Vec<f64> {
        match self {
            CalibratorFile::Affine(m, _) => m.apply(scores),
            CalibratorFile::Pav(c) => c.apply(scores),
        }
    }
}

/// Read either calibrator format, dispatching on the version tag.
pub fn read_calibrator(path: &Path) -> Result<CalibratorFile> {
    let text = fs::read_to_string(path)?;
    match text.lines().next().map(|l| l.trim_end_matches('\r')) {
        Some(MODEL_VERSION_TAG) => {
            let (m, p) = read_affine_model(path)?;
            Ok(CalibratorFile::Affine(m, p))
        }
        Some(PAV_VERSION_TAG) => Ok(CalibratorFile::Pav(read_pav_calibrator(path)?)),
        other => Err(Error::Parse {
            line: 1,
            message: format!("unrecognized calibrator file (first line {other:?})"),
        }),
    }
}

/// Write a sampled weighting as CSV with the `t,omega` header.
pub fn write_weight_grid(path: &Path, grid: &WeightGrid) -> Result<()> {
    let mut out = String::with_capacity(grid.len() * 48 + 32);
    out.push_str(WEIGHTS_VERSION_TAG);
    out.push('\n');
    out.push_str("t,omega\n");
    for (t, w) in grid.thresholds().iter().zip(grid.weights()) {
        out.push_str(&format!("{t:.12e},{w:.12e}\n"));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Read a weighting CSV back into a grid.
pub fn read_weight_grid(path: &Path) -> Result<WeightGrid> {
    let text = fs::read_to_string(path)?;
    expect_tag(&text, WEIGHTS_VERSION_TAG, "weight grid")?;
    let mut t = Vec::new();
    let mut w = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() || line.starts_with('#') || line == "t,omega" {
            continue;
        }
        let (a, b) = line.split_once(',').ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("expected `t,omega`, got {line:?}"),
        })?;
        t.push(a.trim().parse::<f64>().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("invalid threshold {a:?}"),
        })?);
        w.push(b.trim().parse::<f64>().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("invalid weight {b:?}"),
        })?);
    }
    WeightGrid::new(t, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weighting::{omega_grid, WeightParams};
    use tempfile::tempdir;

    fn record(id: &str, score: f64, label: Label) -> TrialRecord {
        TrialRecord { trial_id: id.into(), score, label }
    }

    #[test]
    fn trials_round_trip_exactly() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("trials.csv");
        let mut state = 1234u64;
        let mut records = Vec::new();
        for i in 0..1000 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let score = f64::from_bits((state >> 12) | 0x3ff0000000000000) - 1.5; // in [-0.5, 0.5)
            let label = match i % 3 {
                0 => Label::Target,
                1 => Label::NonTarget,
                _ => Label::Unknown,
            };
            records.push(record(&format!("id{i}"), score * 1e3, label));
        }
        write_trials(&path, &records).unwrap();
        let back = read_trials(&path).unwrap();
        assert_eq!(records, back);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.csv");

        fs::write(&path, "x1,abc,tar\n").unwrap();
        match read_trials(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }

        fs::write(&path, "x1,0.5,tar\nx2,0.5,bogus\n").unwrap();
        match read_trials(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn single_data_line_parses() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("one.csv");
        fs::write(&path, "x1,0.5,tar\n").unwrap();
        let recs = read_trials(&path).unwrap();
        assert_eq!(recs, vec![record("x1", 0.5, Label::Target)]);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("dup.csv");
        fs::write(&path, "a,1.0,tar\na,2.0,non\n").unwrap();
        match read_trials(&path) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("duplicate"));
            }
            other => panic!("expected duplicate error, got {other:?}"),
        }
    }

    #[test]
    fn trial_set_skips_unknown_and_requires_both_classes() {
        let recs = vec![
            record("a", 1.0, Label::Target),
            record("b", -1.0, Label::NonTarget),
            record("c", 9.0, Label::Unknown),
        ];
        let set = to_trial_set(&recs).unwrap();
        assert_eq!(set.tar(), &[1.0]);
        assert_eq!(set.non(), &[-1.0]);
        assert!(to_trial_set(&recs[..1]).is_err());
    }

    #[test]
    fn model_round_trip_is_lossless() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("model.txt");
        let model = AffineModel::new(2.000000000000016, -0.9999999999999123).unwrap();
        let params = ObjectiveParams::new(RuleParams::new(0.5, 2.0).unwrap(), -4.371).unwrap();
        write_affine_model(&path, &model, &params).unwrap();
        let (m, p) = read_affine_model(&path).unwrap();
        assert_eq!(m.scale.to_bits(), model.scale.to_bits());
        assert_eq!(m.offset.to_bits(), model.offset.to_bits());
        assert_eq!(p.rule().alpha().to_bits(), 0.5f64.to_bits());
        assert_eq!(p.tau().to_bits(), (-4.371f64).to_bits());
    }

    #[test]
    fn model_reader_rejects_other_files() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("notmodel.txt");
        fs::write(&path, "# something-else\nA = 1\n").unwrap();
        assert!(read_affine_model(&path).is_err());
    }

    #[test]
    fn pav_calibrator_round_trip_is_lossless() {
        use crate::pav::{make_calibrator, LabeledScores};
        use crate::psr::Hypothesis::{NonTarget, Target};
        let dir = tempdir().unwrap();
        let path = dir.path().join("pav.txt");
        let data = LabeledScores::new(
            vec![0.31, -1.07, 2.002, 0.1, -0.44, 1.2, 0.9],
            vec![Target, NonTarget, Target, NonTarget, NonTarget, Target, NonTarget],
        )
        .unwrap();
        let cal = make_calibrator(&data, 0.3, 100.0).unwrap();
        write_pav_calibrator(&path, &cal).unwrap();
        let back = read_pav_calibrator(&path).unwrap();
        assert_eq!(cal.knots().len(), back.knots().len());
        for (a, b) in cal.knots().iter().zip(back.knots()) {
            assert_eq!(a.0.to_bits(), b.0.to_bits());
            assert_eq!(a.1.to_bits(), b.1.to_bits());
        }
        assert_eq!(cal.llr_max().to_bits(), back.llr_max().to_bits());
    }

    #[test]
    fn weight_grid_round_trip_within_format_precision() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("grid.csv");
        let grid = omega_grid(&WeightParams::new(1.0, 1.0, 0.0).unwrap(), -5.0, 5.0, 101).unwrap();
        write_weight_grid(&path, &grid).unwrap();
        let back = read_weight_grid(&path).unwrap();
        for (a, b) in grid.weights().iter().zip(back.weights()) {
            assert!((a - b).abs() <= 1e-11);
        }
    }
}
