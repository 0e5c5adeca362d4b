use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::features::MoveFeatures;
use super::kb::CGS;
use super::{AssessmentError, CgsLabel};
use crate::fml::FuzzySystem;
use crate::go::Color;

/// Inference starts once more than this many moves have been played.
pub const ASSESSMENT_START: u32 = 10;

/// Most recent features of each color.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LatestFeatures {
    pub black: Option<MoveFeatures>,
    pub white: Option<MoveFeatures>,
}

impl LatestFeatures {
    pub fn update(&mut self, features: MoveFeatures) {
        match features.color {
            Color::Black => self.black = Some(features),
            Color::White => self.white = Some(features),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CgsInputs {
    pub bsn: f64,
    pub wsn: f64,
    pub bwr: f64,
    pub wwr: f64,
    pub btmr: f64,
    pub wtmr: f64,
}

impl CgsInputs {
    pub fn from_features(black: &MoveFeatures, white: &MoveFeatures) -> Self {
        Self {
            bsn: f64::from(black.sn),
            wsn: f64::from(white.sn),
            bwr: black.wr,
            wwr: white.wr,
            btmr: black.tmr(),
            wtmr: white.tmr(),
        }
    }

    pub fn named(&self) -> [(&'static str, f64); 6] {
        [
            ("BSN", self.bsn),
            ("WSN", self.wsn),
            ("BWR", self.bwr),
            ("WWR", self.wwr),
            ("BTMR", self.btmr),
            ("WTMR", self.wtmr),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CgsRecord {
    pub move_no: u32,
    /// Values as observed, before clamping.
    pub inputs: CgsInputs,
    #[serde(rename = "crisp")]
    pub crisp_cgs: f64,
    pub label: CgsLabel,
    /// Inputs that fell outside their domain and were clamped.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub clamped: Vec<String>,
}

/// Current game situation after `move_no`, or `None` before assessment
/// starts. Inputs absent from `system` (TMR for the four-input variant) are
/// carried in the record but not inferred on.
pub fn assess_move(
    latest: &LatestFeatures,
    system: &FuzzySystem<f64>,
    move_no: u32,
) -> Result<Option<CgsRecord>, AssessmentError> {
    if move_no <= ASSESSMENT_START {
        return Ok(None);
    }
    let (Some(black), Some(white)) = (&latest.black, &latest.white) else {
        return Err(AssessmentError::MissingColor(move_no));
    };
    let inputs = CgsInputs::from_features(black, white);
    assess_inputs(inputs, system, move_no).map(Some)
}

/// Inference on explicit crisp inputs, clamping each to its domain.
pub fn assess_inputs(
    inputs: CgsInputs,
    system: &FuzzySystem<f64>,
    move_no: u32,
) -> Result<CgsRecord, AssessmentError> {
    let mut crisp = HashMap::new();
    let mut clamped = Vec::new();
    for (name, value) in inputs.named() {
        let Some(var) = system.variable(name) else {
            continue;
        };
        let c = var.clamp(value);
        if c != value || value.is_nan() {
            clamped.push(name.to_string());
        }
        crisp.insert(name.to_string(), if value.is_nan() { var.domain_left } else { c });
    }
    let result = system.infer_with(&crisp, Some(CGS), &Default::default())?;
    Ok(CgsRecord {
        move_no,
        inputs,
        crisp_cgs: result.crisp,
        label: result.label.parse()?,
        clamped,
    })
}
