use serde::{Deserialize, Serialize};

use super::{AssessmentError, CgsLabel};
use crate::fml::{FuzzyVariable, VariableKind};

pub const CGS: &str = "CGS";

/// Summary statistics of one feature over a reference set of games.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariableStats {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
    /// Spread between the minimum and the mean.
    pub std1: f64,
    /// Spread between the mean and the maximum.
    pub std2: f64,
    /// Spread after outlier removal.
    pub std3: f64,
}

impl VariableStats {
    fn check(&self, name: &'static str) -> Result<(), AssessmentError> {
        let finite = [self.min, self.mean, self.max, self.std1, self.std2, self.std3]
            .iter()
            .all(|v| v.is_finite());
        let spreads = self.std1 >= 0.0 && self.std2 >= 0.0 && self.std3 > 0.0;
        if !finite || !spreads || self.min >= self.max || !(self.min..=self.max).contains(&self.mean) {
            return Err(AssessmentError::DegenerateStats(name));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KbStats {
    pub sn: VariableStats,
    pub wr: VariableStats,
    pub tmr: VariableStats,
}

impl KbStats {
    /// Statistics collected over 48 reference games.
    pub const REFERENCE: KbStats = KbStats {
        sn: VariableStats {
            min: 3420.0,
            mean: 9883.0,
            max: 14999.0,
            std1: 2762.0,
            std2: 1421.56,
            std3: 1450.62,
        },
        wr: VariableStats {
            min: 0.2,
            mean: 0.49,
            max: 0.6,
            std1: 0.09,
            std2: 0.07,
            std3: 0.05,
        },
        tmr: VariableStats {
            min: 0.0,
            mean: 0.382,
            max: 0.5,
            std1: 0.11,
            std2: 0.09,
            std3: 0.03,
        },
    };
}

impl Default for KbStats {
    fn default() -> Self {
        Self::REFERENCE
    }
}

/// The published simulation-number sets. Their derivation from the
/// statistics is not recoverable, so they are used as given.
const SN_SETS: [(&str, [f64; 4]); 3] = [
    ("Low", [0.0, 0.0, 2556.0, 7122.0]),
    ("Medium", [2556.0, 7122.0, 12637.0, 17203.0]),
    ("High", [12637.0, 17203.0, 20000.0, 20000.0]),
];

const TMR_SETS: [(&str, [f64; 4]); 2] = [
    ("Low", [0.0, 0.0, 30.0, 45.0]),
    ("High", [30.0, 45.0, 100.0, 100.0]),
];

const CGS_SETS: [[f64; 4]; 5] = [
    [0.0, 0.0, 15.0, 25.0],
    [15.0, 25.0, 37.5, 47.5],
    [37.5, 47.5, 52.5, 62.5],
    [52.5, 62.5, 75.0, 85.0],
    [75.0, 85.0, 100.0, 100.0],
];

const ADDRESS: &str = "127.0.0.1";

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

/// Win-rate sets: the medium core spans `mean ± std3` and each ramp is
/// `0.8 · std3` wide, which gives 0.40/0.44/0.54/0.58 for the reference
/// statistics.
fn wr_sets(stats: &VariableStats) -> [(&'static str, [f64; 4]); 3] {
    let core_lo = round4(stats.mean - stats.std3);
    let core_hi = round4(stats.mean + stats.std3);
    let ramp = 0.8 * stats.std3;
    let lo = round4((core_lo - ramp).max(0.0));
    let hi = round4((core_hi + ramp).min(1.0));
    [
        ("Low", [0.0, 0.0, lo, core_lo]),
        ("Medium", [lo, core_lo, core_hi, hi]),
        ("High", [core_hi, hi, 1.0, 1.0]),
    ]
}

fn input(
    name: &str,
    domain: (f64, f64),
    sets: &[(&str, [f64; 4])],
) -> Result<FuzzyVariable<f64>, AssessmentError> {
    let mut v = FuzzyVariable::new(name, VariableKind::Input, domain).with_default(0.0);
    v.network_address = Some(ADDRESS.to_string());
    for (term, params) in sets {
        v = v.with_term(term, *params)?;
    }
    Ok(v)
}

/// The CGS output variable, terms ordered from White's side to Black's.
pub fn cgs_variable() -> FuzzyVariable<f64> {
    let mut v = FuzzyVariable::new(CGS, VariableKind::Output, (0.0, 100.0)).with_default(50.0);
    v.network_address = Some(ADDRESS.to_string());
    for (label, params) in CgsLabel::ALL.iter().zip(CGS_SETS) {
        v = v.with_term(label.as_str(), params).expect("static sets are valid");
    }
    v
}

/// Six input variables (BSN, WSN, BWR, WWR, BTMR, WTMR) followed by CGS.
pub fn build_default_kb(stats: &KbStats) -> Result<Vec<FuzzyVariable<f64>>, AssessmentError> {
    stats.sn.check("SN")?;
    stats.wr.check("WR")?;
    stats.tmr.check("TMR")?;
    let wr = wr_sets(&stats.wr);
    Ok(vec![
        input("BSN", (0.0, 20000.0), &SN_SETS)?,
        input("WSN", (0.0, 20000.0), &SN_SETS)?,
        input("BWR", (0.0, 1.0), &wr)?,
        input("WWR", (0.0, 1.0), &wr)?,
        input("BTMR", (0.0, 100.0), &TMR_SETS)?,
        input("WTMR", (0.0, 100.0), &TMR_SETS)?,
        cgs_variable(),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(v: &FuzzyVariable<f64>) -> Vec<[f64; 4]> {
        v.terms
            .iter()
            .map(|t| t.shape.params())
            .collect()
    }

    #[test]
    fn reference_stats_give_published_sets() {
        let kb = build_default_kb(&KbStats::REFERENCE).unwrap();
        let names: Vec<&str> = kb.iter().map(|v| v.name.as_str()).collect();
        assert_eq!(names, ["BSN", "WSN", "BWR", "WWR", "BTMR", "WTMR", "CGS"]);
        assert_eq!(
            params(&kb[0]),
            [
                [0.0, 0.0, 2556.0, 7122.0],
                [2556.0, 7122.0, 12637.0, 17203.0],
                [12637.0, 17203.0, 20000.0, 20000.0]
            ]
        );
        assert_eq!(
            params(&kb[2]),
            [
                [0.0, 0.0, 0.40, 0.44],
                [0.40, 0.44, 0.54, 0.58],
                [0.54, 0.58, 1.0, 1.0]
            ]
        );
        assert_eq!(params(&kb[6]), CGS_SETS);
        assert_eq!(kb[6].default_value, 50.0);
    }

    #[test]
    fn every_variable_is_a_partition_of_unity() {
        for v in build_default_kb(&KbStats::REFERENCE).unwrap() {
            let span = v.domain_right - v.domain_left;
            for i in 0..=20000 {
                let x = v.domain_left + span * i as f64 / 20000.0;
                let sum: f64 = v.terms.iter().map(|t| t.degree(x)).sum();
                assert!((sum - 1.0).abs() < 1e-9, "{} at {x}: {sum}", v.name);
            }
        }
    }

    #[test]
    fn cgs_sets_mirror_about_fifty() {
        let v = cgs_variable();
        for x in 0..=100 {
            let x = x as f64;
            for (i, t) in v.terms.iter().enumerate() {
                let m = &v.terms[4 - i];
                assert!((t.degree(x) - m.degree(100.0 - x)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_stats_are_rejected() {
        let mut s = KbStats::REFERENCE;
        s.sn.max = s.sn.min;
        assert_eq!(build_default_kb(&s), Err(AssessmentError::DegenerateStats("SN")));
        let mut s = KbStats::REFERENCE;
        s.wr.mean = 0.9;
        assert_eq!(build_default_kb(&s), Err(AssessmentError::DegenerateStats("WR")));
    }
}
