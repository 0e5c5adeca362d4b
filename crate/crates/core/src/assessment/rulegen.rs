use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::kb::CGS;
use super::{AssessmentError, CgsLabel};
use crate::fml::{Clause, FuzzyRule, FuzzyVariable};
use crate::go::Color;

/// Schema version written into the scheme file.
pub const SCHEME_VERSION: u32 = 1;

/// Relation weights per input: simulation numbers matter most.
pub const RELATION_WEIGHTS: [(&str, Color, f64); 6] = [
    ("BSN", Color::Black, 2.5),
    ("WSN", Color::White, 2.5),
    ("BWR", Color::Black, 2.0),
    ("WWR", Color::White, 2.0),
    ("BTMR", Color::Black, 1.0),
    ("WTMR", Color::White, 1.0),
];

/// One reference rule: 1-based index in the six-input base, the antecedent
/// terms in input order and the expected label.
pub type OracleRow = (usize, [&'static str; 6], CgsLabel);

const L: &str = "Low";
const M: &str = "Medium";
const H: &str = "High";

/// The published rows of the six-input base (first ten and last ten).
pub const RULE_ORACLE: [OracleRow; 20] = {
    use CgsLabel::{BlackPossibleAdvantage as Bpa, UncertainSituation as Us, WhitePossibleAdvantage as Wpa};
    [
        (1, [L, L, L, L, L, L], Us),
        (2, [L, L, L, L, L, H], Us),
        (3, [L, L, L, L, H, L], Us),
        (4, [L, L, L, L, H, H], Us),
        (5, [L, L, L, M, L, L], Us),
        (6, [L, L, L, M, L, H], Wpa),
        (7, [L, L, L, M, H, L], Us),
        (8, [L, L, L, M, H, H], Us),
        (9, [L, L, L, H, L, L], Wpa),
        (10, [L, L, L, H, L, H], Wpa),
        (315, [H, H, H, L, H, L], Bpa),
        (316, [H, H, H, L, H, H], Bpa),
        (317, [H, H, H, M, L, L], Bpa),
        (318, [H, H, H, M, L, H], Us),
        (319, [H, H, H, M, H, L], Bpa),
        (320, [H, H, H, M, H, H], Bpa),
        (321, [H, H, H, H, L, L], Us),
        (322, [H, H, H, H, L, H], Us),
        (323, [H, H, H, H, H, L], Us),
        (324, [H, H, H, H, H, H], Us),
    ]
};

const SIX_INPUTS: [&str; 6] = ["BSN", "WSN", "BWR", "WWR", "BTMR", "WTMR"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeVariable {
    pub name: String,
    pub side: Color,
    pub relation_weight: f64,
    pub terms: BTreeMap<String, f64>,
}

/// Scores a term combination as `S_B - S_W` and cuts the score into the
/// five output labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleGenScheme {
    pub version: u32,
    /// Ascending; a score `d` gets label index `#{t : d >= t}`.
    pub thresholds: [f64; 4],
    pub variables: Vec<SchemeVariable>,
}

impl RuleGenScheme {
    pub fn from_toml(text: &str) -> Result<Self, AssessmentError> {
        let scheme: Self =
            toml::from_str(text).map_err(|e| AssessmentError::Scheme(e.to_string()))?;
        scheme.validate()?;
        Ok(scheme)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scheme serializes")
    }

    /// The frozen scheme shipped with the crate.
    pub fn shipped() -> Self {
        Self::from_toml(include_str!("../../data/rulegen-scheme.toml"))
            .expect("shipped scheme is valid")
    }

    pub fn validate(&self) -> Result<(), AssessmentError> {
        let ok = self.thresholds.iter().all(|t| t.is_finite())
            && self.thresholds.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(AssessmentError::Scheme(
                "thresholds must be finite and strictly increasing".into(),
            ));
        }
        Ok(())
    }

    fn variable(&self, name: &str) -> Result<&SchemeVariable, AssessmentError> {
        self.variables
            .iter()
            .find(|v| v.name == name)
            .ok_or_else(|| AssessmentError::Scheme(format!("no weights for variable {name}")))
    }

    pub fn relation_weight(&self, variable: &str) -> Result<f64, AssessmentError> {
        Ok(self.variable(variable)?.relation_weight)
    }

    pub fn term_weight(&self, variable: &str, term: &str) -> Result<f64, AssessmentError> {
        self.variable(variable)?
            .terms
            .get(term)
            .copied()
            .ok_or_else(|| AssessmentError::Scheme(format!("no weight for {variable}.{term}")))
    }

    /// Black-minus-white score of an antecedent.
    pub fn score<'a>(
        &self,
        clauses: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<f64, AssessmentError> {
        let mut d = 0.0;
        for (var, term) in clauses {
            let v = self.variable(var)?;
            let w = v.relation_weight * self.term_weight(var, term)?;
            d += match v.side {
                Color::Black => w,
                Color::White => -w,
            };
        }
        Ok(d)
    }

    pub fn label(&self, score: f64) -> CgsLabel {
        let idx = self.thresholds.iter().filter(|&&t| score >= t).count();
        CgsLabel::ALL[idx]
    }
}

/// Full Cartesian product of the inputs' terms, last input varying fastest,
/// each rule labelled by the scheme. A six-input base is checked against the
/// reference rows.
pub fn generate_rulebase(
    scheme: &RuleGenScheme,
    inputs: &[FuzzyVariable<f64>],
) -> Result<Vec<FuzzyRule<f64>>, AssessmentError> {
    scheme.validate()?;
    for v in inputs {
        for t in &v.terms {
            scheme.term_weight(&v.name, &t.name)?;
        }
    }
    let total: usize = inputs.iter().map(|v| v.terms.len()).product();
    let mut rules = Vec::with_capacity(total);
    let mut digits = vec![0usize; inputs.len()];
    for k in 0..total {
        let clauses: Vec<Clause> = inputs
            .iter()
            .zip(&digits)
            .map(|(v, &t)| Clause::new(&v.name, &v.terms[t].name))
            .collect();
        let d = scheme.score(clauses.iter().map(|c| (c.variable.as_str(), c.term.as_str())))?;
        let label = scheme.label(d);
        let mut rule = FuzzyRule::new(
            format!("rule-{}", k + 1),
            clauses,
            vec![Clause::new(CGS, label.as_str())],
        );
        rule.network_address = inputs.first().and_then(|v| v.network_address.clone());
        rules.push(rule);
        for (i, v) in inputs.iter().enumerate().rev() {
            digits[i] += 1;
            if digits[i] < v.terms.len() {
                break;
            }
            digits[i] = 0;
        }
    }
    let names: Vec<&str> = inputs.iter().map(|v| v.name.as_str()).collect();
    if names == SIX_INPUTS {
        check_oracle(&rules)?;
    }
    Ok(rules)
}

/// Compares a six-input base with the reference rows.
pub fn check_oracle(rules: &[FuzzyRule<f64>]) -> Result<(), AssessmentError> {
    let mut violated = Vec::new();
    for (no, terms, label) in RULE_ORACLE {
        let ok = rules.get(no - 1).is_some_and(|r| {
            let ant_ok = r.antecedent.len() == 6
                && r.antecedent
                    .iter()
                    .zip(SIX_INPUTS.iter().zip(terms))
                    .all(|(c, (v, t))| c.variable == *v && c.term == t);
            ant_ok && r.consequent.iter().any(|c| c.term == label.as_str())
        });
        if !ok {
            violated.push(no);
        }
    }
    if violated.is_empty() {
        Ok(())
    } else {
        Err(AssessmentError::OracleMismatch(violated))
    }
}

/// Fraction of rules whose color-swapped antecedent maps to the mirrored
/// label. A diagnostic only.
pub fn mirror_fraction(rules: &[FuzzyRule<f64>]) -> f64 {
    let key = |clauses: &[Clause]| -> Vec<(String, String)> {
        let mut k: Vec<_> = clauses
            .iter()
            .map(|c| (c.variable.clone(), c.term.clone()))
            .collect();
        k.sort();
        k
    };
    let by_antecedent: HashMap<Vec<(String, String)>, &str> = rules
        .iter()
        .filter_map(|r| Some((key(&r.antecedent), r.consequent.first()?.term.as_str())))
        .collect();
    if rules.is_empty() {
        return 0.0;
    }
    let swap = |name: &str| match name.as_bytes().first() {
        Some(b'B') => format!("W{}", &name[1..]),
        Some(b'W') => format!("B{}", &name[1..]),
        _ => name.to_string(),
    };
    let hits = rules
        .iter()
        .filter(|r| {
            let mirrored: Vec<Clause> = r
                .antecedent
                .iter()
                .map(|c| Clause::new(swap(&c.variable), &c.term))
                .collect();
            let own = r.consequent.first().and_then(|c| c.term.parse::<CgsLabel>().ok());
            let other = by_antecedent
                .get(&key(&mirrored))
                .and_then(|t| t.parse::<CgsLabel>().ok());
            matches!((own, other), (Some(a), Some(b)) if a.mirror() == b)
        })
        .count();
    hits as f64 / rules.len() as f64
}

/// Searches term-weight orientations (ascending `1..n` or descending `n..1`
/// per input) for one that separates the reference rows by score, and
/// places the breakpoints. Among separating orientations the one with the
/// fewest descending inputs wins, then the lowest bitmask.
pub fn fit_scheme(inputs: &[FuzzyVariable<f64>]) -> Result<RuleGenScheme, AssessmentError> {
    let names: Vec<&str> = inputs.iter().map(|v| v.name.as_str()).collect();
    if names != SIX_INPUTS {
        return Err(AssessmentError::Scheme(
            "fitting needs the six standard inputs in order".into(),
        ));
    }
    let mut masks: Vec<u32> = (0..1u32 << inputs.len()).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    for mask in masks {
        let scheme = oriented(inputs, mask);
        if let Some(thresholds) = separate(&scheme) {
            return Ok(RuleGenScheme {
                thresholds,
                ..scheme
            });
        }
    }
    Err(AssessmentError::Scheme(
        "no term-weight orientation separates the reference rules".into(),
    ))
}

fn oriented(inputs: &[FuzzyVariable<f64>], mask: u32) -> RuleGenScheme {
    let variables = inputs
        .iter()
        .zip(RELATION_WEIGHTS)
        .enumerate()
        .map(|(i, (v, (_, side, rw)))| {
            let n = v.terms.len();
            let descending = mask & (1 << i) != 0;
            let terms = v
                .terms
                .iter()
                .enumerate()
                .map(|(k, t)| {
                    let w = if descending { n - k } else { k + 1 };
                    (t.name.clone(), w as f64)
                })
                .collect();
            SchemeVariable {
                name: v.name.clone(),
                side,
                relation_weight: rw,
                terms,
            }
        })
        .collect();
    RuleGenScheme {
        version: SCHEME_VERSION,
        thresholds: [0.0; 4],
        variables,
    }
}

/// Inner breakpoints sit midway between adjacent label groups; the outer
/// ones split the remaining score range evenly.
fn separate(scheme: &RuleGenScheme) -> Option<[f64; 4]> {
    let mut groups: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
    for (_, terms, label) in RULE_ORACLE {
        let d = scheme
            .score(SIX_INPUTS.iter().copied().zip(terms))
            .ok()?;
        let idx = label.index();
        let g = groups.entry(idx).or_insert((d, d));
        g.0 = g.0.min(d);
        g.1 = g.1.max(d);
    }
    let wpa = groups.get(&1)?;
    let us = groups.get(&2)?;
    let bpa = groups.get(&3)?;
    if !(wpa.1 < us.0 && us.1 < bpa.0) || groups.len() != 3 {
        return None;
    }
    let (lo, hi) = score_range(scheme);
    let t2 = (wpa.1 + us.0) / 2.0;
    let t3 = (us.1 + bpa.0) / 2.0;
    Some([(lo + t2) / 2.0, t2, t3, (t3 + hi) / 2.0])
}

fn score_range(scheme: &RuleGenScheme) -> (f64, f64) {
    let mut lo = 0.0;
    let mut hi = 0.0;
    for v in &scheme.variables {
        let ws = v.terms.values().map(|w| w * v.relation_weight);
        let (min, max) = ws.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), w| {
            (a.min(w), b.max(w))
        });
        match v.side {
            Color::Black => {
                lo += min;
                hi += max;
            }
            Color::White => {
                lo -= max;
                hi -= min;
            }
        }
    }
    (lo, hi)
}
