use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::model::{Connector, FuzzySystem, FuzzyVariable, VariableKind};
use super::FmlError;
use crate::Scalar;

/// Sample count of the uniform COG grid (inclusive endpoints).
pub const COG_SAMPLES: usize = 1001;

/// Term preferred when the label at the crisp value is a tie.
pub const NEUTRAL_TERM: &str = "UncertainSituation";

#[derive(Debug, Clone)]
pub struct InferenceOptions {
    pub cog_samples: usize,
    pub neutral_term: Option<String>,
}

impl Default for InferenceOptions {
    fn default() -> Self {
        Self {
            cog_samples: COG_SAMPLES,
            neutral_term: Some(NEUTRAL_TERM.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceResult<T> {
    pub variable: String,
    pub crisp: T,
    pub label: String,
    pub term_memberships: BTreeMap<String, T>,
    /// Rules with non-zero firing strength.
    pub fired_rules: BTreeMap<String, T>,
}

/// Center of gravity of `aggregate` over the variable's domain, sampled on
/// [`COG_SAMPLES`] evenly spaced points. Zero mass yields the default value.
pub fn defuzzify_cog<T: Scalar, F: Fn(T) -> T>(aggregate: F, variable: &FuzzyVariable<T>) -> T {
    cog_on_grid(aggregate, variable, COG_SAMPLES)
}

fn cog_on_grid<T: Scalar, F: Fn(T) -> T>(
    aggregate: F,
    variable: &FuzzyVariable<T>,
    samples: usize,
) -> T {
    let (left, right) = (variable.domain_left, variable.domain_right);
    let samples = samples.max(2);
    let step = (right - left) / T::from_usize(samples - 1).unwrap();
    let mut num = T::zero();
    let mut den = T::zero();
    for i in 0..samples {
        let x = if i == samples - 1 {
            right
        } else {
            left + step * T::from_usize(i).unwrap()
        };
        let mu = aggregate(x);
        num = num + x * mu;
        den = den + mu;
    }
    if den <= T::zero() {
        return variable.default_value;
    }
    variable.clamp(num / den)
}

impl<T: Scalar> FuzzySystem<T> {
    /// Mamdani inference for the system's only output variable.
    pub fn infer(&self, inputs: &HashMap<String, T>) -> Result<InferenceResult<T>, FmlError> {
        self.infer_with(inputs, None, &InferenceOptions::default())
    }

    /// Mamdani inference for one named output variable (or the sole output
    /// when `output` is `None`).
    pub fn infer_with(
        &self,
        inputs: &HashMap<String, T>,
        output: Option<&str>,
        options: &InferenceOptions,
    ) -> Result<InferenceResult<T>, FmlError> {
        let out_idx = match output {
            Some(name) => self
                .variable_index(name)
                .filter(|&i| self.variables()[i].kind == VariableKind::Output)
                .ok_or_else(|| FmlError::UnknownVariable(name.to_string()))?,
            None => {
                let outs: Vec<usize> = self
                    .variables()
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| v.kind == VariableKind::Output)
                    .map(|(i, _)| i)
                    .collect();
                if outs.len() != 1 {
                    return Err(FmlError::AmbiguousOutput(outs.len()));
                }
                outs[0]
            }
        };

        let crisp_inputs = self.crisp_inputs(inputs)?;
        let out_var = &self.variables()[out_idx];
        let mut levels = vec![T::zero(); out_var.terms.len()];
        let mut fired = BTreeMap::new();

        for (rule, resolved) in self.rules().iter().zip(&self.resolved) {
            let mut degrees = resolved.antecedent.iter().map(|&(vi, ti)| {
                let x = crisp_inputs[vi].expect("validated input");
                self.variables()[vi].terms[ti].degree(x)
            });
            let first = degrees.next().unwrap_or_else(T::zero);
            let combined = match rule.connector {
                Connector::And => degrees.fold(first, |acc, d| acc.min(d)),
                Connector::Or => degrees.fold(first, |acc, d| acc.max(d)),
            };
            let strength = combined * rule.weight;
            if strength > T::zero() {
                fired.insert(rule.name.clone(), strength);
            }
            for &(vi, ti) in &resolved.consequent {
                if vi == out_idx && strength > levels[ti] {
                    levels[ti] = strength;
                }
            }
        }

        let crisp = if levels.iter().all(|l| *l <= T::zero()) {
            out_var.default_value
        } else {
            let aggregate = |x: T| {
                out_var
                    .terms
                    .iter()
                    .zip(&levels)
                    .fold(T::zero(), |acc, (term, &level)| {
                        acc.max(level.min(term.degree(x)))
                    })
            };
            cog_on_grid(aggregate, out_var, options.cog_samples)
        };

        let term_memberships: BTreeMap<String, T> = out_var
            .terms
            .iter()
            .map(|t| (t.name.clone(), t.degree(crisp)))
            .collect();
        let label = label_at(out_var, crisp, options.neutral_term.as_deref());

        Ok(InferenceResult {
            variable: out_var.name.clone(),
            crisp,
            label,
            term_memberships,
            fired_rules: fired,
        })
    }

    /// Collects the crisp value of every input referenced by a rule.
    fn crisp_inputs(&self, inputs: &HashMap<String, T>) -> Result<Vec<Option<T>>, FmlError> {
        let mut crisp = vec![None; self.variables().len()];
        for resolved in &self.resolved {
            for &(vi, _) in &resolved.antecedent {
                if crisp[vi].is_some() {
                    continue;
                }
                let var = &self.variables()[vi];
                let x = *inputs
                    .get(&var.name)
                    .ok_or_else(|| FmlError::MissingInput(var.name.clone()))?;
                if !var.contains(x) {
                    return Err(FmlError::OutOfDomain {
                        variable: var.name.clone(),
                        value: x.as_f64(),
                    });
                }
                crisp[vi] = Some(x);
            }
        }
        Ok(crisp)
    }
}

/// Term with maximum membership at `x`. Ties go to `neutral` when it is
/// among them, then to the term whose centroid is nearest `x`, then to the
/// lexicographically smallest name.
pub(crate) fn label_at<T: Scalar>(variable: &FuzzyVariable<T>, x: T, neutral: Option<&str>) -> String {
    let Some(best) = variable
        .terms
        .iter()
        .map(|t| t.degree(x))
        .fold(None, |acc: Option<T>, d| Some(acc.map_or(d, |a| a.max(d))))
    else {
        return String::new();
    };
    let tol = T::epsilon() * T::lit(16.0);
    let mut tied: Vec<_> = variable
        .terms
        .iter()
        .filter(|t| (best - t.degree(x)).abs() <= tol)
        .collect();
    if let Some(n) = neutral {
        if let Some(t) = tied.iter().find(|t| t.name == n) {
            return t.name.clone();
        }
    }
    tied.sort_by(|a, b| {
        let da = (a.shape.centroid() - x).abs();
        let db = (b.shape.centroid() - x).abs();
        da.partial_cmp(&db)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.name.cmp(&b.name))
    });
    tied[0].name.clone()
}
