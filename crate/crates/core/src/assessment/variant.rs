use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, LazyLock};

use serde::{Deserialize, Serialize};

use super::kb::{build_default_kb, KbStats};
use super::rulegen::{generate_rulebase, RuleGenScheme};
use super::AssessmentError;
use crate::fml::{parse_fml, FuzzySystem, RuleBase};

const ADDRESS: &str = "127.0.0.1";

static FML1: LazyLock<Arc<FuzzySystem<f64>>> = LazyLock::new(|| {
    Arc::new(parse_fml(FmlVariant::Fml1.shipped_xml()).expect("shipped fml-1 parses"))
});
static FML2: LazyLock<Arc<FuzzySystem<f64>>> = LazyLock::new(|| {
    Arc::new(parse_fml(FmlVariant::Fml2.shipped_xml()).expect("shipped fml-2 parses"))
});

/// Which knowledge base drives inference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FmlVariant {
    /// Simulation numbers and win rates only.
    #[serde(rename = "fml-1")]
    Fml1,
    /// Adds the top-move rates.
    #[serde(rename = "fml-2")]
    Fml2,
}

impl FmlVariant {
    pub const ALL: [FmlVariant; 2] = [FmlVariant::Fml1, FmlVariant::Fml2];

    pub fn as_str(self) -> &'static str {
        match self {
            FmlVariant::Fml1 => "fml-1",
            FmlVariant::Fml2 => "fml-2",
        }
    }

    pub fn input_count(self) -> usize {
        match self {
            FmlVariant::Fml1 => 4,
            FmlVariant::Fml2 => 6,
        }
    }

    pub fn shipped_xml(self) -> &'static str {
        match self {
            FmlVariant::Fml1 => include_str!("../../data/fml-1.xml"),
            FmlVariant::Fml2 => include_str!("../../data/fml-2.xml"),
        }
    }

    /// The shipped system, parsed once.
    pub fn system(self) -> Arc<FuzzySystem<f64>> {
        match self {
            FmlVariant::Fml1 => Arc::clone(&FML1),
            FmlVariant::Fml2 => Arc::clone(&FML2),
        }
    }

    /// Builds the system from statistics and a scheme.
    pub fn build(
        self,
        scheme: &RuleGenScheme,
        stats: &KbStats,
    ) -> Result<FuzzySystem<f64>, AssessmentError> {
        let mut kb = build_default_kb(stats)?;
        let output = kb.pop().expect("kb ends with the output");
        kb.truncate(self.input_count());
        let rules = generate_rulebase(scheme, &kb)?;
        kb.push(output);
        let mut rule_base = RuleBase::new("ruleBase1", rules);
        rule_base.network_address = Some(ADDRESS.to_string());
        Ok(FuzzySystem::with_addresses(
            "GameSystem",
            Some(ADDRESS.to_string()),
            Some(ADDRESS.to_string()),
            kb,
            rule_base,
        )?)
    }
}

impl fmt::Display for FmlVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FmlVariant {
    type Err = AssessmentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "fml-1" | "fml1" | "1" => Ok(FmlVariant::Fml1),
            "fml-2" | "fml2" | "2" => Ok(FmlVariant::Fml2),
            _ => Err(AssessmentError::UnknownVariant(s.to_string())),
        }
    }
}
