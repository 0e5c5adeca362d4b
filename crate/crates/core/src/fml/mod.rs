//! Fuzzy Markup Language subset: document model, XML codec and Mamdani
//! inference (MIN activation, MIN/MAX connectors, MAX accumulation, COG).

mod infer;
mod model;
mod shape;
mod xml;

pub use infer::{defuzzify_cog, InferenceOptions, InferenceResult, COG_SAMPLES, NEUTRAL_TERM};
pub use model::{
    Accumulation, ActivationMethod, AndMethod, Clause, Connector, Defuzzifier, FuzzyRule,
    FuzzySystem, FuzzyTerm, FuzzyVariable, OrMethod, RuleBase, VariableKind,
};
pub use shape::Trapezoid;
pub use xml::{parse_fml, serialize_fml};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FmlError {
    #[error("malformed FML markup: {0}")]
    Markup(String),
    #[error("unexpected element <{found}> inside <{parent}>")]
    UnexpectedElement { parent: String, found: String },
    #[error("unsupported membership shape <{0}>; only trapezoidShape is supported")]
    UnsupportedShape(String),
    #[error("<{element}> is missing required attribute `{attribute}`")]
    MissingAttribute { element: String, attribute: String },
    #[error("<{element}> has invalid {attribute}=\"{value}\"")]
    InvalidAttribute {
        element: String,
        attribute: String,
        value: String,
    },
    #[error("trapezoid parameters {params:?} are not ordered a <= b <= c <= d")]
    InvalidTrapezoid { params: [f64; 4] },
    #[error("variable `{0}` has an empty or inverted domain")]
    InvalidDomain(String),
    #[error("default value of `{0}` lies outside its domain")]
    DefaultOutOfDomain(String),
    #[error("term `{term}` of `{variable}` extends outside the variable domain")]
    TermOutsideDomain { variable: String, term: String },
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("duplicate term `{term}` in variable `{variable}`")]
    DuplicateTerm { variable: String, term: String },
    #[error("duplicate rule name `{0}`")]
    DuplicateRule(String),
    #[error("rule `{rule}` has an empty {part}")]
    EmptyRulePart { rule: String, part: &'static str },
    #[error("rule `{rule}` clause {index}: {variable}/{term} does not resolve")]
    UnresolvedClause {
        rule: String,
        index: usize,
        variable: String,
        term: String,
    },
    #[error("rule `{rule}` uses non-output variable `{variable}` in its consequent")]
    ConsequentNotOutput { rule: String, variable: String },
    #[error("rule `{rule}` uses output variable `{variable}` in its antecedent")]
    AntecedentNotInput { rule: String, variable: String },
    #[error("rule `{0}` has a weight outside [0, 1]")]
    InvalidWeight(String),
    #[error("no crisp value supplied for input variable `{0}`")]
    MissingInput(String),
    #[error("value {value} is outside the domain of `{variable}`")]
    OutOfDomain { variable: String, value: f64 },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown term `{term}` in variable `{variable}`")]
    UnknownTerm { variable: String, term: String },
    #[error("system declares {0} output variables; name the one to infer")]
    AmbiguousOutput(usize),
}
