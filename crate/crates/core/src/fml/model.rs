use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use super::{FmlError, Trapezoid};
use crate::Scalar;

macro_rules! keyword_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
        pub enum $name {
            #[default]
            $($variant),+
        }

        impl $name {
            pub fn as_str(&self) -> &'static str {
                match self {
                    $(Self::$variant => $text),+
                }
            }
        }

        impl FromStr for $name {
            type Err = ();

            fn from_str(s: &str) -> Result<Self, ()> {
                $(if s.eq_ignore_ascii_case($text) {
                    return Ok(Self::$variant);
                })+
                Err(())
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

keyword_enum!(
    /// Direction of a fuzzy variable.
    VariableKind { Input => "Input", Output => "Output" }
);
keyword_enum!(Accumulation { Max => "MAX" });
keyword_enum!(Defuzzifier { Cog => "COG" });
keyword_enum!(ActivationMethod { Min => "MIN" });
keyword_enum!(AndMethod { Min => "MIN" });
keyword_enum!(OrMethod { Max => "MAX" });
keyword_enum!(Connector { And => "AND", Or => "OR" });

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyTerm<T> {
    pub name: String,
    pub shape: Trapezoid<T>,
    pub complement: bool,
}

impl<T: Scalar> FuzzyTerm<T> {
    pub fn new(name: impl Into<String>, shape: Trapezoid<T>) -> Self {
        Self {
            name: name.into(),
            shape,
            complement: false,
        }
    }

    /// Membership degree without a domain check.
    pub fn degree(&self, x: T) -> T {
        let mu = self.shape.eval(x);
        if self.complement {
            T::one() - mu
        } else {
            mu
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyVariable<T> {
    pub name: String,
    /// Opaque; carried through the codec, no effect on inference.
    pub scale: String,
    pub domain_left: T,
    pub domain_right: T,
    pub kind: VariableKind,
    pub accumulation: Accumulation,
    pub defuzzifier: Defuzzifier,
    pub default_value: T,
    pub network_address: Option<String>,
    pub terms: Vec<FuzzyTerm<T>>,
}

impl<T: Scalar> FuzzyVariable<T> {
    pub fn new(name: impl Into<String>, kind: VariableKind, domain: (T, T)) -> Self {
        Self {
            name: name.into(),
            scale: String::new(),
            domain_left: domain.0,
            domain_right: domain.1,
            kind,
            accumulation: Accumulation::Max,
            defuzzifier: Defuzzifier::Cog,
            default_value: domain.0,
            network_address: None,
            terms: Vec::new(),
        }
    }

    pub fn with_term(mut self, name: &str, params: [f64; 4]) -> Result<Self, FmlError> {
        let [a, b, c, d] = params.map(T::lit);
        self.terms.push(FuzzyTerm::new(name, Trapezoid::new(a, b, c, d)?));
        Ok(self)
    }

    pub fn with_default(mut self, value: T) -> Self {
        self.default_value = value;
        self
    }

    pub fn term(&self, name: &str) -> Option<&FuzzyTerm<T>> {
        self.terms.iter().find(|t| t.name == name)
    }

    pub fn term_index(&self, name: &str) -> Option<usize> {
        self.terms.iter().position(|t| t.name == name)
    }

    pub fn contains(&self, x: T) -> bool {
        x >= self.domain_left && x <= self.domain_right
    }

    pub fn clamp(&self, x: T) -> T {
        x.max(self.domain_left).min(self.domain_right)
    }

    /// Degree of `x` in the named term, rejecting values outside the domain.
    pub fn membership(&self, term: &str, x: T) -> Result<T, FmlError> {
        let t = self.term(term).ok_or_else(|| FmlError::UnknownTerm {
            variable: self.name.clone(),
            term: term.to_string(),
        })?;
        if !self.contains(x) {
            return Err(FmlError::OutOfDomain {
                variable: self.name.clone(),
                value: x.as_f64(),
            });
        }
        Ok(t.degree(x))
    }

    fn validate(&self) -> Result<(), FmlError> {
        if !(self.domain_left < self.domain_right) {
            return Err(FmlError::InvalidDomain(self.name.clone()));
        }
        if !self.contains(self.default_value) {
            return Err(FmlError::DefaultOutOfDomain(self.name.clone()));
        }
        let mut seen = HashSet::new();
        for term in &self.terms {
            if !seen.insert(term.name.as_str()) {
                return Err(FmlError::DuplicateTerm {
                    variable: self.name.clone(),
                    term: term.name.clone(),
                });
            }
            let (lo, hi) = term.shape.support();
            if lo < self.domain_left || hi > self.domain_right {
                return Err(FmlError::TermOutsideDomain {
                    variable: self.name.clone(),
                    term: term.name.clone(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub variable: String,
    pub term: String,
}

impl Clause {
    pub fn new(variable: impl Into<String>, term: impl Into<String>) -> Self {
        Self {
            variable: variable.into(),
            term: term.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyRule<T> {
    pub name: String,
    pub connector: Connector,
    pub and_method: AndMethod,
    pub or_method: OrMethod,
    pub weight: T,
    pub network_address: Option<String>,
    pub antecedent: Vec<Clause>,
    pub consequent: Vec<Clause>,
}

impl<T: Scalar> FuzzyRule<T> {
    pub fn new(name: impl Into<String>, antecedent: Vec<Clause>, consequent: Vec<Clause>) -> Self {
        Self {
            name: name.into(),
            connector: Connector::And,
            and_method: AndMethod::Min,
            or_method: OrMethod::Max,
            weight: T::one(),
            network_address: None,
            antecedent,
            consequent,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleBase<T> {
    pub name: String,
    pub activation_method: ActivationMethod,
    pub and_method: AndMethod,
    pub or_method: OrMethod,
    pub network_address: Option<String>,
    pub rules: Vec<FuzzyRule<T>>,
}

impl<T> RuleBase<T> {
    pub fn new(name: impl Into<String>, rules: Vec<FuzzyRule<T>>) -> Self {
        Self {
            name: name.into(),
            activation_method: ActivationMethod::Min,
            and_method: AndMethod::Min,
            or_method: OrMethod::Max,
            network_address: None,
            rules,
        }
    }
}

/// Clause resolved to (variable index, term index).
pub(super) type ResolvedClause = (usize, usize);

#[derive(Debug, Clone, PartialEq)]
pub(super) struct ResolvedRule {
    pub antecedent: Vec<ResolvedClause>,
    pub consequent: Vec<ResolvedClause>,
}

/// A validated fuzzy system. Immutable once built; every clause is resolved
/// against the knowledge base at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzySystem<T> {
    name: String,
    network_address: Option<String>,
    knowledge_base_address: Option<String>,
    variables: Vec<FuzzyVariable<T>>,
    rule_base: RuleBase<T>,
    pub(super) resolved: Vec<ResolvedRule>,
}

impl<T: Scalar> FuzzySystem<T> {
    pub fn new(
        name: impl Into<String>,
        variables: Vec<FuzzyVariable<T>>,
        rule_base: RuleBase<T>,
    ) -> Result<Self, FmlError> {
        Self::with_addresses(name, None, None, variables, rule_base)
    }

    pub fn with_addresses(
        name: impl Into<String>,
        network_address: Option<String>,
        knowledge_base_address: Option<String>,
        variables: Vec<FuzzyVariable<T>>,
        rule_base: RuleBase<T>,
    ) -> Result<Self, FmlError> {
        let mut seen = HashSet::new();
        for v in &variables {
            if !seen.insert(v.name.as_str()) {
                return Err(FmlError::DuplicateVariable(v.name.clone()));
            }
            v.validate()?;
        }
        let mut rule_names = HashSet::new();
        let mut resolved = Vec::with_capacity(rule_base.rules.len());
        for rule in &rule_base.rules {
            if !rule_names.insert(rule.name.as_str()) {
                return Err(FmlError::DuplicateRule(rule.name.clone()));
            }
            if !(rule.weight >= T::zero() && rule.weight <= T::one()) {
                return Err(FmlError::InvalidWeight(rule.name.clone()));
            }
            if rule.antecedent.is_empty() {
                return Err(FmlError::EmptyRulePart {
                    rule: rule.name.clone(),
                    part: "antecedent",
                });
            }
            if rule.consequent.is_empty() {
                return Err(FmlError::EmptyRulePart {
                    rule: rule.name.clone(),
                    part: "consequent",
                });
            }
            let mut antecedent = Vec::with_capacity(rule.antecedent.len());
            for (i, clause) in rule.antecedent.iter().enumerate() {
                let (vi, ti) = resolve(&variables, &rule.name, i, clause)?;
                if variables[vi].kind != VariableKind::Input {
                    return Err(FmlError::AntecedentNotInput {
                        rule: rule.name.clone(),
                        variable: clause.variable.clone(),
                    });
                }
                antecedent.push((vi, ti));
            }
            let mut consequent = Vec::with_capacity(rule.consequent.len());
            for (i, clause) in rule.consequent.iter().enumerate() {
                let (vi, ti) = resolve(&variables, &rule.name, i, clause)?;
                if variables[vi].kind != VariableKind::Output {
                    return Err(FmlError::ConsequentNotOutput {
                        rule: rule.name.clone(),
                        variable: clause.variable.clone(),
                    });
                }
                consequent.push((vi, ti));
            }
            resolved.push(ResolvedRule {
                antecedent,
                consequent,
            });
        }
        Ok(Self {
            name: name.into(),
            network_address,
            knowledge_base_address,
            variables,
            rule_base,
            resolved,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn network_address(&self) -> Option<&str> {
        self.network_address.as_deref()
    }

    pub fn knowledge_base_address(&self) -> Option<&str> {
        self.knowledge_base_address.as_deref()
    }

    pub fn variables(&self) -> &[FuzzyVariable<T>] {
        &self.variables
    }

    pub fn variable(&self, name: &str) -> Option<&FuzzyVariable<T>> {
        self.variables.iter().find(|v| v.name == name)
    }

    pub(super) fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn inputs(&self) -> impl Iterator<Item = &FuzzyVariable<T>> {
        self.variables.iter().filter(|v| v.kind == VariableKind::Input)
    }

    pub fn outputs(&self) -> impl Iterator<Item = &FuzzyVariable<T>> {
        self.variables.iter().filter(|v| v.kind == VariableKind::Output)
    }

    pub fn rule_base(&self) -> &RuleBase<T> {
        &self.rule_base
    }

    pub fn rules(&self) -> &[FuzzyRule<T>] {
        &self.rule_base.rules
    }
}

fn resolve<T: Scalar>(
    variables: &[FuzzyVariable<T>],
    rule: &str,
    index: usize,
    clause: &Clause,
) -> Result<ResolvedClause, FmlError> {
    let unresolved = || FmlError::UnresolvedClause {
        rule: rule.to_string(),
        index,
        variable: clause.variable.clone(),
        term: clause.term.clone(),
    };
    let vi = variables
        .iter()
        .position(|v| v.name == clause.variable)
        .ok_or_else(unresolved)?;
    let ti = variables[vi].term_index(&clause.term).ok_or_else(unresolved)?;
    Ok((vi, ti))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bsn() -> FuzzyVariable<f64> {
        FuzzyVariable::new("BSN", VariableKind::Input, (0.0, 20000.0))
            .with_term("Low", [0.0, 0.0, 2556.0, 7122.0])
            .unwrap()
            .with_term("Medium", [2556.0, 7122.0, 12637.0, 17203.0])
            .unwrap()
            .with_term("High", [12637.0, 17203.0, 20000.0, 20000.0])
            .unwrap()
    }

    fn out() -> FuzzyVariable<f64> {
        FuzzyVariable::new("CGS", VariableKind::Output, (0.0, 100.0))
            .with_term("Mid", [25.0, 50.0, 50.0, 75.0])
            .unwrap()
            .with_default(50.0)
    }

    #[test]
    fn membership_checks_domain() {
        let v = bsn();
        assert_eq!(v.membership("Low", 0.0).unwrap(), 1.0);
        assert!(matches!(
            v.membership("Low", -1.0),
            Err(FmlError::OutOfDomain { .. })
        ));
        assert!(matches!(
            v.membership("Huge", 1.0),
            Err(FmlError::UnknownTerm { .. })
        ));
    }

    #[test]
    fn complement_inverts_degree() {
        let mut v = bsn();
        v.terms[0].complement = true;
        assert_eq!(v.membership("Low", 0.0).unwrap(), 0.0);
        assert_eq!(v.membership("Low", 4839.0).unwrap(), 0.5);
    }

    #[test]
    fn unresolved_clause_names_rule_and_clause() {
        let rule = FuzzyRule::new(
            "rule-7",
            vec![Clause::new("BSN", "Low"), Clause::new("XSN", "Low")],
            vec![Clause::new("CGS", "Mid")],
        );
        let err = FuzzySystem::new("s", vec![bsn(), out()], RuleBase::new("rb", vec![rule]))
            .unwrap_err();
        assert_eq!(
            err,
            FmlError::UnresolvedClause {
                rule: "rule-7".into(),
                index: 1,
                variable: "XSN".into(),
                term: "Low".into(),
            }
        );
        assert!(err.to_string().contains("rule-7"));
        assert!(err.to_string().contains("XSN"));
    }

    #[test]
    fn consequent_must_be_output() {
        let rule = FuzzyRule::new(
            "r",
            vec![Clause::new("BSN", "Low")],
            vec![Clause::new("BSN", "High")],
        );
        let err = FuzzySystem::new("s", vec![bsn(), out()], RuleBase::new("rb", vec![rule]))
            .unwrap_err();
        assert!(matches!(err, FmlError::ConsequentNotOutput { .. }));
    }

    #[test]
    fn term_outside_domain_rejected() {
        let v = FuzzyVariable::new("X", VariableKind::Input, (0.0, 10.0))
            .with_term("Big", [5.0, 8.0, 11.0, 12.0])
            .unwrap();
        let err = FuzzySystem::new("s", vec![v], RuleBase::new("rb", vec![])).unwrap_err();
        assert!(matches!(err, FmlError::TermOutsideDomain { .. }));
    }

    #[test]
    fn duplicate_names_rejected() {
        let err = FuzzySystem::new("s", vec![bsn(), bsn()], RuleBase::new("rb", vec![]))
            .unwrap_err();
        assert_eq!(err, FmlError::DuplicateVariable("BSN".into()));
        let v = bsn().with_term("Low", [0.0, 0.0, 1.0, 2.0]).unwrap();
        let err = FuzzySystem::new("s", vec![v], RuleBase::new("rb", vec![])).unwrap_err();
        assert!(matches!(err, FmlError::DuplicateTerm { .. }));
    }

    #[test]
    fn inverted_domain_and_default_rejected() {
        let v = FuzzyVariable::<f64>::new("X", VariableKind::Input, (1.0, 1.0));
        assert!(matches!(
            FuzzySystem::new("s", vec![v], RuleBase::new("rb", vec![])),
            Err(FmlError::InvalidDomain(_))
        ));
        let v = FuzzyVariable::<f64>::new("X", VariableKind::Input, (0.0, 1.0)).with_default(2.0);
        assert!(matches!(
            FuzzySystem::new("s", vec![v], RuleBase::new("rb", vec![])),
            Err(FmlError::DefaultOutOfDomain(_))
        ));
    }

    #[test]
    fn keyword_parsing_is_case_insensitive() {
        assert_eq!("input".parse::<VariableKind>(), Ok(VariableKind::Input));
        assert_eq!("Output".parse::<VariableKind>(), Ok(VariableKind::Output));
        assert_eq!("or".parse::<Connector>(), Ok(Connector::Or));
        assert!("PROD".parse::<AndMethod>().is_err());
        assert_eq!(Connector::And.to_string(), "AND");
    }
}
