use quick_xml::events::{BytesDecl, BytesEnd, BytesStart, BytesText, Event};
use quick_xml::{Reader, Writer};

use super::model::{Clause, FuzzyRule, FuzzySystem, FuzzyTerm, FuzzyVariable, RuleBase};
use super::{FmlError, Trapezoid};
use crate::Scalar;

const FML_NAMESPACE: &str = "http://www.ieee1855.org";

/// Minimal element tree produced from the quick-xml event stream.
#[derive(Debug, Default)]
struct Node {
    name: String,
    attrs: Vec<(String, String)>,
    children: Vec<Node>,
    text: String,
}

impl Node {
    fn attr(&self, key: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    fn required(&self, key: &str) -> Result<&str, FmlError> {
        self.attr(key).ok_or_else(|| FmlError::MissingAttribute {
            element: self.name.clone(),
            attribute: key.to_string(),
        })
    }

    fn invalid(&self, key: &str, value: &str) -> FmlError {
        FmlError::InvalidAttribute {
            element: self.name.clone(),
            attribute: key.to_string(),
            value: value.to_string(),
        }
    }

    fn number<T: Scalar>(&self, key: &str, default: Option<T>) -> Result<T, FmlError> {
        match (self.attr(key), default) {
            (Some(raw), _) => raw
                .trim()
                .parse::<T>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| self.invalid(key, raw)),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(FmlError::MissingAttribute {
                element: self.name.clone(),
                attribute: key.to_string(),
            }),
        }
    }

    fn keyword<K: std::str::FromStr + Default>(&self, key: &str) -> Result<K, FmlError> {
        match self.attr(key) {
            Some(raw) => raw.trim().parse().map_err(|_| self.invalid(key, raw)),
            None => Ok(K::default()),
        }
    }

    fn unexpected(&self, child: &Node) -> FmlError {
        FmlError::UnexpectedElement {
            parent: self.name.clone(),
            found: child.name.clone(),
        }
    }
}

fn local_name(raw: &[u8]) -> String {
    let s = String::from_utf8_lossy(raw);
    match s.rsplit_once(':') {
        Some((_, local)) => local.to_string(),
        None => s.into_owned(),
    }
}

fn element(start: &BytesStart<'_>) -> Result<Node, FmlError> {
    let mut node = Node {
        name: local_name(start.name().as_ref()),
        ..Node::default()
    };
    for attr in start.attributes() {
        let attr = attr.map_err(|e| FmlError::Markup(e.to_string()))?;
        let value = attr
            .unescape_value()
            .map_err(|e| FmlError::Markup(e.to_string()))?;
        node.attrs
            .push((local_name(attr.key.as_ref()), value.into_owned()));
    }
    Ok(node)
}

fn read_tree(document: &str) -> Result<Node, FmlError> {
    let mut reader = Reader::from_str(document);
    reader.config_mut().trim_text(true);
    let mut stack: Vec<Node> = Vec::new();
    let mut root = None;
    loop {
        let event = reader
            .read_event()
            .map_err(|e| FmlError::Markup(format!("at byte {}: {e}", reader.buffer_position())))?;
        match event {
            Event::Start(start) => stack.push(element(&start)?),
            Event::Empty(start) => {
                let node = element(&start)?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(node),
                    None => root = Some(node),
                }
            }
            Event::End(_) => {
                let node = stack
                    .pop()
                    .ok_or_else(|| FmlError::Markup("unbalanced end tag".into()))?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(node),
                    None => {
                        if root.is_some() {
                            return Err(FmlError::Markup("multiple root elements".into()));
                        }
                        root = Some(node);
                    }
                }
            }
            Event::Text(text) => {
                let text = text
                    .unescape()
                    .map_err(|e| FmlError::Markup(e.to_string()))?;
                if let Some(top) = stack.last_mut() {
                    top.text.push_str(text.trim());
                } else if !text.trim().is_empty() {
                    return Err(FmlError::Markup("text outside the root element".into()));
                }
            }
            Event::CData(data) => {
                if let Some(top) = stack.last_mut() {
                    top.text.push_str(String::from_utf8_lossy(&data).trim());
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if !stack.is_empty() {
        return Err(FmlError::Markup(format!(
            "unclosed element <{}>",
            stack.last().map(|n| n.name.as_str()).unwrap_or_default()
        )));
    }
    root.ok_or_else(|| FmlError::Markup("empty document".into()))
}

/// Parses a document in the FML dialect (fuzzySystem / knowledgeBase /
/// fuzzyVariable / fuzzyTerm / trapezoidShape / mamdaniRuleBase / rule).
pub fn parse_fml<T: Scalar>(document: &str) -> Result<FuzzySystem<T>, FmlError> {
    let root = read_tree(document)?;
    if root.name != "fuzzySystem" {
        return Err(FmlError::UnexpectedElement {
            parent: "document".into(),
            found: root.name,
        });
    }
    let name = root.attr("name").unwrap_or_default().to_string();
    let mut variables = Vec::new();
    let mut kb_address = None;
    let mut rule_base = None;
    for child in &root.children {
        match child.name.as_str() {
            "knowledgeBase" => {
                kb_address = child.attr("networkAddress").map(str::to_string);
                for var in &child.children {
                    if var.name != "fuzzyVariable" {
                        return Err(child.unexpected(var));
                    }
                    variables.push(parse_variable(var)?);
                }
            }
            "mamdaniRuleBase" => {
                if rule_base.is_some() {
                    return Err(root.unexpected(child));
                }
                rule_base = Some(parse_rule_base(child)?);
            }
            _ => return Err(root.unexpected(child)),
        }
    }
    let rule_base = rule_base.unwrap_or_else(|| RuleBase::new("", Vec::new()));
    FuzzySystem::with_addresses(
        name,
        root.attr("networkAddress").map(str::to_string),
        kb_address,
        variables,
        rule_base,
    )
}

fn parse_variable<T: Scalar>(node: &Node) -> Result<FuzzyVariable<T>, FmlError> {
    let name = node.required("name")?.to_string();
    let left: T = node.number("domainleft", None)?;
    let right: T = node.number("domainright", None)?;
    let mut var = FuzzyVariable::new(name, node.keyword("type")?, (left, right));
    var.scale = node.attr("scale").unwrap_or_default().to_string();
    var.accumulation = node.keyword("accumulation")?;
    var.defuzzifier = node.keyword("defuzzifier")?;
    var.default_value = node.number("defaultValue", Some(T::zero()))?;
    var.network_address = node.attr("networkAddress").map(str::to_string);
    for term in &node.children {
        if term.name != "fuzzyTerm" {
            return Err(node.unexpected(term));
        }
        var.terms.push(parse_term(term)?);
    }
    Ok(var)
}

fn parse_term<T: Scalar>(node: &Node) -> Result<FuzzyTerm<T>, FmlError> {
    let name = node.required("name")?.to_string();
    let complement = match node.attr("complement").map(str::trim) {
        None => false,
        Some(v) if v.eq_ignore_ascii_case("false") => false,
        Some(v) if v.eq_ignore_ascii_case("true") => true,
        Some(v) => return Err(node.invalid("complement", v)),
    };
    let mut shape = None;
    for child in &node.children {
        if child.name != "trapezoidShape" {
            return Err(FmlError::UnsupportedShape(child.name.clone()));
        }
        if shape.is_some() {
            return Err(node.unexpected(child));
        }
        shape = Some(Trapezoid::new(
            child.number("param1", None)?,
            child.number("param2", None)?,
            child.number("param3", None)?,
            child.number("param4", None)?,
        )?);
    }
    let shape = shape.ok_or_else(|| FmlError::MissingAttribute {
        element: "fuzzyTerm".into(),
        attribute: "trapezoidShape".into(),
    })?;
    Ok(FuzzyTerm {
        name,
        shape,
        complement,
    })
}

fn parse_rule_base<T: Scalar>(node: &Node) -> Result<RuleBase<T>, FmlError> {
    let mut rb = RuleBase::new(node.attr("name").unwrap_or_default(), Vec::new());
    rb.activation_method = node.keyword("activationMethod")?;
    rb.and_method = node.keyword("andMethod")?;
    rb.or_method = node.keyword("orMethod")?;
    rb.network_address = node.attr("networkAddress").map(str::to_string);
    for rule in &node.children {
        if rule.name != "rule" {
            return Err(node.unexpected(rule));
        }
        rb.rules.push(parse_rule(rule)?);
    }
    Ok(rb)
}

fn parse_rule<T: Scalar>(node: &Node) -> Result<FuzzyRule<T>, FmlError> {
    let mut rule = FuzzyRule::new(node.required("name")?, Vec::new(), Vec::new());
    rule.connector = node.keyword("connector")?;
    rule.and_method = node.keyword("andMethod")?;
    rule.or_method = node.keyword("orMethod")?;
    rule.weight = node.number("weight", Some(T::one()))?;
    rule.network_address = node.attr("networkAddress").map(str::to_string);
    for part in &node.children {
        match part.name.as_str() {
            "antecedent" => rule.antecedent = parse_clauses(part)?,
            "consequent" => {
                for child in &part.children {
                    match child.name.as_str() {
                        "then" => rule.consequent.extend(parse_clauses(child)?),
                        "clause" => rule.consequent.push(parse_clause(child)?),
                        _ => return Err(part.unexpected(child)),
                    }
                }
            }
            _ => return Err(node.unexpected(part)),
        }
    }
    Ok(rule)
}

fn parse_clauses(node: &Node) -> Result<Vec<Clause>, FmlError> {
    node.children
        .iter()
        .map(|c| {
            if c.name == "clause" {
                parse_clause(c)
            } else {
                Err(node.unexpected(c))
            }
        })
        .collect()
}

fn parse_clause(node: &Node) -> Result<Clause, FmlError> {
    let mut variable = None;
    let mut term = None;
    for child in &node.children {
        match child.name.as_str() {
            "variable" => variable = Some(child.text.clone()),
            "term" => term = Some(child.text.clone()),
            _ => return Err(node.unexpected(child)),
        }
    }
    let missing = |what: &str| FmlError::MissingAttribute {
        element: "clause".into(),
        attribute: what.into(),
    };
    Ok(Clause {
        variable: variable.ok_or_else(|| missing("variable"))?,
        term: term.ok_or_else(|| missing("term"))?,
    })
}

/// Emits the system in the same dialect [`parse_fml`] reads.
pub fn serialize_fml<T: Scalar>(system: &FuzzySystem<T>) -> String {
    let mut w = Writer::new_with_indent(Vec::new(), b' ', 2);
    write_system(&mut w, system).expect("writing to a Vec cannot fail");
    let mut out = String::from_utf8(w.into_inner()).expect("quick-xml emits UTF-8");
    out.push('\n');
    out
}

type XmlResult = std::io::Result<()>;

fn start(name: &str, attrs: &[(&str, String)]) -> BytesStart<'static> {
    let mut el = BytesStart::new(name.to_string());
    for (k, v) in attrs {
        el.push_attribute((*k, v.as_str()));
    }
    el
}

fn opt_attr(attrs: &mut Vec<(&'static str, String)>, key: &'static str, value: Option<&str>) {
    if let Some(v) = value {
        attrs.push((key, v.to_string()));
    }
}

fn write_system<T: Scalar>(w: &mut Writer<Vec<u8>>, sys: &FuzzySystem<T>) -> XmlResult {
    w.write_event(Event::Decl(BytesDecl::new("1.0", Some("UTF-8"), None)))?;
    let mut attrs = vec![
        ("xmlns", FML_NAMESPACE.to_string()),
        ("name", sys.name().to_string()),
    ];
    opt_attr(&mut attrs, "networkAddress", sys.network_address());
    w.write_event(Event::Start(start("fuzzySystem", &attrs)))?;

    let mut attrs = Vec::new();
    opt_attr(&mut attrs, "networkAddress", sys.knowledge_base_address());
    w.write_event(Event::Start(start("knowledgeBase", &attrs)))?;
    for var in sys.variables() {
        let mut attrs = vec![
            ("name", var.name.clone()),
            ("scale", var.scale.clone()),
            ("domainleft", var.domain_left.to_string()),
            ("domainright", var.domain_right.to_string()),
            ("type", var.kind.to_string()),
            ("accumulation", var.accumulation.to_string()),
            ("defuzzifier", var.defuzzifier.to_string()),
            ("defaultValue", var.default_value.to_string()),
        ];
        opt_attr(&mut attrs, "networkAddress", var.network_address.as_deref());
        w.write_event(Event::Start(start("fuzzyVariable", &attrs)))?;
        for term in &var.terms {
            w.write_event(Event::Start(start(
                "fuzzyTerm",
                &[
                    ("name", term.name.clone()),
                    ("complement", term.complement.to_string()),
                ],
            )))?;
            let [a, b, c, d] = term.shape.params();
            w.write_event(Event::Empty(start(
                "trapezoidShape",
                &[
                    ("param1", a.to_string()),
                    ("param2", b.to_string()),
                    ("param3", c.to_string()),
                    ("param4", d.to_string()),
                ],
            )))?;
            w.write_event(Event::End(BytesEnd::new("fuzzyTerm")))?;
        }
        w.write_event(Event::End(BytesEnd::new("fuzzyVariable")))?;
    }
    w.write_event(Event::End(BytesEnd::new("knowledgeBase")))?;

    let rb = sys.rule_base();
    let mut attrs = vec![
        ("name", rb.name.clone()),
        ("activationMethod", rb.activation_method.to_string()),
        ("andMethod", rb.and_method.to_string()),
        ("orMethod", rb.or_method.to_string()),
    ];
    opt_attr(&mut attrs, "networkAddress", rb.network_address.as_deref());
    w.write_event(Event::Start(start("mamdaniRuleBase", &attrs)))?;
    for rule in &rb.rules {
        let mut attrs = vec![
            ("name", rule.name.clone()),
            ("andMethod", rule.and_method.to_string()),
            ("orMethod", rule.or_method.to_string()),
            ("connector", rule.connector.to_string()),
            ("weight", rule.weight.to_string()),
        ];
        opt_attr(&mut attrs, "networkAddress", rule.network_address.as_deref());
        w.write_event(Event::Start(start("rule", &attrs)))?;
        w.write_event(Event::Start(start("antecedent", &[])))?;
        for clause in &rule.antecedent {
            write_clause(w, clause)?;
        }
        w.write_event(Event::End(BytesEnd::new("antecedent")))?;
        w.write_event(Event::Start(start("consequent", &[])))?;
        w.write_event(Event::Start(start("then", &[])))?;
        for clause in &rule.consequent {
            write_clause(w, clause)?;
        }
        w.write_event(Event::End(BytesEnd::new("then")))?;
        w.write_event(Event::End(BytesEnd::new("consequent")))?;
        w.write_event(Event::End(BytesEnd::new("rule")))?;
    }
    w.write_event(Event::End(BytesEnd::new("mamdaniRuleBase")))?;
    w.write_event(Event::End(BytesEnd::new("fuzzySystem")))?;
    Ok(())
}

fn write_clause(w: &mut Writer<Vec<u8>>, clause: &Clause) -> XmlResult {
    w.write_event(Event::Start(start("clause", &[])))?;
    for (tag, text) in [("variable", &clause.variable), ("term", &clause.term)] {
        w.write_event(Event::Start(start(tag, &[])))?;
        w.write_event(Event::Text(BytesText::new(text)))?;
        w.write_event(Event::End(BytesEnd::new(tag)))?;
    }
    w.write_event(Event::End(BytesEnd::new("clause")))
}
