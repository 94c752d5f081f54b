//! Constraint languages: named relations over one finite domain, plus the
//! line-oriented text format.
//!
//! ```text
//! # comment
//! domain 3 a b c        # labels optional; defaults are 0,1,...
//! relation neq arity 2
//! a b
//! b a
//! end
//! ```
//!
//! Tuples may use labels or numeric indices. Canonical printing sorts tuples
//! lexicographically and relations by name; parsers accept any order.

use std::collections::BTreeMap;
use std::path::Path;

use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::relation::Relation;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintLanguage {
    domain: DomainSpec,
    relations: BTreeMap<String, Relation>,
}

impl ConstraintLanguage {
    pub fn new(domain: DomainSpec) -> ConstraintLanguage {
        ConstraintLanguage {
            domain,
            relations: BTreeMap::new(),
        }
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn add_relation(&mut self, name: impl Into<String>, relation: Relation) -> Result<()> {
        let name = name.into();
        if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c == '#') {
            return Err(Error::arg(format!("invalid relation name {name:?}")));
        }
        if self.relations.contains_key(&name) {
            return Err(Error::arg(format!("duplicate relation name {name:?}")));
        }
        if let Some(max) = relation.max_element() {
            if max >= self.domain.size() {
                return Err(Error::arg(format!(
                    "relation {name:?} mentions element {max}, domain size is {}",
                    self.domain.size()
                )));
            }
        }
        self.relations.insert(name, relation);
        Ok(())
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&String, &Relation)> {
        self.relations.iter()
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("domain {}", self.domain.size()));
        for l in self.domain.labels() {
            out.push(' ');
            out.push_str(l);
        }
        out.push('\n');
        for (name, rel) in &self.relations {
            out.push_str(&format!("relation {} arity {}\n", name, rel.arity()));
            for t in rel.tuples() {
                let line: Vec<&str> = t.iter().map(|&e| self.domain.label(e)).collect();
                out.push_str(&line.join(" "));
                out.push('\n');
            }
            out.push_str("end\n");
        }
        out
    }

    pub fn parse(text: &str) -> Result<ConstraintLanguage> {
        let mut lang: Option<ConstraintLanguage> = None;
        let mut current: Option<(String, usize, Vec<Vec<usize>>, usize)> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let line = strip_comment(raw);
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.is_empty() {
                continue;
            }
            match tokens[0] {
                "domain" => {
                    if lang.is_some() {
                        return Err(Error::parse(lineno, "duplicate domain line"));
                    }
                    if tokens.len() < 2 {
                        return Err(Error::parse(lineno, "domain line needs a size"));
                    }
                    let size: usize = tokens[1]
                        .parse()
                        .map_err(|_| Error::parse(lineno, "bad domain size"))?;
                    let domain = if tokens.len() == 2 {
                        DomainSpec::new(size)
                    } else {
                        let labels = tokens[2..].iter().map(|s| s.to_string()).collect();
                        DomainSpec::with_labels(size, labels)
                    }
                    .map_err(|e| Error::parse(lineno, e))?;
                    lang = Some(ConstraintLanguage::new(domain));
                }
                "relation" => {
                    if current.is_some() {
                        return Err(Error::parse(lineno, "relation block not closed with end"));
                    }
                    if tokens.len() != 4 || tokens[2] != "arity" {
                        return Err(Error::parse(
                            lineno,
                            "expected: relation <name> arity <k>",
                        ));
                    }
                    let arity: usize = tokens[3]
                        .parse()
                        .map_err(|_| Error::parse(lineno, "bad arity"))?;
                    if arity == 0 {
                        return Err(Error::parse(lineno, "arity must be at least 1"));
                    }
                    current = Some((tokens[1].to_string(), arity, Vec::new(), lineno));
                }
                "end" => {
                    let (name, arity, tuples, _) = current
                        .take()
                        .ok_or_else(|| Error::parse(lineno, "end outside a relation block"))?;
                    let lang = lang
                        .as_mut()
                        .ok_or_else(|| Error::parse(lineno, "domain line must come first"))?;
                    let rel =
                        Relation::new(arity, tuples).map_err(|e| Error::parse(lineno, e))?;
                    lang.add_relation(name, rel)
                        .map_err(|e| Error::parse(lineno, e))?;
                }
                _ => {
                    let lang_ref = lang
                        .as_ref()
                        .ok_or_else(|| Error::parse(lineno, "domain line must come first"))?;
                    let (_, arity, tuples, _) = current
                        .as_mut()
                        .ok_or_else(|| Error::parse(lineno, "tuple outside a relation block"))?;
                    if tokens.len() != *arity {
                        return Err(Error::parse(
                            lineno,
                            format!("expected {} entries, got {}", arity, tokens.len()),
                        ));
                    }
                    let tuple: Vec<usize> = tokens
                        .iter()
                        .map(|tok| {
                            lang_ref.domain.resolve(tok).ok_or_else(|| {
                                Error::parse(lineno, format!("unknown element {tok:?}"))
                            })
                        })
                        .collect::<Result<_>>()?;
                    tuples.push(tuple);
                }
            }
        }
        if let Some((name, _, _, start)) = current {
            return Err(Error::parse(
                start,
                format!("relation {name:?} is missing its end line"),
            ));
        }
        lang.ok_or_else(|| Error::parse(1, "missing domain line"))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<ConstraintLanguage> {
        let text = std::fs::read_to_string(path)?;
        ConstraintLanguage::parse(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}
