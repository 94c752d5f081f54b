//! CSP instances with an optional global cardinality constraint, plus the
//! instance file format:
//!
//! ```text
//! use lang.cl
//! vars 4
//! constraint neq v0 v1
//! constraint neq v1 v2
//! cardinality r:1 g:2 b:1
//! ```
//!
//! The `use` path is resolved relative to the instance file. Scopes may
//! repeat a variable.

use std::path::Path;

use crate::cardinality::CardinalityVector;
use crate::error::{Error, Result};
use crate::language::{strip_comment, ConstraintLanguage};
use crate::relation::Relation;

/// One constraint: a relation name from the language applied to a scope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub relation: String,
    pub scope: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    language: ConstraintLanguage,
    variables: usize,
    constraints: Vec<Constraint>,
    cardinality: Option<CardinalityVector>,
}

impl Instance {
    pub fn new(language: ConstraintLanguage, variables: usize) -> Instance {
        Instance {
            language,
            variables,
            constraints: Vec::new(),
            cardinality: None,
        }
    }

    pub fn language(&self) -> &ConstraintLanguage {
        &self.language
    }

    pub fn variable_count(&self) -> usize {
        self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn cardinality(&self) -> Option<&CardinalityVector> {
        self.cardinality.as_ref()
    }

    pub fn set_cardinality(&mut self, pi: Option<CardinalityVector>) -> Result<()> {
        if let Some(v) = &pi {
            if v.domain_size() != self.language.domain().size() {
                return Err(Error::arg("cardinality vector over the wrong domain"));
            }
        }
        self.cardinality = pi;
        Ok(())
    }

    pub fn add_constraint(&mut self, relation: impl Into<String>, scope: Vec<usize>) -> Result<()> {
        let relation = relation.into();
        let rel = self
            .language
            .relation(&relation)
            .ok_or_else(|| Error::arg(format!("unknown relation {relation:?}")))?;
        if rel.arity() != scope.len() {
            return Err(Error::arg(format!(
                "relation {relation:?} has arity {}, scope has {} variables",
                rel.arity(),
                scope.len()
            )));
        }
        if let Some(&v) = scope.iter().find(|&&v| v >= self.variables) {
            return Err(Error::arg(format!(
                "variable v{} out of range (instance has {} variables)",
                v, self.variables
            )));
        }
        self.constraints.push(Constraint { relation, scope });
        Ok(())
    }

    /// The relation a constraint refers to.
    pub fn relation_of(&self, c: &Constraint) -> &Relation {
        self.language
            .relation(&c.relation)
            .expect("constraints are validated on insertion")
    }

    /// Whether an assignment satisfies every constraint (ignores cardinality).
    pub fn satisfies(&self, assignment: &[usize]) -> bool {
        self.constraints.iter().all(|c| {
            let tuple: Vec<usize> = c.scope.iter().map(|&v| assignment[v]).collect();
            self.relation_of(c).contains(&tuple)
        })
    }

    /// Serializes the instance; `language_file` is the path written to the
    /// `use` line.
    pub fn to_text(&self, language_file: &str) -> String {
        let mut out = String::new();
        out.push_str(&format!("use {}\n", language_file));
        out.push_str(&format!("vars {}\n", self.variables));
        for c in &self.constraints {
            out.push_str(&format!("constraint {}", c.relation));
            for &v in &c.scope {
                out.push_str(&format!(" v{v}"));
            }
            out.push('\n');
        }
        if let Some(pi) = &self.cardinality {
            out.push_str(&format!(
                "cardinality {}\n",
                pi.display(self.language.domain())
            ));
        }
        out
    }

    /// Parses an instance given a loader for the `use` line.
    pub fn parse(
        text: &str,
        load_language: impl FnOnce(&str) -> Result<ConstraintLanguage>,
    ) -> Result<Instance> {
        let mut load_language = Some(load_language);
        let mut instance: Option<Instance> = None;
        let mut language: Option<ConstraintLanguage> = None;
        let mut pending: Vec<(usize, Vec<String>)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let line = strip_comment(raw);
            let tokens: Vec<String> = line.split_whitespace().map(|s| s.to_string()).collect();
            if tokens.is_empty() {
                continue;
            }
            match tokens[0].as_str() {
                "use" => {
                    if language.is_some() {
                        return Err(Error::parse(lineno, "duplicate use line"));
                    }
                    if tokens.len() != 2 {
                        return Err(Error::parse(lineno, "expected: use <language-file>"));
                    }
                    let loader = load_language
                        .take()
                        .ok_or_else(|| Error::parse(lineno, "duplicate use line"))?;
                    language = Some(loader(&tokens[1])?);
                }
                "vars" => {
                    if instance.is_some() {
                        return Err(Error::parse(lineno, "duplicate vars line"));
                    }
                    let lang = language
                        .take()
                        .ok_or_else(|| Error::parse(lineno, "use line must come before vars"))?;
                    let n: usize = tokens
                        .get(1)
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| Error::parse(lineno, "bad variable count"))?;
                    instance = Some(Instance::new(lang, n));
                }
                "constraint" | "cardinality" => {
                    pending.push((lineno, tokens));
                }
                other => {
                    return Err(Error::parse(lineno, format!("unknown directive {other:?}")));
                }
            }
        }
        let mut instance =
            instance.ok_or_else(|| Error::parse(1, "instance needs use and vars lines"))?;
        for (lineno, tokens) in pending {
            match tokens[0].as_str() {
                "constraint" => {
                    if tokens.len() < 2 {
                        return Err(Error::parse(lineno, "constraint needs a relation name"));
                    }
                    let scope: Vec<usize> = tokens[2..]
                        .iter()
                        .map(|t| {
                            t.strip_prefix('v')
                                .and_then(|s| s.parse().ok())
                                .ok_or_else(|| {
                                    Error::parse(lineno, format!("bad variable token {t:?}"))
                                })
                        })
                        .collect::<Result<_>>()?;
                    instance
                        .add_constraint(tokens[1].clone(), scope)
                        .map_err(|e| Error::parse(lineno, e))?;
                }
                "cardinality" => {
                    if instance.cardinality.is_some() {
                        return Err(Error::parse(lineno, "duplicate cardinality line"));
                    }
                    let entries: Vec<&str> = tokens[1..].iter().map(|s| s.as_str()).collect();
                    let pi = CardinalityVector::parse(instance.language.domain(), &entries)
                        .map_err(|e| Error::parse(lineno, e))?;
                    instance.cardinality = Some(pi);
                }
                _ => unreachable!(),
            }
        }
        Ok(instance)
    }

    /// Loads an instance file, resolving its `use` line relative to the file.
    pub fn load(path: impl AsRef<Path>) -> Result<Instance> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().map(|p| p.to_path_buf()).unwrap_or_default();
        Instance::parse(&text, |lang_path| {
            ConstraintLanguage::load(base.join(lang_path))
        })
    }
}
