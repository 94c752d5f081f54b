use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// A finite domain. Elements are always the canonical integers `0..size`;
/// labels are presentation only and never affect semantics or ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainSpec {
    size: usize,
    labels: Vec<String>,
}

impl DomainSpec {
    /// Domain of the given size with the default labels `"0"`, `"1"`, ...
    pub fn new(size: usize) -> Result<DomainSpec> {
        let labels = (0..size).map(|i| i.to_string()).collect();
        DomainSpec::with_labels(size, labels)
    }

    pub fn with_labels(size: usize, labels: Vec<String>) -> Result<DomainSpec> {
        if size == 0 {
            return Err(Error::arg("domain size must be at least 1"));
        }
        if labels.len() != size {
            return Err(Error::arg(format!(
                "expected {} labels, got {}",
                size,
                labels.len()
            )));
        }
        let distinct: BTreeSet<&str> = labels.iter().map(|s| s.as_str()).collect();
        if distinct.len() != size {
            return Err(Error::arg("domain labels must be pairwise distinct"));
        }
        for l in &labels {
            if l.is_empty() || l.chars().any(|c| c.is_whitespace() || c == '#' || c == ':') {
                return Err(Error::arg(format!("invalid domain label {l:?}")));
            }
        }
        Ok(DomainSpec { size, labels })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> {
        0..self.size
    }

    pub fn label(&self, element: usize) -> &str {
        &self.labels[element]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Resolves a token to an element: label match first, numeric index fallback.
    pub fn resolve(&self, token: &str) -> Option<usize> {
        if let Some(i) = self.labels.iter().position(|l| l == token) {
            return Some(i);
        }
        match token.parse::<usize>() {
            Ok(i) if i < self.size => Some(i),
            _ => None,
        }
    }

    /// True when the labels are just the canonical indices.
    pub fn has_default_labels(&self) -> bool {
        self.labels.iter().enumerate().all(|(i, l)| l == &i.to_string())
    }
}
