//! Step-by-step records of verified claims.

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// A claim together with the checks that establish it. The claim holds
/// when every check passed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub claim: String,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn new(claim: impl Into<String>) -> Self {
        Self {
            claim: claim.into(),
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> bool {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
        passed
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_certificate_does_not_pass() {
        let mut c = Certificate::new("x");
        assert!(!c.passed());
        assert!(c.check("a", true, ""));
        assert!(c.passed());
        assert!(!c.check("b", false, "why"));
        assert!(!c.passed());
        assert_eq!(c.failures().count(), 1);
    }
}
