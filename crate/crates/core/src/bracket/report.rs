use std::fmt;

use crate::graded::GradedPolynomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One labelled residual of a check. A check passes iff every residual is the
/// zero polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckPart {
    pub label: String,
    pub residual: GradedPolynomial,
}

/// Outcome of an identity check: labelled residuals in normal form plus
/// provenance. The verdict is derived, never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub provenance: String,
    pub parts: Vec<CheckPart>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, provenance: impl Into<String>) -> Self {
        Self { name: name.into(), provenance: provenance.into(), parts: Vec::new(), notes: Vec::new() }
    }

    pub fn single(name: impl Into<String>, provenance: impl Into<String>, residual: GradedPolynomial) -> Self {
        let mut r = Self::new(name, provenance);
        r.push("", residual);
        r
    }

    pub fn push(&mut self, label: impl Into<String>, residual: GradedPolynomial) {
        self.parts.push(CheckPart { label: label.into(), residual });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Appends the parts of another report, prefixing their labels.
    pub fn absorb(&mut self, prefix: &str, other: CheckReport) {
        for p in other.parts {
            let label = if p.label.is_empty() { prefix.to_string() } else { format!("{prefix}/{}", p.label) };
            self.parts.push(CheckPart { label, residual: p.residual });
        }
        self.notes.extend(other.notes);
    }

    pub fn verdict(&self) -> Verdict {
        if self.parts.iter().all(|p| p.residual.is_zero()) {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict().is_pass()
    }

    /// Verdict of the parts whose label equals or starts with `label/`.
    pub fn part_verdict(&self, label: &str) -> Verdict {
        let prefix = format!("{label}/");
        let ok = self
            .parts
            .iter()
            .filter(|p| p.label == label || p.label.starts_with(&prefix))
            .all(|p| p.residual.is_zero());
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// The first nonzero residual, or `None` on pass.
    pub fn obstruction(&self) -> Option<&GradedPolynomial> {
        self.parts.iter().map(|p| &p.residual).find(|r| !r.is_zero())
    }

    pub fn failing_parts(&self) -> impl Iterator<Item = &CheckPart> {
        self.parts.iter().filter(|p| !p.residual.is_zero())
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {} ({})", self.name, self.verdict(), self.provenance)?;
        for p in self.failing_parts() {
            if p.label.is_empty() {
                writeln!(f, "  residual = {}", p.residual)?;
            } else {
                writeln!(f, "  {} = {}", p.label, p.residual)?;
            }
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}
