//! Verification reports: named equality checks with both sides recorded.
//!
//! Every `verify_*` entry point returns one of these instead of a bare bool,
//! so the CLI can print or serialize exactly what was compared and where a
//! failure happened.

use serde::Serialize;
use thiserror::Error;

/// Relative closeness: `|lhs − rhs| ≤ tol · max(1, |lhs|, |rhs|)`.
pub fn rel_close(lhs: f64, rhs: f64, tol: f64) -> bool {
    (lhs - rhs).abs() <= tol * 1.0_f64.max(lhs.abs()).max(rhs.abs())
}

/// Errors from verification entry points that span several computation
/// layers (surgery sums, partition functions, presentations, state sums).
#[derive(Debug, Error)]
pub enum CrossCheckError {
    #[error(transparent)]
    Rt(#[from] crate::rt::RtError),
    #[error(transparent)]
    Partition(#[from] crate::partition::PartitionError),
    #[error(transparent)]
    Manifold(#[from] crate::manifolds::ManifoldError),
    #[error(transparent)]
    Complex(#[from] crate::tv::TvError),
    /// The manifold presentation cannot be lowered to the data this
    /// verification needs.
    #[error("operation requires one of these presentations: {needed}")]
    UnsupportedPresentation { needed: &'static str },
}

/// One asserted equality: a label plus the rendered values of both sides.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub label: String,
    pub lhs: String,
    pub rhs: String,
    pub pass: bool,
}

/// A named bundle of checks.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            checks: Vec::new(),
        }
    }

    pub fn push(
        &mut self,
        label: impl Into<String>,
        lhs: impl ToString,
        rhs: impl ToString,
        pass: bool,
    ) {
        self.checks.push(Check {
            label: label.into(),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            pass,
        });
    }

    /// Records `lhs == rhs` with the pass flag taken from the comparison.
    pub fn push_eq<T: PartialEq + ToString>(&mut self, label: impl Into<String>, lhs: T, rhs: T) {
        let pass = lhs == rhs;
        self.push(label, lhs.to_string(), rhs.to_string(), pass);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Merges another report's checks under this title.
    pub fn absorb(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    /// Plain-text rendering, one line per check.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{}: {}\n",
            if self.passed() { "PASS" } else { "FAIL" },
            self.title
        ));
        for c in &self.checks {
            out.push_str(&format!(
                "  [{}] {}: {} vs {}\n",
                if c.pass { "ok" } else { "FAIL" },
                c.label,
                c.lhs,
                c.rhs
            ));
        }
        out
    }
}
