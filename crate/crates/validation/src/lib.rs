//! Bookkeeping for the acceptance run: one verdict line per criterion.

use std::fmt;
use std::time::Duration;

#[derive(Debug, Clone)]
pub struct Verdict {
    pub id: u32,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] {}: {} ({:.2}s)",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

/// Accumulates named sub-checks into one verdict.
#[derive(Debug, Default)]
pub struct Findings {
    parts: Vec<(bool, String)>,
}

impl Findings {
    pub fn check(&mut self, ok: bool, what: impl Into<String>) -> &mut Self {
        self.parts.push((ok, what.into()));
        self
    }

    pub fn pass(&self) -> bool {
        !self.parts.is_empty() && self.parts.iter().all(|(ok, _)| *ok)
    }

    pub fn detail(&self) -> String {
        self.parts
            .iter()
            .map(|(ok, s)| if *ok { s.clone() } else { format!("{s} [x]") })
            .collect::<Vec<_>>()
            .join("; ")
    }
}
