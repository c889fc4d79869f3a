//! Pass/fail summaries of preset runs.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CheckResult { name: name.into(), passed, detail: detail.into() }
    }

    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

/// Every check of one preset, plus named scalar results.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PresetReport {
    pub preset: String,
    pub criterion: u32,
    pub checks: Vec<CheckResult>,
    pub values: Vec<(String, f64)>,
}

impl PresetReport {
    pub fn new(preset: &str, criterion: u32) -> Self {
        PresetReport { preset: preset.into(), criterion, checks: Vec::new(), values: Vec::new() }
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) -> bool {
        self.checks.push(CheckResult::new(name, passed, detail));
        passed
    }

    pub fn value(&mut self, name: &str, v: f64) {
        self.values.push((name.into(), v));
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn failing(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    /// One line: `PASS criterion 3 (radial-convergence)` plus failing checks.
    pub fn headline(&self) -> String {
        let mut s = format!(
            "{} criterion {} ({})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.criterion,
            self.preset
        );
        let bad: Vec<_> = self.failing().iter().map(|c| c.name.as_str()).collect();
        if !bad.is_empty() {
            s.push_str(&format!(" — failing: {}", bad.join(", ")));
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = self.headline();
        s.push('\n');
        for c in &self.checks {
            s.push_str("  ");
            s.push_str(&c.line());
            s.push('\n');
        }
        for (k, v) in &self.values {
            s.push_str(&format!("  {k} = {v:.10e}\n"));
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_does_not_pass() {
        let mut r = PresetReport::new("x", 1);
        assert!(!r.passed());
        r.check("a", true, "ok");
        assert!(r.passed());
        r.check("b", false, "bad");
        assert!(r.headline().starts_with("FAIL criterion 1 (x)"));
        assert!(r.to_json().contains("\"passed\": false"));
    }
}
