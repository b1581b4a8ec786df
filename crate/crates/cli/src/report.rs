use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const REPORT_SCHEMA: u32 = 1;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SKIPPED: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
    /// The group does not meet the hypotheses of the check.
    Rejected,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skipped => "SKIPPED",
            Verdict::Rejected => "REJECTED",
        })
    }
}

impl Verdict {
    /// Any failure fails; passes with nothing skipped pass; skips without
    /// failures are skipped; rejections alone are rejected. Empty passes.
    pub fn combine(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        let all: Vec<Verdict> = verdicts.into_iter().collect();
        let has = |v| all.contains(&v);
        if has(Verdict::Fail) {
            Verdict::Fail
        } else if has(Verdict::Skipped) {
            Verdict::Skipped
        } else if has(Verdict::Pass) || all.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Rejected
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => EXIT_PASS,
            Verdict::Fail | Verdict::Rejected => EXIT_FAIL,
            Verdict::Skipped => EXIT_SKIPPED,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub verdict: Verdict,
    pub details: Value,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CheckResult {
    pub fn new(name: &str, verdict: Verdict, details: Value) -> Self {
        CheckResult {
            name: name.to_string(),
            verdict,
            details,
            elapsed: Duration::ZERO,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupReport {
    pub group: String,
    /// Digest of the canonical presentation text, absent when the group failed to load.
    pub digest: Option<String>,
    pub checks: Vec<CheckResult>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub max_order: u128,
    pub max_pairs: u128,
    pub seed: u64,
    pub relaxed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: u32,
    pub tool: String,
    pub config: RunConfig,
    pub groups: Vec<GroupReport>,
    pub verdict: Verdict,
}

impl RunReport {
    pub fn new(config: RunConfig, mut groups: Vec<GroupReport>) -> Self {
        groups.sort_by(|a, b| a.group.cmp(&b.group));
        let verdict = Verdict::combine(groups.iter().map(|g| g.verdict));
        RunReport {
            schema: REPORT_SCHEMA,
            tool: format!("pgcl {}", env!("CARGO_PKG_VERSION")),
            config,
            groups,
            verdict,
        }
    }

    /// Wall times by group and check, kept out of the report so that reports are reproducible.
    pub fn timings(&self) -> Value {
        let mut out = serde_json::Map::new();
        for g in &self.groups {
            let mut per = serde_json::Map::new();
            for c in &g.checks {
                per.insert(c.name.clone(), Value::from(c.elapsed.as_secs_f64()));
            }
            out.insert(g.group.clone(), Value::Object(per));
        }
        Value::Object(out)
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        for g in &self.groups {
            s.push_str(&format!("{} {}\n", g.verdict, g.group));
            for c in &g.checks {
                s.push_str(&format!(
                    "  {:<8} {:<22} {:>8.3}s  {}\n",
                    c.verdict.to_string(),
                    c.name,
                    c.elapsed.as_secs_f64(),
                    summary(&c.details)
                ));
            }
        }
        s.push_str(&format!("overall: {}\n", self.verdict));
        s
    }
}

fn summary(details: &Value) -> String {
    match details.get("summary") {
        Some(Value::String(s)) => s.clone(),
        _ => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combination_rules() {
        use Verdict::*;
        assert_eq!(Verdict::combine([]), Pass);
        assert_eq!(Verdict::combine([Pass, Rejected]), Pass);
        assert_eq!(Verdict::combine([Pass, Skipped]), Skipped);
        assert_eq!(Verdict::combine([Skipped, Fail, Pass]), Fail);
        assert_eq!(Verdict::combine([Rejected]), Rejected);
        assert_eq!(Skipped.exit_code(), EXIT_SKIPPED);
    }

    #[test]
    fn groups_sorted_and_timings_separate() {
        let cfg = RunConfig {
            max_order: 1,
            max_pairs: 1,
            seed: 0,
            relaxed: false,
        };
        let g = |name: &str| GroupReport {
            group: name.into(),
            digest: None,
            checks: vec![CheckResult::new("c", Verdict::Pass, Value::Null)],
            verdict: Verdict::Pass,
        };
        let r = RunReport::new(cfg, vec![g("b"), g("a")]);
        assert_eq!(r.groups[0].group, "a");
        let text = serde_json::to_string(&r).unwrap();
        assert!(!text.contains("elapsed"));
        assert!(r.timings()["a"]["c"].is_number());
    }
}
