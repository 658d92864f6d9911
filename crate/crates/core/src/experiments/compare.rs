//! Ordering checks between two runs of the same experiment, with run A
//! expected to be the chaotic one.

use serde::{Deserialize, Serialize};

use super::output::RunManifest;
use crate::error::{Error, Result};

/// Minimum PR ratio A/B counted as a separation.
pub const PR_RATIO_THRESHOLD: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Both runs give the same value.
    NoSeparation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricComparison {
    pub metric: String,
    /// `None` means the quantity does not exist, e.g. a correlation that never decays.
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub ratio: Option<f64>,
    pub assertion: String,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub experiment: String,
    pub comparisons: Vec<MetricComparison>,
}

impl ComparisonReport {
    pub fn all_pass(&self) -> bool {
        self.comparisons.iter().all(|c| c.verdict == Verdict::Pass)
    }

    pub fn render(&self) -> String {
        let mut out = format!("experiment: {}\n", self.experiment);
        let show = |v: Option<f64>| v.map_or("none".to_string(), |x| format!("{x:.6}"));
        for c in &self.comparisons {
            let verdict = match c.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
                Verdict::NoSeparation => "FAIL (no separation)",
            };
            out.push_str(&format!(
                "{:<28} A={:<14} B={:<14} ratio={:<12} {:<12} {verdict}\n",
                c.metric,
                show(c.a),
                show(c.b),
                show(c.ratio),
                c.assertion
            ));
        }
        out
    }
}

fn compared_metric(name: &str) -> bool {
    (name.starts_with("l_c_") && !name.ends_with("_time")) || name.starts_with("pr_")
}

fn compare_one(name: &str, a: Option<f64>, b: Option<f64>) -> MetricComparison {
    let ratio = match (a, b) {
        (Some(x), Some(y)) if y != 0.0 => Some(x / y),
        _ => None,
    };
    let (assertion, verdict) = if name.starts_with("pr_") {
        let verdict = match (a, b, ratio) {
            (Some(x), Some(y), _) if x == y => Verdict::NoSeparation,
            (_, _, Some(r)) if r > PR_RATIO_THRESHOLD => Verdict::Pass,
            _ => Verdict::Fail,
        };
        (format!("A/B > {PR_RATIO_THRESHOLD}"), verdict)
    } else {
        // a missing correlation length is unbounded
        let verdict = match (a, b) {
            (None, None) => Verdict::NoSeparation,
            (Some(x), Some(y)) if x == y => Verdict::NoSeparation,
            (Some(x), Some(y)) if x < y => Verdict::Pass,
            (Some(_), None) => Verdict::Pass,
            _ => Verdict::Fail,
        };
        ("A < B".to_string(), verdict)
    };
    MetricComparison {
        metric: name.to_string(),
        a,
        b,
        ratio,
        assertion,
        verdict,
    }
}

/// Compares every correlation length (`l_c_*`, expecting A < B) and
/// participation ratio (`pr_*`, expecting A/B > 3) found in run A.
pub fn compare_runs(a: &RunManifest, b: &RunManifest) -> Result<ComparisonReport> {
    if a.experiment != b.experiment {
        return Err(Error::Validation(format!(
            "cannot compare a {} run with a {} run",
            a.experiment, b.experiment
        )));
    }
    let mut comparisons = Vec::new();
    for (name, &va) in a.metrics.iter().filter(|(n, _)| compared_metric(n)) {
        let vb = b.metric(name)?;
        comparisons.push(compare_one(name, va, vb));
    }
    if let Some(extra) = b.metrics.keys().find(|n| compared_metric(n) && !a.metrics.contains_key(*n)) {
        return Err(Error::Validation(format!("metric '{extra}' missing from run A")));
    }
    if comparisons.is_empty() {
        return Err(Error::Validation(format!(
            "{} runs carry no correlation lengths or participation ratios to compare",
            a.experiment
        )));
    }
    Ok(ComparisonReport {
        experiment: a.experiment.clone(),
        comparisons,
    })
}
