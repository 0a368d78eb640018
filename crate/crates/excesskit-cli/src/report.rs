//! The machine-readable report, schema `excesskit/1`.
//!
//! Reports are byte-identical for identical inputs, seed and version:
//! field order is fixed, all numeric content is deterministic, and timing
//! information goes to stderr instead of the report.

use excesskit_core::{BoundKind, ExcessRunReport, SolutionPoint};
use serde::Serialize;

pub const SCHEMA: &str = "excesskit/1";

#[derive(Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub method: &'static str,
    pub inputs: Inputs,
    pub excess: u64,
    pub equivalence: u64,
    pub bezout: u64,
    pub bound_kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper_bound: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solutions: Option<Vec<JsonSolution>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path_stats: Option<JsonPathStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_history: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<Vec<JsonIteration>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub methods: Option<Vec<MethodValue>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agree: Option<bool>,
    pub seed: u64,
}

#[derive(Serialize, Default)]
pub struct Inputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ideal: Option<IdealEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub powers: Option<Vec<u32>>,
    pub degrees: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monomials: Option<Vec<String>>,
    pub tolerances: Tolerances,
}

#[derive(Serialize)]
pub struct IdealEcho {
    pub vars: Vec<String>,
    pub generators: Vec<String>,
}

#[derive(Serialize)]
pub struct Tolerances {
    pub newton: f64,
    pub membership: f64,
    pub dedupe: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            newton: 1e-9,
            membership: 1e-6,
            dedupe: 1e-6,
        }
    }
}

#[derive(Serialize)]
pub struct JsonSolution {
    /// Coordinates of the normalized representative as [re, im] pairs.
    pub point: Vec<[f64; 2]>,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub on_variety: Option<bool>,
}

#[derive(Serialize)]
pub struct JsonPathStats {
    pub tracked: usize,
    pub converged: usize,
    pub diverged: usize,
    pub singular: usize,
    pub step_limit: usize,
    pub steps: usize,
    pub rejections: usize,
}

#[derive(Serialize)]
pub struct JsonIteration {
    pub gamma: [f64; 2],
    pub new_points: usize,
    pub cumulative: usize,
}

#[derive(Serialize)]
pub struct MethodValue {
    pub method: &'static str,
    pub value: u64,
    pub bound_kind: &'static str,
}

pub fn bound_kind_str(kind: BoundKind) -> &'static str {
    match kind {
        BoundKind::Exact => "exact",
        BoundKind::Upper => "upper",
        BoundKind::Lower => "lower",
    }
}

pub fn solution_json(p: &SolutionPoint) -> JsonSolution {
    JsonSolution {
        point: p.point.iter().map(|c| [c.re, c.im]).collect(),
        residual: p.residual,
        on_variety: p.on_variety,
    }
}

pub fn run_report_fields(report: &ExcessRunReport) -> (Vec<JsonSolution>, JsonPathStats) {
    let solutions = report.solutions.points.iter().map(solution_json).collect();
    let stats = JsonPathStats {
        tracked: report.tracked_count,
        converged: report.accounting.converged,
        diverged: report.accounting.diverged,
        singular: report.accounting.singular,
        step_limit: report.accounting.step_limit,
        steps: report.stats.steps,
        rejections: report.stats.rejections,
    };
    (solutions, stats)
}

pub fn render(report: &Report) -> String {
    let mut out = serde_json::to_string_pretty(report).expect("report serializes");
    out.push('\n');
    out
}
