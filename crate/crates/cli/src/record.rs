//! Command results, as JSON and as text.

use std::fmt::Write as _;

use serde::Serialize;

use crate::instance::Int;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Solution,
    SolutionExists,
    NoSolution,
    Valid,
    Invalid,
    InvalidInput,
}

impl Status {
    /// 0 for a solution (or a valid claim), 2 for a negative answer, 1 for
    /// bad input.
    pub fn label(self) -> &'static str {
        match self {
            Status::Solution => "solution",
            Status::SolutionExists => "solution exists",
            Status::NoSolution => "no solution",
            Status::Valid => "valid",
            Status::Invalid => "invalid",
            Status::InvalidInput => "invalid input",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Solution | Status::SolutionExists | Status::Valid => 0,
            Status::NoSolution | Status::Invalid => 2,
            Status::InvalidInput => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reason {
    pub condition: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<Int>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<u32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceRecord {
    pub pivot: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shuffled_with: Option<usize>,
    pub reduced_by: u32,
    pub active_q: Vec<usize>,
    pub active_m: Vec<usize>,
    pub reduced_element: Vec<Int>,
    pub assigned: Vec<Int>,
    pub finished: bool,
}

/// Per-Sylow-block detail for `--verbose`. Slot indices are 1-based and
/// count from the start of the block in canonical factor order.
#[derive(Debug, Clone, Serialize)]
pub struct BlockRecord {
    pub p: Int,
    pub slots: Vec<usize>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<Reason>,
    pub op_count: u64,
    pub trace: Vec<TraceRecord>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultRecord {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<Int>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<Reason>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub op_count: Option<u64>,
    pub elapsed_ms: f64,
    /// Canonical slot of each factor as written, when the file's factors
    /// were not in canonical order. Bases are reported in the file's order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<BlockRecord>>,
}

impl ResultRecord {
    pub fn new(status: Status) -> Self {
        ResultRecord {
            file: None,
            status,
            basis: None,
            reason: None,
            message: None,
            op_count: None,
            elapsed_ms: 0.0,
            permutation: None,
            warnings: Vec::new(),
            blocks: None,
        }
    }

    pub fn invalid_input(message: impl Into<String>) -> Self {
        ResultRecord {
            message: Some(message.into()),
            ..Self::new(Status::InvalidInput)
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("records always serialize")
    }

    /// Human-readable rendering; `show_ops` adds the operation count.
    pub fn to_text(&self, show_ops: bool) -> String {
        let mut out = String::new();
        if let Some(file) = &self.file {
            let _ = write!(out, "{file}: ");
        }
        out.push_str(self.status.label());
        if let Some(r) = &self.reason {
            let _ = write!(out, ": {}", r.condition);
            if let Some(p) = &r.p {
                let _ = write!(out, " at p = {}", p.0);
            }
            if let Some(j) = r.j {
                let _ = write!(out, ", j = {j}");
            }
        }
        if let Some(m) = &self.message {
            let _ = write!(out, ": {m}");
        }
        out.push('\n');
        if let Some(basis) = &self.basis {
            for (i, row) in basis.iter().enumerate() {
                let _ = writeln!(out, "  P_{} = ({})", i + 1, join(row));
            }
        }
        if let Some(perm) = &self.permutation {
            let shown: Vec<String> = perm.iter().map(|c| (c + 1).to_string()).collect();
            let _ = writeln!(
                out,
                "  factors reordered; canonical slots: {}",
                shown.join(" ")
            );
        }
        if let Some(blocks) = &self.blocks {
            for b in blocks {
                let _ = write!(
                    out,
                    "  block p = {} (slots {:?}): {}",
                    b.p.0,
                    b.slots,
                    b.status.label()
                );
                if let Some(r) = &b.reason {
                    let _ = write!(out, " [{}]", r.condition);
                }
                let _ = writeln!(out, ", {} ops", b.op_count);
                for (n, t) in b.trace.iter().enumerate() {
                    let _ = write!(
                        out,
                        "    pass {}: reduced by p^{}, pivot {}",
                        n + 1,
                        t.reduced_by,
                        t.pivot
                    );
                    if let Some(j) = t.shuffled_with {
                        let _ = write!(out, " (shuffled with {j})");
                    }
                    let _ = writeln!(
                        out,
                        ", K' = ({}), P = ({}){}",
                        join(&t.reduced_element),
                        join(&t.assigned),
                        if t.finished { ", done" } else { "" }
                    );
                }
            }
        }
        if show_ops {
            if let Some(n) = self.op_count {
                let _ = writeln!(out, "  group operations: {n}");
            }
        }
        out
    }
}

fn join(row: &[Int]) -> String {
    row.iter()
        .map(|v| v.0.to_string())
        .collect::<Vec<_>>()
        .join(",")
}
