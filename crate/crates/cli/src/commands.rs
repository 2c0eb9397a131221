//! The subcommands, as functions from instance text to a [`ResultRecord`].

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rootex_core::{
    brute_force_extract, decide, extract, extract_detailed, gen, verify_basis, verify_solution,
    BlockReport, Element, EnumerationBudget, ExtractionOutcome, GroupStructure, NoSolution,
    NoSolutionReason, OpCounter,
};

use crate::factors::parse_factor_spec;
use crate::instance::{Instance, InstanceFile, Int};
use crate::record::{BlockRecord, Reason, ResultRecord, Status, TraceRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Extract,
    Check,
    Verify,
    Oracle,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Options {
    /// Per-block reports and iteration traces (extract only).
    pub verbose: bool,
    /// Oracle group-size cap; the library default when `None`.
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenMode {
    Solvable,
    Random,
}

/// Runs `cmd` on the text of an instance file. Problems with the input come
/// back as an `invalid_input` record rather than an error.
pub fn run(cmd: Command, text: &str, opts: &Options) -> ResultRecord {
    let inst = match InstanceFile::from_json(text).and_then(|f| f.normalize()) {
        Ok(inst) => inst,
        Err(e) => return ResultRecord::invalid_input(format!("{e:#}")),
    };
    let start = Instant::now();
    let outcome = match cmd {
        Command::Extract => run_extract(&inst, opts),
        Command::Check => run_check(&inst),
        Command::Verify => run_verify(&inst),
        Command::Oracle => run_oracle(&inst, opts),
    };
    let mut record = outcome.unwrap_or_else(|e| ResultRecord::invalid_input(format!("{e:#}")));
    record.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    record.warnings = inst.warnings.clone();
    if inst.is_reordered() {
        record.permutation = Some(inst.permutation.clone());
    }
    record
}

pub fn run_file(cmd: Command, path: &Path, opts: &Options) -> ResultRecord {
    match fs::read_to_string(path) {
        Ok(text) => run(cmd, &text, opts),
        Err(e) => ResultRecord::invalid_input(format!("cannot read {}: {e}", path.display())),
    }
}

/// Runs `cmd` on every `*.json` file in `dir`, in parallel. Records come
/// back in file-name order, each tagged with its file.
pub fn run_batch(cmd: Command, dir: &Path, opts: &Options) -> Result<Vec<ResultRecord>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot list {}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    Ok(paths
        .par_iter()
        .map(|p| {
            let mut record = run_file(cmd, p, opts);
            record.file = Some(p.display().to_string());
            record
        })
        .collect())
}

/// Exit code for a batch: any invalid input wins, then any negative answer.
pub fn batch_exit_code(records: &[ResultRecord]) -> i32 {
    let codes: Vec<i32> = records.iter().map(ResultRecord::exit_code).collect();
    if codes.contains(&1) {
        1
    } else if codes.contains(&2) {
        2
    } else {
        0
    }
}

fn reason_of(failure: &NoSolution) -> Reason {
    Reason {
        condition: failure.reason.condition_name().to_string(),
        p: Some(Int::from(&failure.prime)),
        j: match failure.reason {
            NoSolutionReason::ValuationMismatch { j } => Some(j),
            _ => None,
        },
    }
}

fn outcome_record(inst: &Instance, outcome: &ExtractionOutcome) -> ResultRecord {
    match outcome {
        ExtractionOutcome::Solution(basis) => ResultRecord {
            basis: Some(inst.to_user_basis(basis)),
            ..ResultRecord::new(Status::Solution)
        },
        ExtractionOutcome::NoSolution(failure) => ResultRecord {
            reason: Some(reason_of(failure)),
            ..ResultRecord::new(Status::NoSolution)
        },
    }
}

fn run_extract(inst: &Instance, opts: &Options) -> Result<ResultRecord> {
    let mut ops = OpCounter::new();
    let mut record;
    if opts.verbose {
        let report = extract_detailed(&inst.problem, &mut ops)?;
        record = outcome_record(inst, &report.outcome);
        record.blocks = Some(report.blocks.iter().map(block_record).collect());
    } else {
        record = outcome_record(inst, &extract(&inst.problem, &mut ops)?);
    }
    if let Some(basis) = inst_basis(&record, inst) {
        if !verify_solution(&inst.problem, &basis) {
            bail!("internal error: extracted basis does not verify");
        }
    }
    record.op_count = Some(ops.total());
    Ok(record)
}

/// The record's basis mapped back to canonical order, for re-verification.
fn inst_basis(record: &ResultRecord, inst: &Instance) -> Option<rootex_core::BasisCandidate> {
    let rows = record.basis.as_ref()?;
    let g = inst.group();
    let mut slots = vec![Element::identity(g); g.rank()];
    for (user, row) in rows.iter().enumerate() {
        let mut coords = vec![Default::default(); g.rank()];
        for (j, v) in row.iter().enumerate() {
            coords[inst.permutation[j]] = v.0.to_biguint()?;
        }
        slots[inst.permutation[user]] = Element::new(g, coords).ok()?;
    }
    rootex_core::BasisCandidate::new(g, slots).ok()
}

fn run_check(inst: &Instance) -> Result<ResultRecord> {
    let mut ops = OpCounter::new();
    let mut record = match decide(&inst.problem, &mut ops)? {
        None => ResultRecord::new(Status::SolutionExists),
        Some(failure) => ResultRecord {
            reason: Some(reason_of(&failure)),
            ..ResultRecord::new(Status::NoSolution)
        },
    };
    record.op_count = Some(ops.total());
    Ok(record)
}

fn run_verify(inst: &Instance) -> Result<ResultRecord> {
    let Some(claimed) = &inst.claimed_basis else {
        bail!("verify needs a claimed_basis");
    };
    if verify_solution(&inst.problem, claimed) {
        return Ok(ResultRecord::new(Status::Valid));
    }
    let message = if verify_basis(claimed) {
        "claimed basis does not combine to the element"
    } else {
        "claimed basis is not a basis"
    };
    Ok(ResultRecord {
        message: Some(message.into()),
        ..ResultRecord::new(Status::Invalid)
    })
}

fn run_oracle(inst: &Instance, opts: &Options) -> Result<ResultRecord> {
    let budget = match opts.budget {
        Some(n) => EnumerationBudget::with_group_size(n)?,
        None => EnumerationBudget::default(),
    };
    Ok(match brute_force_extract(&inst.problem, &budget)? {
        Some(basis) => ResultRecord {
            basis: Some(inst.to_user_basis(&basis)),
            ..ResultRecord::new(Status::Solution)
        },
        None => ResultRecord {
            reason: Some(Reason {
                condition: "exhaustive_search_failed".into(),
                p: None,
                j: None,
            }),
            ..ResultRecord::new(Status::NoSolution)
        },
    })
}

fn block_record(block: &BlockReport) -> BlockRecord {
    let row = |e: &Element| e.coords().iter().map(Int::from).collect::<Vec<_>>();
    let one_based = |v: &[usize]| v.iter().map(|i| i + 1).collect::<Vec<_>>();
    BlockRecord {
        p: Int::from(&block.prime),
        slots: (block.range.start + 1..=block.range.end).collect(),
        status: if block.outcome.is_solution() {
            Status::Solution
        } else {
            Status::NoSolution
        },
        reason: block.outcome.no_solution().map(reason_of),
        op_count: block.op_count,
        trace: block
            .trace
            .iter()
            .map(|t| TraceRecord {
                pivot: t.pivot + 1,
                shuffled_with: t.shuffled_with.map(|j| j + 1),
                reduced_by: t.reduced_by,
                active_q: one_based(&t.active_q),
                active_m: one_based(&t.active_m),
                reduced_element: row(&t.reduced_element),
                assigned: row(&t.assigned),
                finished: t.finished,
            })
            .collect(),
    }
}

/// A random instance over the structure in `spec`, in canonical factor
/// order. The same seed always gives the same file.
pub fn generate(spec: &str, seed: u64, mode: GenMode) -> Result<InstanceFile> {
    let (group, _) = GroupStructure::from_unsorted(parse_factor_spec(spec)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let prob = match mode {
        GenMode::Solvable => gen::random_solvable(&group, &mut rng).0,
        GenMode::Random => gen::random_instance(&group, &mut rng),
    };
    Ok(InstanceFile::from_problem(&prob, None))
}
