//! Root extraction: given `K` and multipliers `m_i`, find a basis `{P_i}` of
//! `G` with `K = Σ m_i P_i`.
//!
//! p-groups are handled by [`check_existence`], which tests the order and
//! valuation conditions and then runs [`extract_p_group`]. General groups are
//! split into Sylow blocks by [`extract`], solved block by block and glued
//! back together. Every returned basis is checked with [`verify_solution`]
//! before it leaves this module.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;

use crate::arith;
use crate::error::{Error, Result};
use crate::group::{sylow_split, Element, GroupStructure, Multipliers, Valuation};
use crate::ops::OpCounter;

/// An instance `(G, K, M)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractionProblem {
    group: Arc<GroupStructure>,
    element: Element,
    multipliers: Multipliers,
}

impl ExtractionProblem {
    pub fn new(
        group: &Arc<GroupStructure>,
        element: Element,
        multipliers: Multipliers,
    ) -> Result<Self> {
        if element.group() != group || multipliers.group() != group {
            return Err(Error::StructureMismatch);
        }
        Ok(ExtractionProblem {
            group: Arc::clone(group),
            element,
            multipliers,
        })
    }

    pub fn from_u64s(factors: &[(u64, u32)], element: &[u64], multipliers: &[u64]) -> Result<Self> {
        let group = GroupStructure::from_pairs(factors)?;
        let k = Element::from_u64s(&group, element)?;
        let m = Multipliers::from_u64s(&group, multipliers)?;
        Self::new(&group, k, m)
    }

    pub fn group(&self) -> &Arc<GroupStructure> {
        &self.group
    }

    pub fn element(&self) -> &Element {
        &self.element
    }

    pub fn multipliers(&self) -> &Multipliers {
        &self.multipliers
    }
}

/// Working sets of the reduction loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionState {
    /// Indices whose `K` coefficients are still in play.
    pub active_q: BTreeSet<usize>,
    /// Indices whose multipliers are still in play.
    pub active_m: BTreeSet<usize>,
    pub pivot: Option<usize>,
    /// Power of `p` removed by the last reduction.
    pub power: u32,
}

impl ReductionState {
    pub fn full(rank: usize) -> Self {
        ReductionState {
            active_q: (0..rank).collect(),
            active_m: (0..rank).collect(),
            pivot: None,
            power: 0,
        }
    }
}

/// Result of [`reduce`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    /// `Σ_{i ∈ I_Q} q_i Q_i` after division.
    pub element: Element,
    pub q: Vec<BigUint>,
    pub m: Vec<BigUint>,
    pub state: ReductionState,
}

/// A proposed basis `P_1..P_N`, one element per slot. Construction does not
/// check that the slots have the right orders; [`verify_basis`] does.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisCandidate {
    group: Arc<GroupStructure>,
    elements: Vec<Element>,
}

impl BasisCandidate {
    pub fn new(group: &Arc<GroupStructure>, elements: Vec<Element>) -> Result<Self> {
        if elements.len() != group.rank() {
            return Err(Error::LengthMismatch {
                expected: group.rank(),
                found: elements.len(),
            });
        }
        if elements.iter().any(|e| e.group() != group) {
            return Err(Error::StructureMismatch);
        }
        Ok(BasisCandidate {
            group: Arc::clone(group),
            elements,
        })
    }

    pub fn from_u64s(group: &Arc<GroupStructure>, rows: &[&[u64]]) -> Result<Self> {
        let elements = rows
            .iter()
            .map(|r| Element::from_u64s(group, r))
            .collect::<Result<Vec<_>>>()?;
        Self::new(group, elements)
    }

    pub fn canonical(group: &Arc<GroupStructure>) -> Self {
        BasisCandidate {
            group: Arc::clone(group),
            elements: Element::canonical_basis(group),
        }
    }

    pub fn group(&self) -> &Arc<GroupStructure> {
        &self.group
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<Element> {
        self.elements
    }

    /// `Σ m_i P_i`.
    pub fn evaluate(&self, multipliers: &Multipliers) -> Result<Element> {
        let mut acc = Element::identity(&self.group);
        for (m, p) in multipliers.coeffs().iter().zip(&self.elements) {
            acc = acc.add(&p.scalar_mul(m))?;
        }
        Ok(acc)
    }
}

impl fmt::Display for BasisCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.elements.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoSolutionReason {
    /// Exactly one of `K` and `Σ m_i Q_i` is zero.
    CoefficientMismatchZero,
    /// `|K| ≠ |Σ m_i Q_i|`.
    OrderMismatch,
    /// `ν_p(p^j K) ≠ ν_p(p^j Σ m_i Q_i)`, for the smallest such `j`.
    ValuationMismatch { j: u32 },
}

impl NoSolutionReason {
    pub fn condition_name(&self) -> &'static str {
        match self {
            NoSolutionReason::CoefficientMismatchZero => "coefficient_mismatch_zero",
            NoSolutionReason::OrderMismatch => "order_mismatch",
            NoSolutionReason::ValuationMismatch { .. } => "valuation_mismatch",
        }
    }
}

/// Certificate of non-existence, tagged with the Sylow prime that failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoSolution {
    pub prime: BigUint,
    pub reason: NoSolutionReason,
}

impl fmt::Display for NoSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.reason {
            NoSolutionReason::ValuationMismatch { j } => {
                write!(f, "valuation_mismatch at p = {}, j = {j}", self.prime)
            }
            r => write!(f, "{} at p = {}", r.condition_name(), self.prime),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtractionOutcome {
    Solution(BasisCandidate),
    NoSolution(NoSolution),
}

impl ExtractionOutcome {
    pub fn is_solution(&self) -> bool {
        matches!(self, ExtractionOutcome::Solution(_))
    }

    pub fn solution(&self) -> Option<&BasisCandidate> {
        match self {
            ExtractionOutcome::Solution(b) => Some(b),
            ExtractionOutcome::NoSolution(_) => None,
        }
    }

    pub fn no_solution(&self) -> Option<&NoSolution> {
        match self {
            ExtractionOutcome::Solution(_) => None,
            ExtractionOutcome::NoSolution(n) => Some(n),
        }
    }
}

/// One pass of the extraction loop, for verbose reporting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub active_q: Vec<usize>,
    pub active_m: Vec<usize>,
    pub reduced_by: u32,
    pub reduced_element: Element,
    pub pivot: usize,
    /// Slot whose basis element was combined with the pivot's to make the
    /// pivot coefficient of `K` a unit.
    pub shuffled_with: Option<usize>,
    /// `true` when this pass assigned the last slot.
    pub finished: bool,
    pub assigned: Element,
}

fn single_prime(group: &GroupStructure) -> Result<BigUint> {
    group
        .single_prime()
        .cloned()
        .ok_or(Error::MixedPrimeGroup(group.prime_count()))
}

fn valuation_of(e: &Element, p: &BigUint) -> Valuation {
    e.coords()
        .iter()
        .filter_map(|c| arith::padic_valuation(c, p))
        .min()
        .map_or(Valuation::Infinite, Valuation::Finite)
}

/// The existence test on a p-group, without building a witness. `None`
/// means a solution exists.
pub fn decide_existence(
    prob: &ExtractionProblem,
    ops: &mut OpCounter,
) -> Result<Option<NoSolution>> {
    let p = single_prime(&prob.group)?;
    let fail = |reason| {
        Ok(Some(NoSolution {
            prime: p.clone(),
            reason,
        }))
    };

    let k = &prob.element;
    let k_zero = k.is_identity();
    let m_zero = prob.multipliers.is_zero();
    if k_zero && m_zero {
        return Ok(None);
    }
    if k_zero || m_zero {
        return fail(NoSolutionReason::CoefficientMismatchZero);
    }

    let m_elem = ops.combine(&prob.group, prob.multipliers.coeffs().iter().enumerate())?;
    let k_order = ops.order(k);
    let m_order = ops.order(&m_elem);
    if k_order != m_order {
        return fail(NoSolutionReason::OrderMismatch);
    }

    // |K| = p^e; compare ν_p(p^j K) and ν_p(p^j M) for 0 <= j < e
    let e = arith::padic_valuation(&k_order, &p).unwrap_or(0);
    let mut pk = k.clone();
    let mut pm = m_elem;
    for j in 0..e {
        if j > 0 {
            pk = ops.mul(&p, &pk);
            pm = ops.mul(&p, &pm);
        }
        if valuation_of(&pk, &p) != valuation_of(&pm, &p) {
            return fail(NoSolutionReason::ValuationMismatch { j });
        }
    }
    Ok(None)
}

/// Checks the existence conditions on a p-group instance and, when they hold,
/// extracts and verifies a basis.
pub fn check_existence(prob: &ExtractionProblem, ops: &mut OpCounter) -> Result<ExtractionOutcome> {
    check_existence_traced(prob, ops, &mut Vec::new())
}

pub fn check_existence_traced(
    prob: &ExtractionProblem,
    ops: &mut OpCounter,
    trace: &mut Vec<TraceStep>,
) -> Result<ExtractionOutcome> {
    if let Some(failure) = decide_existence(prob, ops)? {
        return Ok(ExtractionOutcome::NoSolution(failure));
    }
    let basis = extract_p_group_traced(prob, ops, trace)?;
    if !verify_solution(prob, &basis) {
        return Err(Error::Internal(format!(
            "extracted basis {basis} does not solve the instance"
        )));
    }
    Ok(ExtractionOutcome::Solution(basis))
}

/// Divides the active coefficients by the largest common power of `p` and
/// returns the new `K`. Zero coefficients stay zero.
fn reduce_in_place(
    group: &Arc<GroupStructure>,
    p: &BigUint,
    current: &Element,
    q: &mut [BigUint],
    m: &mut [BigUint],
    state: &mut ReductionState,
    ops: &mut OpCounter,
) -> Result<Element> {
    let r = state
        .active_q
        .iter()
        .filter_map(|&i| arith::padic_valuation(&q[i], p))
        .min()
        .unwrap_or(0);
    state.power = r;
    if r == 0 {
        return Ok(current.clone());
    }
    let divisor = arith::pow(p, r);
    if let Some(&i) = state
        .active_m
        .iter()
        .find(|&&i| !m[i].is_multiple_of(&divisor))
    {
        return Err(Error::PreconditionViolated(format!(
            "multiplier m_{} = {} is not divisible by {divisor}",
            i + 1,
            m[i]
        )));
    }
    for &i in &state.active_q {
        q[i] /= &divisor;
    }
    for &i in &state.active_m {
        m[i] /= &divisor;
    }
    ops.combine(group, state.active_q.iter().map(|&i| (i, &q[i])))
}

/// Puts the instance restricted to `state`'s index sets into reduced form.
pub fn reduce(
    prob: &ExtractionProblem,
    state: &ReductionState,
    ops: &mut OpCounter,
) -> Result<Reduction> {
    let p = single_prime(&prob.group)?;
    let mut q = prob.element.coords().to_vec();
    let mut m = prob.multipliers.coeffs().to_vec();
    let mut state = state.clone();
    let restricted: Vec<BigUint> = q
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if state.active_q.contains(&i) {
                c.clone()
            } else {
                BigUint::zero()
            }
        })
        .collect();
    let current = Element::new(&prob.group, restricted)?;
    let element = reduce_in_place(&prob.group, &p, &current, &mut q, &mut m, &mut state, ops)?;
    Ok(Reduction {
        element,
        q,
        m,
        state,
    })
}

/// Root extraction in a p-group whose existence conditions already hold.
///
/// Starting from the canonical basis, each pass reduces the active part of the
/// instance, takes the largest active index `k` with `p ∤ m_k` as pivot, and
/// rewrites slot `k`. If `|K| = p^{e_k}` the whole remaining instance is
/// absorbed by `P_k`; otherwise only the part annihilated by `p^{e_k}` is, and
/// the rest is carried to the next pass. Every pass retires the pivot, so at
/// most `N` passes run. Slots with `m_i = 0` keep `P_i = Q_i`, except a slot
/// picked as shuffle partner when no slot of the pivot's order carries unit
/// `q_i` and `m_i` together.
pub fn extract_p_group(prob: &ExtractionProblem, ops: &mut OpCounter) -> Result<BasisCandidate> {
    extract_p_group_traced(prob, ops, &mut Vec::new())
}

pub fn extract_p_group_traced(
    prob: &ExtractionProblem,
    ops: &mut OpCounter,
    trace: &mut Vec<TraceStep>,
) -> Result<BasisCandidate> {
    let group = &prob.group;
    let p = single_prime(group)?;
    let n = group.rank();
    let mut basis = Element::canonical_basis(group);
    if prob.element.is_identity() && prob.multipliers.is_zero() {
        return BasisCandidate::new(group, basis);
    }

    let mut q = prob.element.coords().to_vec();
    let mut m = prob.multipliers.coeffs().to_vec();
    let mut state = ReductionState::full(n);
    let mut current = prob.element.clone();

    for _ in 0..n {
        let q_done = state.active_q.iter().all(|&i| q[i].is_zero());
        let m_done = state.active_m.iter().all(|&i| m[i].is_zero());
        match (q_done, m_done) {
            (true, true) => return BasisCandidate::new(group, basis),
            (false, false) => {}
            _ => {
                return Err(Error::PreconditionViolated(
                    "element and multipliers ran out at different passes".into(),
                ))
            }
        }

        current = reduce_in_place(group, &p, &current, &mut q, &mut m, &mut state, ops)?;

        let is_unit = |c: &BigUint| !(c % &p).is_zero();
        let km = *state
            .active_m
            .iter()
            .rev()
            .find(|&&i| is_unit(&m[i]))
            .ok_or_else(|| {
                Error::PreconditionViolated("no unit multiplier after reduction".into())
            })?;
        let kq = *state
            .active_q
            .iter()
            .rev()
            .find(|&&i| is_unit(&q[i]))
            .ok_or_else(|| {
                Error::PreconditionViolated("no unit coefficient after reduction".into())
            })?;
        // the last unit coefficient and the last unit multiplier must sit in
        // slots of equal order
        let top = group.factor(km).exponent();
        if group.factor(kq).exponent() != top {
            return Err(Error::PreconditionViolated(format!(
                "pivot slots {} and {} have different orders",
                kq + 1,
                km + 1
            )));
        }
        let in_top = |i: &usize| group.factor(*i).exponent() == top;

        // The pivot needs both q_k and m_k to be units. When no slot of the
        // top order has both, shuffle: with j a unit-q slot of that order,
        // solve for σ⁻¹(K) where σ(Q_j) = Q_j + Q_k, then map the basis back
        // through σ. Only slot j changes besides the pivot, so a j with
        // m_j ≠ 0 is preferred.
        let both = state
            .active_m
            .iter()
            .rev()
            .find(|&i| {
                in_top(i) && state.active_q.contains(i) && is_unit(&m[*i]) && is_unit(&q[*i])
            })
            .copied();
        let (k, shuffle) = match both {
            Some(k) => (k, None),
            None => {
                let k = km;
                let unit_q = || {
                    state
                        .active_q
                        .iter()
                        .rev()
                        .filter(|&i| in_top(i) && is_unit(&q[*i]))
                };
                let j = *unit_q()
                    .find(|&i| state.active_m.contains(i) && !m[*i].is_zero())
                    .or_else(|| unit_q().next())
                    .ok_or_else(|| Error::Internal("no shuffle partner".into()))?;
                let old_qk = if state.active_q.contains(&k) {
                    q[k].clone()
                } else {
                    BigUint::zero()
                };
                let modulus = group.modulus(k);
                q[k] = (old_qk + modulus - &q[j] % modulus) % modulus;
                state.active_q.insert(k);
                let shift = ops.mul(&q[j], &Element::unit(group, k));
                current = ops.sub(&current, &shift)?;
                (k, Some(j))
            }
        };
        state.pivot = Some(k);

        let slot_order = group.modulus(k).clone();
        let inverse = arith::mod_inverse(&m[k], &slot_order)
            .ok_or_else(|| Error::Internal(format!("m_{} has no inverse", k + 1)))?;
        let active_q: Vec<usize> = state.active_q.iter().copied().collect();
        let active_m: Vec<usize> = state.active_m.iter().copied().collect();
        let reduced_by = state.power;

        // σ(x) = x + x_j·Q_k
        let unshuffle = |x: Element, ops: &mut OpCounter| -> Result<Element> {
            match shuffle {
                Some(j) if !x.coords()[j].is_zero() => {
                    let lift = ops.mul(&x.coords()[j], &Element::unit(group, k));
                    ops.add(&x, &lift)
                }
                _ => Ok(x),
            }
        };

        let k_order = ops.order(&current);
        if k_order == slot_order {
            let others = ops.combine(
                group,
                state
                    .active_m
                    .iter()
                    .filter(|&&i| i != k)
                    .map(|&i| (i, &m[i])),
            )?;
            let target = ops.sub(&current, &others)?;
            let assigned = ops.mul(&inverse, &target);
            basis[k] = unshuffle(assigned, ops)?;
            if let Some(j) = shuffle {
                basis[j] = unshuffle(basis[j].clone(), ops)?;
            }
            trace.push(TraceStep {
                active_q,
                active_m,
                reduced_by,
                reduced_element: current,
                pivot: k,
                shuffled_with: shuffle,
                finished: true,
                assigned: basis[k].clone(),
            });
            return BasisCandidate::new(group, basis);
        }

        // split off the part annihilated by p^{e_k}
        let killed_by_slot = |c: &BigUint, i: usize, ops: &mut OpCounter| {
            ops.mul(&(c * &slot_order), &Element::unit(group, i))
                .is_identity()
        };
        let split_m: BTreeSet<usize> = state
            .active_m
            .iter()
            .copied()
            .filter(|&i| killed_by_slot(&m[i], i, ops))
            .collect();
        let split_q: BTreeSet<usize> = state
            .active_q
            .iter()
            .copied()
            .filter(|&i| killed_by_slot(&q[i], i, ops))
            .collect();

        let part = ops.combine(group, split_q.iter().map(|&i| (i, &q[i])))?;
        let others = ops.combine(
            group,
            split_m.iter().filter(|&&i| i != k).map(|&i| (i, &m[i])),
        )?;
        let target = ops.sub(&part, &others)?;
        let assigned = ops.mul(&inverse, &target);
        basis[k] = unshuffle(assigned, ops)?;
        if let Some(j) = shuffle {
            basis[j] = unshuffle(basis[j].clone(), ops)?;
        }

        state.active_m = &state.active_m - &split_m;
        state.active_q = &state.active_q - &split_q;
        // what is left lives in larger slots, where σ acts trivially
        current = ops.sub(&current, &part)?;
        trace.push(TraceStep {
            active_q,
            active_m,
            reduced_by,
            reduced_element: part,
            pivot: k,
            shuffled_with: shuffle,
            finished: false,
            assigned: basis[k].clone(),
        });
    }

    let q_done = state.active_q.iter().all(|&i| q[i].is_zero());
    let m_done = state.active_m.iter().all(|&i| m[i].is_zero());
    if q_done && m_done {
        return BasisCandidate::new(group, basis);
    }
    Err(Error::Internal(format!(
        "extraction did not finish within {n} passes"
    )))
}

/// Outcome of one Sylow block inside [`extract_detailed`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockReport {
    pub prime: BigUint,
    pub range: Range<usize>,
    pub outcome: ExtractionOutcome,
    pub trace: Vec<TraceStep>,
    pub op_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractionReport {
    pub outcome: ExtractionOutcome,
    pub blocks: Vec<BlockReport>,
}

/// Root extraction in an arbitrary finite Abelian group.
///
/// Reports the first failing Sylow block in ascending prime order.
pub fn extract(prob: &ExtractionProblem, ops: &mut OpCounter) -> Result<ExtractionOutcome> {
    Ok(run_blocks(prob, ops, true)?.outcome)
}

/// Like [`extract`], but solves every block and keeps per-block traces.
pub fn extract_detailed(prob: &ExtractionProblem, ops: &mut OpCounter) -> Result<ExtractionReport> {
    run_blocks(prob, ops, false)
}

/// Decision only: runs the existence test on every Sylow block without
/// building witnesses.
pub fn decide(prob: &ExtractionProblem, ops: &mut OpCounter) -> Result<Option<NoSolution>> {
    for block in sylow_split(&prob.group, &prob.element, &prob.multipliers)? {
        let sub = ExtractionProblem::new(&block.group, block.element, block.multipliers)?;
        if let Some(failure) = decide_existence(&sub, ops)? {
            return Ok(Some(failure));
        }
    }
    Ok(None)
}

fn run_blocks(
    prob: &ExtractionProblem,
    ops: &mut OpCounter,
    stop_at_failure: bool,
) -> Result<ExtractionReport> {
    let group = &prob.group;
    let mut blocks = Vec::new();
    let mut first_failure = None;
    let mut elements = Vec::with_capacity(group.rank());

    for block in sylow_split(group, &prob.element, &prob.multipliers)? {
        let sub = ExtractionProblem::new(&block.group, block.element, block.multipliers)?;
        let before = ops.total();
        let mut trace = Vec::new();
        let outcome = check_existence_traced(&sub, ops, &mut trace)?;
        match &outcome {
            ExtractionOutcome::Solution(basis) => {
                for local in basis.elements() {
                    let mut coords = vec![BigUint::zero(); group.rank()];
                    for (offset, c) in local.coords().iter().enumerate() {
                        coords[block.range.start + offset] = c.clone();
                    }
                    elements.push(Element::new(group, coords)?);
                }
            }
            ExtractionOutcome::NoSolution(failure) => {
                if first_failure.is_none() {
                    first_failure = Some(failure.clone());
                }
            }
        }
        blocks.push(BlockReport {
            prime: block.prime,
            range: block.range,
            outcome,
            trace,
            op_count: ops.total() - before,
        });
        if stop_at_failure && first_failure.is_some() {
            break;
        }
    }

    let outcome = match first_failure {
        Some(failure) => ExtractionOutcome::NoSolution(failure),
        None => {
            let basis = BasisCandidate::new(group, elements)?;
            if !verify_solution(prob, &basis) {
                return Err(Error::Internal(format!(
                    "assembled basis {basis} does not solve the instance"
                )));
            }
            ExtractionOutcome::Solution(basis)
        }
    };
    Ok(ExtractionReport { outcome, blocks })
}

/// Rank of a square matrix over `F_p`.
fn rank_mod_p(mut rows: Vec<Vec<BigUint>>, p: &BigUint) -> usize {
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..n).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = arith::mod_inverse(&rows[rank][col], p).expect("nonzero mod prime");
        let pivot_row: Vec<BigUint> = rows[rank].iter().map(|v| v * &inv % p).collect();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                let sub = &factor * pv % p;
                *v = (&*v + p - sub) % p;
            }
        }
        rows[rank] = pivot_row;
        rank += 1;
    }
    rank
}

/// Whether `cand` is a basis of its group with `|P_i| = p_i^{e_i}` in every
/// slot.
///
/// Uses the algebraic test: once every slot has its prescribed order, the map
/// `Q_i ↦ P_i` is an endomorphism, and in each prime block its matrix reduced
/// mod `p` is block lower triangular by exponent (entries towards larger
/// exponents are divisible by `p`). The map is an automorphism iff that
/// matrix is invertible over `F_p`. No enumeration is involved, so this works
/// for groups of any size.
pub fn verify_basis(cand: &BasisCandidate) -> bool {
    let group = &cand.group;
    if cand.elements.len() != group.rank() {
        return false;
    }
    if cand
        .elements
        .iter()
        .enumerate()
        .any(|(i, e)| e.order() != *group.modulus(i))
    {
        return false;
    }
    group.prime_blocks().iter().all(|block| {
        let p = group.factor(block.start).prime();
        let rows: Vec<Vec<BigUint>> = block
            .clone()
            .map(|i| {
                block
                    .clone()
                    .map(|j| &cand.elements[i].coords()[j] % p)
                    .collect()
            })
            .collect();
        rank_mod_p(rows, p) == block.len()
    })
}

/// `verify_basis(cand)` and `Σ m_i P_i = K`.
pub fn verify_solution(prob: &ExtractionProblem, cand: &BasisCandidate) -> bool {
    if cand.group() != prob.group() || !verify_basis(cand) {
        return false;
    }
    matches!(cand.evaluate(&prob.multipliers), Ok(k) if k == prob.element)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    const G2816: [(u64, u32); 3] = [(2, 1), (2, 3), (2, 4)];
    const G4_16_32_64: [(u64, u32); 4] = [(2, 2), (2, 4), (2, 5), (2, 6)];

    fn outcome(prob: &ExtractionProblem) -> ExtractionOutcome {
        check_existence(prob, &mut OpCounter::new()).unwrap()
    }

    #[test]
    fn existence_example_one() {
        let prob = ExtractionProblem::from_u64s(&G2816, &[0, 2, 8], &[0, 6, 4]).unwrap();
        let out = outcome(&prob);
        assert!(verify_solution(&prob, out.solution().unwrap()));
    }

    #[test]
    fn non_existence_examples() {
        let prob = ExtractionProblem::from_u64s(&[(2, 2), (2, 4)], &[1, 0], &[0, 4]).unwrap();
        assert_eq!(
            outcome(&prob).no_solution().unwrap().reason,
            NoSolutionReason::ValuationMismatch { j: 0 }
        );
        let prob = ExtractionProblem::from_u64s(
            &[(2, 1), (2, 2), (2, 5), (2, 6)],
            &[0, 1, 2, 0],
            &[1, 1, 4, 4],
        )
        .unwrap();
        let failure = outcome(&prob).no_solution().cloned().unwrap();
        assert_eq!(failure.reason, NoSolutionReason::ValuationMismatch { j: 2 });
        assert_eq!(failure.prime, big(2));
    }

    #[test]
    fn zero_instances() {
        let prob = ExtractionProblem::from_u64s(&G2816, &[0, 0, 0], &[0, 0, 0]).unwrap();
        assert_eq!(
            outcome(&prob),
            ExtractionOutcome::Solution(BasisCandidate::canonical(prob.group()))
        );
        let prob = ExtractionProblem::from_u64s(&G2816, &[0, 0, 0], &[1, 0, 0]).unwrap();
        assert_eq!(
            outcome(&prob).no_solution().unwrap().reason,
            NoSolutionReason::CoefficientMismatchZero
        );
        let prob = ExtractionProblem::from_u64s(&G2816, &[0, 1, 0], &[0, 0, 0]).unwrap();
        assert_eq!(
            outcome(&prob).no_solution().unwrap().reason,
            NoSolutionReason::CoefficientMismatchZero
        );
    }

    #[test]
    fn order_mismatch() {
        let prob = ExtractionProblem::from_u64s(&G2816, &[0, 0, 1], &[0, 1, 0]).unwrap();
        assert_eq!(
            outcome(&prob).no_solution().unwrap().reason,
            NoSolutionReason::OrderMismatch
        );
    }

    #[test]
    fn check_existence_rejects_mixed_groups() {
        let prob = ExtractionProblem::from_u64s(&[(2, 2), (3, 1)], &[1, 1], &[1, 1]).unwrap();
        assert_eq!(
            check_existence(&prob, &mut OpCounter::new()).unwrap_err(),
            Error::MixedPrimeGroup(2)
        );
    }

    #[test]
    fn reduction_examples() {
        let mut ops = OpCounter::new();
        let prob = ExtractionProblem::from_u64s(&G2816, &[0, 2, 8], &[0, 6, 4]).unwrap();
        let red = reduce(&prob, &ReductionState::full(3), &mut ops).unwrap();
        assert_eq!(
            red.element,
            Element::from_u64s(prob.group(), &[0, 1, 4]).unwrap()
        );
        assert_eq!(red.m, vec![big(0), big(3), big(2)]);
        assert_eq!(red.state.power, 1);

        let prob = ExtractionProblem::from_u64s(&G2816, &[1, 2, 2], &[1, 6, 10]).unwrap();
        let red = reduce(&prob, &ReductionState::full(3), &mut ops).unwrap();
        assert_eq!(red.element, *prob.element());
        assert_eq!(red.m, prob.multipliers().coeffs());
        assert_eq!(red.state.power, 0);

        let prob =
            ExtractionProblem::from_u64s(&G4_16_32_64, &[0, 0, 0, 2], &[0, 0, 0, 6]).unwrap();
        let red = reduce(&prob, &ReductionState::full(4), &mut ops).unwrap();
        assert_eq!(red.q, vec![big(0), big(0), big(0), big(1)]);
        assert_eq!(red.m, vec![big(0), big(0), big(0), big(3)]);
        assert_eq!(red.state.power, 1);
    }

    #[test]
    fn reduction_rejects_indivisible_multipliers() {
        let prob = ExtractionProblem::from_u64s(&G2816, &[0, 2, 8], &[0, 3, 4]).unwrap();
        let err = reduce(&prob, &ReductionState::full(3), &mut OpCounter::new()).unwrap_err();
        assert!(matches!(err, Error::PreconditionViolated(_)));
    }

    #[test]
    fn reduction_respects_index_sets() {
        let prob = ExtractionProblem::from_u64s(&G2816, &[1, 2, 4], &[1, 6, 4]).unwrap();
        let state = ReductionState {
            active_q: [1, 2].into_iter().collect(),
            active_m: [1, 2].into_iter().collect(),
            pivot: None,
            power: 0,
        };
        let red = reduce(&prob, &state, &mut OpCounter::new()).unwrap();
        assert_eq!(
            red.element,
            Element::from_u64s(prob.group(), &[0, 1, 2]).unwrap()
        );
        assert_eq!(red.q, vec![big(1), big(1), big(2)]);
        assert_eq!(red.m, vec![big(1), big(3), big(2)]);
    }

    #[test]
    fn extraction_reproduces_worked_witnesses() {
        let mut ops = OpCounter::new();
        let prob = ExtractionProblem::from_u64s(&G2816, &[0, 2, 8], &[0, 6, 4]).unwrap();
        let basis = extract_p_group(&prob, &mut ops).unwrap();
        assert_eq!(
            basis,
            BasisCandidate::from_u64s(prob.group(), &[&[1, 0, 0], &[0, 3, 6], &[0, 0, 1]]).unwrap()
        );

        let prob = ExtractionProblem::from_u64s(&G2816, &[1, 2, 2], &[1, 6, 10]).unwrap();
        let basis = extract_p_group(&prob, &mut ops).unwrap();
        assert_eq!(
            basis,
            BasisCandidate::from_u64s(prob.group(), &[&[1, 0, 0], &[0, 1, 0], &[0, 6, 13]])
                .unwrap()
        );

        let prob =
            ExtractionProblem::from_u64s(&G4_16_32_64, &[3, 2, 8, 4], &[1, 6, 4, 12]).unwrap();
        // the printed P_2 = (0,11,26,0) differs from ours by 16·Q_3, which
        // m_2 = 6 annihilates; both solve the instance
        let basis = extract_p_group(&prob, &mut ops).unwrap();
        assert_eq!(
            basis,
            BasisCandidate::from_u64s(
                prob.group(),
                &[
                    &[3, 0, 8, 0],
                    &[0, 11, 10, 0],
                    &[0, 0, 1, 0],
                    &[0, 0, 0, 43]
                ]
            )
            .unwrap()
        );
        let printed = BasisCandidate::from_u64s(
            prob.group(),
            &[
                &[3, 0, 8, 0],
                &[0, 11, 26, 0],
                &[0, 0, 1, 0],
                &[0, 0, 0, 43],
            ],
        )
        .unwrap();
        assert!(verify_solution(&prob, &printed));
    }

    #[test]
    fn traces_record_each_pass() {
        let prob =
            ExtractionProblem::from_u64s(&G4_16_32_64, &[3, 2, 8, 4], &[1, 6, 4, 12]).unwrap();
        let mut trace = Vec::new();
        extract_p_group_traced(&prob, &mut OpCounter::new(), &mut trace).unwrap();
        let pivots: Vec<usize> = trace.iter().map(|t| t.pivot).collect();
        assert_eq!(pivots, vec![0, 1, 3]);
        assert!(trace.last().unwrap().finished);
        assert_eq!(trace[1].reduced_by, 1);
    }

    #[test]
    fn general_groups() {
        let mut ops = OpCounter::new();
        let prob = ExtractionProblem::from_u64s(&[(2, 2), (3, 1)], &[1, 1], &[1, 1]).unwrap();
        let out = extract(&prob, &mut ops).unwrap();
        assert_eq!(
            out.solution().unwrap(),
            &BasisCandidate::from_u64s(prob.group(), &[&[1, 0], &[0, 1]]).unwrap()
        );

        // both blocks fail; the p = 2 block is reported first
        let prob = ExtractionProblem::from_u64s(&[(2, 2), (3, 1)], &[2, 0], &[1, 1]).unwrap();
        let failure = extract(&prob, &mut ops)
            .unwrap()
            .no_solution()
            .cloned()
            .unwrap();
        assert_eq!(failure.prime, big(2));
        assert_eq!(failure.reason, NoSolutionReason::OrderMismatch);
        let report = extract_detailed(&prob, &mut ops).unwrap();
        assert_eq!(
            report.blocks[1].outcome.no_solution().unwrap(),
            &NoSolution {
                prime: big(3),
                reason: NoSolutionReason::CoefficientMismatchZero
            }
        );

        let prob = ExtractionProblem::from_u64s(&G2816, &[0, 2, 8], &[0, 6, 4]).unwrap();
        assert_eq!(
            extract(&prob, &mut OpCounter::new()).unwrap(),
            check_existence(&prob, &mut OpCounter::new()).unwrap()
        );
    }

    #[test]
    fn detailed_extraction_reports_every_block() {
        let prob = ExtractionProblem::from_u64s(&[(2, 2), (3, 1), (5, 1)], &[1, 0, 1], &[1, 1, 1])
            .unwrap();
        let report = extract_detailed(&prob, &mut OpCounter::new()).unwrap();
        assert_eq!(report.blocks.len(), 3);
        assert!(report.blocks[0].outcome.is_solution());
        assert!(!report.blocks[1].outcome.is_solution());
        assert!(report.blocks[2].outcome.is_solution());
        assert_eq!(report.outcome.no_solution().unwrap().prime, big(3));
        assert_eq!(
            extract(&prob, &mut OpCounter::new()).unwrap(),
            report.outcome
        );
    }

    #[test]
    fn basis_verification() {
        let g = GroupStructure::from_pairs(&G2816).unwrap();
        let witness = BasisCandidate::from_u64s(&g, &[&[1, 0, 0], &[0, 3, 6], &[0, 0, 1]]).unwrap();
        assert!(verify_basis(&witness));
        assert!(verify_basis(&BasisCandidate::canonical(&g)));
        // right orders, but P_2 = P_3 - 4·Q_3 spans too little
        let bad = BasisCandidate::from_u64s(&g, &[&[1, 0, 0], &[0, 0, 2], &[0, 0, 1]]).unwrap();
        assert!(!verify_basis(&bad));

        let h = GroupStructure::from_pairs(&[(2, 1), (2, 2), (2, 3)]).unwrap();
        for a in [[1u64, 0, 0], [0, 0, 1], [1, 1, 1]] {
            let with_q = BasisCandidate::from_u64s(&h, &[&a, &[1, 0, 2], &[0, 0, 1]]).unwrap();
            assert!(!verify_basis(&with_q));
        }

        let sq = GroupStructure::from_pairs(&[(3, 1), (3, 1)]).unwrap();
        let dependent = BasisCandidate::from_u64s(&sq, &[&[1, 1], &[2, 2]]).unwrap();
        assert!(!verify_basis(&dependent));
        let independent = BasisCandidate::from_u64s(&sq, &[&[1, 1], &[1, 2]]).unwrap();
        assert!(verify_basis(&independent));
    }

    #[test]
    fn solution_verification() {
        let prob = ExtractionProblem::from_u64s(&G2816, &[0, 2, 8], &[0, 6, 4]).unwrap();
        let witness =
            BasisCandidate::from_u64s(prob.group(), &[&[1, 0, 0], &[0, 3, 6], &[0, 0, 1]]).unwrap();
        assert!(verify_solution(&prob, &witness));
        assert!(!verify_solution(
            &prob,
            &BasisCandidate::canonical(prob.group())
        ));
    }

    #[test]
    fn pivot_without_unit_coefficient_is_shuffled() {
        // the only unit multiplier sits where K has a zero coordinate
        let prob = ExtractionProblem::from_u64s(&[(2, 1), (2, 1)], &[0, 1], &[1, 0]).unwrap();
        let mut ops = OpCounter::new();
        let mut trace = Vec::new();
        let basis = extract_p_group_traced(&prob, &mut ops, &mut trace).unwrap();
        assert!(verify_solution(&prob, &basis));
        assert_eq!(trace[0].pivot, 0);
        assert_eq!(trace[0].shuffled_with, Some(1));

        let prob = ExtractionProblem::from_u64s(&[(3, 2), (3, 2), (3, 2)], &[0, 3, 1], &[2, 0, 3])
            .unwrap();
        let basis = extract(&prob, &mut OpCounter::new())
            .unwrap()
            .solution()
            .cloned()
            .unwrap();
        assert!(verify_solution(&prob, &basis));
    }
}
