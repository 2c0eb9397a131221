//! Brute-force ground truth for small groups.
//!
//! Everything here works by enumeration and shares no code path with the
//! extraction algorithms beyond element arithmetic.

use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::extraction::{BasisCandidate, ExtractionProblem};
use crate::group::{Element, GroupStructure};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_group_size: u64,
    /// Cap on candidate tuples examined by [`brute_force_extract`].
    pub max_candidates: u64,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget {
            max_group_size: 256,
            max_candidates: 10_000_000,
        }
    }
}

impl EnumerationBudget {
    pub fn new(max_group_size: u64, max_candidates: u64) -> Result<Self> {
        if max_group_size < 2 {
            return Err(Error::PreconditionViolated(
                "enumeration budget must allow groups of size 2".into(),
            ));
        }
        Ok(EnumerationBudget {
            max_group_size,
            max_candidates,
        })
    }

    pub fn with_group_size(max_group_size: u64) -> Result<Self> {
        Self::new(max_group_size, Self::default().max_candidates)
    }

    fn admit(&self, group: &GroupStructure) -> Result<u64> {
        let size = group.order();
        match size.to_u64() {
            Some(s) if s <= self.max_group_size => Ok(s),
            _ => Err(Error::BudgetExceeded {
                size,
                max: self.max_group_size,
            }),
        }
    }
}

/// All elements of `G` in lexicographic coordinate order (last coordinate
/// varies fastest).
pub struct Elements {
    group: Arc<GroupStructure>,
    next: Option<Vec<BigUint>>,
}

impl Iterator for Elements {
    type Item = Element;

    fn next(&mut self) -> Option<Element> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.len();
        let mut carried_out = true;
        while i > 0 {
            i -= 1;
            succ[i] += 1u32;
            if succ[i] < *self.group.modulus(i) {
                carried_out = false;
                break;
            }
            succ[i] = BigUint::zero();
        }
        if !carried_out {
            self.next = Some(succ);
        }
        Some(Element::new(&self.group, current).expect("odometer stays in range"))
    }
}

pub fn enumerate_elements(
    group: &Arc<GroupStructure>,
    budget: &EnumerationBudget,
) -> Result<Elements> {
    budget.admit(group)?;
    Ok(Elements {
        group: Arc::clone(group),
        next: Some(vec![BigUint::zero(); group.rank()]),
    })
}

/// Size of the subgroup generated by `elements`, by breadth-first closure.
pub fn closure_size(elements: &[Element], budget: &EnumerationBudget) -> Result<u64> {
    let Some(first) = elements.first() else {
        return Ok(1);
    };
    let group = first.group();
    budget.admit(group)?;
    let identity = Element::identity(group);
    let mut seen: HashSet<Element> = HashSet::from([identity.clone()]);
    let mut frontier = vec![identity];
    let steps: Vec<Element> = elements
        .iter()
        .flat_map(|g| [g.clone(), g.negate()])
        .collect();
    while let Some(x) = frontier.pop() {
        for step in &steps {
            let y = x.add(step)?;
            if seen.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    Ok(seen.len() as u64)
}

/// Basis test by enumeration: slot orders match and the elements generate `G`.
pub fn is_basis_by_closure(cand: &BasisCandidate, budget: &EnumerationBudget) -> Result<bool> {
    let group = cand.group();
    let size = budget.admit(group)?;
    let orders_ok = cand
        .elements()
        .iter()
        .enumerate()
        .all(|(i, e)| e.order() == *group.modulus(i));
    Ok(orders_ok && closure_size(cand.elements(), budget)? == size)
}

/// Exhaustive search for a basis `P_1..P_N` with `|P_i| = p_i^{e_i}` and
/// `Σ m_i P_i = K`. Returns the lexicographically first one.
pub fn brute_force_extract(
    prob: &ExtractionProblem,
    budget: &EnumerationBudget,
) -> Result<Option<BasisCandidate>> {
    let group = prob.group();
    let size = budget.admit(group)?;
    let all: Vec<Element> = enumerate_elements(group, budget)?.collect();
    let slots: Vec<Vec<&Element>> = (0..group.rank())
        .map(|i| {
            all.iter()
                .filter(|e| e.order() == *group.modulus(i))
                .collect()
        })
        .collect();
    if slots.iter().any(Vec::is_empty) {
        return Ok(None);
    }

    let mut idx = vec![0usize; slots.len()];
    let mut examined = 0u64;
    loop {
        examined += 1;
        if examined > budget.max_candidates {
            return Err(Error::CandidateBudgetExceeded(budget.max_candidates));
        }
        let tuple: Vec<Element> = idx.iter().zip(&slots).map(|(&j, s)| s[j].clone()).collect();
        let cand = BasisCandidate::new(group, tuple)?;
        if cand.evaluate(prob.multipliers())? == *prob.element()
            && closure_size(cand.elements(), budget)? == size
        {
            return Ok(Some(cand));
        }

        let mut i = idx.len();
        loop {
            if i == 0 {
                return Ok(None);
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < slots[i].len() {
                break;
            }
            idx[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extraction::verify_solution;

    #[test]
    fn enumeration_order_and_size() {
        let budget = EnumerationBudget::default();
        let g = GroupStructure::from_pairs(&[(2, 1), (2, 1)]).unwrap();
        assert_eq!(enumerate_elements(&g, &budget).unwrap().count(), 4);
        let z4 = GroupStructure::from_pairs(&[(2, 2)]).unwrap();
        let listed: Vec<String> = enumerate_elements(&z4, &budget)
            .unwrap()
            .map(|e| e.to_string())
            .collect();
        assert_eq!(listed, ["(0)", "(1)", "(2)", "(3)"]);
        let g24 = GroupStructure::from_pairs(&[(2, 1), (2, 2)]).unwrap();
        let listed: Vec<String> = enumerate_elements(&g24, &budget)
            .unwrap()
            .map(|e| e.to_string())
            .collect();
        assert_eq!(listed.len(), 8);
        assert_eq!(listed[..3], ["(0,0)", "(0,1)", "(0,2)"]);
        assert_eq!(listed[7], "(1,3)");
    }

    #[test]
    fn budget_is_enforced() {
        let g = GroupStructure::from_pairs(&[(2, 2), (2, 4)]).unwrap();
        assert!(matches!(
            enumerate_elements(&g, &EnumerationBudget::with_group_size(32).unwrap()),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(EnumerationBudget::new(1, 10).is_err());
    }

    #[test]
    fn closures() {
        let budget = EnumerationBudget::default();
        let g24 = GroupStructure::from_pairs(&[(2, 1), (2, 2)]).unwrap();
        assert_eq!(
            closure_size(&Element::canonical_basis(&g24), &budget).unwrap(),
            8
        );
        let g248 = GroupStructure::from_pairs(&[(2, 1), (2, 2), (2, 3)]).unwrap();
        let q = Element::from_u64s(&g248, &[1, 0, 2]).unwrap();
        assert_eq!(closure_size(&[q], &budget).unwrap(), 4);
        assert_eq!(closure_size(&[], &budget).unwrap(), 1);
    }

    #[test]
    fn brute_force_examples() {
        let budget = EnumerationBudget::default();
        let prob = ExtractionProblem::from_u64s(&[(2, 1), (2, 1)], &[1, 0], &[1, 0]).unwrap();
        let w = brute_force_extract(&prob, &budget).unwrap().unwrap();
        assert!(verify_solution(&prob, &w));

        let prob = ExtractionProblem::from_u64s(&[(2, 1), (2, 2)], &[0, 2], &[0, 2]).unwrap();
        let w = brute_force_extract(&prob, &budget).unwrap().unwrap();
        assert_eq!(w.elements()[1].order(), BigUint::from(4u32));
        assert_eq!(
            w.elements()[1].scalar_mul(&BigUint::from(2u32)),
            Element::from_u64s(prob.group(), &[0, 2]).unwrap()
        );

        let prob = ExtractionProblem::from_u64s(&[(2, 2), (2, 4)], &[1, 0], &[0, 4]).unwrap();
        assert_eq!(brute_force_extract(&prob, &budget).unwrap(), None);
        let budget64 = EnumerationBudget::with_group_size(64).unwrap();
        assert_eq!(brute_force_extract(&prob, &budget64).unwrap(), None);
    }

    #[test]
    fn candidate_cap() {
        let prob = ExtractionProblem::from_u64s(&[(2, 2), (2, 4)], &[1, 0], &[0, 4]).unwrap();
        let tiny = EnumerationBudget::new(64, 5).unwrap();
        assert_eq!(
            brute_force_extract(&prob, &tiny).unwrap_err(),
            Error::CandidateBudgetExceeded(5)
        );
    }
}
