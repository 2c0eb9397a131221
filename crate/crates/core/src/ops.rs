//! Group-operation accounting.
//!
//! The extraction algorithms perform their group arithmetic through an
//! [`OpCounter`] owned by the caller. The charging convention is:
//!
//! * addition or subtraction: 1;
//! * negation: 0 (free in coordinates and in most concrete groups);
//! * `n·a`: the cost of double-and-add on `n`, i.e. `bits(n) - 1` doublings
//!   plus `popcount(n) - 1` additions (0 for `n <= 1`);
//! * element order: one exponentiation, `ceil(e_max · log2 p_max)` for the
//!   element's group.
//!
//! Arithmetic itself is coordinate-wise; only the bookkeeping follows the
//! generic-group model.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::arith;
use crate::error::Result;
use crate::group::{Element, GroupStructure};

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct OpCounter {
    additions: u64,
    doublings: u64,
    order_charges: u64,
}

/// Group operations charged for `n·a` by double-and-add.
pub fn double_and_add_cost(n: &BigUint) -> u64 {
    if n <= &BigUint::one() {
        return 0;
    }
    let doublings = n.bits() - 1;
    let additions = n.count_ones() - 1;
    doublings + additions
}

/// `ceil(log2(p_max^e_max))`, the charge for one exponentiation in `group`.
pub fn exponentiation_cost(group: &GroupStructure) -> u64 {
    let top = arith::pow(group.max_prime(), group.max_exponent());
    (top - 1u32).bits()
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Total group operations charged so far.
    pub fn total(&self) -> u64 {
        self.additions + self.doublings + self.order_charges
    }

    pub fn additions(&self) -> u64 {
        self.additions
    }

    pub fn doublings(&self) -> u64 {
        self.doublings
    }

    pub fn order_charges(&self) -> u64 {
        self.order_charges
    }

    pub fn reset(&mut self) {
        *self = Self::default();
    }

    pub fn add(&mut self, a: &Element, b: &Element) -> Result<Element> {
        self.additions += 1;
        a.add(b)
    }

    pub fn sub(&mut self, a: &Element, b: &Element) -> Result<Element> {
        self.additions += 1;
        a.sub(b)
    }

    pub fn mul(&mut self, n: &BigUint, a: &Element) -> Element {
        if n > &BigUint::one() {
            self.doublings += n.bits() - 1;
            self.additions += n.count_ones() - 1;
        }
        a.scalar_mul(n)
    }

    pub fn order(&mut self, a: &Element) -> BigUint {
        self.order_charges += exponentiation_cost(a.group());
        a.order()
    }

    /// `Σ c_i Q_i` over the canonical basis for the given `(index, coefficient)`
    /// terms. Zero terms cost nothing.
    pub fn combine<'a, I>(&mut self, group: &Arc<GroupStructure>, terms: I) -> Result<Element>
    where
        I: IntoIterator<Item = (usize, &'a BigUint)>,
    {
        let mut acc: Option<Element> = None;
        for (i, c) in terms {
            if c.is_zero() {
                continue;
            }
            let term = self.mul(c, &Element::unit(group, i));
            acc = Some(match acc {
                None => term,
                Some(sum) => self.add(&sum, &term)?,
            });
        }
        Ok(acc.unwrap_or_else(|| Element::identity(group)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn double_and_add_charges() {
        assert_eq!(double_and_add_cost(&big(0)), 0);
        assert_eq!(double_and_add_cost(&big(1)), 0);
        assert_eq!(double_and_add_cost(&big(2)), 1);
        assert_eq!(double_and_add_cost(&big(3)), 2);
        assert_eq!(double_and_add_cost(&big(8)), 3);
        assert_eq!(double_and_add_cost(&big(15)), 6);
    }

    #[test]
    fn counted_multiplication_matches_repeated_addition() {
        let g = GroupStructure::from_pairs(&[(2, 1), (2, 3), (2, 4)]).unwrap();
        let a = Element::from_u64s(&g, &[1, 3, 5]).unwrap();
        for n in 0..40u64 {
            let mut ops = OpCounter::new();
            let fast = ops.mul(&big(n), &a);
            let mut slow = Element::identity(&g);
            for _ in 0..n {
                slow = slow.add(&a).unwrap();
            }
            assert_eq!(fast, slow);
            assert_eq!(ops.total(), double_and_add_cost(&big(n)));
        }
    }

    #[test]
    fn order_is_one_exponentiation() {
        let g = GroupStructure::from_pairs(&[(3, 1), (3, 4)]).unwrap();
        assert_eq!(exponentiation_cost(&g), 7); // 81 - 1 = 80 needs 7 bits
        let mut ops = OpCounter::new();
        assert_eq!(ops.order(&Element::unit(&g, 1)), big(81));
        assert_eq!(ops.total(), 7);
    }

    #[test]
    fn combine_skips_zero_terms() {
        let g = GroupStructure::from_pairs(&[(2, 1), (2, 3), (2, 4)]).unwrap();
        let mut ops = OpCounter::new();
        let coeffs = [big(0), big(2), big(8)];
        let k = ops.combine(&g, coeffs.iter().enumerate()).unwrap();
        assert_eq!(k, Element::from_u64s(&g, &[0, 2, 8]).unwrap());
        // 2·Q_2: 1, 8·Q_3: 3, one addition
        assert_eq!(ops.total(), 5);
        let zero = [big(0), big(0), big(0)];
        assert!(ops
            .combine(&g, zero.iter().enumerate())
            .unwrap()
            .is_identity());
    }
}
